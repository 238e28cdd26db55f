import * as fs from "node:fs";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { EmptyCsvError, MissingColumnError } from "../src/csv.js";
import { FIGURE_IDS, RECIPES } from "../src/figures.js";
import { render } from "../src/render.js";

function fixture(id: string): string {
  const recipe = RECIPES[id]!;
  const p = fileURLToPath(new URL(`../fixtures/${id}/${recipe.csvFile}`, import.meta.url));
  return fs.readFileSync(p, "utf8");
}

describe("render", () => {
  for (const id of FIGURE_IDS) {
    it(`renders ${id} from its fixture`, () => {
      const svg = render(RECIPES[id]!, fixture(id));
      expect(svg.startsWith("<svg ")).toBe(true);
      expect(svg.trimEnd().endsWith("</svg>")).toBe(true);
      expect(svg).toContain("<polyline");
    });
  }

  it("is byte-identical across repeated renders", () => {
    const a = render(RECIPES.fig5b!, fixture("fig5b"));
    const b = render(RECIPES.fig5b!, fixture("fig5b"));
    expect(a).toBe(b);
  });

  it("places the source-scaling reference lines at the analytic values", () => {
    const svg = render(RECIPES.fig5b!, fixture("fig5b"));
    expect(svg).toContain(`data-value="1"`);
    expect(svg).toContain(`data-value="${4 / Math.PI ** 2}"`);
  });

  it("places the relay-scaling reference lines at the analytic values", () => {
    const svg = render(RECIPES.fig7b!, fixture("fig7b"));
    expect(svg).toContain(`data-value="${2 / Math.PI}"`);
    expect(svg).toContain(`data-value="${4 / Math.PI ** 2}"`);
  });

  it("draws one line per hardware case in the power figures", () => {
    const svg = render(RECIPES.fig5a!, fixture("fig5a"));
    const lines = svg.match(/<polyline/g) ?? [];
    expect(lines.length).toBe(4);
  });

  it("keeps the optimized and uniform allocation series apart", () => {
    const svg = render(RECIPES.fig8!, fixture("fig8"));
    expect(svg).toContain("optimized / IV");
    expect(svg).toContain("uniform / I");
    expect(svg).toContain("uniform / IV");
  });

  it("names a missing column", () => {
    const bad = "experiment,x_value,series\r\nrate-ratio,100,II/I\r\n";
    expect(() => render(RECIPES.fig5b!, bad, "bad.csv")).toThrow(MissingColumnError);
    expect(() => render(RECIPES.fig5b!, bad, "bad.csv")).toThrow('missing column "value"');
  });

  it("rejects an empty CSV", () => {
    expect(() => render(RECIPES.fig3!, "", "empty.csv")).toThrow(EmptyCsvError);
  });

  it("rejects a header-only CSV", () => {
    const headerOnly = fixture("fig3").split("\r\n")[0]! + "\r\n";
    expect(() => render(RECIPES.fig3!, headerOnly, "h.csv")).toThrow(EmptyCsvError);
  });

  it("rejects a CSV whose rows all miss the filter", () => {
    const text = fixture("fig5a");
    expect(() => render(RECIPES.fig7a!, text, "source-run.csv")).toThrow(
      "no rows match",
    );
  });
});
