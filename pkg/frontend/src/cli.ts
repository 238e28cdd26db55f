/** Command line: one figure id per invocation, SVG out.
 *
 * usage: onebit-relay-figures <figure-id> <csv-file-or-results-dir> [--out dir]
 *
 * The second argument may be the CSV itself or the experiment output
 * directory containing it under the recipe's expected file name. Exit code 0
 * on success, 1 for any usage, file, or data error; on error no file is
 * written.
 */

import * as fs from "node:fs";
import * as path from "node:path";
import { pathToFileURL } from "node:url";

import { FIGURE_IDS, RECIPES } from "./figures.js";
import { render } from "./render.js";

export function main(argv: string[]): number {
  const args: string[] = [];
  let outDir = "figures";
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i]!;
    if (a === "--out") {
      const v = argv[++i];
      if (!v) {
        console.error("--out needs a directory");
        return 1;
      }
      outDir = v;
    } else if (a === "-h" || a === "--help") {
      console.log("usage: onebit-relay-figures <figure-id> <csv-file-or-results-dir> [--out dir]");
      console.log(`figure ids: ${FIGURE_IDS.join(", ")}`);
      return 0;
    } else {
      args.push(a);
    }
  }
  if (args.length !== 2) {
    console.error("usage: onebit-relay-figures <figure-id> <csv-file-or-results-dir> [--out dir]");
    return 1;
  }
  const [id, dataPath] = args as [string, string];
  const recipe = RECIPES[id];
  if (!recipe) {
    console.error(`unknown figure id "${id}" (known: ${FIGURE_IDS.join(", ")})`);
    return 1;
  }

  let csvPath = dataPath;
  try {
    if (fs.statSync(dataPath).isDirectory()) {
      csvPath = path.join(dataPath, recipe.csvFile);
    }
    const svg = render(recipe, fs.readFileSync(csvPath, "utf8"), csvPath);
    fs.mkdirSync(outDir, { recursive: true });
    const outFile = path.join(outDir, `${recipe.id}.svg`);
    fs.writeFileSync(outFile, svg);
    console.log(`${recipe.id} -> ${outFile}`);
    return 0;
  } catch (err) {
    console.error(err instanceof Error ? err.message : String(err));
    return 1;
  }
}

const entry = process.argv[1];
if (entry && import.meta.url === pathToFileURL(entry).href) {
  process.exit(main(process.argv.slice(2)));
}
