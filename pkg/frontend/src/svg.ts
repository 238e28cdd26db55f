/** Deterministic SVG line charts: same spec and data, same bytes. */

export interface Point {
  x: number;
  y: number;
}

export interface Series {
  label: string;
  points: Point[];
}

export interface ReferenceLine {
  label: string;
  value: number;
}

export interface ChartSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  xLog?: boolean;
  yLog?: boolean;
  series: Series[];
  referenceLines?: ReferenceLine[];
}

const WIDTH = 640;
const HEIGHT = 420;
const MARGIN = { top: 36, right: 20, bottom: 48, left: 70 };
const PLOT_W = WIDTH - MARGIN.left - MARGIN.right;
const PLOT_H = HEIGHT - MARGIN.top - MARGIN.bottom;

const PALETTE = [
  "#1f6fb2", "#d1495b", "#3c8d4e", "#8c6bb1",
  "#e08214", "#5ab4ac", "#878787", "#b2182b",
  "#4393c3", "#762a83", "#1b7837", "#b8860b",
  "#2166ac", "#d6604d", "#542788", "#66bd63",
];

function px(v: number): string {
  const s = v.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
}

function tickText(v: number): string {
  return String(Number(v.toPrecision(4)));
}

function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

interface Scale {
  (v: number): number;
  ticks: number[];
}

function linearScale(lo: number, hi: number, r0: number, r1: number): Scale {
  if (lo === hi) {
    lo -= 1;
    hi += 1;
  }
  const f = ((v: number) => r0 + ((v - lo) / (hi - lo)) * (r1 - r0)) as Scale;
  const span = hi - lo;
  const raw = span / 5;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const norm = raw / mag;
  const step = (norm <= 1 ? 1 : norm <= 2 ? 2 : norm <= 5 ? 5 : 10) * mag;
  const ticks: number[] = [];
  for (let t = Math.ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) {
    ticks.push(Math.abs(t) < step * 1e-9 ? 0 : t);
  }
  f.ticks = ticks;
  return f;
}

function logScale(lo: number, hi: number, r0: number, r1: number): Scale {
  if (lo <= 0 || hi <= 0) {
    throw new Error(`log scale needs positive data, got [${lo}, ${hi}]`);
  }
  if (lo === hi) {
    lo /= 2;
    hi *= 2;
  }
  const llo = Math.log10(lo);
  const lhi = Math.log10(hi);
  const f = ((v: number) => r0 + ((Math.log10(v) - llo) / (lhi - llo)) * (r1 - r0)) as Scale;
  const ticks: number[] = [];
  for (let k = Math.floor(llo); k <= Math.ceil(lhi); k++) {
    for (const m of [1, 2, 5]) {
      const t = m * Math.pow(10, k);
      if (t >= lo * (1 - 1e-12) && t <= hi * (1 + 1e-12)) ticks.push(t);
    }
  }
  f.ticks = ticks;
  return f;
}

function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  return [lo, hi];
}

/** Render a line chart with optional dashed horizontal reference lines. */
export function renderChart(spec: ChartSpec): string {
  const xs: number[] = [];
  const ys: number[] = [];
  for (const s of spec.series) {
    for (const p of s.points) {
      xs.push(p.x);
      ys.push(p.y);
    }
  }
  if (xs.length === 0) throw new Error(`"${spec.title}": no points to draw`);
  for (const ref of spec.referenceLines ?? []) ys.push(ref.value);

  const [xLo, xHi] = extent(xs);
  let [yLo, yHi] = extent(ys);
  if (!spec.yLog) {
    const pad = yLo === yHi ? 1 : 0.05 * (yHi - yLo);
    yLo -= pad;
    yHi += pad;
  }
  const sx = spec.xLog
    ? logScale(xLo, xHi, MARGIN.left, MARGIN.left + PLOT_W)
    : linearScale(xLo, xHi, MARGIN.left, MARGIN.left + PLOT_W);
  const sy = spec.yLog
    ? logScale(yLo, yHi, MARGIN.top + PLOT_H, MARGIN.top)
    : linearScale(yLo, yHi, MARGIN.top + PLOT_H, MARGIN.top);

  const out: string[] = [];
  out.push(
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${WIDTH} ${HEIGHT}" ` +
      `font-family="Helvetica, Arial, sans-serif" font-size="12">`,
  );
  out.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>`);
  out.push(
    `<text x="${px(WIDTH / 2)}" y="20" text-anchor="middle" font-size="14">` +
      `${escapeXml(spec.title)}</text>`,
  );

  // gridlines and ticks
  for (const t of sx.ticks) {
    const X = px(sx(t));
    out.push(
      `<line x1="${X}" y1="${px(MARGIN.top)}" x2="${X}" ` +
        `y2="${px(MARGIN.top + PLOT_H)}" stroke="#e0e0e0"/>`,
    );
    out.push(
      `<text x="${X}" y="${px(MARGIN.top + PLOT_H + 16)}" text-anchor="middle">` +
        `${tickText(t)}</text>`,
    );
  }
  for (const t of sy.ticks) {
    const Y = px(sy(t));
    out.push(
      `<line x1="${px(MARGIN.left)}" y1="${Y}" ` +
        `x2="${px(MARGIN.left + PLOT_W)}" y2="${Y}" stroke="#e0e0e0"/>`,
    );
    out.push(
      `<text x="${px(MARGIN.left - 6)}" y="${px(sy(t) + 4)}" text-anchor="end">` +
        `${tickText(t)}</text>`,
    );
  }

  // frame and axis labels
  out.push(
    `<rect x="${px(MARGIN.left)}" y="${px(MARGIN.top)}" width="${px(PLOT_W)}" ` +
      `height="${px(PLOT_H)}" fill="none" stroke="#333333"/>`,
  );
  out.push(
    `<text x="${px(MARGIN.left + PLOT_W / 2)}" y="${px(HEIGHT - 10)}" ` +
      `text-anchor="middle">${escapeXml(spec.xLabel)}</text>`,
  );
  out.push(
    `<text x="16" y="${px(MARGIN.top + PLOT_H / 2)}" text-anchor="middle" ` +
      `transform="rotate(-90 16 ${px(MARGIN.top + PLOT_H / 2)})">` +
      `${escapeXml(spec.yLabel)}</text>`,
  );

  // reference lines carry their analytic value verbatim in data-value
  for (const ref of spec.referenceLines ?? []) {
    const Y = px(sy(ref.value));
    out.push(
      `<line x1="${px(MARGIN.left)}" y1="${Y}" x2="${px(MARGIN.left + PLOT_W)}" ` +
        `y2="${Y}" stroke="#555555" stroke-dasharray="6 4" ` +
        `data-ref="${escapeXml(ref.label)}" data-value="${ref.value}"/>`,
    );
    out.push(
      `<text x="${px(MARGIN.left + PLOT_W - 4)}" y="${px(sy(ref.value) - 4)}" ` +
        `text-anchor="end" fill="#555555">${escapeXml(ref.label)}</text>`,
    );
  }

  // series, with point markers and a legend stacked at the top right
  spec.series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const pts = [...s.points].sort((a, b) => a.x - b.x);
    const path = pts.map((p) => `${px(sx(p.x))},${px(sy(p.y))}`).join(" ");
    out.push(
      `<polyline points="${path}" fill="none" stroke="${color}" stroke-width="1.5"/>`,
    );
    for (const p of pts) {
      out.push(
        `<circle cx="${px(sx(p.x))}" cy="${px(sy(p.y))}" r="2.5" fill="${color}"/>`,
      );
    }
    const ly = MARGIN.top + 10 + 15 * i;
    const lx = MARGIN.left + PLOT_W - 150;
    out.push(
      `<line x1="${px(lx)}" y1="${px(ly - 4)}" x2="${px(lx + 18)}" ` +
        `y2="${px(ly - 4)}" stroke="${color}" stroke-width="1.5"/>`,
    );
    out.push(`<text x="${px(lx + 24)}" y="${px(ly)}">${escapeXml(s.label)}</text>`);
  });

  out.push("</svg>");
  return out.join("\n") + "\n";
}
