/**
 * Figure renderer for experiment CSVs.
 *
 *   render --kind rates         --in rates.csv                 --out rates.svg
 *   render --kind trajectories  --in rates.csv                 --out traj.svg
 *   render --kind decision-map  --in good.csv [--in2 bad.csv]  --out map.svg
 *   render --kind bump-profile  --in profile.csv               --out bump.svg
 *
 * Output is deterministic (fixed styles, no timestamps); schema mismatches
 * exit nonzero.
 */

import { readFileSync, writeFileSync } from "node:fs";
import process from "node:process";
import { pathToFileURL } from "node:url";

import { SchemaError, Table, column, median, numericColumn, parseCsv, requireColumns } from "./csv.js";
import { Frame, Svg, axes, shortNumber } from "./svg.js";

const SERIES_COLORS: Record<string, string> = {
  good_erm: "#1f77b4",
  bad_erm: "#d62728",
  good_dnn: "#2ca02c",
  bad_dnn: "#ff7f0e",
};

interface Args {
  kind: string;
  input: string;
  input2?: string;
  out: string;
}

function parseArgs(argv: string[]): Args {
  const args: Partial<Args> = {};
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    const val = argv[i + 1];
    if (val === undefined) throw new SchemaError(`missing value for ${key}`);
    if (key === "--kind") args.kind = val;
    else if (key === "--in") args.input = val;
    else if (key === "--in2") args.input2 = val;
    else if (key === "--out") args.out = val;
    else throw new SchemaError(`unknown argument ${key}`);
  }
  if (!args.kind || !args.input || !args.out) {
    throw new SchemaError("required: --kind <rates|trajectories|decision-map|bump-profile> --in <csv> --out <svg>");
  }
  return args as Args;
}

/** Per-predictor median of a column at each sample size, sizes ascending. */
function medianSeries(table: Table, valueCol: string): Map<string, Array<[number, number]>> {
  requireColumns(table, ["n", "predictor", valueCol]);
  const ns = numericColumn(table, "n");
  const predictors = column(table, "predictor");
  const values = numericColumn(table, valueCol);
  const groups = new Map<string, Map<number, number[]>>();
  for (let i = 0; i < ns.length; i++) {
    const byN = groups.get(predictors[i]) ?? new Map<number, number[]>();
    groups.set(predictors[i], byN);
    const bucket = byN.get(ns[i]) ?? [];
    byN.set(ns[i], bucket);
    bucket.push(values[i]);
  }
  const out = new Map<string, Array<[number, number]>>();
  for (const [tag, byN] of groups) {
    const pts = [...byN.entries()]
      .map(([n, vals]): [number, number] => [n, median(vals)])
      .sort((a, b) => a[0] - b[0]);
    out.set(tag, pts);
  }
  return out;
}

function slopeOf(points: Array<[number, number]>): number | null {
  const usable = points.filter(([, y]) => y > 0);
  if (usable.length < 2) return null;
  const xs = usable.map(([n]) => Math.log(n / Math.log(n)));
  const ys = usable.map(([, y]) => Math.log(y));
  const mx = xs.reduce((a, b) => a + b, 0) / xs.length;
  const my = ys.reduce((a, b) => a + b, 0) / ys.length;
  let num = 0;
  let den = 0;
  for (let i = 0; i < xs.length; i++) {
    num += (xs[i] - mx) * (ys[i] - my);
    den += (xs[i] - mx) ** 2;
  }
  return den > 0 ? num / den : null;
}

function renderRates(table: Table): string {
  const series = medianSeries(table, "excess_risk");
  const svg = new Svg(560, 400);
  const frame: Frame = { x0: 70, y0: 30, w: 460, h: 310 };
  let lo = Infinity;
  let hi = 0;
  let nLo = Infinity;
  let nHi = 0;
  for (const pts of series.values()) {
    for (const [n, y] of pts) {
      if (y > 0) {
        lo = Math.min(lo, y);
        hi = Math.max(hi, y);
      }
      nLo = Math.min(nLo, n);
      nHi = Math.max(nHi, n);
    }
  }
  if (!Number.isFinite(lo)) throw new SchemaError("no positive excess risks to plot");
  const { sx, sy } = axes(svg, frame, [nLo, nHi], [lo * 0.8, hi * 1.25],
    { xLog: true, yLog: true, xLabel: "n", yLabel: "median excess risk" });
  let legendY = frame.y0 + 12;
  for (const [tag, pts] of [...series.entries()].sort()) {
    const color = SERIES_COLORS[tag] ?? "#555";
    const pix = pts.filter(([, y]) => y > 0).map(([n, y]): [number, number] => [sx(n), sy(y)]);
    svg.polyline(pix, color);
    for (const [px, py] of pix) svg.circle(px, py, 2.5, color);
    const slope = slopeOf(pts);
    const label = slope === null ? tag : `${tag}: slope ${slope.toFixed(3)}`;
    svg.text(frame.x0 + frame.w - 6, legendY, label, { anchor: "end", fill: color });
    legendY += 14;
  }
  return svg.render();
}

function renderTrajectories(table: Table): string {
  const series = medianSeries(table, "risk");
  const svg = new Svg(560, 400);
  const frame: Frame = { x0: 70, y0: 30, w: 460, h: 310 };
  let lo = Infinity;
  let hi = -Infinity;
  let nLo = Infinity;
  let nHi = 0;
  for (const pts of series.values()) {
    for (const [n, y] of pts) {
      lo = Math.min(lo, y);
      hi = Math.max(hi, y);
      nLo = Math.min(nLo, n);
      nHi = Math.max(nHi, n);
    }
  }
  const pad = (hi - lo || 1) * 0.1;
  const { sx, sy } = axes(svg, frame, [nLo, nHi], [lo - pad, hi + pad],
    { xLog: true, xLabel: "n", yLabel: "median risk" });
  let legendY = frame.y0 + 12;
  for (const [tag, pts] of [...series.entries()].sort()) {
    const color = SERIES_COLORS[tag] ?? "#555";
    svg.polyline(pts.map(([n, y]): [number, number] => [sx(n), sy(y)]), color);
    const last = pts[pts.length - 1];
    svg.text(frame.x0 + frame.w - 6, legendY, `${tag}: final ${shortNumber(last[1])}`,
      { anchor: "end", fill: color });
    legendY += 14;
  }
  return svg.render();
}

function heatColor(value: number): string {
  // blue for negative, red for positive, lighter as |value| shrinks
  const v = Math.max(-1, Math.min(1, value));
  const t = Math.abs(v);
  const mix = (c: number) => Math.round(255 - (255 - c) * t);
  return v >= 0 ? `rgb(255,${mix(60)},${mix(60)})` : `rgb(${mix(60)},${mix(90)},255)`;
}

function gridOf(table: Table): { res: number; values: Map<string, number> } {
  requireColumns(table, ["x1", "x2", "prediction"]);
  const res = Math.round(Math.sqrt(table.rows.length));
  if (res * res !== table.rows.length) {
    throw new SchemaError(`decision-map CSV must be a full square grid, got ${table.rows.length} rows`);
  }
  const x1 = numericColumn(table, "x1");
  const x2 = numericColumn(table, "x2");
  const pred = numericColumn(table, "prediction");
  const values = new Map<string, number>();
  for (let i = 0; i < pred.length; i++) {
    values.set(`${x1[i]}|${x2[i]}`, pred[i]);
  }
  return { res, values };
}

function drawPanel(svg: Svg, frame: Frame, table: Table, title: string): void {
  const { res } = gridOf(table);
  const x1 = numericColumn(table, "x1");
  const x2 = numericColumn(table, "x2");
  const pred = numericColumn(table, "prediction");
  const cell = frame.w / res;
  for (let i = 0; i < pred.length; i++) {
    const col = Math.round((x1[i] + 1) / 2 * res - 0.5);
    const row = Math.round((x2[i] + 1) / 2 * res - 0.5);
    svg.rect(frame.x0 + col * cell, frame.y0 + frame.h - (row + 1) * cell, cell + 0.5, cell + 0.5,
      heatColor(pred[i]));
  }
  svg.text(frame.x0 + frame.w / 2, frame.y0 - 8, title, { anchor: "middle", size: 13 });
}

function renderDecisionMap(table: Table, second: Table | null): string {
  const panel = 300;
  const gap = 40;
  const width = second ? 2 * panel + 3 * gap : panel + 2 * gap;
  const svg = new Svg(width, panel + 70);
  drawPanel(svg, { x0: gap, y0: 40, w: panel, h: panel }, table, second ? "good" : "prediction");
  if (second) {
    drawPanel(svg, { x0: panel + 2 * gap, y0: 40, w: panel, h: panel }, second, "bad");
  }
  return svg.render();
}

function renderBumpProfile(table: Table): string {
  requireColumns(table, ["x1", "prediction"]);
  const x = numericColumn(table, "x1");
  const y = numericColumn(table, "prediction");
  const svg = new Svg(560, 340);
  const frame: Frame = { x0: 60, y0: 25, w: 470, h: 260 };
  const yLo = Math.min(0, ...y);
  const yHi = Math.max(1, ...y);
  const { sx, sy } = axes(svg, frame, [Math.min(...x), Math.max(...x)], [yLo - 0.08, yHi + 0.08],
    { xLabel: "x", yLabel: "unit output" });
  for (const level of [0, 1]) {
    svg.line(frame.x0, sy(level), frame.x0 + frame.w, sy(level), "#bbb");
  }
  const pts = x.map((v, i): [number, number] => [sx(v), sy(y[i])]);
  svg.polyline(pts, "#ff7f0e", 2);
  return svg.render();
}

export function render(args: Args): string {
  const table = parseCsv(readFileSync(args.input, "utf-8"));
  switch (args.kind) {
    case "rates":
      return renderRates(table);
    case "trajectories":
      return renderTrajectories(table);
    case "decision-map": {
      const second = args.input2 ? parseCsv(readFileSync(args.input2, "utf-8")) : null;
      return renderDecisionMap(table, second);
    }
    case "bump-profile":
      return renderBumpProfile(table);
    default:
      throw new SchemaError(`unknown figure kind '${args.kind}'`);
  }
}

function main(): void {
  try {
    const args = parseArgs(process.argv.slice(2));
    writeFileSync(args.out, render(args));
    console.log(`wrote ${args.out}`);
  } catch (err) {
    if (err instanceof SchemaError || (err as NodeJS.ErrnoException)?.code === "ENOENT") {
      console.error(`error: ${(err as Error).message}`);
      process.exit(1);
    }
    throw err;
  }
}

if (process.argv[1] && pathToFileURL(process.argv[1]).href === import.meta.url) {
  main();
}
