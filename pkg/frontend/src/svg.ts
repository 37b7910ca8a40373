/**
 * Deterministic SVG assembly: fixed styles, no timestamps, stable number
 * formatting, so identical input always yields identical bytes.
 */

export function fmt(x: number): string {
  if (!Number.isFinite(x)) throw new Error(`non-finite coordinate: ${x}`);
  const s = x.toPrecision(8);
  return s.includes(".") ? s.replace(/\.?0+$/, "").replace(/\.?0+e/, "e") : s;
}

export type Scale = (x: number) => number;

export function linScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0 || 1;
  return (x) => r0 + ((x - d0) / span) * (r1 - r0);
}

export function logScale(d0: number, d1: number, r0: number, r1: number): Scale {
  if (d0 <= 0 || d1 <= 0) throw new Error("log scale needs positive domain");
  const l0 = Math.log10(d0);
  const span = Math.log10(d1) - l0 || 1;
  return (x) => r0 + ((Math.log10(x) - l0) / span) * (r1 - r0);
}

export function logTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(lo) - 1e-9); Math.pow(10, e) <= hi * (1 + 1e-9); e++) {
    ticks.push(Math.pow(10, e));
  }
  if (ticks.length === 0) ticks.push(lo, hi);
  return ticks;
}

export function linTicks(lo: number, hi: number, count = 5): number[] {
  const span = hi - lo || 1;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const mult = [1, 2, 5, 10].find((m) => span / (step * m) <= count) ?? 10;
  const s = step * mult;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / s) * s; v <= hi + 1e-12; v += s) ticks.push(v);
  return ticks;
}

export class Svg {
  private parts: string[] = [];

  constructor(readonly width: number, readonly height: number) {}

  add(el: string): void {
    this.parts.push(el);
  }

  rect(x: number, y: number, w: number, h: number, fill: string): void {
    this.add(`<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" fill="${fill}"/>`);
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, width = 1): void {
    this.add(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" ` +
        `stroke="${stroke}" stroke-width="${width}"/>`,
    );
  }

  polyline(points: Array<[number, number]>, stroke: string, width = 1.5): void {
    const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.add(`<polyline points="${pts}" fill="none" stroke="${stroke}" stroke-width="${width}"/>`);
  }

  circle(x: number, y: number, r: number, fill: string): void {
    this.add(`<circle cx="${fmt(x)}" cy="${fmt(y)}" r="${fmt(r)}" fill="${fill}"/>`);
  }

  text(x: number, y: number, content: string, opts: { size?: number; anchor?: string; fill?: string } = {}): void {
    const size = opts.size ?? 11;
    const anchor = opts.anchor ?? "start";
    const fill = opts.fill ?? "#222";
    this.add(
      `<text x="${fmt(x)}" y="${fmt(y)}" font-family="Helvetica,Arial,sans-serif" ` +
        `font-size="${size}" text-anchor="${anchor}" fill="${fill}">${escapeXml(content)}</text>`,
    );
  }

  render(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" height="${this.height}" ` +
      `viewBox="0 0 ${this.width} ${this.height}">\n<rect width="100%" height="100%" fill="white"/>\n` +
      this.parts.join("\n") +
      "\n</svg>\n"
    );
  }
}

function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export interface Frame {
  x0: number;
  y0: number;
  w: number;
  h: number;
}

/** Draw a plot frame with tick marks and labels; returns pixel scales. */
export function axes(
  svg: Svg,
  frame: Frame,
  xDomain: [number, number],
  yDomain: [number, number],
  opts: { xLog?: boolean; yLog?: boolean; xLabel?: string; yLabel?: string },
): { sx: Scale; sy: Scale } {
  const sx = (opts.xLog ? logScale : linScale)(xDomain[0], xDomain[1], frame.x0, frame.x0 + frame.w);
  const sy = (opts.yLog ? logScale : linScale)(yDomain[0], yDomain[1], frame.y0 + frame.h, frame.y0);
  svg.line(frame.x0, frame.y0 + frame.h, frame.x0 + frame.w, frame.y0 + frame.h, "#444");
  svg.line(frame.x0, frame.y0, frame.x0, frame.y0 + frame.h, "#444");
  const xTicks = opts.xLog ? logTicks(xDomain[0], xDomain[1]) : linTicks(xDomain[0], xDomain[1]);
  for (const t of xTicks) {
    const px = sx(t);
    svg.line(px, frame.y0 + frame.h, px, frame.y0 + frame.h + 4, "#444");
    svg.text(px, frame.y0 + frame.h + 16, shortNumber(t), { anchor: "middle", size: 10 });
  }
  const yTicks = opts.yLog ? logTicks(yDomain[0], yDomain[1]) : linTicks(yDomain[0], yDomain[1]);
  for (const t of yTicks) {
    const py = sy(t);
    svg.line(frame.x0 - 4, py, frame.x0, py, "#444");
    svg.text(frame.x0 - 7, py + 3, shortNumber(t), { anchor: "end", size: 10 });
  }
  if (opts.xLabel) {
    svg.text(frame.x0 + frame.w / 2, frame.y0 + frame.h + 32, opts.xLabel, { anchor: "middle" });
  }
  if (opts.yLabel) {
    svg.text(frame.x0 - 6, frame.y0 - 8, opts.yLabel, { anchor: "start" });
  }
  return { sx, sy };
}

export function shortNumber(x: number): string {
  if (x === 0) return "0";
  const ax = Math.abs(x);
  if (ax >= 10000 || ax < 0.001) {
    const e = Math.floor(Math.log10(ax));
    const mant = x / Math.pow(10, e);
    const m = Math.abs(mant - 1) < 1e-9 ? "" : `${Number(mant.toPrecision(3))}·`;
    return `${m}1e${e}`;
  }
  return String(Number(x.toPrecision(4)));
}
