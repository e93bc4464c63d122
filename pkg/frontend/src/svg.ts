/**
 * Small SVG builder: enough for axes, polylines, rectangles and text.
 * No DOM, no dependencies; output is a standalone .svg document.
 */

export const WIDTH = 800;
export const HEIGHT = 560;
export const MARGIN = { left: 86, right: 150, top: 48, bottom: 64 };

export interface Scale {
  (value: number): number;
  domain: [number, number];
}

export function linearScale(
  domain: [number, number],
  range: [number, number],
): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const fn = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  fn.domain = domain;
  return fn;
}

/** Round-number tick positions covering the domain (about n ticks). */
export function ticks(domain: [number, number], n = 6): number[] {
  const [lo, hi] = domain;
  if (!(hi > lo)) return [lo];
  const step = Math.pow(10, Math.floor(Math.log10((hi - lo) / n)));
  const err = (hi - lo) / n / step;
  const factor = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const s = step * factor;
  const start = Math.ceil(lo / s) * s;
  const out: number[] = [];
  for (let v = start; v <= hi + 1e-12 * Math.abs(hi); v += s) {
    out.push(Math.abs(v) < 1e-12 * s ? 0 : v);
  }
  return out;
}

export function fmtTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(1);
  return String(parseFloat(v.toPrecision(6)));
}

export function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
}

export class Svg {
  private parts: string[] = [];

  constructor(
    readonly width = WIDTH,
    readonly height = HEIGHT,
  ) {}

  add(fragment: string): void {
    this.parts.push(fragment);
  }

  rect(x: number, y: number, w: number, h: number, fill: string,
       extra = ""): void {
    this.add(
      `<rect x="${r(x)}" y="${r(y)}" width="${r(w)}" height="${r(h)}" ` +
        `fill="${fill}" ${extra}/>`,
    );
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string,
       width = 1): void {
    this.add(
      `<line x1="${r(x1)}" y1="${r(y1)}" x2="${r(x2)}" y2="${r(y2)}" ` +
        `stroke="${stroke}" stroke-width="${width}"/>`,
    );
  }

  polyline(points: Array<[number, number]>, stroke: string, width = 2): void {
    if (points.length === 0) return;
    const pts = points.map(([x, y]) => `${r(x)},${r(y)}`).join(" ");
    this.add(
      `<polyline points="${pts}" fill="none" stroke="${stroke}" ` +
        `stroke-width="${width}"/>`,
    );
  }

  text(x: number, y: number, content: string, opts: {
    size?: number; anchor?: string; rotate?: number; fill?: string;
  } = {}): void {
    const size = opts.size ?? 14;
    const anchor = opts.anchor ?? "start";
    const fill = opts.fill ?? "#222";
    const transform = opts.rotate
      ? ` transform="rotate(${opts.rotate} ${r(x)} ${r(y)})"`
      : "";
    this.add(
      `<text x="${r(x)}" y="${r(y)}" font-size="${size}" ` +
        `font-family="sans-serif" text-anchor="${anchor}" fill="${fill}"` +
        `${transform}>${esc(content)}</text>`,
    );
  }

  axes(xScale: Scale, yScale: Scale, xLabel: string, yLabel: string,
       title: string): void {
    const x0 = MARGIN.left;
    const x1 = this.width - MARGIN.right;
    const y0 = this.height - MARGIN.bottom;
    const y1 = MARGIN.top;
    this.line(x0, y0, x1, y0, "#222");
    this.line(x0, y0, x0, y1, "#222");
    for (const t of ticks(xScale.domain)) {
      const px = xScale(t);
      this.line(px, y0, px, y0 + 5, "#222");
      this.text(px, y0 + 20, fmtTick(t), { anchor: "middle", size: 12 });
    }
    for (const t of ticks(yScale.domain)) {
      const py = yScale(t);
      this.line(x0 - 5, py, x0, py, "#222");
      this.text(x0 - 8, py + 4, fmtTick(t), { anchor: "end", size: 12 });
    }
    this.text((x0 + x1) / 2, this.height - 18, xLabel, { anchor: "middle" });
    this.text(22, (y0 + y1) / 2, yLabel, { anchor: "middle", rotate: -90 });
    if (title) {
      this.text((x0 + x1) / 2, 26, title, { anchor: "middle", size: 16 });
    }
  }

  render(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" ` +
      `height="${this.height}" viewBox="0 0 ${this.width} ${this.height}">\n` +
      `<rect width="${this.width}" height="${this.height}" fill="white"/>\n` +
      this.parts.join("\n") +
      "\n</svg>\n"
    );
  }
}

function r(v: number): string {
  return String(Math.round(v * 100) / 100);
}
