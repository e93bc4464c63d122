/** Overlaid line plot: one curve per model column versus the x axis. */

import { SweepTable } from "./csv";
import { PlotSpec } from "./spec";
import { HEIGHT, MARGIN, Svg, WIDTH, linearScale } from "./svg";

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                 "#8c564b"];

export interface RenderSummary {
  kind: string;
  series: number;
  points: number;
  valueMin: number;
  valueMax: number;
}

function finiteExtent(arrays: Float64Array[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const arr of arrays) {
    for (const v of arr) {
      if (Number.isFinite(v)) {
        lo = Math.min(lo, v);
        hi = Math.max(hi, v);
      }
    }
  }
  if (!(hi >= lo)) throw new Error("no finite data to plot");
  if (hi === lo) {
    hi += 1;
    lo -= 1;
  }
  return [lo, hi];
}

export function renderLines(spec: PlotSpec, table: SweepTable): {
  svg: string;
  summary: RenderSummary;
} {
  const x = table.columns.get(spec.x)!;
  const series = (spec.series ?? []).map((s) => ({
    label: s.label,
    values: table.columns.get(s.column)!,
  }));

  const [xLo, xHi] = finiteExtent([x]);
  let [yLo, yHi] = finiteExtent(series.map((s) => s.values));
  if (spec.y_range) {
    [yLo, yHi] = spec.y_range;
  }
  const pad = 0.06 * (yHi - yLo);
  const xScale = linearScale([xLo, xHi],
                             [MARGIN.left, WIDTH - MARGIN.right]);
  const yScale = linearScale([yLo - pad, yHi + pad],
                             [HEIGHT - MARGIN.bottom, MARGIN.top]);

  const svg = new Svg();
  svg.axes(xScale, yScale, spec.x_label ?? spec.x, spec.y_label ?? "value",
           spec.title ?? "");
  if (yLo < 0 && yHi > 0) {
    svg.line(MARGIN.left, yScale(0), WIDTH - MARGIN.right, yScale(0),
             "#bbb", 1);
  }

  series.forEach((s, k) => {
    const color = PALETTE[k % PALETTE.length];
    // NaN cells (error markers) break the line into segments
    let segment: Array<[number, number]> = [];
    const inRange = (v: number) =>
      Number.isFinite(v) && v >= yLo - pad && v <= yHi + pad;
    for (let i = 0; i < table.rows; i++) {
      if (Number.isFinite(x[i]) && inRange(s.values[i])) {
        segment.push([xScale(x[i]), yScale(s.values[i])]);
      } else if (segment.length) {
        svg.polyline(segment, color);
        segment = [];
      }
    }
    svg.polyline(segment, color);
    const ly = MARGIN.top + 18 + 22 * k;
    const lx = WIDTH - MARGIN.right + 14;
    svg.line(lx, ly - 4, lx + 26, ly - 4, color, 3);
    svg.text(lx + 32, ly, s.label, { size: 13 });
  });

  return {
    svg: svg.render(),
    summary: {
      kind: "lines",
      series: series.length,
      points: table.rows,
      valueMin: yLo,
      valueMax: yHi,
    },
  };
}
