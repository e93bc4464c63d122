/** Heatmap of one observable over a two-axis sweep grid. */

import { SweepTable } from "./csv";
import { viridis } from "./colormap";
import { PlotSpec } from "./spec";
import { HEIGHT, MARGIN, Svg, WIDTH, fmtTick, linearScale } from "./svg";
import { RenderSummary } from "./lineplot";

function uniqueSorted(values: Float64Array): number[] {
  return [...new Set(Array.from(values))].sort((a, b) => a - b);
}

export function renderHeatmap(spec: PlotSpec, table: SweepTable): {
  svg: string;
  summary: RenderSummary;
} {
  const xCol = table.columns.get(spec.x)!;
  const yCol = table.columns.get(spec.y as string)!;
  const vCol = table.columns.get(spec.value as string)!;
  const xs = uniqueSorted(xCol);
  const ys = uniqueSorted(yCol);
  if (xs.length * ys.length !== table.rows) {
    throw new Error(
      `CSV is not a full grid: ${xs.length} x ${ys.length} axes vs ` +
        `${table.rows} rows`,
    );
  }

  const [vLo, vHi] = spec.value_range ?? [0, 1];
  const xIndex = new Map(xs.map((v, i) => [v, i]));
  const yIndex = new Map(ys.map((v, i) => [v, i]));
  const grid: number[][] = Array.from({ length: xs.length }, () =>
    new Array(ys.length).fill(NaN),
  );
  let vMin = Infinity;
  let vMax = -Infinity;
  for (let i = 0; i < table.rows; i++) {
    const gi = xIndex.get(xCol[i])!;
    const gj = yIndex.get(yCol[i])!;
    grid[gi][gj] = vCol[i];
    if (Number.isFinite(vCol[i])) {
      vMin = Math.min(vMin, vCol[i]);
      vMax = Math.max(vMax, vCol[i]);
    }
  }

  // cell edges from midpoints so uneven axes still tile exactly
  const edges = (vals: number[]): number[] => {
    const e = [vals[0] - (vals[1] - vals[0]) / 2];
    for (let i = 0; i < vals.length - 1; i++) {
      e.push((vals[i] + vals[i + 1]) / 2);
    }
    e.push(vals[vals.length - 1]
           + (vals[vals.length - 1] - vals[vals.length - 2]) / 2);
    return e;
  };
  const xe = xs.length > 1 ? edges(xs) : [xs[0] - 0.5, xs[0] + 0.5];
  const ye = ys.length > 1 ? edges(ys) : [ys[0] - 0.5, ys[0] + 0.5];

  const xScale = linearScale([xe[0], xe[xe.length - 1]],
                             [MARGIN.left, WIDTH - MARGIN.right]);
  const yScale = linearScale([ye[0], ye[ye.length - 1]],
                             [HEIGHT - MARGIN.bottom, MARGIN.top]);

  const svg = new Svg();
  for (let i = 0; i < xs.length; i++) {
    for (let j = 0; j < ys.length; j++) {
      const v = grid[i][j];
      const t = (v - vLo) / (vHi - vLo || 1);
      const px = xScale(xe[i]);
      const py = yScale(ye[j + 1]);
      svg.rect(px, py, xScale(xe[i + 1]) - px, yScale(ye[j]) - py,
               viridis(t));
    }
  }
  svg.axes(xScale, yScale, spec.x_label ?? spec.x,
           spec.y_label ?? (spec.y as string), spec.title ?? "");

  // colorbar
  const cbX = WIDTH - MARGIN.right + 30;
  const cbTop = MARGIN.top;
  const cbH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const steps = 64;
  for (let k = 0; k < steps; k++) {
    const t = k / (steps - 1);
    svg.rect(cbX, cbTop + cbH - ((k + 1) * cbH) / steps, 18,
             cbH / steps + 0.5, viridis(t));
  }
  svg.text(cbX + 24, cbTop + cbH + 4, fmtTick(vLo), { size: 12 });
  svg.text(cbX + 24, cbTop + 10, fmtTick(vHi), { size: 12 });
  svg.text(cbX + 9, cbTop - 10, spec.value as string,
           { size: 12, anchor: "middle" });

  return {
    svg: svg.render(),
    summary: {
      kind: "heatmap",
      series: 1,
      points: table.rows,
      valueMin: vMin,
      valueMax: vMax,
    },
  };
}
