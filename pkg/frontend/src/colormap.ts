/**
 * Viridis colormap (perceptually uniform), linearly interpolated between
 * sampled control points. Values outside [0, 1] are clamped; NaN renders
 * as neutral grey.
 */

const STOPS: Array<[number, number, number]> = [
  [68, 1, 84],
  [71, 44, 122],
  [59, 81, 139],
  [44, 113, 142],
  [33, 144, 141],
  [39, 173, 129],
  [92, 200, 99],
  [170, 220, 50],
  [253, 231, 37],
];

export const NAN_COLOR = "rgb(200,200,200)";

export function viridis(t: number): string {
  if (Number.isNaN(t)) return NAN_COLOR;
  const x = Math.min(1, Math.max(0, t)) * (STOPS.length - 1);
  const i = Math.min(STOPS.length - 2, Math.floor(x));
  const f = x - i;
  const a = STOPS[i];
  const b = STOPS[i + 1];
  const mix = (k: number) => Math.round(a[k] + f * (b[k] - a[k]));
  return `rgb(${mix(0)},${mix(1)},${mix(2)})`;
}
