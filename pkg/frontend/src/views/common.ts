import type { LabelClass } from "../protocol.js";

// class color code: genuine green, spambot purple, unlabeled blue;
// selection is always red and wins over the class color
export const CLASS_COLORS: Record<LabelClass, string> = {
  genuine: "#4daf4a",
  spambot: "#984ea3",
  unlabeled: "#377eb8",
};
export const SELECTED_COLOR = "#e41a1c";
export const SELECTOR_COLOR = "#ff7f00"; // timeline period selectors

export function colorFor(label: LabelClass, selected: boolean): string {
  return selected ? SELECTED_COLOR : CLASS_COLORS[label];
}

export interface Scale {
  (v: number): number;
}

export function linearScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0;
  if (span === 0) return () => (r0 + r1) / 2;
  return (v: number) => r0 + ((v - d0) / span) * (r1 - r0);
}

export function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (lo === Infinity) return [0, 1];
  return lo === hi ? [lo - 1, hi + 1] : [lo, hi];
}

export function fmt(v: number): string {
  if (!Number.isFinite(v)) return "-";
  if (Math.abs(v) >= 1000 || Number.isInteger(v)) return String(Math.round(v));
  return v.toPrecision(3);
}
