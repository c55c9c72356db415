/** Feature explorer: one facet per feature built on a modified violin
 * plot. The solid center line carries the all-accounts quartiles, the left
 * half shows the labeled class densities (genuine green, spambot purple),
 * the right half the unlabeled (blue) and selected (red) densities;
 * account points sit on the center line. */

import type { DensityCurveDoc, FeaturesPayload } from "../protocol.js";
import type { ClientViewState } from "../state.js";
import { isSelected, labelOf } from "../state.js";
import { h, VNode } from "../vtree.js";
import { colorFor, extent, linearScale, Scale } from "./common.js";

const FACET_W = 150;
const H = 260;
const PAD = 14;
const LEFT_GROUPS = ["genuine", "spambot"] as const;
const RIGHT_GROUPS = ["unlabeled", "selected"] as const;
const GROUP_COLORS: Record<string, string> = {
  genuine: "#4daf4a",
  spambot: "#984ea3",
  unlabeled: "#377eb8",
  selected: "#e41a1c",
};

function curvePath(curve: DensityCurveDoc, y: Scale, xCenter: number,
                   side: 1 | -1, maxHalf: number): string {
  const [d0, d1] = extent(curve.ys);
  const amp = linearScale(Math.min(0, d0), d1 || 1, 0, maxHalf);
  const pts = curve.xs.map((x, i) =>
    `${(xCenter + side * amp(curve.ys[i])).toFixed(1)},${y(x).toFixed(1)}`);
  return `M${pts.join(" L")}`;
}

export function renderFeatures(state: ClientViewState, payload: FeaturesPayload): VNode {
  const facets: VNode[] = payload.feature_ids.map((fid, index) => {
    const doc = payload.features[fid];
    const x0 = index * FACET_W;
    const center = x0 + FACET_W / 2;
    const domain: number[] = [doc.overall.min, doc.overall.max];
    for (const group of Object.values(doc.groups)) {
      domain.push(group.box.min, group.box.max);
      domain.push(group.density.xs[0], group.density.xs[group.density.xs.length - 1]);
    }
    const [lo, hi] = extent(domain);
    const y = linearScale(lo, hi, H - PAD, PAD);

    const children: (VNode | string)[] = [
      h("rect", { class: "facet-bg", x: x0, y: 0, width: FACET_W, height: H,
                  fill: "#fafafa", stroke: "#ddd" }),
      h("text", { x: center, y: 11, "text-anchor": "middle", "font-size": 10 }, fid),
      // all-accounts quartile line plus the median tick
      h("line", { class: "overall-iqr", x1: center, x2: center,
                  y1: y(doc.overall.q1), y2: y(doc.overall.q3),
                  stroke: "#111", "stroke-width": 3 }),
      h("line", { class: "overall-median", x1: center - 6, x2: center + 6,
                  y1: y(doc.overall.median), y2: y(doc.overall.median),
                  stroke: "#111", "stroke-width": 2 }),
    ];
    for (const group of LEFT_GROUPS) {
      const entry = doc.groups[group];
      if (entry) {
        children.push(h("path", {
          class: `density density-${group}`, "data-group": group, "data-side": "left",
          d: curvePath(entry.density, y, center, -1, FACET_W / 2 - 8),
          fill: "none", stroke: GROUP_COLORS[group], "stroke-width": 1.5,
        }));
      }
    }
    for (const group of RIGHT_GROUPS) {
      const entry = doc.groups[group];
      if (entry) {
        children.push(h("path", {
          class: `density density-${group}`, "data-group": group, "data-side": "right",
          d: curvePath(entry.density, y, center, 1, FACET_W / 2 - 8),
          fill: "none", stroke: GROUP_COLORS[group], "stroke-width": 1.5,
        }));
      }
    }
    for (const row of doc.accounts) {
      const selected = isSelected(state, row.account_id);
      children.push(h("circle", {
        class: "account-dot",
        "data-account": row.account_id,
        "data-selected": selected,
        cx: center,
        cy: y(row.value),
        r: selected ? 3.5 : 2.5,
        fill: colorFor(labelOf(state, row.account_id), selected),
        "fill-opacity": selected ? 0.9 : 0.35,
      }));
    }
    return h("g", { class: "feature-facet", "data-feature": fid }, ...children);
  });

  if (payload.feature_ids.length === 0) {
    return h("section", { class: "view features", "data-view": "features" },
             h("p", { class: "empty-state" }, "no features selected"));
  }
  return h(
    "section",
    { class: "view features", "data-view": "features", "data-transform": payload.transform },
    h("header", {}, `feature explorer (${payload.transform})`),
    h("svg", { width: FACET_W * payload.feature_ids.length, height: H, class: "violins" },
      ...facets),
  );
}
