/** Timeline view: temporally sorted facets per feature, each combining a
 * per-class box plot with selectable account bubbles; orange boxes along
 * the top are the period selectors used for temporal zooming. */

import type { BoxStatsDoc, LabelClass, TimelinePayload } from "../protocol.js";
import type { ClientViewState } from "../state.js";
import { isSelected, labelOf } from "../state.js";
import { h, VNode } from "../vtree.js";
import { CLASS_COLORS, colorFor, extent, linearScale, SELECTOR_COLOR } from "./common.js";

const FACET_W = 120;
const FACET_H = 160;
const SELECTOR_H = 14;
const CLASS_SLOTS: LabelClass[] = ["genuine", "spambot", "unlabeled"];

function boxNode(box: BoxStatsDoc, x: number, width: number, y: (v: number) => number,
                 cls: string, faded: boolean): VNode {
  return h(
    "g",
    { class: `box box-${cls}`, "data-box": cls, opacity: faded ? 0.25 : 0.8 },
    h("line", { x1: x + width / 2, x2: x + width / 2, y1: y(box.min), y2: y(box.max),
                stroke: CLASS_COLORS[cls as LabelClass] ?? "#666" }),
    h("rect", {
      x, width,
      y: Math.min(y(box.q3), y(box.q1)),
      height: Math.abs(y(box.q1) - y(box.q3)) || 1,
      fill: CLASS_COLORS[cls as LabelClass] ?? "#666",
      "fill-opacity": 0.45,
    }),
    h("line", { x1: x, x2: x + width, y1: y(box.median), y2: y(box.median),
                stroke: "#222", "stroke-width": 1.5 }),
  );
}

export function renderTimeline(state: ClientViewState, payload: TimelinePayload): VNode {
  const featureIds = Object.keys(payload.features);
  const facetRows: VNode[] = [];

  for (const fid of featureIds) {
    const doc = payload.features[fid];
    const valuesFor = (periods: string[]): number[] => {
      const out: number[] = [];
      for (const row of doc.accounts) {
        for (const p of periods) {
          const v = row.values[p];
          if (v !== undefined) out.push(v);
        }
      }
      for (const perPeriod of Object.values(doc.classes)) {
        for (const p of periods) {
          const box = perPeriod[p];
          if (box) out.push(box.min, box.max);
        }
      }
      return out;
    };
    // shared y-scale across a feature's facets by default; the control
    // panel toggle switches to per-facet scaling
    const sharedExtent = extent(valuesFor(payload.periods));
    const scaleFor = (period: string) => {
      const [lo, hi] = state.timeline.sharedScale
        ? sharedExtent
        : extent(valuesFor([period]));
      return linearScale(lo, hi, FACET_H - 6, SELECTOR_H + 6);
    };

    const facets = payload.periods.map((period, i) => {
      const y = scaleFor(period);
      const x0 = i * FACET_W;
      const slotW = FACET_W / (CLASS_SLOTS.length + 1);
      const children: (VNode | string)[] = [
        h("rect", {
          class: "period-selector",
          "data-period": period,
          x: x0 + 2, y: 0, width: FACET_W - 4, height: SELECTOR_H,
          fill: SELECTOR_COLOR, "fill-opacity": 0.85, rx: 2,
        }),
        h("text", { x: x0 + FACET_W / 2, y: SELECTOR_H - 3, "text-anchor": "middle",
                    "font-size": 9, fill: "#fff" }, period),
        h("rect", { class: "facet-bg", "data-period": period, x: x0, y: SELECTOR_H,
                    width: FACET_W, height: FACET_H - SELECTOR_H,
                    fill: "#fafafa", stroke: "#ddd" }),
      ];
      for (const [slot, cls] of CLASS_SLOTS.entries()) {
        const box = doc.classes[cls]?.[period];
        if (box) {
          children.push(boxNode(box, x0 + slotW * (slot + 0.75), slotW * 0.5, y, cls,
                                state.timeline.hoverBox));
        }
      }
      for (const row of doc.accounts) {
        const value = row.values[period];
        if (value === undefined) continue;
        const cls = labelOf(state, row.account_id);
        const slot = CLASS_SLOTS.indexOf(cls);
        const selected = isSelected(state, row.account_id);
        children.push(h("circle", {
          class: "account-dot",
          "data-account": row.account_id,
          "data-selected": selected,
          "data-period": period,
          cx: x0 + (slot + 1) * (FACET_W / (CLASS_SLOTS.length + 1)),
          cy: y(value),
          r: selected ? 4 : 3,
          fill: colorFor(cls, selected),
          "fill-opacity": 0.8,
        }));
      }
      return h("g", { class: "facet", "data-period": period }, ...children);
    });

    facetRows.push(h(
      "svg",
      { class: "timeline-feature", "data-feature": fid,
        width: payload.periods.length * FACET_W, height: FACET_H },
      h("title", {}, fid),
      ...facets,
    ));
    facetRows.push(h("div", { class: "feature-label" }, fid));
  }

  if (payload.total_accounts === 0) {
    return h("section", { class: "view timeline", "data-view": "timeline" },
             h("p", { class: "empty-state" }, "no accounts loaded"));
  }
  return h(
    "section",
    { class: "view timeline", "data-view": "timeline", "data-level": payload.level },
    h("header", {}, `timeline - ${payload.level}${state.timeline.window ? ` (${state.timeline.window})` : ""}`),
    ...facetRows,
  );
}
