/** 2-D embedding view: one bubble per account, sized by tweet count,
 * colored by class, red when selected. */

import type { DimredPayload } from "../protocol.js";
import type { ClientViewState } from "../state.js";
import { isSelected } from "../state.js";
import { h, VNode } from "../vtree.js";
import { colorFor, extent, fmt, linearScale } from "./common.js";

const W = 420;
const H = 320;
const PAD = 24;

export function renderScatter(state: ClientViewState, payload: DimredPayload): VNode {
  if (payload.accounts.length === 0) {
    return h("section", { class: "view dimred", "data-view": "dimred" },
             h("p", { class: "empty-state" }, "no embedding loaded"));
  }
  const xs = payload.accounts.map((r) => r.x);
  const ys = payload.accounts.map((r) => r.y);
  const sizes = payload.accounts.map((r) => r.tweet_count);
  const [x0, x1] = extent(xs);
  const [y0, y1] = extent(ys);
  const [s0, s1] = extent(sizes);
  const sx = linearScale(x0, x1, PAD, W - PAD);
  const sy = linearScale(y0, y1, H - PAD, PAD);
  const sr = linearScale(s0, s1, 3, 12);

  const dots = payload.accounts.map((row) => {
    const selected = isSelected(state, row.account_id) || row.selected;
    // label pushes can outrun the cached payload; the live mirror wins
    const label = state.labels[row.account_id] ?? row.label;
    return h("circle", {
      class: "account-dot",
      "data-account": row.account_id,
      "data-selected": selected,
      cx: sx(row.x),
      cy: sy(row.y),
      r: Math.sqrt(Math.max(sr(row.tweet_count), 1)) * 2,
      fill: colorFor(label, selected),
      "fill-opacity": 0.75,
      stroke: selected ? "#7f0000" : "none",
    },
    h("title", {}, `${row.account_id} (${fmt(row.tweet_count)} tweets)`));
  });

  const spec = payload.spec as { method?: string };
  return h(
    "section",
    { class: "view dimred", "data-view": "dimred" },
    h("header", {}, `embedding - ${spec.method ?? "?"} [${payload.result_ref}]`),
    h("svg", { width: W, height: H, class: "scatter" },
      h("rect", { x: 0, y: 0, width: W, height: H, fill: "#fafafa", stroke: "#ddd" }),
      ...dots),
  );
}
