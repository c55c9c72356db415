/** Assembles the five linked views plus the control panel area into one
 * DOM-equivalent tree. Payloads that fail the structural check render an
 * error banner in place of their view instead of throwing. */

import {
  checkPayload,
  DetailsPayload,
  DimredPayload,
  FeaturesPayload,
  TimelinePayload,
  TopicsPayload,
  ViewName,
  ViewPayload,
} from "../protocol.js";
import type { ClientViewState } from "../state.js";
import { h, VNode } from "../vtree.js";
import { renderDetails } from "./details.js";
import { renderFeatures } from "./features.js";
import { renderScatter } from "./scatter.js";
import { renderTimeline } from "./timeline.js";
import { renderTopics } from "./topics.js";

export type Payloads = Partial<Record<ViewName, ViewPayload | null>>;

function banner(view: ViewName, message: string): VNode {
  return h("section", { class: "view broken", "data-view": view },
           h("div", { class: "error-banner", role: "alert" },
             `${view}: ${message}`));
}

function placeholder(view: ViewName): VNode {
  return h("section", { class: "view pending", "data-view": view },
           h("p", { class: "empty-state" }, `${view}: waiting for data`));
}

function renderOne(view: ViewName, state: ClientViewState, payload: ViewPayload): VNode {
  switch (view) {
    case "timeline": return renderTimeline(state, payload as TimelinePayload);
    case "dimred": return renderScatter(state, payload as DimredPayload);
    case "details": return renderDetails(state, payload as DetailsPayload);
    case "topics": return renderTopics(state, payload as TopicsPayload);
    case "features": return renderFeatures(state, payload as FeaturesPayload);
  }
}

function generalPanel(state: ClientViewState): VNode {
  return h(
    "aside",
    { class: "panel general-panel" },
    h("div", { class: "legend" },
      h("span", { class: "legend-genuine" }, "genuine"),
      h("span", { class: "legend-spambot" }, "spambot"),
      h("span", { class: "legend-unlabeled" }, "unlabeled"),
      h("span", { class: "legend-selected" }, "selected")),
    h("div", { class: "selection-rules", role: "radiogroup" },
      ...(["new", "add", "subtract"] as const).map((rule) =>
        h("button", {
          class: "rule",
          "data-rule": rule,
          "data-active": state.selectionRule === rule,
          "aria-pressed": state.selectionRule === rule,
        }, rule))),
    h("div", { class: "select-specials" },
      ...["all", "none", "inverse"].map((mode) =>
        h("button", { class: "special", "data-mode": mode }, `select ${mode}`)),
      ...(["genuine", "spambot", "unlabeled"] as const).map((cls) =>
        h("button", { class: "special", "data-mode": "by_class", "data-class": cls },
          `select ${cls}`))),
    h("div", { class: "labeling-panel" },
      h("button", { class: "label-btn", "data-label": "spambot" }, "label spambot"),
      h("button", { class: "label-btn", "data-label": "genuine" }, "label genuine"),
      h("button", { class: "label-btn", "data-label": "unlabeled" }, "clear label"),
      h("span", { class: "selection-count" }, `${state.selection.length} selected`)),
  );
}

function viewPanel(state: ClientViewState): VNode | null {
  const view = state.openPanel;
  if (!view) return null;
  const body: (VNode | string)[] = [h("h4", {}, `${view} controls`)];
  if (view === "dimred") {
    const form = state.dimred.form;
    body.push(
      h("label", {}, "method ",
        h("select", { "data-field": "method" },
          ...["kpca", "lda_supervised", "lle", "tsne"].map((m) =>
            h("option", { value: m, selected: form.method === m }, m)))),
      h("label", {}, "kernel ",
        h("select", { "data-field": "kernel" },
          ...["linear", "rbf", "poly"].map((k) =>
            h("option", { value: k, selected: form.kernel === k }, k)))),
      h("label", {}, "gamma ", h("input", { "data-field": "gamma", value: form.gamma })),
      h("label", {}, "neighbors ", h("input", { "data-field": "k_neighbors", value: form.k_neighbors })),
      h("label", {}, "perplexity ", h("input", { "data-field": "perplexity", value: form.perplexity })),
      h("label", {}, "transform ",
        h("select", { "data-field": "transform" },
          ...["none", "minmax", "zscore"].map((t) =>
            h("option", { value: t, selected: form.transform === t }, t)))),
      h("button", { class: "submit-dr" }, "recompute"),
    );
  } else if (view === "topics") {
    const form = state.topics.form;
    body.push(
      h("label", {}, "topics K ", h("input", { "data-field": "k", value: form.k })),
      h("label", {}, "alpha ", h("input", { "data-field": "alpha", value: form.alpha })),
      h("label", {}, "beta ", h("input", { "data-field": "beta", value: form.beta })),
      h("label", {}, "threshold ",
        h("input", { "data-field": "threshold", value: state.topics.threshold })),
      h("label", {}, "axis ",
        h("select", { "data-field": "axis" },
          ...["id", "polarity", "subjectivity"].map((a) =>
            h("option", { value: a, selected: state.topics.axis === a }, a)))),
      h("button", { class: "submit-lda" }, "refit topics"),
    );
  } else if (view === "timeline") {
    body.push(
      h("label", {}, "level ",
        h("select", { "data-field": "level" },
          ...["year", "month", "day"].map((l) =>
            h("option", { value: l, selected: state.timeline.level === l }, l)))),
      h("label", {}, "shared y-scale ",
        h("input", { type: "checkbox", "data-field": "sharedScale",
                     checked: state.timeline.sharedScale })),
    );
  } else if (view === "features") {
    body.push(
      h("label", {}, "transform ",
        h("select", { "data-field": "transform" },
          ...["none", "minmax", "zscore"].map((t) =>
            h("option", { value: t, selected: state.features.transform === t }, t)))),
    );
  } else {
    body.push(h("label", {}, "page size is fixed at 100"));
  }
  return h("aside", { class: "panel view-panel", "data-panel": view }, ...body);
}

export function renderViews(state: ClientViewState, payloads: Payloads): VNode {
  const sections: VNode[] = [];
  for (const view of ["timeline", "dimred", "details", "topics", "features"] as ViewName[]) {
    const payload = payloads[view];
    if (!payload) {
      sections.push(placeholder(view));
      continue;
    }
    const problem = checkPayload(view, payload);
    sections.push(problem ? banner(view, problem) : renderOne(view, state, payload));
  }
  return h(
    "main",
    { class: "workbench", "data-connected": state.connected },
    state.connected ? null : h("div", { class: "reconnect-banner", role: "alert" },
                               "connection lost - retrying"),
    generalPanel(state),
    viewPanel(state),
    h("div", { class: "grid" }, ...sections),
  );
}
