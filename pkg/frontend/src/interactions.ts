/** Gesture handling: every user interaction reduces to (new state,
 * envelopes to send). Selections always go through the server with the
 * active rule; nothing mutates labels locally. Invalid or unknown gestures
 * fall through unchanged. */

import type { Kind, ViewName, ViewQuery } from "./protocol.js";
import {
  ClientViewState,
  setSelectionRule,
  stepTimelineLevel,
  togglePanel,
  toggleTopic,
} from "./state.js";

export interface EnvelopeDraft {
  kind: Kind;
  payload: Record<string, unknown>;
}

export type Interaction =
  | { type: "click"; view: ViewName; accountId: string }
  | { type: "brush"; view: ViewName; accountIds: string[] }
  | { type: "scroll"; view: "timeline"; direction: "in" | "out"; period: string | null }
  | { type: "hover"; view: "timeline"; target: "box" | "none" }
  | { type: "key"; key: string; view: ViewName | null }
  | { type: "rule"; rule: "new" | "add" | "subtract" }
  | { type: "special"; mode: "all" | "none" | "inverse" | "by_class"; labelClass?: string }
  | { type: "label"; label: "genuine" | "spambot" | "unlabeled" }
  | { type: "details-tab"; tab: "cards" | "tweets" | "wordcloud" }
  | { type: "topic-click"; topicId: number; additive: boolean }
  | { type: "lda-submit" }
  | { type: "dr-submit" };

export interface Outcome {
  state: ClientViewState;
  envelopes: EnvelopeDraft[];
}

export function timelineQuery(state: ClientViewState): ViewQuery {
  return {
    view: "timeline",
    level: state.timeline.level,
    window: state.timeline.window,
    feature_ids: state.timeline.features,
  };
}

export function detailsQuery(state: ClientViewState): ViewQuery {
  return { view: "details", tab: state.details.tab, page: state.details.page };
}

export function dimredQuery(state: ClientViewState): ViewQuery {
  return { view: "dimred", result_ref: state.dimred.resultRef };
}

export function topicsQuery(state: ClientViewState): ViewQuery {
  const q: ViewQuery = { view: "topics", result_ref: state.topics.resultRef };
  if (state.topics.selectedTopics.length) {
    q.topic_ids = state.topics.selectedTopics;
    q.threshold = state.topics.threshold;
  }
  return q;
}

export function featuresQuery(state: ClientViewState): ViewQuery {
  return {
    view: "features",
    feature_ids: state.features.features,
    method_spec: { mode: state.features.transform },
  };
}

export function queryFor(state: ClientViewState, view: ViewName): ViewQuery {
  switch (view) {
    case "timeline": return timelineQuery(state);
    case "details": return detailsQuery(state);
    case "dimred": return dimredQuery(state);
    case "topics": return topicsQuery(state);
    case "features": return featuresQuery(state);
  }
}

const query = (payload: ViewQuery): EnvelopeDraft =>
  ({ kind: "query", payload: payload as unknown as Record<string, unknown> });

function selectionDraft(state: ClientViewState, ids: string[]): EnvelopeDraft {
  return { kind: "selection_update", payload: { rule: state.selectionRule, ids } };
}

export function handleInteraction(event: Interaction, state: ClientViewState): Outcome {
  switch (event.type) {
    case "click":
      return { state, envelopes: [selectionDraft(state, [event.accountId])] };

    case "brush":
      if (!event.accountIds.length && state.selectionRule !== "new") {
        return { state, envelopes: [] }; // empty add/subtract gestures are no-ops
      }
      return { state, envelopes: [selectionDraft(state, event.accountIds)] };

    case "scroll": {
      const next = stepTimelineLevel(state, event.direction, event.period);
      if (next === state) return { state, envelopes: [] };
      return { state: next, envelopes: [query(timelineQuery(next))] };
    }

    case "hover": {
      const hoverBox = event.target === "box";
      if (hoverBox === state.timeline.hoverBox) return { state, envelopes: [] };
      return {
        state: { ...state, timeline: { ...state.timeline, hoverBox } },
        envelopes: [],
      };
    }

    case "key":
      if (event.key.toLowerCase() === "c" && event.view) {
        return { state: togglePanel(state, event.view), envelopes: [] };
      }
      return { state, envelopes: [] };

    case "rule":
      return { state: setSelectionRule(state, event.rule), envelopes: [] };

    case "special": {
      const payload: Record<string, unknown> = { mode: event.mode };
      if (event.mode === "by_class") payload.class = event.labelClass;
      return { state, envelopes: [{ kind: "selection_update", payload }] };
    }

    case "label":
      if (!state.selection.length) return { state, envelopes: [] };
      return {
        state,
        envelopes: [{
          kind: "label_update",
          payload: { ids: state.selection, label: event.label },
        }],
      };

    case "details-tab": {
      const next = { ...state, details: { ...state.details, tab: event.tab, page: 0 } };
      return { state: next, envelopes: [query(detailsQuery(next))] };
    }

    case "topic-click": {
      const next = toggleTopic(state, event.topicId, event.additive);
      return { state: next, envelopes: [query(topicsQuery(next))] };
    }

    case "lda-submit": {
      const form = state.topics.form;
      const next = { ...state, topics: { ...state.topics, jobPending: true } };
      return {
        state: next,
        envelopes: [{
          kind: "job_submit",
          payload: {
            job: "lda",
            level: state.topics.level,
            window: state.topics.window,
            k: form.k, alpha: form.alpha, beta: form.beta,
            iterations: form.iterations, seed: form.seed,
          },
        }],
      };
    }

    case "dr-submit": {
      const form = state.dimred.form;
      const spec: Record<string, unknown> = { method: form.method };
      if (form.method === "kpca") {
        spec.kernel = form.kernel;
        if (form.kernel === "rbf") spec.gamma = form.gamma;
        if (form.kernel === "poly") spec.degree = form.degree;
      } else if (form.method === "lle") {
        spec.k_neighbors = form.k_neighbors;
      } else if (form.method === "tsne") {
        spec.perplexity = form.perplexity;
        spec.iterations = form.iterations;
        spec.learning_rate = form.learning_rate;
        spec.seed = form.seed;
      }
      return {
        state,
        envelopes: [{
          kind: "job_submit",
          payload: { job: "dimred", spec, transform: form.transform },
        }],
      };
    }
  }
}
