/** Client-side session state: what each view shows plus the shared
 * selection/label mirror. Selection and labels only ever change when a
 * server push arrives; the client proposes mutations but the server is the
 * source of truth. */

import type {
  DetailsTab,
  LabelClass,
  LabelPush,
  Level,
  SelectionPush,
  SelectionRule,
  TransformMode,
  ViewName,
} from "./protocol.js";

export interface LdaForm {
  k: number;
  alpha: number;
  beta: number;
  iterations: number;
  seed: number;
}

export interface DrForm {
  method: "kpca" | "lda_supervised" | "lle" | "tsne";
  kernel: "linear" | "rbf" | "poly";
  gamma: number;
  degree: number;
  k_neighbors: number;
  perplexity: number;
  iterations: number;
  learning_rate: number;
  seed: number;
  transform: TransformMode;
}

export interface ClientViewState {
  timeline: {
    features: string[];
    level: Exclude<Level, "overall">;
    window: string | null;
    sharedScale: boolean;
    hoverBox: boolean;
  };
  dimred: { form: DrForm; resultRef: string | null; jobId: string | null };
  details: { tab: DetailsTab; page: number };
  topics: {
    form: LdaForm;
    level: Level;
    window: string | null;
    axis: "id" | "polarity" | "subjectivity";
    threshold: number;
    selectedTopics: number[];
    jobPending: boolean;
    jobId: string | null;
    resultRef: string | null;
  };
  features: { features: string[]; transform: TransformMode };
  selection: string[];
  labels: Record<string, LabelClass>;
  selectionRule: SelectionRule;
  version: number;
  openPanel: ViewName | null;
  connected: boolean;
}

export function initialState(): ClientViewState {
  return {
    timeline: {
      features: ["tweet_count"],
      level: "year",
      window: null,
      sharedScale: true,
      hoverBox: false,
    },
    dimred: {
      form: {
        method: "kpca", kernel: "rbf", gamma: 1 / 50, degree: 3,
        k_neighbors: 10, perplexity: 30, iterations: 1000,
        learning_rate: 200, seed: 0, transform: "zscore",
      },
      resultRef: null,
      jobId: null,
    },
    details: { tab: "cards", page: 0 },
    topics: {
      form: { k: 20, alpha: 2.5, beta: 0.01, iterations: 500, seed: 7 },
      level: "overall",
      window: null,
      axis: "id",
      threshold: 0.2,
      selectedTopics: [],
      jobPending: false,
      jobId: null,
      resultRef: null,
    },
    features: { features: ["tweet_count"], transform: "none" },
    selection: [],
    labels: {},
    selectionRule: "new",
    version: 0,
    openPanel: null,
    connected: false,
  };
}

export function labelOf(state: ClientViewState, accountId: string): LabelClass {
  return state.labels[accountId] ?? "unlabeled";
}

export function isSelected(state: ClientViewState, accountId: string): boolean {
  return state.selection.includes(accountId);
}

/** Server pushes are authoritative; out-of-order versions are dropped. */
export function applySelectionPush(state: ClientViewState, push: SelectionPush): ClientViewState {
  if (push.version <= state.version && state.version !== 0) return state;
  return { ...state, selection: [...push.selected].sort(), version: push.version };
}

export function applyLabelPush(state: ClientViewState, push: LabelPush): ClientViewState {
  if (push.version <= state.version && state.version !== 0) return state;
  const labels = { ...state.labels };
  for (const id of push.ids) {
    if (push.label === "unlabeled") delete labels[id];
    else labels[id] = push.label;
  }
  return { ...state, labels, version: push.version };
}

export function setSelectionRule(state: ClientViewState, rule: SelectionRule): ClientViewState {
  return { ...state, selectionRule: rule };
}

const LEVEL_ORDER: Exclude<Level, "overall">[] = ["year", "month", "day"];

/** Scroll zoom inside a timeline facet: in steps year->month->day with the
 * hovered period as the window, out widens back toward the full span. */
export function stepTimelineLevel(
  state: ClientViewState,
  direction: "in" | "out",
  hoveredPeriod: string | null,
): ClientViewState {
  const idx = LEVEL_ORDER.indexOf(state.timeline.level);
  if (direction === "in") {
    if (idx === LEVEL_ORDER.length - 1) return state;
    return {
      ...state,
      timeline: {
        ...state.timeline,
        level: LEVEL_ORDER[idx + 1],
        window: hoveredPeriod ?? state.timeline.window,
      },
    };
  }
  if (idx === 0) return { ...state, timeline: { ...state.timeline, window: null } };
  // the window sits one level above the display level: day view keeps a
  // month window, month view a year window, year view the full span
  const widened =
    idx - 1 === 0 || state.timeline.window === null
      ? null
      : state.timeline.window.split("-").slice(0, idx - 1).join("-");
  return {
    ...state,
    timeline: { ...state.timeline, level: LEVEL_ORDER[idx - 1], window: widened },
  };
}

export function togglePanel(state: ClientViewState, view: ViewName): ClientViewState {
  return { ...state, openPanel: state.openPanel === view ? null : view };
}

export function toggleTopic(state: ClientViewState, topicId: number, additive: boolean): ClientViewState {
  const current = state.topics.selectedTopics;
  let next: number[];
  if (!additive) next = current.length === 1 && current[0] === topicId ? [] : [topicId];
  else if (current.includes(topicId)) next = current.filter((t) => t !== topicId);
  else next = [...current, topicId].sort((a, b) => a - b);
  return { ...state, topics: { ...state.topics, selectedTopics: next } };
}
