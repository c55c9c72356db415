/** Envelope protocol spoken with the session server (see docs/protocol.md). */

export type Kind =
  | "query"
  | "result"
  | "job_submit"
  | "job_status"
  | "selection_update"
  | "label_update"
  | "error";

export interface Envelope {
  id: string;
  kind: Kind;
  payload: Record<string, unknown>;
}

export type Level = "overall" | "year" | "month" | "day";
export type ViewName = "timeline" | "dimred" | "details" | "topics" | "features";
export type LabelClass = "genuine" | "spambot" | "unlabeled";
export type SelectionRule = "new" | "add" | "subtract";
export type TransformMode = "none" | "minmax" | "zscore";
export type DetailsTab = "cards" | "tweets" | "wordcloud";

export const VIEW_NAMES: ViewName[] = ["timeline", "dimred", "details", "topics", "features"];

export interface ViewQuery {
  view: ViewName;
  level?: Level;
  window?: string | [string, string] | null;
  feature_ids?: string[];
  page?: number;
  page_size?: number;
  method_spec?: Record<string, unknown> | null;
  result_ref?: string | null;
  tab?: DetailsTab;
  topic_ids?: number[];
  threshold?: number;
}

export interface BoxStatsDoc {
  n: number;
  min: number;
  q1: number;
  median: number;
  q3: number;
  max: number;
}

export interface DensityCurveDoc {
  xs: number[];
  ys: number[];
  bandwidth: number;
  n: number;
}

export interface TimelineAccountRow {
  account_id: string;
  values: Record<string, number>;
}

export interface TimelinePayload {
  view: "timeline";
  level: Level;
  periods: string[];
  features: Record<string, {
    classes: Record<string, Record<string, BoxStatsDoc>>;
    accounts: TimelineAccountRow[];
  }>;
  page: number;
  page_size: number;
  total_accounts: number;
  selected: string[];
}

export interface DimredRow {
  account_id: string;
  x: number;
  y: number;
  tweet_count: number;
  label: LabelClass;
  selected: boolean;
}

export interface DimredPayload {
  view: "dimred";
  result_ref: string;
  spec: Record<string, unknown>;
  accounts: DimredRow[];
  page: number;
  page_size: number;
  total_accounts: number;
}

export interface AccountCard {
  account_id: string;
  screen_name: string;
  display_name: string;
  created_at: string;
  followers_count: number;
  following_count: number;
  likes_count: number;
  tweet_count: number;
  profile_image_url: string | null;
}

export interface TweetRow {
  tweet_id: string;
  account_id: string;
  created_at: string;
  text: string;
}

export interface DetailsPayload {
  view: "details";
  tab: DetailsTab;
  selected: string[];
  cards?: AccountCard[];
  tweets?: TweetRow[];
  words?: { token: string; count: number }[];
  page?: number;
  page_size?: number;
  total_accounts?: number;
  total_tweets?: number;
}

export interface TopicSummaryDoc {
  topic_id: number;
  score: number;
  polarity: number;
  subjectivity: number;
  top_words: { token: string; probability: number }[];
}

export interface TopicsPayload {
  view: "topics";
  result_ref: string;
  k: number;
  alpha: number;
  beta: number;
  seed: number;
  iterations: number;
  level: Level;
  window: [string, string] | null;
  topics: TopicSummaryDoc[];
  cloud: { token: string; weight: number }[];
  members?: string[];
  threshold?: number;
}

export interface FeaturesPayload {
  view: "features";
  transform: TransformMode;
  feature_ids: string[];
  features: Record<string, {
    groups: Record<string, { box: BoxStatsDoc; density: DensityCurveDoc }>;
    overall: BoxStatsDoc;
    accounts: { account_id: string; value: number }[];
  }>;
  page: number;
  page_size: number;
  total_accounts: number;
}

export type ViewPayload =
  | TimelinePayload
  | DimredPayload
  | DetailsPayload
  | TopicsPayload
  | FeaturesPayload;

export interface JobStatusDoc {
  job_id: string;
  state: "queued" | "running" | "done" | "failed" | "cancelled";
  progress: number;
  result_ref?: string;
  message?: string;
}

export interface SelectionPush {
  selected: string[];
  version: number;
}

export interface LabelPush {
  ids: string[];
  label: LabelClass;
  updated_at: string;
  version: number;
}

export interface ErrorPayload {
  code: string;
  message?: string;
  field?: string;
}

/** Shallow structural check before a payload reaches the views. */
export function checkPayload(view: ViewName, payload: unknown): string | null {
  if (typeof payload !== "object" || payload === null) return "payload is not an object";
  const doc = payload as Record<string, unknown>;
  if (doc.view !== view) return `payload view ${String(doc.view)} != ${view}`;
  const missing = (field: string) => `missing field ${field}`;
  switch (view) {
    case "timeline":
      if (!Array.isArray(doc.periods)) return missing("periods");
      if (typeof doc.features !== "object" || doc.features === null) return missing("features");
      return null;
    case "dimred":
      if (!Array.isArray(doc.accounts)) return missing("accounts");
      return null;
    case "details":
      if (typeof doc.tab !== "string") return missing("tab");
      return null;
    case "topics":
      if (!Array.isArray(doc.topics)) return missing("topics");
      if (!Array.isArray(doc.cloud)) return missing("cloud");
      return null;
    case "features":
      if (typeof doc.features !== "object" || doc.features === null) return missing("features");
      return null;
  }
}
