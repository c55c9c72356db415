/** Topic clustering view: a bubble chart of topics (bubble size encodes
 * the topic score, axis selectable between id/polarity/subjectivity) above
 * a word cloud whose sizes follow the aggregated topic-word weights.
 * While an LDA job runs this is the only view that goes inert, behind a
 * spinner overlay. */

import type { TopicsPayload } from "../protocol.js";
import type { ClientViewState } from "../state.js";
import { h, VNode } from "../vtree.js";
import { extent, fmt, linearScale } from "./common.js";

const W = 420;
const H = 220;
const PAD = 26;

export function renderTopics(state: ClientViewState, payload: TopicsPayload): VNode {
  const axisValue = (t: TopicsPayload["topics"][number]): number =>
    state.topics.axis === "polarity" ? t.polarity
    : state.topics.axis === "subjectivity" ? t.subjectivity
    : t.topic_id;

  const xs = payload.topics.map(axisValue);
  const scores = payload.topics.map((t) => t.score);
  const [x0, x1] = extent(xs);
  const [s0, s1] = extent(scores);
  const sx = linearScale(x0, x1, PAD, W - PAD);
  const sy = linearScale(s0, s1, H - PAD, PAD);
  const sr = linearScale(s0, s1, 4, 18);

  const bubbles = payload.topics.map((topic) => {
    const selected = state.topics.selectedTopics.includes(topic.topic_id);
    return h("circle", {
      class: "topic-bubble",
      "data-topic": topic.topic_id,
      "data-selected": selected,
      cx: sx(axisValue(topic)),
      cy: sy(topic.score),
      r: sr(topic.score),
      fill: selected ? "#e41a1c" : "#80b1d3",
      "fill-opacity": 0.75,
      stroke: "#456",
    },
    h("title", {}, `topic ${topic.topic_id}: score ${fmt(topic.score)}, ` +
      `top ${topic.top_words.slice(0, 3).map((w) => w.token).join(" ")}`));
  });

  const [w0, w1] = extent(payload.cloud.map((w) => w.weight));
  const size = linearScale(w0, w1, 10, 32);
  const cloud = payload.cloud.length
    ? h("p", { class: "wordcloud" }, ...payload.cloud.map((w) =>
        h("span", { class: "cloud-word", "data-token": w.token,
                    style: `font-size:${size(w.weight).toFixed(1)}px` }, `${w.token} `)))
    : h("p", { class: "empty-state" }, "no topic words");

  const membersNote = payload.members
    ? h("p", { class: "members-note" },
        `${payload.members.length} member accounts above threshold ${payload.threshold}`)
    : null;

  return h(
    "section",
    {
      class: "view topics",
      "data-view": "topics",
      "data-disabled": state.topics.jobPending,
    },
    h("header", {}, `topics - K=${payload.k} [${payload.result_ref}]`),
    state.topics.jobPending
      ? h("div", { class: "spinner-overlay", "data-spinner": true },
          h("div", { class: "spinner" }, "computing topics..."))
      : null,
    h("svg", { width: W, height: H, class: "topic-bubbles" },
      h("rect", { x: 0, y: 0, width: W, height: H, fill: "#fafafa", stroke: "#ddd" }),
      h("text", { x: W / 2, y: H - 6, "text-anchor": "middle", "font-size": 10 },
        `axis: ${state.topics.axis}`),
      ...bubbles),
    cloud,
    membersNote,
  );
}
