/** Details view, three tabs: account cards, chronological tweets of the
 * selection, and a word cloud over the selection's tweets. */

import type { DetailsPayload } from "../protocol.js";
import type { ClientViewState } from "../state.js";
import { isSelected, labelOf } from "../state.js";
import { h, VNode } from "../vtree.js";
import { colorFor, extent, linearScale } from "./common.js";

function cardNode(state: ClientViewState, card: NonNullable<DetailsPayload["cards"]>[number]): VNode {
  const selected = isSelected(state, card.account_id);
  const cls = labelOf(state, card.account_id);
  return h(
    "article",
    {
      class: "card",
      "data-account": card.account_id,
      "data-selected": selected,
      style: `border-color:${colorFor(cls, selected)}`,
    },
    h("h3", {}, `${card.display_name} @${card.screen_name}`),
    card.profile_image_url
      ? h("img", { src: card.profile_image_url, alt: "", width: 32, height: 32 })
      : h("span", { class: "avatar-placeholder" }, "·"),
    h("dl", {},
      h("dt", {}, "joined"), h("dd", {}, card.created_at.slice(0, 10)),
      h("dt", {}, "tweets"), h("dd", {}, String(card.tweet_count)),
      h("dt", {}, "followers"), h("dd", {}, String(card.followers_count)),
      h("dt", {}, "following"), h("dd", {}, String(card.following_count)),
      h("dt", {}, "likes"), h("dd", {}, String(card.likes_count))),
  );
}

export function renderDetails(state: ClientViewState, payload: DetailsPayload): VNode {
  const tabs = h("nav", { class: "tabs" },
    ...(["cards", "tweets", "wordcloud"] as const).map((tab) =>
      h("button", { class: "tab", "data-tab": tab, "data-active": payload.tab === tab }, tab)));

  let body: VNode;
  if (payload.tab === "cards") {
    const cards = payload.cards ?? [];
    body = cards.length
      ? h("div", { class: "cards" }, ...cards.map((c) => cardNode(state, c)))
      : h("p", { class: "empty-state" }, "no accounts");
  } else if (payload.tab === "tweets") {
    const tweets = payload.tweets ?? [];
    body = tweets.length
      ? h("ol", { class: "tweets" }, ...tweets.map((t) =>
          h("li", { "data-account": t.account_id, "data-selected": isSelected(state, t.account_id) },
            h("time", {}, t.created_at), " ", h("span", { class: "tweet-text" }, t.text))))
      : h("p", { class: "empty-state" }, "select accounts to see their tweets");
  } else {
    const words = payload.words ?? [];
    if (!words.length) {
      body = h("p", { class: "empty-state" }, "select accounts to build a word cloud");
    } else {
      const [lo, hi] = extent(words.map((w) => w.count));
      const size = linearScale(lo, hi, 11, 34);
      body = h("p", { class: "wordcloud" }, ...words.map((w) =>
        h("span", { class: "cloud-word", "data-token": w.token,
                    style: `font-size:${size(w.count).toFixed(1)}px` }, `${w.token} `)));
    }
  }
  return h("section", { class: "view details", "data-view": "details" },
           h("header", {}, "details"), tabs, body);
}
