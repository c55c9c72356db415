/** Browser bootstrap: wires the connection, state, gestures and renderer.
 *
 * The session object is also consumed headless by the scripted end-to-end
 * test, so everything interesting lives here rather than in DOM handlers:
 * `applyInteraction` routes gestures, server pushes update the state
 * mirror, and each change re-renders all views from the payload cache. */

import { SessionConnection, ServerError, SocketFactory } from "./connection.js";
import { handleInteraction, Interaction, queryFor } from "./interactions.js";
import type {
  Envelope,
  JobStatusDoc,
  LabelPush,
  SelectionPush,
  TopicsPayload,
  ViewName,
  ViewPayload,
} from "./protocol.js";
import { VIEW_NAMES } from "./protocol.js";
import { applyLabelPush, applySelectionPush, ClientViewState, initialState } from "./state.js";
import { Payloads, renderViews } from "./views/index.js";
import { mount, VNode } from "./vtree.js";

export class Session {
  state: ClientViewState = initialState();
  payloads: Payloads = {};
  connection: SessionConnection;
  onRender: (tree: VNode) => void = () => undefined;

  constructor(url: string, factory: SocketFactory) {
    this.connection = new SessionConnection(url, factory, {
      onPush: (envelope) => this.onPush(envelope),
      onOpen: (reconnected) => {
        this.state = { ...this.state, connected: true };
        void this.refreshAll(reconnected);
      },
      onDown: () => {
        this.state = { ...this.state, connected: false };
        this.render();
      },
    });
  }

  start(): void {
    this.connection.connect();
  }

  stop(): void {
    this.connection.close();
  }

  render(): VNode {
    const tree = renderViews(this.state, this.payloads);
    this.onRender(tree);
    return tree;
  }

  /** Initial load and reconnect path: requery every open view with the
   * current scroll/zoom/tab state. After a reconnect the fresh payload
   * snapshots are adopted as the selection/label mirror, since pushes made
   * while disconnected were missed. */
  async refreshAll(adoptServerState = false): Promise<void> {
    await Promise.all(VIEW_NAMES.map((view) => this.refreshView(view)));
    if (adoptServerState) {
      const timeline = this.payloads.timeline as { selected?: string[] } | null | undefined;
      if (timeline?.selected) {
        this.state = { ...this.state, selection: [...timeline.selected].sort() };
      }
      const dimred = this.payloads.dimred as
        | { accounts?: { account_id: string; label: string }[] } | null | undefined;
      if (dimred?.accounts) {
        const labels = { ...this.state.labels };
        for (const row of dimred.accounts) {
          if (row.label === "unlabeled") delete labels[row.account_id];
          else labels[row.account_id] = row.label as "genuine" | "spambot";
        }
        this.state = { ...this.state, labels };
      }
    }
    this.render();
  }

  async refreshView(view: ViewName): Promise<void> {
    try {
      const payload = await this.connection.queryView(queryFor(this.state, view));
      this.payloads[view] = payload as unknown as ViewPayload;
      if (view === "topics") {
        const topics = payload as unknown as TopicsPayload;
        this.state = {
          ...this.state,
          topics: { ...this.state.topics, jobPending: false, resultRef: topics.result_ref },
        };
      }
    } catch (err) {
      if (err instanceof ServerError && err.payload.code === "job_pending" && view === "topics") {
        this.state = { ...this.state, topics: { ...this.state.topics, jobPending: true } };
      } else if (err instanceof ServerError) {
        this.payloads[view] = null;
      }
      // connection drops surface through onDown; stale queries just vanish
    }
  }

  async applyInteraction(event: Interaction): Promise<void> {
    const { state, envelopes } = handleInteraction(event, this.state);
    this.state = state;
    for (const draft of envelopes) {
      try {
        const payload = await this.connection.request(draft.kind, draft.payload);
        if (draft.kind === "job_submit") {
          this.watchJob(payload as unknown as JobStatusDoc, draft.payload.job === "lda");
        }
        if (draft.kind === "query" && typeof draft.payload.view === "string") {
          const view = draft.payload.view as ViewName;
          this.payloads[view] = payload as unknown as ViewPayload;
        }
      } catch (err) {
        if (!(err instanceof ServerError)) throw err;
        if (err.payload.code === "job_pending") {
          this.state = { ...this.state, topics: { ...this.state.topics, jobPending: true } };
        }
      }
    }
    this.render();
  }

  private watchJob(job: JobStatusDoc, isLda: boolean): void {
    if (isLda) {
      this.state = {
        ...this.state,
        topics: {
          ...this.state.topics,
          jobId: job.job_id,
          jobPending: job.state !== "done" && job.state !== "failed" && job.state !== "cancelled",
          resultRef: job.state === "done" && job.result_ref ? job.result_ref : this.state.topics.resultRef,
        },
      };
      if (!this.state.topics.jobPending) void this.refreshView("topics").then(() => this.render());
    } else {
      this.state = { ...this.state, dimred: { ...this.state.dimred, jobId: job.job_id } };
      if (job.state === "done" && job.result_ref) {
        this.state = {
          ...this.state,
          dimred: { ...this.state.dimred, resultRef: job.result_ref },
        };
        void this.refreshView("dimred").then(() => this.render());
      }
    }
    this.render();
  }

  private onPush(envelope: Envelope): void {
    if (envelope.kind === "selection_update") {
      this.state = applySelectionPush(this.state, envelope.payload as unknown as SelectionPush);
      // selection feeds the details/features views; refresh what depends on it
      void this.refreshView("details").then(() => this.render());
      void this.refreshView("features").then(() => this.render());
    } else if (envelope.kind === "label_update") {
      this.state = applyLabelPush(this.state, envelope.payload as unknown as LabelPush);
    } else if (envelope.kind === "job_status") {
      const job = envelope.payload as unknown as JobStatusDoc;
      if (this.state.topics.jobId === job.job_id) {
        const finished = job.state === "done" || job.state === "failed" || job.state === "cancelled";
        this.state = {
          ...this.state,
          topics: {
            ...this.state.topics,
            jobPending: !finished,
            resultRef: job.state === "done" && job.result_ref
              ? job.result_ref : this.state.topics.resultRef,
          },
        };
        if (finished && job.state === "done") {
          void this.refreshView("topics").then(() => this.render());
        }
      }
      if (this.state.dimred.jobId === job.job_id && job.state === "done" && job.result_ref) {
        this.state = {
          ...this.state,
          dimred: { ...this.state.dimred, resultRef: job.result_ref },
        };
        void this.refreshView("dimred").then(() => this.render());
      }
    }
    this.render();
  }
}

/** Browser entry point (no-op under tests, which build Session directly). */
export function bootstrap(): void {
  if (typeof document === "undefined") return;
  const root = document.getElementById("app");
  if (!root) return;
  const url = `ws://${location.hostname}:${new URLSearchParams(location.search).get("port") ?? "8765"}`;
  const session = new Session(url, (u) => new WebSocket(u) as unknown as import("./connection.js").SocketLike);
  session.onRender = (tree) => {
    root.replaceChildren(mount(tree));
    wireDomEvents(root, session);
  };
  session.start();
}

/** Map raw DOM events onto gesture descriptors. */
function wireDomEvents(root: HTMLElement, session: Session): void {
  root.querySelectorAll<HTMLElement>("[data-account]").forEach((el) => {
    el.addEventListener("click", () => {
      const view = el.closest<HTMLElement>("[data-view]")?.dataset.view as ViewName | undefined;
      void session.applyInteraction({
        type: "click", view: view ?? "dimred", accountId: el.dataset.account!,
      });
    });
  });
  root.querySelectorAll<HTMLElement>(".rule").forEach((el) => {
    el.addEventListener("click", () => void session.applyInteraction({
      type: "rule", rule: el.dataset.rule as "new" | "add" | "subtract",
    }));
  });
  root.querySelectorAll<HTMLElement>(".special").forEach((el) => {
    el.addEventListener("click", () => void session.applyInteraction({
      type: "special",
      mode: el.dataset.mode as "all" | "none" | "inverse" | "by_class",
      labelClass: el.dataset.class,
    }));
  });
  root.querySelectorAll<HTMLElement>(".label-btn").forEach((el) => {
    el.addEventListener("click", () => void session.applyInteraction({
      type: "label", label: el.dataset.label as "genuine" | "spambot" | "unlabeled",
    }));
  });
  root.querySelectorAll<HTMLElement>(".tab").forEach((el) => {
    el.addEventListener("click", () => void session.applyInteraction({
      type: "details-tab", tab: el.dataset.tab as "cards" | "tweets" | "wordcloud",
    }));
  });
  root.querySelectorAll<HTMLElement>(".topic-bubble").forEach((el) => {
    el.addEventListener("click", (ev) => void session.applyInteraction({
      type: "topic-click", topicId: Number(el.dataset.topic), additive: ev.shiftKey,
    }));
  });
  const timeline = root.querySelector<HTMLElement>('[data-view="timeline"]');
  timeline?.addEventListener("wheel", (ev) => {
    const period = (ev.target as HTMLElement).closest<HTMLElement>("[data-period]")?.dataset.period ?? null;
    void session.applyInteraction({
      type: "scroll", view: "timeline", direction: ev.deltaY < 0 ? "in" : "out", period,
    });
    ev.preventDefault();
  });
  document.onkeydown = (ev) => {
    if (ev.key.toLowerCase() === "c") {
      const hovered = document.querySelectorAll<HTMLElement>("[data-view]:hover");
      const view = hovered.length
        ? (hovered[hovered.length - 1].dataset.view as ViewName) : null;
      void session.applyInteraction({ type: "key", key: "c", view });
    }
  };
}

bootstrap();
