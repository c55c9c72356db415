/** Persistent session connection over the browser's websocket transport.
 *
 * Request/response correlation by envelope id, push routing, automatic
 * reconnect with backoff, and per-view query supersession (at most one
 * outstanding query per view; stale responses are dropped). The socket
 * constructor is injectable so tests can drive the layer without a
 * browser. */

import type { Envelope, ErrorPayload, Kind, ViewName, ViewQuery } from "./protocol.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export class ServerError extends Error {
  constructor(public payload: ErrorPayload) {
    super(payload.message || payload.code);
  }
}

export interface ConnectionHandlers {
  onPush?: (envelope: Envelope) => void;
  onOpen?: (reconnected: boolean) => void;
  onDown?: () => void;
}

interface Pending {
  resolve: (payload: Record<string, unknown>) => void;
  reject: (err: Error) => void;
  view: ViewName | null;
  stale: boolean;
}

export class SessionConnection {
  private socket: SocketLike | null = null;
  private pending = new Map<string, Pending>();
  private inflightByView = new Map<ViewName, string>();
  private counter = 0;
  private opened = false;
  private everOpened = false;
  private closedByUser = false;
  private retryDelay = 0.25;
  private reconnectTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private url: string,
    private factory: SocketFactory,
    private handlers: ConnectionHandlers = {},
    private maxRetryDelay = 8,
  ) {}

  connect(): void {
    this.closedByUser = false;
    const socket = this.factory(this.url);
    this.socket = socket;
    socket.onopen = () => {
      this.opened = true;
      this.retryDelay = 0.25;
      const reconnected = this.everOpened;
      this.everOpened = true;
      this.handlers.onOpen?.(reconnected);
    };
    socket.onmessage = (ev) => this.dispatch(String(ev.data));
    socket.onerror = () => undefined;
    socket.onclose = () => {
      this.opened = false;
      this.failAll(new Error("connection closed"));
      this.handlers.onDown?.();
      if (!this.closedByUser) {
        const delay = Math.min(this.retryDelay, this.maxRetryDelay);
        this.reconnectTimer = setTimeout(() => this.connect(), delay * 1000);
        this.retryDelay = Math.min(this.retryDelay * 2, this.maxRetryDelay);
      }
    };
  }

  close(): void {
    this.closedByUser = true;
    if (this.reconnectTimer) clearTimeout(this.reconnectTimer);
    this.socket?.close();
    this.failAll(new Error("closed by user"));
  }

  get isOpen(): boolean {
    return this.opened;
  }

  private failAll(err: Error): void {
    const all = [...this.pending.values()];
    this.pending.clear();
    this.inflightByView.clear();
    for (const p of all) p.reject(err);
  }

  private dispatch(raw: string): void {
    let envelope: Envelope;
    try {
      envelope = JSON.parse(raw) as Envelope;
    } catch {
      return;
    }
    if (envelope.kind === "result" || envelope.kind === "error") {
      const pending = this.pending.get(envelope.id);
      if (!pending) return;
      this.pending.delete(envelope.id);
      if (pending.view && this.inflightByView.get(pending.view) === envelope.id) {
        this.inflightByView.delete(pending.view);
      }
      if (pending.stale) return; // superseded by a newer query for the view
      if (envelope.kind === "error") {
        pending.reject(new ServerError(envelope.payload as unknown as ErrorPayload));
      } else {
        pending.resolve(envelope.payload);
      }
      return;
    }
    this.handlers.onPush?.(envelope);
  }

  request(kind: Kind, payload: Record<string, unknown>, view: ViewName | null = null):
      Promise<Record<string, unknown>> {
    if (!this.socket || !this.opened) {
      return Promise.reject(new Error("not connected"));
    }
    const id = `c${++this.counter}`;
    const envelope: Envelope = { id, kind, payload };
    return new Promise((resolve, reject) => {
      if (view) {
        const previous = this.inflightByView.get(view);
        if (previous) {
          const stale = this.pending.get(previous);
          if (stale) stale.stale = true;
        }
        this.inflightByView.set(view, id);
      }
      this.pending.set(id, { resolve, reject, view, stale: false });
      this.socket!.send(JSON.stringify(envelope));
    });
  }

  /** View query with supersession: an older in-flight query for the same
   * view never resolves after this one is issued. */
  queryView(q: ViewQuery): Promise<Record<string, unknown>> {
    return this.request("query", q as unknown as Record<string, unknown>, q.view);
  }
}
