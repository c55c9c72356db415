"""Async session server: visibility-scoped view queries, background jobs
for LDA refits and DR recomputes, and selection/label synchronization.

One server process serves one artifact directory (one corpus, one session).
Any number of clients connect over the framed or websocket transport; every
selection/label mutation is acknowledged to the sender and pushed to all
connected clients exactly once, in mutation order. Heavy recomputes run on
a single worker thread (the numba kernels release the GIL) so view queries
stay responsive while a job is running.
"""
from __future__ import annotations

import asyncio
import hashlib
import itertools
import json
import threading
from collections import deque
from dataclasses import dataclass, field

from . import dimred, stats, topics as tp
from . import sentiment as snt
from .artifacts import Artifacts, profile_key
from .errors import (
    BotlabError,
    Cancelled,
    InvalidHyperparameter,
    InvalidQuery,
    JobPending,
    UnknownFeature,
    UnknownJob,
)
from .session import LabelStore, SelectionState, apply_selection, select_special
from .timebin import LEVELS, period_end, period_start, window_bounds
from .transport import Transport, accept_transport

ENVELOPE_KINDS = (
    "query", "result", "job_submit", "job_status",
    "selection_update", "label_update", "error",
)
DEFAULT_PAGE_SIZE = 100
VIEWS = ("timeline", "dimred", "details", "topics", "features")


# --------------------------------------------------------------------------
# jobs

@dataclass
class Job:
    job_id: str
    kind: str           # lda | dimred
    params: dict
    result_ref: str
    state: str = "queued"
    progress: float = 0.0
    message: str = ""
    cancel: threading.Event = field(default_factory=threading.Event)

    def to_json(self) -> dict:
        doc = {"job_id": self.job_id, "state": self.state, "progress": self.progress}
        if self.state == "done":
            doc["result_ref"] = self.result_ref
        if self.state == "failed":
            doc["message"] = self.message
        return doc


class JobManager:
    """Single worker thread; at most one LDA job queued behind the running one."""

    def __init__(self, runner, on_transition):
        self._runner = runner
        self._on_transition = on_transition
        self._lock = threading.Lock()
        self._queue: deque[Job] = deque()
        self._wake = threading.Condition(self._lock)
        self._jobs: dict[str, Job] = {}
        self._running: Job | None = None
        self._ids = itertools.count(1)
        self._stop = False
        self._thread = threading.Thread(target=self._work, name="botlab-jobs", daemon=True)
        self._thread.start()

    def submit(self, kind: str, params: dict, result_ref: str, cached: bool) -> Job:
        with self._lock:
            job = Job(job_id=f"job-{next(self._ids)}", kind=kind, params=params,
                      result_ref=result_ref)
            self._jobs[job.job_id] = job
            if cached:
                job.state = "done"
                job.progress = 1.0
            else:
                if kind == "lda":
                    # a fresh LDA submission supersedes any queued (not running) one
                    for queued in [j for j in self._queue if j.kind == "lda"]:
                        self._queue.remove(queued)
                        queued.state = "cancelled"
                self._queue.append(job)
                self._wake.notify()
        self._on_transition(job)
        return job

    def get(self, job_id: str) -> Job:
        with self._lock:
            job = self._jobs.get(job_id)
        if job is None:
            raise UnknownJob(f"unknown job {job_id}")
        return job

    def busy_with_lda(self) -> bool:
        with self._lock:
            if self._running is not None and self._running.kind == "lda":
                return True
            return any(j.kind == "lda" for j in self._queue)

    def set_progress(self, job: Job, fraction: float) -> None:
        job.progress = max(job.progress, min(1.0, fraction))

    def shutdown(self) -> None:
        with self._lock:
            self._stop = True
            if self._running is not None:
                self._running.cancel.set()
            for job in self._queue:
                job.state = "cancelled"
            self._queue.clear()
            self._wake.notify()
        self._thread.join(timeout=30)

    def _work(self) -> None:
        while True:
            with self._lock:
                while not self._queue and not self._stop:
                    self._wake.wait()
                if self._stop:
                    return
                job = self._queue.popleft()
                job.state = "running"
                self._running = job
            self._on_transition(job)
            try:
                self._runner(job)
                job.progress = 1.0
                job.state = "cancelled" if job.cancel.is_set() else "done"
            except Cancelled:
                job.state = "cancelled"
            except BotlabError as exc:
                job.message = str(exc)
                job.state = "failed"
            except Exception as exc:  # defensive: a job must never kill the worker
                job.message = f"{type(exc).__name__}: {exc}"
                job.state = "failed"
            with self._lock:
                self._running = None
            self._on_transition(job)


# --------------------------------------------------------------------------
# session hub

class SessionHub:
    """All mutable session state; mutated only from the event loop thread."""

    def __init__(self, artifacts: Artifacts, store: LabelStore):
        self.artifacts = artifacts
        self.store = store
        self.selection = SelectionState.empty()
        self.version = 0
        self.clients: dict[int, asyncio.Queue] = {}
        self._client_ids = itertools.count(1)
        self._push_ids = itertools.count(1)
        self.loop: asyncio.AbstractEventLoop | None = None

        self.models: dict[str, tp.TopicModel] = {}
        self.embeddings: dict[str, dimred.Embedding2D] = {}
        self._registry_lock = threading.Lock()

        self.default_dr_ref = "default"
        self.embeddings["default"] = artifacts.default_embedding
        self.current_dr_ref = "default"

        self.current_topics_ref = self._pick_default_profile()
        self.lexicon = snt.default_lexicon()
        self.jobs = JobManager(self._run_job, self._job_transition)

    # -- registries ---------------------------------------------------------

    def _pick_default_profile(self) -> str | None:
        best = None
        for key, meta in sorted(self.artifacts.profile_index.items()):
            if meta["level"] == "overall" and (best is None or meta["k"] == tp.DEFAULT_K):
                best = key
                if meta["k"] == tp.DEFAULT_K:
                    break
        return best

    def model_for(self, ref: str) -> tp.TopicModel | None:
        with self._registry_lock:
            model = self.models.get(ref)
        if model is None:
            model = self.artifacts.load_profile(ref)
            if model is not None:
                with self._registry_lock:
                    self.models[ref] = model
        return model

    def embedding_for(self, ref: str) -> dimred.Embedding2D | None:
        with self._registry_lock:
            return self.embeddings.get(ref)

    # -- jobs ---------------------------------------------------------------

    def submit_job(self, payload: dict) -> Job:
        kind = payload.get("job")
        if kind == "lda":
            params = self._lda_params(payload)
            ref = profile_key(params["level"], params["window"], params["k"],
                              params["alpha"], params["beta"],
                              params["iterations"], params["seed"])
            cached = self.model_for(ref) is not None
            return self.jobs.submit("lda", params, ref, cached)
        if kind == "dimred":
            spec = dimred.DRSpec.from_json(payload.get("spec") or {})
            transform = payload.get("transform", "zscore")
            if transform not in ("none", "minmax", "zscore"):
                raise InvalidHyperparameter("transform", f"unknown transform {transform!r}")
            blob = json.dumps({"spec": spec.to_json(), "transform": transform},
                              sort_keys=True, separators=(",", ":"))
            ref = "dr-" + hashlib.sha256(blob.encode()).hexdigest()[:16]
            params = {"spec": spec, "transform": transform}
            cached = self.embedding_for(ref) is not None
            return self.jobs.submit("dimred", params, ref, cached)
        raise InvalidHyperparameter("job", f"unknown job kind {kind!r}")

    def _lda_params(self, payload: dict) -> dict:
        k = payload.get("k", tp.DEFAULT_K)
        if not isinstance(k, int) or isinstance(k, bool) or k < 1:
            raise InvalidHyperparameter("k", "must be an integer >= 1")
        level = payload.get("level", "overall")
        if level not in LEVELS:
            raise InvalidHyperparameter("level", f"unknown level {level!r}")
        window = payload.get("window")
        alpha = payload.get("alpha", tp.default_alpha(k))
        beta = payload.get("beta", tp.DEFAULT_BETA)
        iterations = payload.get("iterations", tp.DEFAULT_ITERATIONS)
        seed = payload.get("seed", tp.DEFAULT_SEED)
        if not (isinstance(alpha, (int, float)) and alpha > 0):
            raise InvalidHyperparameter("alpha", "must be > 0")
        if not (isinstance(beta, (int, float)) and beta > 0):
            raise InvalidHyperparameter("beta", "must be > 0")
        if not isinstance(iterations, int) or iterations < 50:
            raise InvalidHyperparameter("iterations", "must be an integer >= 50")
        return {"level": level, "window": window, "k": k, "alpha": float(alpha),
                "beta": float(beta), "iterations": iterations, "seed": seed}

    def _run_job(self, job: Job) -> None:
        if job.kind == "lda":
            p = job.params
            docs = tp.prepare_documents(self.artifacts.corpus, p["level"], p["window"])
            model = tp.fit_lda(
                docs, K=p["k"], alpha=p["alpha"], beta=p["beta"],
                iterations=p["iterations"], seed=p["seed"], cancel=job.cancel,
                progress=lambda done, total: self.jobs.set_progress(job, done / total),
            )
            with self._registry_lock:
                self.models[job.result_ref] = model
        else:
            matrix = dimred.transform(self.artifacts.static,
                                      dimred.TransformSpec(job.params["transform"]))
            labels = self.store.labels()
            label_list = [labels.get(a, "unlabeled") for a in matrix.account_ids]
            embedding = dimred.reduce(matrix, job.params["spec"], labels=label_list,
                                      cancel=job.cancel)
            with self._registry_lock:
                self.embeddings[job.result_ref] = embedding

    def _job_transition(self, job: Job) -> None:
        if job.state == "done":
            if job.kind == "lda":
                self.current_topics_ref = job.result_ref
            else:
                self.current_dr_ref = job.result_ref
        if self.loop is not None:
            self.loop.call_soon_threadsafe(self.push, "job_status", job.to_json())

    # -- pushes --------------------------------------------------------------

    def register_client(self) -> tuple[int, asyncio.Queue]:
        cid = next(self._client_ids)
        queue: asyncio.Queue = asyncio.Queue()
        self.clients[cid] = queue
        return cid, queue

    def drop_client(self, cid: int) -> None:
        self.clients.pop(cid, None)

    def push(self, kind: str, payload: dict) -> None:
        envelope = {"id": f"push-{next(self._push_ids)}", "kind": kind, "payload": payload}
        for queue in self.clients.values():
            queue.put_nowait(envelope)

    # -- mutations -----------------------------------------------------------

    def apply_selection_update(self, payload: dict) -> dict:
        ids = payload.get("ids", [])
        corpus_ids = self.artifacts.corpus.account_ids
        if "mode" in payload:
            self.selection = select_special(
                self.selection, payload["mode"], corpus_ids,
                self.store.labels(), payload.get("class"),
            )
        else:
            rule = payload.get("rule", "new")
            self.selection = apply_selection(self.selection, rule, ids, corpus_ids)
        self.version += 1
        self.push("selection_update", {
            "selected": sorted(self.selection.selected),
            "version": self.version,
        })
        return {"selected_count": len(self.selection.selected), "version": self.version}

    def apply_label_update(self, payload: dict) -> dict:
        ids = payload.get("ids", [])
        label = payload.get("label")
        stamp = self.store.set_labels(ids, label, corpus_ids=self.artifacts.corpus.account_ids)
        self.version += 1
        self.push("label_update", {
            "ids": sorted(set(ids)), "label": label,
            "updated_at": stamp, "version": self.version,
        })
        return {"applied": len(set(ids)), "updated_at": stamp, "version": self.version}


# --------------------------------------------------------------------------
# view queries

def _resolve_window(hub: SessionHub, level: str, window):
    """Clamp the query window onto the corpus periods of the level."""
    if level == "overall":
        return ["overall"], None
    cube = hub.artifacts.cubes[level]
    if window is None:
        return list(cube.periods), None
    try:
        lo, hi = window_bounds(window)
    except (ValueError, TypeError) as exc:
        raise InvalidQuery("window", str(exc)) from None
    keep = [p for p in cube.periods if period_start(p) < hi and period_end(p) > lo]
    if not keep:
        raise InvalidQuery("window", "window lies outside the corpus time span")
    return keep, (lo, hi)


def _check_features(hub: SessionHub, feature_ids, default: list[str]) -> list[str]:
    catalog_ids = hub.artifacts.static.catalog.ids()
    if feature_ids is None:
        return default
    if not isinstance(feature_ids, list) or not feature_ids:
        raise InvalidQuery("feature_ids", "must be a nonempty list")
    for fid in feature_ids:
        if fid not in catalog_ids:
            raise UnknownFeature(f"unknown feature {fid!r}")
    return list(feature_ids)


def _page_bounds(payload: dict, total: int) -> tuple[int, int, int, int]:
    page = payload.get("page", 0)
    page_size = payload.get("page_size", DEFAULT_PAGE_SIZE)
    if not isinstance(page, int) or page < 0:
        raise InvalidQuery("page", "must be an integer >= 0")
    if not isinstance(page_size, int) or page_size < 1:
        raise InvalidQuery("page_size", "must be an integer >= 1")
    return page, page_size, page * page_size, min(total, (page + 1) * page_size)


def _query_timeline(hub: SessionHub, payload: dict) -> dict:
    level = payload.get("level", "year")
    if level not in LEVELS:
        raise InvalidQuery("level", f"unknown level {level!r}")
    feature_ids = _check_features(hub, payload.get("feature_ids"), ["tweet_count"])
    periods, _ = _resolve_window(hub, level, payload.get("window"))
    corpus_ids = hub.artifacts.corpus.account_ids
    page, page_size, lo, hi = _page_bounds(payload, len(corpus_ids))
    labels = hub.store.labels()
    label_list = [labels.get(a, "unlabeled") for a in corpus_ids]

    if level == "overall":
        values = hub.artifacts.static.values[:, None, :]
        period_index = {"overall": 0}
    else:
        cube = hub.artifacts.cubes[level]
        values = cube.values
        period_index = {p: i for i, p in enumerate(cube.periods)}

    features_doc = {}
    catalog = hub.artifacts.static.catalog
    for fid in feature_ids:
        col = catalog.index_of(fid)
        classes: dict[str, dict] = {}
        for cls in ("genuine", "spambot", "unlabeled"):
            member = [i for i, lab in enumerate(label_list) if lab == cls]
            if not member:
                continue
            per_period = {}
            for p in periods:
                vals = values[member, period_index[p], col]
                per_period[p] = stats.box_stats(vals).to_json()
            classes[cls] = per_period
        accounts = [
            {
                "account_id": corpus_ids[i],
                "values": {p: float(values[i, period_index[p], col]) for p in periods},
            }
            for i in range(lo, hi)
        ]
        features_doc[fid] = {"classes": classes, "accounts": accounts}

    return {
        "view": "timeline", "level": level, "periods": periods,
        "features": features_doc, "page": page, "page_size": page_size,
        "total_accounts": len(corpus_ids),
        "selected": sorted(hub.selection.selected),
    }


def _query_dimred(hub: SessionHub, payload: dict) -> dict:
    ref = payload.get("result_ref") or hub.current_dr_ref
    embedding = hub.embedding_for(ref)
    if embedding is None:
        raise InvalidQuery("result_ref", f"no embedding {ref!r}")
    corpus_ids = list(embedding.account_ids)
    page, page_size, lo, hi = _page_bounds(payload, len(corpus_ids))
    labels = hub.store.labels()
    size_col = hub.artifacts.static.column("tweet_count")
    selected = hub.selection.selected
    accounts = [
        {
            "account_id": corpus_ids[i],
            "x": float(embedding.coords[i, 0]),
            "y": float(embedding.coords[i, 1]),
            "tweet_count": float(size_col[i]),
            "label": labels.get(corpus_ids[i], "unlabeled"),
            "selected": corpus_ids[i] in selected,
        }
        for i in range(lo, hi)
    ]
    return {
        "view": "dimred", "result_ref": ref, "spec": embedding.spec.to_json(),
        "accounts": accounts, "page": page, "page_size": page_size,
        "total_accounts": len(corpus_ids),
    }


def _word_frequencies(hub: SessionHub, account_ids, limit: int = 100) -> list[dict]:
    counts: dict[str, int] = {}
    for aid in account_ids:
        for tweet in hub.artifacts.corpus.tweets_of(aid):
            for token in snt.tokenize(tweet.text):
                if token in tp._STOPWORDS:
                    continue
                counts[token] = counts.get(token, 0) + 1
    order = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [{"token": t, "count": c} for t, c in order[:limit]]


def _query_details(hub: SessionHub, payload: dict) -> dict:
    tab = payload.get("tab", "cards")
    if tab not in ("cards", "tweets", "wordcloud"):
        raise InvalidQuery("tab", f"unknown details tab {tab!r}")
    corpus = hub.artifacts.corpus
    selected = sorted(hub.selection.selected)
    doc: dict = {"view": "details", "tab": tab, "selected": selected}
    if tab == "cards":
        ids = corpus.account_ids
        page, page_size, lo, hi = _page_bounds(payload, len(ids))
        cards = []
        for aid in ids[lo:hi]:
            account = corpus.accounts[aid]
            cards.append({
                "account_id": aid,
                "screen_name": account.screen_name,
                "display_name": account.display_name,
                "created_at": account.created_at.isoformat(),
                "followers_count": account.followers_count,
                "following_count": account.following_count,
                "likes_count": account.likes_count,
                "tweet_count": account.declared_tweet_count,
                "profile_image_url": account.profile_image_url,
            })
        doc.update(cards=cards, page=page, page_size=page_size, total_accounts=len(ids))
    elif tab == "tweets":
        rows = []
        for aid in selected:
            for tweet in corpus.tweets_of(aid):
                rows.append((tweet.created_at, {
                    "tweet_id": tweet.tweet_id, "account_id": aid,
                    "created_at": tweet.created_at.isoformat(), "text": tweet.text,
                }))
        rows.sort(key=lambda r: (r[0], r[1]["tweet_id"]))
        page, page_size, lo, hi = _page_bounds(payload, len(rows))
        doc.update(tweets=[r[1] for r in rows[lo:hi]], page=page,
                   page_size=page_size, total_tweets=len(rows))
    else:
        doc.update(words=_word_frequencies(hub, selected))
    return doc


def _query_topics(hub: SessionHub, payload: dict) -> dict:
    spec = payload.get("method_spec") or {}
    ref = payload.get("result_ref")
    if ref is None and not spec:
        ref = hub.current_topics_ref
    elif ref is None:
        params = hub._lda_params({"job": "lda", **spec})
        ref = profile_key(params["level"], params["window"], params["k"],
                          params["alpha"], params["beta"],
                          params["iterations"], params["seed"])
    model = hub.model_for(ref) if ref else None
    if model is None:
        if hub.jobs.busy_with_lda():
            raise JobPending("topic model still computing")
        if spec:
            job = hub.submit_job({"job": "lda", **spec})
            raise JobPending(f"submitted job {job.job_id}; poll then requery")
        raise InvalidQuery("method_spec", "no topic model available; submit an LDA job")

    doc = {
        "view": "topics", "result_ref": ref, "k": model.K,
        "alpha": model.alpha, "beta": model.beta, "seed": model.seed,
        "iterations": model.iterations, "level": model.level,
        "window": list(model.window) if model.window else None,
        "topics": [s.to_json() for s in tp.summaries(model, hub.lexicon)],
    }
    topic_ids = payload.get("topic_ids")
    if topic_ids:
        doc["cloud"] = [
            {"token": t, "weight": w}
            for t, w in tp.word_cloud_weights(model, topic_ids)
        ]
        threshold = payload.get("threshold", tp.DEFAULT_MEMBERSHIP_THRESHOLD)
        doc["members"] = sorted(tp.members(model, topic_ids, threshold))
        doc["threshold"] = threshold
    else:
        doc["cloud"] = [
            {"token": t, "weight": w}
            for t, w in tp.word_cloud_weights(model, list(range(model.K)))
        ]
    return doc


def _query_features(hub: SessionHub, payload: dict) -> dict:
    feature_ids = _check_features(hub, payload.get("feature_ids"), ["tweet_count"])
    mode = (payload.get("method_spec") or {}).get("mode", "none")
    matrix = dimred.transform(hub.artifacts.static, dimred.TransformSpec(mode))
    corpus_ids = list(matrix.account_ids)
    labels = hub.store.labels()
    label_list = [labels.get(a, "unlabeled") for a in corpus_ids]
    selected_mask = [a in hub.selection.selected for a in corpus_ids]
    page, page_size, lo, hi = _page_bounds(payload, len(corpus_ids))

    features_doc = {}
    for fid in feature_ids:
        col = matrix.column(fid)
        groups = stats.class_distributions(col, label_list, selected_mask)
        features_doc[fid] = {
            "groups": {
                name: {"box": box.to_json(), "density": curve.to_json()}
                for name, (box, curve) in groups.items()
            },
            "overall": stats.box_stats(col).to_json(),
            "accounts": [
                {"account_id": corpus_ids[i], "value": float(col[i])}
                for i in range(lo, hi)
            ],
        }
    return {
        "view": "features", "transform": mode, "feature_ids": feature_ids,
        "features": features_doc, "page": page, "page_size": page_size,
        "total_accounts": len(corpus_ids),
    }


def handle_query(hub: SessionHub, payload: dict) -> dict:
    view = payload.get("view")
    if view not in VIEWS:
        raise InvalidQuery("view", f"unknown view {view!r}")
    handler = {
        "timeline": _query_timeline,
        "dimred": _query_dimred,
        "details": _query_details,
        "topics": _query_topics,
        "features": _query_features,
    }[view]
    return handler(hub, payload)


# --------------------------------------------------------------------------
# connection handling

async def _handle_envelope(hub: SessionHub, envelope: dict) -> dict:
    env_id = envelope.get("id")
    kind = envelope.get("kind")
    payload = envelope.get("payload")
    if not isinstance(env_id, str) or not env_id:
        return {"id": "", "kind": "error",
                "payload": {"code": "invalid_envelope", "message": "missing id"}}
    if kind not in ENVELOPE_KINDS or not isinstance(payload, dict):
        return {"id": env_id, "kind": "error",
                "payload": {"code": "invalid_envelope", "message": "bad kind or payload"}}
    try:
        if kind == "query":
            return {"id": env_id, "kind": "result", "payload": handle_query(hub, payload)}
        if kind == "job_submit":
            job = hub.submit_job(payload)
            return {"id": env_id, "kind": "result", "payload": job.to_json()}
        if kind == "job_status":
            job = hub.jobs.get(str(payload.get("job_id")))
            return {"id": env_id, "kind": "result", "payload": job.to_json()}
        if kind == "selection_update":
            return {"id": env_id, "kind": "result",
                    "payload": hub.apply_selection_update(payload)}
        if kind == "label_update":
            return {"id": env_id, "kind": "result",
                    "payload": hub.apply_label_update(payload)}
        return {"id": env_id, "kind": "error",
                "payload": {"code": "invalid_envelope",
                            "message": f"kind {kind} is server-to-client only"}}
    except BotlabError as exc:
        return {"id": env_id, "kind": "error", "payload": exc.payload()}
    except (ValueError, TypeError, KeyError) as exc:
        return {"id": env_id, "kind": "error",
                "payload": {"code": "invalid_query", "message": str(exc)}}


async def _client_loop(hub: SessionHub, transport: Transport) -> None:
    cid, queue = hub.register_client()

    async def writer() -> None:
        while True:
            envelope = await queue.get()
            if envelope is None:
                return
            try:
                await transport.send(envelope)
            except (ConnectionError, OSError):
                return

    writer_task = asyncio.ensure_future(writer())
    try:
        pending = getattr(transport, "pending_first", None)
        while True:
            envelope = pending if pending is not None else await transport.recv()
            pending = None
            if envelope is None:
                return
            response = await _handle_envelope(hub, envelope)
            queue.put_nowait(response)
    finally:
        hub.drop_client(cid)
        queue.put_nowait(None)
        await asyncio.wait({writer_task})
        await transport.close()


class SessionServer:
    """Owns the listening socket, the hub and the job worker."""

    def __init__(self, artifacts: Artifacts, store: LabelStore, host: str = "127.0.0.1",
                 port: int = 0):
        self.hub = SessionHub(artifacts, store)
        self.host = host
        self.port = port
        self._server: asyncio.AbstractServer | None = None
        self._connections: set[asyncio.Task] = set()

    async def start(self) -> int:
        self.hub.loop = asyncio.get_running_loop()
        self._server = await asyncio.start_server(self._on_connect, self.host, self.port)
        self.port = self._server.sockets[0].getsockname()[1]
        return self.port

    async def _on_connect(self, reader, writer) -> None:
        task = asyncio.current_task()
        if task is not None:
            self._connections.add(task)
            task.add_done_callback(self._connections.discard)
        transport = await accept_transport(reader, writer)
        if transport is None:
            writer.close()
            return
        await _client_loop(self.hub, transport)

    async def serve_forever(self) -> None:
        assert self._server is not None
        async with self._server:
            await self._server.serve_forever()

    async def stop(self) -> None:
        if self._server is not None:
            self._server.close()
            await self._server.wait_closed()
        for task in list(self._connections):
            task.cancel()
        if self._connections:
            await asyncio.gather(*self._connections, return_exceptions=True)
        self.hub.jobs.shutdown()
        self.hub.store.close()
