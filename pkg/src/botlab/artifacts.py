"""Offline preprocessing artifacts and their on-disk layout.

An artifact directory is fully deterministic for a given input (rerunning
preprocess reproduces every byte), so the manifest pins sha256 hashes of
all analysis files and load refuses anything that fails verification. See
docs/artifacts.md for the exact layout. The mutable label database lives
next to the artifacts but is intentionally not manifest-tracked.
"""
from __future__ import annotations

import datetime as dt
import hashlib
import json
import os
from dataclasses import dataclass

import numpy as np

from . import features as feats
from . import sentiment as snt
from . import topics as tp
from .dimred import DRSpec, Embedding2D, reduce as dr_reduce
from .errors import CorruptArtifact
from .ingest import Corpus, load_dataset
from .timebin import period_range, window_bounds

MANIFEST = "manifest.json"
LABEL_DB = "labels.db"
DEFAULT_PROFILE_KS = (10, 20)
DEFAULT_DR_SPEC = DRSpec(method="kpca", kernel="rbf")


def _sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_json(path: str, doc) -> None:
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, indent=1, ensure_ascii=False)
        fh.write("\n")


def _read_json(path: str):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _write_npy(path: str, arr: np.ndarray) -> None:
    os.makedirs(os.path.dirname(path), exist_ok=True)
    np.save(path, arr)


def _fmt_ts(ts: dt.datetime) -> str:
    return ts.isoformat()


def save_corpus_csvs(corpus: Corpus, accounts_path: str, tweets_path: str) -> None:
    """Write the corpus back out in canonical normalized form."""
    import csv

    with open(accounts_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list_account_header())
        for account in corpus.accounts.values():
            writer.writerow([
                account.account_id, account.screen_name, account.display_name,
                _fmt_ts(account.created_at), account.followers_count,
                account.following_count, account.likes_count,
                account.declared_tweet_count, account.profile_image_url or "",
            ])
    with open(tweets_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list_tweet_header())
        for tweet in corpus.tweets:
            writer.writerow([
                tweet.tweet_id, tweet.account_id, _fmt_ts(tweet.created_at),
                tweet.text, tweet.retweet_count, tweet.favorite_count,
                int(tweet.is_retweet), int(tweet.is_reply),
                " ".join(tweet.hashtags), " ".join(tweet.urls), " ".join(tweet.mentions),
            ])


def list_account_header() -> list[str]:
    from .ingest import ACCOUNT_COLUMNS
    return list(ACCOUNT_COLUMNS)


def list_tweet_header() -> list[str]:
    from .ingest import TWEET_COLUMNS, TWEET_ENTITY_COLUMNS
    return list(TWEET_COLUMNS) + list(TWEET_ENTITY_COLUMNS)


def profile_key(level: str, window, k: int, alpha: float, beta: float,
                iterations: int, seed: int) -> str:
    """Stable cache key; windows are normalized to resolved UTC instants."""
    if window is not None:
        lo, hi = window_bounds(window)
        window = [lo.isoformat(), hi.isoformat()]
    doc = {"level": level, "window": window, "k": k, "alpha": alpha,
           "beta": beta, "iterations": iterations, "seed": seed}
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass
class Artifacts:
    root: str
    corpus: Corpus
    static: feats.FeatureMatrix
    cubes: dict[str, feats.TemporalFeatureCube]
    sentiment: dict[str, tuple[list[str], np.ndarray]]
    default_embedding: Embedding2D
    profile_index: dict[str, dict]

    @property
    def label_db_path(self) -> str:
        return os.path.join(self.root, LABEL_DB)

    def load_profile(self, key: str) -> tp.TopicModel | None:
        meta = self.profile_index.get(key)
        if meta is None:
            return None
        base = os.path.join(self.root, "topics", "profiles", key)
        return tp.TopicModel(
            K=meta["k"], alpha=meta["alpha"], beta=meta["beta"],
            phi=np.load(base + ".phi.npy"), theta=np.load(base + ".theta.npy"),
            account_ids=tuple(meta["account_ids"]),
            vocabulary=tuple(meta["vocabulary"]),
            seed=meta["seed"], iterations=meta["iterations"],
            level=meta["level"], window=tuple(meta["window"]) if meta["window"] else None,
        )


def _save_profile(root: str, key: str, model: tp.TopicModel, meta_extra: dict) -> dict:
    base = os.path.join(root, "topics", "profiles", key)
    _write_npy(base + ".phi.npy", model.phi)
    _write_npy(base + ".theta.npy", model.theta)
    meta = {
        "k": model.K, "alpha": model.alpha, "beta": model.beta,
        "seed": model.seed, "iterations": model.iterations,
        "level": model.level, "window": list(model.window) if model.window else None,
        "account_ids": list(model.account_ids),
        "vocabulary": list(model.vocabulary),
    }
    meta.update(meta_extra)
    return meta


def default_profile_plan(corpus: Corpus) -> list[tuple[str, str | None, int]]:
    """(level, window, K) tuples: overall plus one window per corpus year."""
    plan: list[tuple[str, str | None, int]] = []
    for k in DEFAULT_PROFILE_KS:
        plan.append(("overall", None, k))
    if corpus.time_span is not None:
        for year in period_range(corpus.time_span[0], corpus.time_span[1], "year"):
            for k in DEFAULT_PROFILE_KS:
                plan.append(("year", year, k))
    return plan


def build_artifacts(
    corpus: Corpus,
    lexicon: snt.Lexicon,
    out_dir: str,
    profile_plan: list[tuple[str, str | None, int]] | None = None,
    dr_spec: DRSpec = DEFAULT_DR_SPEC,
    log=lambda msg: None,
) -> Artifacts:
    """Run the full offline analysis and write a verified artifact dir."""
    os.makedirs(out_dir, exist_ok=True)

    log("serializing corpus")
    save_corpus_csvs(
        corpus,
        _prep(out_dir, "corpus/accounts.csv"),
        _prep(out_dir, "corpus/tweets.csv"),
    )

    log("extracting features")
    static = feats.extract_static(corpus, lexicon)
    _write_npy(os.path.join(out_dir, "features/static.npy"), static.values)
    _write_json(os.path.join(out_dir, "features/catalog.json"), static.catalog.to_json())

    cubes: dict[str, feats.TemporalFeatureCube] = {}
    periods_doc: dict[str, list[str]] = {}
    for level in ("year", "month", "day"):
        cube = feats.extract_temporal(corpus, lexicon, level)
        cubes[level] = cube
        periods_doc[level] = list(cube.periods)
        _write_npy(os.path.join(out_dir, f"features/cube_{level}.npy"), cube.values)
    _write_json(os.path.join(out_dir, "features/periods.json"), periods_doc)

    log("scoring sentiment")
    sentiment: dict[str, tuple[list[str], np.ndarray]] = {}
    for level in ("overall", "year", "month", "day"):
        periods = ["overall"] if level == "overall" else periods_doc[level]
        index = {p: i for i, p in enumerate(periods)}
        arr = np.zeros((len(corpus.accounts), len(periods), 3))
        for row, aid in enumerate(corpus.accounts):
            for period, score in snt.score_account(lexicon, corpus.tweets_of(aid), level).items():
                arr[row, index[period]] = (score.polarity, score.subjectivity, score.matched_count)
        sentiment[level] = (periods, arr)
        _write_npy(os.path.join(out_dir, f"sentiment/{level}.npy"), arr)

    log(f"default embedding ({dr_spec.method})")
    from .dimred import TransformSpec, transform
    embedding = dr_reduce(transform(static, TransformSpec("zscore")), dr_spec)
    _write_npy(os.path.join(out_dir, "embeddings/default.npy"), embedding.coords)
    _write_json(os.path.join(out_dir, "embeddings/default.json"), dr_spec.to_json())

    if profile_plan is None:
        profile_plan = default_profile_plan(corpus)
    profile_index: dict[str, dict] = {}
    for level, window, k in profile_plan:
        key = profile_key(level, window, k, tp.default_alpha(k), tp.DEFAULT_BETA,
                          tp.DEFAULT_ITERATIONS, tp.DEFAULT_SEED)
        log(f"topic profile level={level} window={window} k={k}")
        try:
            docs = tp.prepare_documents(corpus, level, window)
        except Exception as exc:  # degenerate windows are skipped, not fatal
            log(f"  skipped: {exc}")
            continue
        model = tp.fit_lda(docs, K=k)
        profile_index[key] = _save_profile(out_dir, key, model,
                                           {"requested_window": window})
    _write_json(os.path.join(out_dir, "topics/profiles/index.json"), profile_index)

    log("writing manifest")
    files = {}
    for dirpath, _, names in os.walk(out_dir):
        for name in sorted(names):
            full = os.path.join(dirpath, name)
            rel = os.path.relpath(full, out_dir)
            if rel in (MANIFEST, LABEL_DB) or rel.startswith(LABEL_DB):
                continue
            files[rel.replace(os.sep, "/")] = _sha256(full)
    _write_json(os.path.join(out_dir, MANIFEST), {"version": 1, "files": files})
    return load_artifacts(out_dir)


def _prep(root: str, rel: str) -> str:
    path = os.path.join(root, rel)
    os.makedirs(os.path.dirname(path), exist_ok=True)
    return path


def verify_manifest(root: str) -> dict:
    manifest_path = os.path.join(root, MANIFEST)
    if not os.path.isfile(manifest_path):
        raise CorruptArtifact(f"missing {MANIFEST} in {root}")
    manifest = _read_json(manifest_path)
    for rel, expected in sorted(manifest.get("files", {}).items()):
        full = os.path.join(root, rel)
        if not os.path.isfile(full):
            raise CorruptArtifact(f"missing artifact file {rel}")
        actual = _sha256(full)
        if actual != expected:
            raise CorruptArtifact(f"hash mismatch for {rel}")
    return manifest


def load_artifacts(root: str) -> Artifacts:
    """Verify the manifest and load everything back into memory."""
    verify_manifest(root)
    corpus = load_dataset(
        os.path.join(root, "corpus/accounts.csv"),
        os.path.join(root, "corpus/tweets.csv"),
    )
    catalog = feats.catalog()
    stored_catalog = _read_json(os.path.join(root, "features/catalog.json"))
    if [e["feature_id"] for e in stored_catalog] != catalog.ids():
        raise CorruptArtifact("feature catalog does not match this build")
    static = feats.FeatureMatrix(
        account_ids=tuple(corpus.accounts),
        values=np.load(os.path.join(root, "features/static.npy")),
        catalog=catalog,
    )
    periods_doc = _read_json(os.path.join(root, "features/periods.json"))
    cubes = {
        level: feats.TemporalFeatureCube(
            level=level,
            periods=tuple(periods_doc[level]),
            account_ids=tuple(corpus.accounts),
            values=np.load(os.path.join(root, f"features/cube_{level}.npy")),
            catalog=catalog,
        )
        for level in ("year", "month", "day")
    }
    sentiment = {}
    for level in ("overall", "year", "month", "day"):
        periods = ["overall"] if level == "overall" else list(periods_doc[level])
        sentiment[level] = (periods, np.load(os.path.join(root, f"sentiment/{level}.npy")))
    spec_doc = _read_json(os.path.join(root, "embeddings/default.json"))
    spec = DRSpec.from_json(spec_doc)
    embedding = Embedding2D(
        account_ids=tuple(corpus.accounts),
        coords=np.load(os.path.join(root, "embeddings/default.npy")),
        spec=spec,
    )
    profile_index = _read_json(os.path.join(root, "topics/profiles/index.json"))
    return Artifacts(
        root=root,
        corpus=corpus,
        static=static,
        cubes=cubes,
        sentiment=sentiment,
        default_embedding=embedding,
        profile_index=profile_index,
    )
