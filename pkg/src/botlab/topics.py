"""Account-level topic modeling: preprocessing, collapsed Gibbs LDA and the
derived topic quantities (scores, sentiment, fuzzy membership, word clouds).

A document is one account's concatenated tweets inside the active time
window, run through: lowercase, URL/mention stripping, non-alphanumeric
splitting, stopword removal, Porter suffix stripping, minimum token length
3 and minimum document frequency 2. Inference is collapsed Gibbs sampling
with symmetric Dirichlet priors, deterministic for a given seed (the same
explicit PRNG drives both kernel backends).
"""
from __future__ import annotations

import re
import threading
from dataclasses import dataclass
from importlib import resources

import numpy as np

from . import kernels
from .errors import (
    Cancelled,
    EmptyDocuments,
    EmptySelection,
    EmptyWindow,
    InvalidHyperparameter,
    UnknownTopicId,
)
from .ingest import Corpus
from .sentiment import Lexicon
from .stemmer import stem
from .timebin import LEVELS, window_bounds

DEFAULT_K = 20
DEFAULT_BETA = 0.01
DEFAULT_ITERATIONS = 500
DEFAULT_SEED = 7
DEFAULT_MEMBERSHIP_THRESHOLD = 0.2
MIN_TOKEN_LEN = 3
MIN_DOC_FREQ = 2

_URL_RE = re.compile(r"https?://\S+")
_MENTION_RE = re.compile(r"(?<!\w)@\S+")
_SPLIT_RE = re.compile(r"[^0-9a-z]+")


def default_alpha(k: int) -> float:
    return 50.0 / k


def _stopwords() -> frozenset[str]:
    text = (resources.files("botlab.data") / "stopwords.txt").read_text("utf-8")
    return frozenset(line.strip() for line in text.splitlines() if line.strip())

_STOPWORDS = _stopwords()


def tokenize_for_topics(text: str) -> list[str]:
    cleaned = _MENTION_RE.sub(" ", _URL_RE.sub(" ", text.lower()))
    out = []
    for raw in _SPLIT_RE.split(cleaned):
        if not raw or raw in _STOPWORDS:
            continue
        stemmed = stem(raw)
        if len(stemmed) >= MIN_TOKEN_LEN:
            out.append(stemmed)
    return out


@dataclass(frozen=True)
class DocumentSet:
    level: str                                   # overall | year | month | day
    window: tuple[str, str] | None               # resolved ISO instants, half-open
    documents: tuple[tuple[str, tuple[str, ...]], ...]
    vocabulary: tuple[str, ...]

    @property
    def account_ids(self) -> tuple[str, ...]:
        return tuple(aid for aid, _ in self.documents)


@dataclass(frozen=True)
class TopicModel:
    K: int
    alpha: float
    beta: float
    phi: np.ndarray    # K x V, rows sum to 1
    theta: np.ndarray  # D x K, rows sum to 1
    account_ids: tuple[str, ...]
    vocabulary: tuple[str, ...]
    seed: int
    iterations: int
    level: str = "overall"
    window: tuple[str, str] | None = None


@dataclass(frozen=True)
class TopicSummary:
    topic_id: int
    score: float
    polarity: float
    subjectivity: float
    top_words: tuple[tuple[str, float], ...]

    def to_json(self) -> dict:
        return {
            "topic_id": self.topic_id,
            "score": self.score,
            "polarity": self.polarity,
            "subjectivity": self.subjectivity,
            "top_words": [{"token": t, "probability": p} for t, p in self.top_words],
        }


def prepare_documents(corpus: Corpus, level: str = "overall", window=None) -> DocumentSet:
    """Build one token document per account from the tweets in the window."""
    if level not in LEVELS:
        raise InvalidHyperparameter("level", f"unknown level {level!r}")
    bounds = None
    if window is not None:
        bounds = window_bounds(window)

    raw_docs: list[tuple[str, list[str]]] = []
    for aid in corpus.accounts:
        tokens: list[str] = []
        for tweet in corpus.tweets_of(aid):
            if bounds is not None and not (bounds[0] <= tweet.created_at < bounds[1]):
                continue
            tokens.extend(tokenize_for_topics(tweet.text))
        if tokens:
            raw_docs.append((aid, tokens))

    doc_freq: dict[str, int] = {}
    for _, tokens in raw_docs:
        for token in set(tokens):
            doc_freq[token] = doc_freq.get(token, 0) + 1
    kept = {t for t, df in doc_freq.items() if df >= MIN_DOC_FREQ}

    documents = []
    for aid, tokens in raw_docs:
        pruned = tuple(t for t in tokens if t in kept)
        if pruned:
            documents.append((aid, pruned))
    if not documents:
        raise EmptyWindow("no account has tokens in the requested window")

    window_echo = None
    if bounds is not None:
        window_echo = (bounds[0].isoformat(), bounds[1].isoformat())
    return DocumentSet(
        level=level,
        window=window_echo,
        documents=tuple(documents),
        vocabulary=tuple(sorted(kept)),
    )


def fit_lda(
    docs: DocumentSet,
    K: int = DEFAULT_K,
    alpha: float | None = None,
    beta: float = DEFAULT_BETA,
    iterations: int = DEFAULT_ITERATIONS,
    seed: int = DEFAULT_SEED,
    cancel: threading.Event | None = None,
    progress=None,
) -> TopicModel:
    """Collapsed Gibbs sampling from seeded uniform-random assignments."""
    if not isinstance(K, int) or K < 1:
        raise InvalidHyperparameter("K", "must be an integer >= 1")
    if alpha is None:
        alpha = default_alpha(K)
    if not alpha > 0:
        raise InvalidHyperparameter("alpha", "must be > 0")
    if not beta > 0:
        raise InvalidHyperparameter("beta", "must be > 0")
    if iterations < 50:
        raise InvalidHyperparameter("iterations", "must be >= 50")
    if not docs.documents:
        raise EmptyDocuments("document set is empty")

    vocab_index = {t: i for i, t in enumerate(docs.vocabulary)}
    words_list: list[int] = []
    doc_list: list[int] = []
    for d, (_, tokens) in enumerate(docs.documents):
        for token in tokens:
            words_list.append(vocab_index[token])
            doc_list.append(d)
    words = np.array(words_list, dtype=np.int32)
    doc_of = np.array(doc_list, dtype=np.int32)

    D = len(docs.documents)
    V = len(docs.vocabulary)
    z = np.zeros(len(words), dtype=np.int32)
    n_kw = np.zeros((K, V), dtype=np.int32)
    n_k = np.zeros(K, dtype=np.int32)
    n_dk = np.zeros((D, K), dtype=np.int32)
    cum = np.zeros(K, dtype=np.float64)

    state = kernels.seed_state(seed)
    kernels.gibbs_init(words, doc_of, z, n_kw, n_k, n_dk, state)
    for sweep in range(iterations):
        if cancel is not None and cancel.is_set():
            raise Cancelled(f"LDA cancelled at sweep {sweep}")
        kernels.gibbs_sweep(words, doc_of, z, n_kw, n_k, n_dk, float(alpha), float(beta), state, cum)
        if progress is not None:
            progress(sweep + 1, iterations)

    phi = (n_kw + beta) / (n_k[:, None] + V * beta)
    n_d = n_dk.sum(axis=1)
    theta = (n_dk + alpha) / (n_d[:, None] + K * alpha)
    return TopicModel(
        K=K, alpha=float(alpha), beta=float(beta),
        phi=phi, theta=theta,
        account_ids=docs.account_ids,
        vocabulary=docs.vocabulary,
        seed=seed, iterations=iterations,
        level=docs.level, window=docs.window,
    )


def topic_scores(model: TopicModel) -> list[float]:
    """Per-topic sum of document posting probabilities (sums to D)."""
    return [float(s) for s in model.theta.sum(axis=0)]


def _check_topic_ids(model: TopicModel, topic_ids) -> list[int]:
    ids = sorted(set(int(t) for t in topic_ids))
    for t in ids:
        if t < 0 or t >= model.K:
            raise UnknownTopicId(t)
    return ids


def topic_sentiment(model: TopicModel, lexicon: Lexicon, top_n: int = 30) -> list[tuple[float, float]]:
    """Probability-weighted lexicon average over each topic's top words."""
    out = []
    for k in range(model.K):
        order = sorted(range(len(model.vocabulary)), key=lambda i: (-model.phi[k, i], model.vocabulary[i]))
        weight = 0.0
        pol = 0.0
        subj = 0.0
        for i in order[:top_n]:
            entry = lexicon.get(model.vocabulary[i])
            if entry is not None:
                p = float(model.phi[k, i])
                weight += p
                pol += p * entry[0]
                subj += p * entry[1]
        out.append((pol / weight, subj / weight) if weight > 0 else (0.0, 0.0))
    return out


def members(model: TopicModel, topic_ids, threshold: float) -> set[str]:
    """Accounts whose posting probability exceeds the threshold in any topic."""
    if not 0.0 < threshold < 1.0:
        raise InvalidHyperparameter("threshold", "must be in (0, 1)")
    ids = _check_topic_ids(model, topic_ids)
    hit = (model.theta[:, ids] > threshold).any(axis=1)
    return {aid for aid, flag in zip(model.account_ids, hit) if flag}


def word_cloud_weights(model: TopicModel, topic_ids, limit: int = 100) -> list[tuple[str, float]]:
    """Summed topic-word probabilities over the selected topics."""
    if not topic_ids:
        raise EmptySelection("no topics selected")
    ids = _check_topic_ids(model, topic_ids)
    weights = model.phi[ids].sum(axis=0)
    order = sorted(range(len(model.vocabulary)), key=lambda i: (-weights[i], model.vocabulary[i]))
    return [(model.vocabulary[i], float(weights[i])) for i in order[:limit]]


def summaries(model: TopicModel, lexicon: Lexicon, top_words: int = 10) -> list[TopicSummary]:
    scores = topic_scores(model)
    sentiments = topic_sentiment(model, lexicon)
    out = []
    for k in range(model.K):
        order = sorted(range(len(model.vocabulary)), key=lambda i: (-model.phi[k, i], model.vocabulary[i]))
        words = tuple((model.vocabulary[i], float(model.phi[k, i])) for i in order[:top_words])
        out.append(TopicSummary(
            topic_id=k,
            score=scores[k],
            polarity=sentiments[k][0],
            subjectivity=sentiments[k][1],
            top_words=words,
        ))
    return out
