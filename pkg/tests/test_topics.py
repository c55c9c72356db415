import threading

import numpy as np
import pytest

from botlab import errors, topics
from botlab.ingest import load_dataset
from botlab.sentiment import Lexicon
from botlab.topics import (
    DocumentSet,
    TopicModel,
    fit_lda,
    members,
    prepare_documents,
    summaries,
    topic_scores,
    topic_sentiment,
    word_cloud_weights,
)

from conftest import ACCOUNT_HEADER, TWEET_HEADER, write_csv


def corpus_from(tmp_path, account_texts, year=2014):
    """account_texts: {account_id: [text, ...]}"""
    accounts = [[aid, aid, aid, f"{year - 2}-01-01T00:00:00Z", 1, 1, 1, len(texts), ""]
                for aid, texts in account_texts.items()]
    tweets = []
    n = 0
    for aid, texts in account_texts.items():
        for i, text in enumerate(texts):
            month = 1 + (i % 12)
            tweets.append([f"t{n:04d}", aid, f"{year}-{month:02d}-03T12:00:00Z",
                           text, 0, 0, 0, 0])
            n += 1
    write_csv(tmp_path / "a.csv", ACCOUNT_HEADER, accounts)
    write_csv(tmp_path / "t.csv", TWEET_HEADER, tweets)
    return load_dataset(str(tmp_path / "a.csv"), str(tmp_path / "t.csv"))


def synthetic_model(rng, d=100, k=20, v=50):
    theta = rng.random((d, k))
    theta /= theta.sum(axis=1, keepdims=True)
    phi = rng.random((k, v))
    phi /= phi.sum(axis=1, keepdims=True)
    return TopicModel(
        K=k, alpha=1.0, beta=0.01, phi=phi, theta=theta,
        account_ids=tuple(f"d{i}" for i in range(d)),
        vocabulary=tuple(f"w{i:03d}" for i in range(v)),
        seed=0, iterations=50,
    )


# --- prepare_documents --------------------------------------------------------

def test_single_document_pruned_to_empty(tmp_path):
    corpus = corpus_from(tmp_path, {"solo": ["Running runs run!"]})
    with pytest.raises(errors.EmptyWindow):
        prepare_documents(corpus)


def test_two_documents_share_vocabulary(tmp_path):
    corpus = corpus_from(tmp_path, {"one": ["running fast"], "two": ["running fast"]})
    docs = prepare_documents(corpus)
    assert docs.vocabulary == ("fast", "run")
    assert [tokens for _, tokens in docs.documents] == [("run", "fast"), ("run", "fast")]


def test_stopwords_urls_mentions_dropped(tmp_path):
    corpus = corpus_from(tmp_path, {
        "one": ["the quick visit https://x.example @bob oakland"],
        "two": ["a quick visit oakland indeed"],
    })
    docs = prepare_documents(corpus)
    assert "the" not in docs.vocabulary
    assert all(not t.startswith("http") for t in docs.vocabulary)
    assert "quick" in docs.vocabulary and "oakland" in docs.vocabulary


def test_window_matches_filter_then_prepare_oracle(tmp_path):
    texts_2013 = ["morning coffee games", "coffee games music"]
    texts_2014 = ["oakland deals visit", "oakland visit deals cheap"]
    accounts = {"u1": [], "u2": []}
    corpus = corpus_from(tmp_path, accounts | {
        "u1": [texts_2013[0], texts_2014[0]],
        "u2": [texts_2013[1], texts_2014[1]],
    })
    # place tweets explicitly in two years
    import dataclasses
    import datetime as dt
    tweets = []
    for t in corpus.tweets:
        year = 2013 if "coffee" in t.text else 2014
        tweets.append(dataclasses.replace(
            t, created_at=t.created_at.replace(year=year)))
    tweets.sort(key=lambda t: (t.account_id, t.created_at, t.tweet_id))
    corpus = dataclasses.replace(
        corpus, tweets=tuple(tweets),
        time_span=(min(t.created_at for t in tweets), max(t.created_at for t in tweets)),
    )

    docs = prepare_documents(corpus, "year", "2014")
    oracle_corpus = dataclasses.replace(
        corpus,
        tweets=tuple(t for t in corpus.tweets if t.created_at.year == 2014),
    )
    oracle = prepare_documents(oracle_corpus)
    assert docs.documents == oracle.documents
    assert docs.vocabulary == oracle.vocabulary
    assert all("coffe" not in t and "coffee" not in t for t in docs.vocabulary)


def test_accounts_without_window_tweets_omitted(tmp_path):
    corpus = corpus_from(tmp_path, {
        "in1": ["oakland visit deals", "oakland deals"],
        "in2": ["oakland visit deals cheap", "visit cheap"],
    })
    docs = prepare_documents(corpus, "month", "2014-01")
    assert set(docs.account_ids) <= {"in1", "in2"}


# --- fit_lda --------------------------------------------------------------------

def two_topic_docs():
    # four documents per word family so the df >= 2 rule keeps everything
    documents = tuple(
        [(f"xdoc{i}", ("xxx",) * 4) for i in range(4)] +
        [(f"ydoc{i}", ("yyy",) * 4) for i in range(4)]
    )
    return DocumentSet(level="overall", window=None, documents=documents,
                       vocabulary=("xxx", "yyy"))


def test_k1_degenerate():
    docs = two_topic_docs()
    model = fit_lda(docs, K=1, iterations=60, seed=1)
    assert np.allclose(model.theta, 1.0)
    counts = np.array([4 * 4, 4 * 4], dtype=float)
    expected = (counts + model.beta) / (counts.sum() + 2 * model.beta)
    assert np.allclose(model.phi[0], expected, atol=1e-12)


def test_two_topics_separate():
    model = fit_lda(two_topic_docs(), K=2, alpha=0.1, beta=0.01, iterations=200, seed=7)
    top_words = model.phi.argmax(axis=1)
    assert set(top_words) == {0, 1}
    for d in range(8):
        assert model.theta[d].max() >= 0.8


def test_rows_sum_to_one():
    model = fit_lda(two_topic_docs(), K=3, iterations=80, seed=3)
    assert np.allclose(model.phi.sum(axis=1), 1.0, atol=1e-9)
    assert np.allclose(model.theta.sum(axis=1), 1.0, atol=1e-9)
    assert np.all(model.phi > 0) and np.all(model.theta > 0)


def test_seed_determinism():
    a = fit_lda(two_topic_docs(), K=4, iterations=120, seed=11)
    b = fit_lda(two_topic_docs(), K=4, iterations=120, seed=11)
    assert np.array_equal(a.phi, b.phi)
    assert np.array_equal(a.theta, b.theta)
    c = fit_lda(two_topic_docs(), K=4, iterations=120, seed=12)
    assert not np.array_equal(a.phi, c.phi)


def test_fit_lda_validation():
    docs = two_topic_docs()
    with pytest.raises(errors.InvalidHyperparameter):
        fit_lda(docs, K=0)
    with pytest.raises(errors.InvalidHyperparameter):
        fit_lda(docs, K=2, alpha=0.0)
    with pytest.raises(errors.InvalidHyperparameter):
        fit_lda(docs, K=2, beta=-1.0)
    with pytest.raises(errors.InvalidHyperparameter):
        fit_lda(docs, K=2, iterations=10)
    with pytest.raises(errors.EmptyDocuments):
        fit_lda(DocumentSet("overall", None, (), ()), K=2)


def test_fit_lda_cancellation():
    token = threading.Event()
    token.set()
    with pytest.raises(errors.Cancelled):
        fit_lda(two_topic_docs(), K=2, iterations=100, cancel=token)


# --- topic scores -----------------------------------------------------------------

def test_scores_arithmetic():
    model = synthetic_model(np.random.default_rng(0), d=2, k=2)
    object.__setattr__(model, "theta", np.array([[0.7, 0.3], [0.2, 0.8]]))
    assert topic_scores(model) == pytest.approx([0.9, 1.1])


def test_scores_k1_equals_d():
    model = fit_lda(two_topic_docs(), K=1, iterations=60)
    assert topic_scores(model)[0] == pytest.approx(8.0, abs=1e-12)


def test_scores_match_double_loop_oracle():
    rng = np.random.default_rng(8)
    model = synthetic_model(rng, d=100, k=20)
    ours = topic_scores(model)
    for k in range(model.K):
        acc = 0.0
        for d in range(model.theta.shape[0]):
            acc += model.theta[d, k]
        assert abs(ours[k] - acc) < 1e-12


# --- topic sentiment ----------------------------------------------------------------

def test_sentiment_no_matches_neutral():
    model = synthetic_model(np.random.default_rng(1), k=3, v=10)
    out = topic_sentiment(model, Lexicon({}))
    assert out == [(0.0, 0.0)] * 3


def test_sentiment_weighted_average():
    phi = np.array([[0.6, 0.4]])
    model = TopicModel(K=1, alpha=1.0, beta=0.1, phi=phi,
                       theta=np.array([[1.0]]), account_ids=("d0",),
                       vocabulary=("good", "bad"), seed=0, iterations=50)
    lex = Lexicon({"good": (0.7, 0.5), "bad": (-0.7, 0.5)})
    pol, subj = topic_sentiment(model, lex)[0]
    assert pol == pytest.approx(0.14)
    assert subj == pytest.approx(0.5)


def test_sentiment_bounds_property():
    rng = np.random.default_rng(2)
    lex = Lexicon({f"w{i:03d}": (float(rng.uniform(-1, 1)), float(rng.uniform(0, 1)))
                   for i in range(30)})
    for _ in range(1000):
        model = synthetic_model(rng, d=4, k=3, v=40)
        for pol, subj in topic_sentiment(model, lex, top_n=10):
            assert -1.0 <= pol <= 1.0
            assert 0.0 <= subj <= 1.0


# --- membership -------------------------------------------------------------------

def test_members_example():
    model = synthetic_model(np.random.default_rng(3), d=2, k=2)
    object.__setattr__(model, "theta", np.array([[0.7, 0.3], [0.2, 0.8]]))
    object.__setattr__(model, "account_ids", ("docA", "docB"))
    assert members(model, {0}, 0.5) == {"docA"}


def test_members_threshold_endpoints():
    rng = np.random.default_rng(4)
    model = synthetic_model(rng, d=30, k=5)
    everyone = members(model, set(range(5)), 1e-9)
    assert everyone == set(model.account_ids)
    assert members(model, set(range(5)), 1 - 1e-9) == set()


def test_members_antitone_in_threshold():
    rng = np.random.default_rng(5)
    for _ in range(30):
        model = synthetic_model(rng, d=25, k=6)
        t1, t2 = sorted(rng.uniform(0.01, 0.99, size=2))
        ids = set(rng.choice(6, size=2, replace=False).tolist())
        assert members(model, ids, t2) <= members(model, ids, t1)


def test_members_validation():
    model = synthetic_model(np.random.default_rng(6), k=3)
    with pytest.raises(errors.UnknownTopicId):
        members(model, {99}, 0.5)
    with pytest.raises(errors.InvalidHyperparameter):
        members(model, {0}, 0.0)


# --- word cloud -----------------------------------------------------------------------

def test_cloud_single_topic_is_phi_row():
    model = synthetic_model(np.random.default_rng(7), k=4, v=30)
    cloud = dict(word_cloud_weights(model, {2}, limit=30))
    for i, token in enumerate(model.vocabulary):
        assert cloud[token] == pytest.approx(model.phi[2, i])


def test_cloud_two_topics_sum_oracle():
    model = synthetic_model(np.random.default_rng(8), k=4, v=25)
    cloud = dict(word_cloud_weights(model, {1, 3}, limit=25))
    for i, token in enumerate(model.vocabulary):
        assert cloud[token] == pytest.approx(model.phi[1, i] + model.phi[3, i], abs=1e-12)


def test_cloud_total_mass_identity():
    model = synthetic_model(np.random.default_rng(9), k=6, v=40)
    for chosen in ({0}, {1, 2}, {0, 3, 5}):
        weights = word_cloud_weights(model, chosen, limit=len(model.vocabulary))
        assert sum(w for _, w in weights) == pytest.approx(len(chosen), abs=1e-9)


def test_cloud_limit_and_ordering():
    model = synthetic_model(np.random.default_rng(10), k=2, v=60)
    cloud = word_cloud_weights(model, {0}, limit=10)
    assert len(cloud) == 10
    weights = [w for _, w in cloud]
    assert weights == sorted(weights, reverse=True)


def test_cloud_validation():
    model = synthetic_model(np.random.default_rng(11), k=2)
    with pytest.raises(errors.EmptySelection):
        word_cloud_weights(model, set())
    with pytest.raises(errors.UnknownTopicId):
        word_cloud_weights(model, {5})


def test_summaries_shape(default_lexicon):
    model = synthetic_model(np.random.default_rng(12), d=10, k=4, v=20)
    out = summaries(model, default_lexicon, top_words=5)
    assert len(out) == 4
    for s in out:
        assert len(s.top_words) == 5
        probs = [p for _, p in s.top_words]
        assert probs == sorted(probs, reverse=True)
        assert s.score >= 0


def test_vocabulary_closure(tmp_path):
    corpus = corpus_from(tmp_path, {
        "u1": ["oakland visit deals today", "cheap deals oakland"],
        "u2": ["oakland visit cheap deals", "visit deals"],
    })
    docs = prepare_documents(corpus)
    vocab = set(docs.vocabulary)
    for _, tokens in docs.documents:
        assert set(tokens) <= vocab
    model = fit_lda(docs, K=2, iterations=60)
    assert model.phi.shape[1] == len(docs.vocabulary)
