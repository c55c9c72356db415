import asyncio
import csv
import datetime as dt
import threading

import numpy as np
import pytest

from botlab import sentiment as snt
from botlab.artifacts import build_artifacts
from botlab.ingest import load_dataset
from botlab.server import SessionServer
from botlab.session import LabelStore

UTC = dt.timezone.utc

ACCOUNT_HEADER = [
    "account_id", "screen_name", "display_name", "created_at",
    "followers_count", "following_count", "likes_count", "tweet_count",
    "profile_image_url",
]
TWEET_HEADER = [
    "tweet_id", "account_id", "created_at", "text",
    "retweet_count", "favorite_count", "is_retweet", "is_reply",
]

SPAM_WORDS = ["oakland", "cleveland", "boston", "dallas", "portland",
              "visit", "deal", "deals", "cheap", "winner", "click"]
HUMAN_WORDS = ["coffee", "morning", "weekend", "family", "games", "music",
               "weather", "dinner", "friends", "reading", "garden", "soccer"]


def write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def micro_rows():
    """Four hand-written accounts with arithmetic-checkable tweets."""
    accounts = [
        ["a01", "alpha", "Alpha", "2012-01-01T00:00:00+00:00", 10, 5, 3, 8, ""],
        ["a02", "bravo", "Bravo", "2013-05-01T00:00:00+00:00", 7, 0, 0, 4, ""],
        ["a03", "charlie", "Charlie", "2013-06-01T00:00:00+00:00", 0, 9, 2, 0, ""],
        ["a04", "delta", "Delta", "2013-01-15T00:00:00+00:00", 42, 7, 11, 5, ""],
    ]
    # a01: 8 tweets, 2 carry one URL each -> avg_urls 0.25; spread 2014-09/10
    tweets = []
    a01_texts = [
        "good morning #sun", "so happy today", "check https://x.co/a now",
        "sad news", "plain text", "another https://y.co/b link",
        "hello @a02 #sun", "closing thoughts",
    ]
    for i, text in enumerate(a01_texts):
        month = 9 if i < 3 else 10
        stamp = dt.datetime(2014, month, 2 + i, 10 + (i % 5), 0, tzinfo=UTC)
        tweets.append([f"t01{i}", "a01", stamp.isoformat(), text, i, 2 * i,
                       int(i == 4), int(i == 5)])
    # a02: 3 tweets in 2013, duplicated text pair
    for i, (text, day) in enumerate([("repeat me", 3), ("repeat me", 4), ("fresh one", 5)]):
        stamp = dt.datetime(2013, 7, day, 8, 30, tzinfo=UTC)
        tweets.append([f"t02{i}", "a02", stamp.isoformat(), text, 0, 1, 0, 0])
    # a03: no tweets at all
    # a04: retweet/reply flags, mentions
    flags = [(1, 0), (0, 1), (0, 0), (1, 0)]
    for i, (is_rt, is_rep) in enumerate(flags):
        stamp = dt.datetime(2014, 1, 10 + 3 * i, 22, 15, tzinfo=UTC)
        tweets.append([f"t04{i}", "a04", stamp.isoformat(),
                       f"ping @a01 number {i} #tag{i % 2}", 5, 1, is_rt, is_rep])
    return accounts, tweets


@pytest.fixture(scope="session")
def micro_files(tmp_path_factory):
    root = tmp_path_factory.mktemp("micro")
    accounts, tweets = micro_rows()
    write_csv(root / "accounts.csv", ACCOUNT_HEADER, accounts)
    write_csv(root / "tweets.csv", TWEET_HEADER, tweets)
    return str(root / "accounts.csv"), str(root / "tweets.csv")


@pytest.fixture(scope="session")
def micro_corpus(micro_files):
    return load_dataset(*micro_files)


def synthetic_rows(n_accounts, tweets_per_account=6, seed=11, start=dt.datetime(2013, 6, 1, tzinfo=UTC),
                   span_days=420):
    """Deterministic corpus: even ids behave spammy, odd ids humanly."""
    rng = np.random.default_rng(seed)
    accounts = []
    tweets = []
    for i in range(n_accounts):
        aid = f"acct{i:04d}"
        spammy = i % 2 == 0
        created = start - dt.timedelta(days=int(rng.integers(30, 900)))
        accounts.append([
            aid, f"user{i}", f"User {i}", created.isoformat(),
            int(rng.integers(0, 50) if spammy else rng.integers(50, 2000)),
            int(rng.integers(500, 3000) if spammy else rng.integers(20, 400)),
            int(rng.integers(0, 3) if spammy else rng.integers(10, 500)),
            tweets_per_account, "",
        ])
        pool = SPAM_WORDS if spammy else HUMAN_WORDS
        for j in range(tweets_per_account):
            offset = dt.timedelta(
                days=int(rng.integers(0, span_days)),
                seconds=int(rng.integers(0, 86400)),
            )
            words = [pool[int(w)] for w in rng.integers(0, len(pool), 4)]
            text = " ".join(words)
            if spammy:
                text += " visit https://spam.example/x"
            tweets.append([
                f"tw{i:04d}{j:03d}", aid, (start + offset).isoformat(), text,
                int(rng.integers(0, 4)), int(rng.integers(0, 4)),
                int(rng.random() < (0.4 if spammy else 0.1)),
                int(rng.random() < 0.2),
            ])
    return accounts, tweets


def build_synthetic_files(root, n_accounts, **kw):
    accounts, tweets = synthetic_rows(n_accounts, **kw)
    write_csv(root / "accounts.csv", ACCOUNT_HEADER, accounts)
    write_csv(root / "tweets.csv", TWEET_HEADER, tweets)
    return str(root / "accounts.csv"), str(root / "tweets.csv")


@pytest.fixture(scope="session")
def small_lexicon():
    return snt.Lexicon({"happy": (0.8, 0.9), "sad": (-0.5, 0.7), "good": (0.7, 0.6)})


@pytest.fixture(scope="session")
def default_lexicon():
    return snt.default_lexicon()


@pytest.fixture(scope="session")
def fixture_artifacts(tmp_path_factory, default_lexicon):
    """Preprocessed artifact dir for a 12-account synthetic corpus."""
    root = tmp_path_factory.mktemp("fixture")
    files = build_synthetic_files(root, 12, tweets_per_account=8, seed=5)
    corpus = load_dataset(*files)
    out = root / "artifacts"
    return build_artifacts(corpus, default_lexicon, str(out))


class ServerHarness:
    """Runs a SessionServer on a private event loop thread."""

    def __init__(self, artifacts, db_path):
        self.store = LabelStore(db_path)
        self.server = SessionServer(artifacts, self.store)
        self.loop = asyncio.new_event_loop()
        started = threading.Event()

        def runner():
            asyncio.set_event_loop(self.loop)
            self.port = self.loop.run_until_complete(self.server.start())
            started.set()
            self.loop.run_forever()

        self.thread = threading.Thread(target=runner, daemon=True)
        self.thread.start()
        if not started.wait(timeout=10):
            raise RuntimeError("server did not start")

    @property
    def hub(self):
        return self.server.hub

    def shutdown(self):
        future = asyncio.run_coroutine_threadsafe(self.server.stop(), self.loop)
        future.result(timeout=15)
        self.loop.call_soon_threadsafe(self.loop.stop)
        self.thread.join(timeout=15)
        self.loop.close()


@pytest.fixture()
def running_server(fixture_artifacts, tmp_path):
    harness = ServerHarness(fixture_artifacts, str(tmp_path / "labels.db"))
    yield harness
    harness.shutdown()
