"""The fifty-feature account representation.

Every account maps to a fixed 50-entry vector; the same statistics are also
computed inside calendar bins (year/month/day) to form temporal cubes. The
`kind` of a feature decides how it aggregates: `count` features are additive
across bins (day sums = month sums = year sums = all-time value, exactly);
every other kind is recomputed from the bin's tweets alone. Location
statistics (min/max/median) share the `mean` kind, set cardinalities carry
the `distinct` kind, and account metadata (followers etc.) is treated as a
constant location value that empty bins zero out.

Ratio denominators are guarded by max(., 1) and empty-bin statistics are 0,
so matrices and cubes are always finite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import sentiment as snt
from .errors import EmptyCorpus
from .ingest import Corpus, Tweet
from .timebin import period_of, period_range

N_FEATURES = 50


@dataclass(frozen=True)
class FeatureDef:
    feature_id: str
    name: str
    unit: str
    kind: str  # count | ratio | mean | std | entropy | distinct
    description: str


@dataclass(frozen=True)
class FeatureCatalog:
    entries: tuple[FeatureDef, ...]

    def ids(self) -> list[str]:
        return [e.feature_id for e in self.entries]

    def index_of(self, feature_id: str) -> int:
        return self.ids().index(feature_id)

    def __len__(self) -> int:
        return len(self.entries)

    def to_json(self) -> list[dict]:
        return [vars(e) for e in self.entries]


@dataclass(frozen=True)
class FeatureMatrix:
    account_ids: tuple[str, ...]
    values: np.ndarray  # n x 50, float64, finite
    catalog: FeatureCatalog

    def column(self, feature_id: str) -> np.ndarray:
        return self.values[:, self.catalog.index_of(feature_id)]


@dataclass(frozen=True)
class TemporalFeatureCube:
    level: str  # year | month | day
    periods: tuple[str, ...]
    account_ids: tuple[str, ...]
    values: np.ndarray  # accounts x periods x 50, float64, finite
    catalog: FeatureCatalog


def _d(feature_id, name, unit, kind, description):
    return FeatureDef(feature_id, name, unit, kind, description)


_CATALOG = FeatureCatalog(entries=(
    _d("followers_count", "Followers", "accounts", "mean", "Declared follower count (account metadata, constant across bins)."),
    _d("following_count", "Following", "accounts", "mean", "Declared followee count (account metadata)."),
    _d("followers_following_ratio", "Followers/following", "ratio", "ratio", "followers_count / max(following_count, 1)."),
    _d("likes_count", "Likes given", "likes", "mean", "Declared count of likes the account has given (metadata)."),
    _d("account_age_days", "Account age", "days", "mean", "Days from account creation to the corpus end timestamp."),
    _d("tweet_count", "Tweets", "tweets", "count", "Number of tweets in the window."),
    _d("retweet_count", "Retweets", "tweets", "count", "Number of tweets flagged as retweets."),
    _d("reply_count", "Replies", "tweets", "count", "Number of tweets flagged as replies."),
    _d("original_tweet_count", "Original tweets", "tweets", "count", "Tweets that are neither retweets nor replies."),
    _d("hashtags_total", "Hashtag uses", "hashtags", "count", "Total hashtag occurrences (per-tweet deduplicated)."),
    _d("urls_total", "URL uses", "urls", "count", "Total URL occurrences."),
    _d("mentions_total", "Mention uses", "mentions", "count", "Total mention occurrences."),
    _d("favorites_received_total", "Favorites received", "favorites", "count", "Sum of favorite counts over the window's tweets."),
    _d("retweets_received_total", "Retweets received", "retweets", "count", "Sum of retweet counts over the window's tweets."),
    _d("active_days", "Active days", "days", "count", "Distinct UTC days with at least one tweet."),
    _d("tweets_per_active_day", "Tweets per active day", "tweets/day", "ratio", "tweet_count / max(active_days, 1)."),
    _d("retweet_ratio", "Retweet share", "ratio", "ratio", "Share of tweets that are retweets."),
    _d("reply_ratio", "Reply share", "ratio", "ratio", "Share of tweets that are replies."),
    _d("url_tweet_ratio", "URL tweet share", "ratio", "ratio", "Share of tweets containing at least one URL."),
    _d("hashtag_tweet_ratio", "Hashtag tweet share", "ratio", "ratio", "Share of tweets containing at least one hashtag."),
    _d("mention_tweet_ratio", "Mention tweet share", "ratio", "ratio", "Share of tweets containing at least one mention."),
    _d("duplicate_text_ratio", "Duplicate text share", "ratio", "ratio", "(tweets - distinct texts) / tweets."),
    _d("avg_hashtags", "Hashtags per tweet", "hashtags/tweet", "mean", "Mean hashtag count per tweet."),
    _d("avg_urls", "URLs per tweet", "urls/tweet", "mean", "Mean URL count per tweet."),
    _d("avg_mentions", "Mentions per tweet", "mentions/tweet", "mean", "Mean mention count per tweet."),
    _d("max_hashtags", "Max hashtags in a tweet", "hashtags", "mean", "Maximum hashtag count in a single tweet."),
    _d("max_urls", "Max URLs in a tweet", "urls", "mean", "Maximum URL count in a single tweet."),
    _d("max_mentions", "Max mentions in a tweet", "mentions", "mean", "Maximum mention count in a single tweet."),
    _d("avg_favorites_received", "Favorites per tweet", "favorites/tweet", "mean", "Mean favorite count received per tweet."),
    _d("avg_retweets_received", "Retweets per tweet", "retweets/tweet", "mean", "Mean retweet count received per tweet."),
    _d("tweet_len_mean", "Tweet length mean", "chars", "mean", "Mean tweet text length in characters."),
    _d("tweet_len_std", "Tweet length std", "chars", "std", "Population std of tweet text length."),
    _d("tweet_len_min", "Tweet length min", "chars", "mean", "Minimum tweet text length."),
    _d("tweet_len_max", "Tweet length max", "chars", "mean", "Maximum tweet text length."),
    _d("tweet_len_median", "Tweet length median", "chars", "mean", "Median tweet text length."),
    _d("inter_tweet_gap_mean_s", "Posting gap mean", "seconds", "mean", "Mean gap between consecutive tweets; 0 with fewer than 2 tweets."),
    _d("inter_tweet_gap_std_s", "Posting gap std", "seconds", "std", "Population std of consecutive-tweet gaps."),
    _d("inter_tweet_gap_min_s", "Posting gap min", "seconds", "mean", "Minimum consecutive-tweet gap."),
    _d("inter_tweet_gap_max_s", "Posting gap max", "seconds", "mean", "Maximum consecutive-tweet gap."),
    _d("inter_tweet_gap_median_s", "Posting gap median", "seconds", "mean", "Median consecutive-tweet gap."),
    _d("vocab_size", "Vocabulary size", "tokens", "distinct", "Distinct lowercased tokens across the window's tweets."),
    _d("unique_hashtags", "Distinct hashtags", "hashtags", "distinct", "Distinct hashtags used in the window."),
    _d("unique_urls", "Distinct URLs", "urls", "distinct", "Distinct URLs used in the window."),
    _d("unique_mentions", "Distinct mentions", "mentions", "distinct", "Distinct accounts mentioned in the window."),
    _d("posting_hour_entropy", "Posting hour entropy", "bits", "entropy", "Shannon entropy (log2) of the tweet hour-of-day histogram; in [0, log2 24]."),
    _d("posting_weekday_entropy", "Posting weekday entropy", "bits", "entropy", "Shannon entropy (log2) of the tweet weekday histogram; in [0, log2 7]."),
    _d("polarity_mean", "Polarity mean", "score", "mean", "Mean per-tweet sentiment polarity (lexicon-based, unmatched tweets score 0)."),
    _d("polarity_std", "Polarity std", "score", "std", "Population std of per-tweet polarity."),
    _d("subjectivity_mean", "Subjectivity mean", "score", "mean", "Mean per-tweet sentiment subjectivity."),
    _d("subjectivity_std", "Subjectivity std", "score", "std", "Population std of per-tweet subjectivity."),
))

assert len(_CATALOG) == N_FEATURES

COUNT_FEATURES = tuple(e.feature_id for e in _CATALOG.entries if e.kind == "count")


def catalog() -> FeatureCatalog:
    """The fixed, ordered 50-entry feature catalog (stable across builds)."""
    return _CATALOG


@dataclass(frozen=True)
class _TweetStats:
    """Per-tweet scalars precomputed once and reused by every window."""

    epoch_s: float
    day: str
    month: str
    year: str
    hour: int
    weekday: int
    length: int
    n_hashtags: int
    n_urls: int
    n_mentions: int
    favorites: int
    retweets: int
    is_retweet: bool
    is_reply: bool
    text: str
    hashtags: tuple[str, ...]
    urls: tuple[str, ...]
    mentions: tuple[str, ...]
    tokens: tuple[str, ...]
    polarity: float
    subjectivity: float


def _precompute(tweet: Tweet, lexicon: snt.Lexicon) -> _TweetStats:
    ts = tweet.created_at
    score = snt.score_text(lexicon, tweet.text)
    return _TweetStats(
        epoch_s=ts.timestamp(),
        day=period_of(ts, "day"),
        month=period_of(ts, "month"),
        year=period_of(ts, "year"),
        hour=ts.hour,
        weekday=ts.weekday(),
        length=len(tweet.text),
        n_hashtags=len(tweet.hashtags),
        n_urls=len(tweet.urls),
        n_mentions=len(tweet.mentions),
        favorites=tweet.favorite_count,
        retweets=tweet.retweet_count,
        is_retweet=tweet.is_retweet,
        is_reply=tweet.is_reply,
        text=tweet.text,
        hashtags=tweet.hashtags,
        urls=tweet.urls,
        mentions=tweet.mentions,
        tokens=tuple(snt.tokenize(tweet.text)),
        polarity=score.polarity,
        subjectivity=score.subjectivity,
    )


def _entropy_bits(counts: dict) -> float:
    total = sum(counts.values())
    if total == 0:
        return 0.0
    acc = 0.0
    for c in counts.values():
        if c:
            p = c / total
            acc -= p * math.log2(p)
    return acc


def _pop_std(values: np.ndarray) -> float:
    return float(np.std(values)) if values.size else 0.0


def _window_vector(account, stats: list[_TweetStats], corpus_end_s: float, metadata: bool) -> np.ndarray:
    """Feature vector for one account restricted to one set of tweets.

    `metadata` controls whether account-level constants are filled when the
    window is empty: the static matrix keeps them, temporal bins zero them.
    """
    out = np.zeros(N_FEATURES)
    n = len(stats)
    if metadata or n:
        out[0] = account.followers_count
        out[1] = account.following_count
        out[2] = account.followers_count / max(account.following_count, 1)
        out[3] = account.likes_count
        out[4] = (corpus_end_s - account.created_at.timestamp()) / 86400.0
    if n == 0:
        return out

    out[5] = n
    out[6] = sum(1 for s in stats if s.is_retweet)
    out[7] = sum(1 for s in stats if s.is_reply)
    out[8] = sum(1 for s in stats if not (s.is_retweet or s.is_reply))
    out[9] = sum(s.n_hashtags for s in stats)
    out[10] = sum(s.n_urls for s in stats)
    out[11] = sum(s.n_mentions for s in stats)
    out[12] = sum(s.favorites for s in stats)
    out[13] = sum(s.retweets for s in stats)
    active = len({s.day for s in stats})
    out[14] = active
    out[15] = n / max(active, 1)
    out[16] = out[6] / n
    out[17] = out[7] / n
    out[18] = sum(1 for s in stats if s.n_urls) / n
    out[19] = sum(1 for s in stats if s.n_hashtags) / n
    out[20] = sum(1 for s in stats if s.n_mentions) / n
    out[21] = (n - len({s.text for s in stats})) / n

    hashtag_counts = np.array([s.n_hashtags for s in stats], dtype=float)
    url_counts = np.array([s.n_urls for s in stats], dtype=float)
    mention_counts = np.array([s.n_mentions for s in stats], dtype=float)
    out[22] = hashtag_counts.mean()
    out[23] = url_counts.mean()
    out[24] = mention_counts.mean()
    out[25] = hashtag_counts.max()
    out[26] = url_counts.max()
    out[27] = mention_counts.max()
    out[28] = out[12] / n
    out[29] = out[13] / n

    lengths = np.array([s.length for s in stats], dtype=float)
    out[30] = lengths.mean()
    out[31] = _pop_std(lengths)
    out[32] = lengths.min()
    out[33] = lengths.max()
    out[34] = float(np.median(lengths))

    if n >= 2:
        times = np.sort(np.array([s.epoch_s for s in stats]))
        gaps = np.diff(times)
        out[35] = gaps.mean()
        out[36] = _pop_std(gaps)
        out[37] = gaps.min()
        out[38] = gaps.max()
        out[39] = float(np.median(gaps))

    vocab: set[str] = set()
    tags: set[str] = set()
    links: set[str] = set()
    handles: set[str] = set()
    for s in stats:
        vocab.update(s.tokens)
        tags.update(s.hashtags)
        links.update(s.urls)
        handles.update(s.mentions)
    out[40] = len(vocab)
    out[41] = len(tags)
    out[42] = len(links)
    out[43] = len(handles)

    hours: dict[int, int] = {}
    weekdays: dict[int, int] = {}
    for s in stats:
        hours[s.hour] = hours.get(s.hour, 0) + 1
        weekdays[s.weekday] = weekdays.get(s.weekday, 0) + 1
    out[44] = _entropy_bits(hours)
    out[45] = _entropy_bits(weekdays)

    polarity = np.array([s.polarity for s in stats])
    subjectivity = np.array([s.subjectivity for s in stats])
    out[46] = polarity.mean()
    out[47] = _pop_std(polarity)
    out[48] = subjectivity.mean()
    out[49] = _pop_std(subjectivity)
    return out


def _prepared(corpus: Corpus, lexicon: snt.Lexicon):
    if not corpus.accounts:
        raise EmptyCorpus("corpus has no accounts")
    corpus_end_s = corpus.time_span[1].timestamp() if corpus.time_span else 0.0
    per_account = {
        aid: [_precompute(t, lexicon) for t in corpus.tweets_of(aid)]
        for aid in corpus.accounts
    }
    return corpus_end_s, per_account


def extract_static(corpus: Corpus, lexicon: snt.Lexicon) -> FeatureMatrix:
    """One row per account in canonical order, aggregated over all tweets."""
    corpus_end_s, per_account = _prepared(corpus, lexicon)
    rows = [
        _window_vector(corpus.accounts[aid], per_account[aid], corpus_end_s, metadata=True)
        for aid in corpus.accounts
    ]
    return FeatureMatrix(
        account_ids=tuple(corpus.accounts),
        values=np.vstack(rows),
        catalog=_CATALOG,
    )


def extract_temporal(corpus: Corpus, lexicon: snt.Lexicon, level: str) -> TemporalFeatureCube:
    """accounts x periods x 50 cube; bins with zero tweets hold all zeros."""
    if level not in ("year", "month", "day"):
        raise ValueError(f"unknown temporal level {level!r}")
    corpus_end_s, per_account = _prepared(corpus, lexicon)
    if corpus.time_span is None:
        raise EmptyCorpus("corpus has no tweets to bin")
    periods = period_range(corpus.time_span[0], corpus.time_span[1], level)
    index = {p: i for i, p in enumerate(periods)}
    attr = {"year": "year", "month": "month", "day": "day"}[level]

    values = np.zeros((len(corpus.accounts), len(periods), N_FEATURES))
    for row, aid in enumerate(corpus.accounts):
        buckets: dict[str, list[_TweetStats]] = {}
        for s in per_account[aid]:
            buckets.setdefault(getattr(s, attr), []).append(s)
        for label, stats in buckets.items():
            values[row, index[label]] = _window_vector(
                corpus.accounts[aid], stats, corpus_end_s, metadata=False
            )
    return TemporalFeatureCube(
        level=level,
        periods=tuple(periods),
        account_ids=tuple(corpus.accounts),
        values=values,
        catalog=_CATALOG,
    )
