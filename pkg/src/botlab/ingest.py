"""Corpus loading and validation.

The canonical input is a pair of RFC 4180 CSV files:

    accounts: account_id,screen_name,display_name,created_at,followers_count,
              following_count,likes_count,tweet_count,profile_image_url
    tweets:   tweet_id,account_id,created_at,text,retweet_count,
              favorite_count,is_retweet,is_reply

Timestamps are ISO-8601 or epoch seconds and are normalized to UTC. Three
optional trailing tweet columns (hashtags, urls, mentions, space-separated)
are honored when present; otherwise entities are recovered from the text.
Accounts are kept in lexicographic account_id order, which is the canonical
row order for every downstream matrix.
"""
from __future__ import annotations

import csv
import datetime as dt
import os
from dataclasses import dataclass, field

from .errors import (
    DuplicateId,
    FileMissing,
    MalformedRow,
    OrphanTweet,
    UnparseableTimestamp,
)
from .timebin import parse_timestamp

ACCOUNT_COLUMNS = [
    "account_id", "screen_name", "display_name", "created_at",
    "followers_count", "following_count", "likes_count", "tweet_count",
    "profile_image_url",
]
TWEET_COLUMNS = [
    "tweet_id", "account_id", "created_at", "text",
    "retweet_count", "favorite_count", "is_retweet", "is_reply",
]
TWEET_ENTITY_COLUMNS = ["hashtags", "urls", "mentions"]

_TRUE = {"1", "true", "t", "yes", "y"}
_FALSE = {"0", "false", "f", "no", "n", ""}


@dataclass(frozen=True)
class Account:
    account_id: str
    screen_name: str
    display_name: str
    created_at: dt.datetime
    followers_count: int
    following_count: int
    likes_count: int
    declared_tweet_count: int
    profile_image_url: str | None = None


@dataclass(frozen=True)
class Tweet:
    tweet_id: str
    account_id: str
    created_at: dt.datetime
    text: str
    retweet_count: int
    favorite_count: int
    is_retweet: bool
    is_reply: bool
    hashtags: tuple[str, ...]
    urls: tuple[str, ...]
    mentions: tuple[str, ...]


@dataclass(frozen=True)
class Corpus:
    """Immutable analysis input: accounts in canonical order plus sorted tweets."""

    accounts: dict[str, Account]           # insertion order == lexicographic
    tweets: tuple[Tweet, ...]              # sorted by (account_id, created_at)
    time_span: tuple[dt.datetime, dt.datetime] | None

    @property
    def account_ids(self) -> list[str]:
        return list(self.accounts)

    def tweets_of(self, account_id: str) -> tuple[Tweet, ...]:
        lo, hi = self._slices.get(account_id, (0, 0))
        return self.tweets[lo:hi]

    @property
    def _slices(self) -> dict[str, tuple[int, int]]:
        cached = getattr(self, "_slice_cache", None)
        if cached is None:
            cached = {}
            start = 0
            for i, tw in enumerate(self.tweets):
                if tw.account_id != self.tweets[start].account_id:
                    cached[self.tweets[start].account_id] = (start, i)
                    start = i
            if self.tweets:
                cached[self.tweets[start].account_id] = (start, len(self.tweets))
            object.__setattr__(self, "_slice_cache", cached)
        return cached


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    def add(self, location: str, message: str) -> None:
        self.violations.append(f"{location}: {message}")

    @property
    def ok(self) -> bool:
        return not self.violations


def extract_entities(text: str) -> tuple[list[str], list[str], list[str]]:
    """Pull hashtags, urls and mentions out of raw tweet text.

    Hashtags/mentions are maximal whitespace tokens starting '#'/'@'; urls
    are maximal substrings starting http:// or https://. Lists keep first
    occurrence order, deduplicated, original case preserved.
    """
    hashtags: list[str] = []
    mentions: list[str] = []
    for token in text.split():
        if len(token) > 1 and token.startswith("#") and token not in hashtags:
            hashtags.append(token)
        elif len(token) > 1 and token.startswith("@") and token not in mentions:
            mentions.append(token)
    urls: list[str] = []
    pos = 0
    lowered = text.lower()
    while True:
        hit = min(
            (i for i in (lowered.find("http://", pos), lowered.find("https://", pos)) if i >= 0),
            default=-1,
        )
        if hit < 0:
            break
        end = hit
        while end < len(text) and not text[end].isspace():
            end += 1
        url = text[hit:end]
        if url not in urls:
            urls.append(url)
        pos = end
    return hashtags, urls, mentions


def _int_cell(raw: str, line: int, column: str) -> int:
    try:
        value = int(raw)
    except ValueError:
        raise MalformedRow(line, f"column {column} is not an integer: {raw!r}") from None
    if value < 0:
        raise MalformedRow(line, f"column {column} must be >= 0, got {value}")
    return value


def _bool_cell(raw: str, line: int, column: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in _TRUE:
        return True
    if lowered in _FALSE:
        return False
    raise MalformedRow(line, f"column {column} is not a boolean: {raw!r}")


def _open_csv(path: str):
    if not os.path.isfile(path):
        raise FileMissing(path)
    return open(path, newline="", encoding="utf-8")


def _read_rows(path: str, required: list[str]):
    """Yield (line_number, row dict). Header must start with the required columns."""
    with _open_csv(path) as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedRow(1, "missing header") from None
        if header[: len(required)] != required:
            raise MalformedRow(1, f"header mismatch, expected {','.join(required)}")
        extras = header[len(required):]
        for row in reader:
            if not row:
                continue
            if len(row) != len(header):
                raise MalformedRow(reader.line_num, f"expected {len(header)} cells, got {len(row)}")
            yield reader.line_num, dict(zip(header, row)), extras


def _split_entities(cell: str) -> tuple[str, ...]:
    seen: list[str] = []
    for token in cell.split():
        if token not in seen:
            seen.append(token)
    return tuple(seen)


def load_dataset(accounts_path: str, tweets_path: str) -> Corpus:
    """Load and cross-validate the account and tweet CSVs into a Corpus."""
    accounts: dict[str, Account] = {}
    for line, row, _ in _read_rows(accounts_path, ACCOUNT_COLUMNS):
        account_id = row["account_id"].strip()
        if not account_id:
            raise MalformedRow(line, "empty account_id")
        if account_id in accounts:
            raise DuplicateId(account_id)
        accounts[account_id] = Account(
            account_id=account_id,
            screen_name=row["screen_name"],
            display_name=row["display_name"],
            created_at=parse_timestamp(row["created_at"], line),
            followers_count=_int_cell(row["followers_count"], line, "followers_count"),
            following_count=_int_cell(row["following_count"], line, "following_count"),
            likes_count=_int_cell(row["likes_count"], line, "likes_count"),
            declared_tweet_count=_int_cell(row["tweet_count"], line, "tweet_count"),
            profile_image_url=row["profile_image_url"] or None,
        )

    tweets: list[Tweet] = []
    seen_tweet_ids: set[str] = set()
    for line, row, extras in _read_rows(tweets_path, TWEET_COLUMNS):
        tweet_id = row["tweet_id"].strip()
        if not tweet_id:
            raise MalformedRow(line, "empty tweet_id")
        if tweet_id in seen_tweet_ids:
            raise DuplicateId(tweet_id)
        seen_tweet_ids.add(tweet_id)
        account_id = row["account_id"].strip()
        if account_id not in accounts:
            raise OrphanTweet(tweet_id)
        text = row["text"]
        if all(c in extras for c in TWEET_ENTITY_COLUMNS):
            hashtags = _split_entities(row["hashtags"])
            urls = _split_entities(row["urls"])
            mentions = _split_entities(row["mentions"])
        else:
            h, u, m = extract_entities(text)
            hashtags, urls, mentions = tuple(h), tuple(u), tuple(m)
        tweets.append(Tweet(
            tweet_id=tweet_id,
            account_id=account_id,
            created_at=parse_timestamp(row["created_at"], line),
            text=text,
            retweet_count=_int_cell(row["retweet_count"], line, "retweet_count"),
            favorite_count=_int_cell(row["favorite_count"], line, "favorite_count"),
            is_retweet=_bool_cell(row["is_retweet"], line, "is_retweet"),
            is_reply=_bool_cell(row["is_reply"], line, "is_reply"),
            hashtags=hashtags,
            urls=urls,
            mentions=mentions,
        ))

    ordered_accounts = {aid: accounts[aid] for aid in sorted(accounts)}
    tweets.sort(key=lambda t: (t.account_id, t.created_at, t.tweet_id))
    if tweets:
        stamps = [t.created_at for t in tweets]
        span = (min(stamps), max(stamps))
    elif ordered_accounts:
        created = [a.created_at for a in ordered_accounts.values()]
        span = (min(created), max(created))
    else:
        span = None
    return Corpus(accounts=ordered_accounts, tweets=tuple(tweets), time_span=span)


def validate_corpus(corpus: Corpus) -> ValidationReport:
    """List every invariant violation; an empty report means the corpus is valid."""
    report = ValidationReport()
    ids = list(corpus.accounts)
    if ids != sorted(ids):
        report.add("accounts", "account order is not lexicographic")
    for aid, account in corpus.accounts.items():
        if not aid:
            report.add("accounts", "empty account_id")
        if aid != account.account_id:
            report.add(f"account {aid}", "key does not match account_id field")
        for attr in ("followers_count", "following_count", "likes_count", "declared_tweet_count"):
            if getattr(account, attr) < 0:
                report.add(f"account {aid}", f"{attr} is negative")

    seen: set[str] = set()
    newest: dict[str, dt.datetime] = {}
    prev_key = None
    for tweet in corpus.tweets:
        if tweet.tweet_id in seen:
            report.add(f"tweet {tweet.tweet_id}", "duplicate tweet_id")
        seen.add(tweet.tweet_id)
        if tweet.account_id not in corpus.accounts:
            report.add(f"tweet {tweet.tweet_id}", f"orphan tweet (account {tweet.account_id})")
        key = (tweet.account_id, tweet.created_at)
        if prev_key is not None and key < prev_key:
            report.add(f"tweet {tweet.tweet_id}", "tweets not sorted by (account_id, created_at)")
        prev_key = key
        for entity_list, name in ((tweet.hashtags, "hashtags"), (tweet.urls, "urls"), (tweet.mentions, "mentions")):
            if len(set(entity_list)) != len(entity_list):
                report.add(f"tweet {tweet.tweet_id}", f"{name} not deduplicated")
        stored = newest.get(tweet.account_id)
        if stored is None or tweet.created_at > stored:
            newest[tweet.account_id] = tweet.created_at

    for aid, latest in newest.items():
        account = corpus.accounts.get(aid)
        if account is not None and account.created_at > latest:
            report.add(f"account {aid}", "created_at is after the account's newest tweet")

    if corpus.tweets and corpus.time_span is not None:
        lo = min(t.created_at for t in corpus.tweets)
        hi = max(t.created_at for t in corpus.tweets)
        if corpus.time_span != (lo, hi):
            report.add("corpus", "time_span does not match tweet timestamps")
    return report
