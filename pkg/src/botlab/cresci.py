"""Adapter mapping the public cresci-2017 CSV layout onto the canonical
schemas (see ingest). Column names follow the published dumps; anything
missing is defaulted rather than rejected, since the archive variants
differ slightly.
"""
from __future__ import annotations

import csv
import os

from .errors import FileMissing, MalformedRow
from .timebin import parse_timestamp

_TWITTER_FORMATS = ("%a %b %d %H:%M:%S %z %Y",)


def _parse_any_timestamp(raw: str, line: int):
    import datetime as dt

    s = raw.strip()
    for fmt in _TWITTER_FORMATS:
        try:
            return dt.datetime.strptime(s, fmt).astimezone(dt.timezone.utc)
        except ValueError:
            pass
    return parse_timestamp(s, line)


def _get(row: dict, *names: str, default: str = "") -> str:
    for name in names:
        value = row.get(name)
        if value not in (None, ""):
            return value
    return default


def _int(raw: str) -> int:
    try:
        return max(0, int(float(raw)))
    except (TypeError, ValueError):
        return 0


def convert(users_csv: str, tweets_csv: str, accounts_out: str, tweets_out: str) -> tuple[int, int]:
    """Rewrite cresci users/tweets files into canonical accounts/tweets CSVs."""
    for path in (users_csv, tweets_csv):
        if not os.path.isfile(path):
            raise FileMissing(path)

    n_accounts = 0
    with open(users_csv, newline="", encoding="utf-8", errors="replace") as src, \
            open(accounts_out, "w", newline="", encoding="utf-8") as dst:
        reader = csv.DictReader(src)
        if reader.fieldnames is None or "id" not in reader.fieldnames:
            raise MalformedRow(1, "users file lacks an id column")
        writer = csv.writer(dst)
        writer.writerow([
            "account_id", "screen_name", "display_name", "created_at",
            "followers_count", "following_count", "likes_count", "tweet_count",
            "profile_image_url",
        ])
        for row in reader:
            created = _parse_any_timestamp(
                _get(row, "created_at", "timestamp", default="0"), reader.line_num)
            writer.writerow([
                row["id"],
                _get(row, "screen_name"),
                _get(row, "name"),
                created.isoformat(),
                _int(_get(row, "followers_count")),
                _int(_get(row, "friends_count", "following_count")),
                _int(_get(row, "favourites_count", "likes_count")),
                _int(_get(row, "statuses_count", "tweet_count")),
                _get(row, "profile_image_url"),
            ])
            n_accounts += 1

    n_tweets = 0
    with open(tweets_csv, newline="", encoding="utf-8", errors="replace") as src, \
            open(tweets_out, "w", newline="", encoding="utf-8") as dst:
        reader = csv.DictReader(src)
        if reader.fieldnames is None or "id" not in reader.fieldnames:
            raise MalformedRow(1, "tweets file lacks an id column")
        writer = csv.writer(dst)
        writer.writerow([
            "tweet_id", "account_id", "created_at", "text",
            "retweet_count", "favorite_count", "is_retweet", "is_reply",
        ])
        for row in reader:
            created = _parse_any_timestamp(
                _get(row, "created_at", "timestamp", default="0"), reader.line_num)
            is_retweet = bool(_int(_get(row, "retweeted_status_id")))
            is_reply = bool(_int(_get(row, "in_reply_to_status_id")))
            writer.writerow([
                row["id"],
                _get(row, "user_id", "account_id"),
                created.isoformat(),
                _get(row, "text"),
                _int(_get(row, "retweet_count")),
                _int(_get(row, "favorite_count")),
                int(is_retweet),
                int(is_reply),
            ])
            n_tweets += 1
    return n_accounts, n_tweets
