"""Lexicon-based polarity/subjectivity scoring.

Tokens are whitespace-split, stripped of leading/trailing non-alphanumerics
and lowercased before lookup. Scores are arithmetic means over matched
tokens; zero matches yields the neutral (0, 0) score so downstream feature
matrices stay NaN-free.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from importlib import resources

from .errors import FileMissing, MalformedRow, OutOfRangeValue
from .ingest import Tweet
from .timebin import LEVELS, period_of


@dataclass(frozen=True)
class SentimentScore:
    polarity: float
    subjectivity: float
    matched_count: int


NEUTRAL = SentimentScore(0.0, 0.0, 0)


class Lexicon:
    """Immutable token -> (polarity, subjectivity) map with lowercase keys."""

    def __init__(self, entries: dict[str, tuple[float, float]]):
        self._entries = dict(entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, token: str) -> bool:
        return token in self._entries

    def get(self, token: str):
        return self._entries.get(token)

    def items(self):
        return self._entries.items()


def load_lexicon(path: str) -> Lexicon:
    """Load a token<TAB>polarity<TAB>subjectivity file; last duplicate wins."""
    if not os.path.isfile(path):
        raise FileMissing(path)
    entries: dict[str, tuple[float, float]] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            stripped = line.rstrip("\n")
            if not stripped or stripped.startswith("#"):
                continue
            parts = stripped.split("\t")
            if len(parts) != 3:
                raise MalformedRow(line_no, "expected token<TAB>polarity<TAB>subjectivity")
            token = parts[0].strip().lower()
            if not token:
                raise MalformedRow(line_no, "empty token")
            try:
                polarity = float(parts[1])
                subjectivity = float(parts[2])
            except ValueError:
                raise MalformedRow(line_no, "non-numeric score") from None
            if not -1.0 <= polarity <= 1.0:
                raise OutOfRangeValue(line_no, f"polarity {polarity} outside [-1, 1]")
            if not 0.0 <= subjectivity <= 1.0:
                raise OutOfRangeValue(line_no, f"subjectivity {subjectivity} outside [0, 1]")
            entries[token] = (polarity, subjectivity)
    return Lexicon(entries)


def default_lexicon() -> Lexicon:
    """The small general-purpose lexicon bundled with the package."""
    with resources.as_file(resources.files("botlab.data") / "lexicon.tsv") as path:
        return load_lexicon(str(path))


def tokenize(text: str) -> list[str]:
    tokens = []
    for raw in text.split():
        start, end = 0, len(raw)
        while start < end and not raw[start].isalnum():
            start += 1
        while end > start and not raw[end - 1].isalnum():
            end -= 1
        if end > start:
            tokens.append(raw[start:end].lower())
    return tokens


def score_tokens(lexicon: Lexicon, tokens) -> SentimentScore:
    polarity_sum = 0.0
    subjectivity_sum = 0.0
    matched = 0
    for token in tokens:
        entry = lexicon.get(token)
        if entry is not None:
            polarity_sum += entry[0]
            subjectivity_sum += entry[1]
            matched += 1
    if matched == 0:
        return NEUTRAL
    return SentimentScore(polarity_sum / matched, subjectivity_sum / matched, matched)


def score_text(lexicon: Lexicon, text: str) -> SentimentScore:
    return score_tokens(lexicon, tokenize(text))


def score_account(
    lexicon: Lexicon, tweets: list[Tweet] | tuple[Tweet, ...], level: str = "overall"
) -> dict[str, SentimentScore]:
    """Per-period scores over the concatenation of the period's tweets.

    Token-level mean, not mean of per-tweet means. Level "overall" yields a
    single entry keyed "overall". Empty periods are simply absent.
    """
    if level not in LEVELS:
        raise ValueError(f"unknown level {level!r}")
    buckets: dict[str, list[str]] = {}
    for tweet in tweets:
        buckets.setdefault(period_of(tweet.created_at, level), []).append(tweet.text)
    return {
        period: score_tokens(lexicon, [t for text in texts for t in tokenize(text)])
        for period, texts in sorted(buckets.items())
    }
