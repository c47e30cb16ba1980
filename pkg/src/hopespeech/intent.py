"""Lexicon-based war/peace intent scoring and temporal trends.

A polarity phrase lexicon (+1 peace, -1 war, 0 neutral) is matched against
tokenized comments greedily: at each position the longest phrase starting
there wins and consumes its tokens, so subsumed shorter phrases never
count. Daily trends normalize intent frequencies by the day's total
comments or likes.
"""

from __future__ import annotations

import csv
from collections import Counter, defaultdict
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import Comment, tokenize

__all__ = [
    "PhraseLexicon",
    "IntentScore",
    "DailyTrend",
    "score_comment",
    "daily_trends",
    "corpus_coverage",
    "user_intent_overlap",
    "token_shift",
    "write_trends_csv",
]

PEACE, NEUTRAL, WAR = "peace", "neutral", "war"
_POLARITY_NAMES = {PEACE: 1, WAR: -1, NEUTRAL: 0}


class PhraseLexicon:
    """Polarity-scored phrases with longest-match lookup."""

    def __init__(self, entries: Mapping[tuple[str, ...], int]):
        for phrase, polarity in entries.items():
            if polarity not in (-1, 0, 1):
                raise ValueError(f"bad polarity {polarity} for {phrase}")
            if not phrase:
                raise ValueError("empty phrase")
        self.entries: dict[tuple[str, ...], int] = dict(entries)
        self.max_len = max((len(p) for p in entries), default=0)

    def __len__(self) -> int:
        return len(self.entries)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, str | int]]) -> "PhraseLexicon":
        """Pairs of (phrase text, polarity name or value); phrases run
        through the corpus tokenizer so matching aligns with comments."""
        entries: dict[tuple[str, ...], int] = {}
        for text, polarity in pairs:
            toks = tuple(tokenize(text))
            if not toks:
                raise ValueError(f"phrase tokenizes to nothing: {text!r}")
            value = _POLARITY_NAMES[polarity] if isinstance(polarity, str) else int(polarity)
            if toks in entries and entries[toks] != value:
                raise ValueError(f"duplicate phrase with conflicting polarity: {text!r}")
            entries[toks] = value
        return cls(entries)

    @classmethod
    def from_tsv(cls, path: str | Path) -> "PhraseLexicon":
        """UTF-8 TSV: phrase <tab> peace|war|neutral."""
        pairs = []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line.strip() or line.lstrip().startswith("#"):
                    continue
                parts = line.split("\t")
                if len(parts) < 2 or parts[1].strip().lower() not in _POLARITY_NAMES:
                    raise ValueError(f"{path}:{lineno}: expected 'phrase\\tpeace|war|neutral'")
                pairs.append((parts[0], parts[1].strip().lower()))
        return cls.from_pairs(pairs)


@dataclass
class IntentScore:
    comment_id: str
    peace_hits: int  # m
    war_hits: int  # n
    score: int  # m - n
    intent_class: str  # peace (>0) | neutral (=0) | war (<0)
    matched_spans: list[tuple[int, int, str, int]]  # (start, end, phrase, polarity)

    @property
    def has_polar_match(self) -> bool:
        return any(pol != 0 for *_x, pol in self.matched_spans)


def _classify(score: int) -> str:
    if score > 0:
        return PEACE
    if score < 0:
        return WAR
    return NEUTRAL


def score_comment(
    tokens: Sequence[str], lexicon: PhraseLexicon, comment_id: str = ""
) -> IntentScore:
    """Greedy leftmost-longest scan; matched tokens are consumed.

    Neutral phrases contribute 0 but still consume their tokens, blocking
    any phrases they subsume.
    """
    tokens = tuple(tokens)
    spans: list[tuple[int, int, str, int]] = []
    m = n = 0
    i = 0
    limit = lexicon.max_len
    while i < len(tokens):
        matched = 0
        for length in range(min(limit, len(tokens) - i), 0, -1):
            polarity = lexicon.entries.get(tokens[i : i + length])
            if polarity is not None:
                spans.append((i, i + length, " ".join(tokens[i : i + length]), polarity))
                if polarity > 0:
                    m += 1
                elif polarity < 0:
                    n += 1
                matched = length
                break
        i += matched if matched else 1
    score = m - n
    return IntentScore(comment_id, m, n, score, _classify(score), spans)


@dataclass
class DailyTrend:
    date: date
    total_comments: int
    total_likes: int
    peace_comment_share: float
    war_comment_share: float
    peace_like_share: float
    war_like_share: float
    coverage: float  # fraction of the day's comments with >= 1 polar match


def _score_map(scores: Iterable[IntentScore]) -> dict[str, IntentScore]:
    return {s.comment_id: s for s in scores}


def daily_trends(comments: Sequence[Comment], scores: Iterable[IntentScore]) -> list[DailyTrend]:
    """Per-UTC-day intent shares over comments and like mass.

    Every comment needs a score (join on comment_id). Days with no comments
    are omitted; zero like mass yields like shares of 0.
    """
    by_id = _score_map(scores)
    days: dict[date, list[Comment]] = defaultdict(list)
    for c in comments:
        days[c.timestamp.date()].append(c)

    trends = []
    for day in sorted(days):
        bucket = days[day]
        total = len(bucket)
        likes = sum(c.like_count for c in bucket)
        peace_c = war_c = covered = 0
        peace_l = war_l = 0
        for c in bucket:
            try:
                s = by_id[c.id]
            except KeyError:
                raise ValueError(f"no intent score for comment {c.id!r}") from None
            if s.intent_class == PEACE:
                peace_c += 1
                peace_l += c.like_count
            elif s.intent_class == WAR:
                war_c += 1
                war_l += c.like_count
            if s.has_polar_match:
                covered += 1
        trends.append(
            DailyTrend(
                date=day,
                total_comments=total,
                total_likes=likes,
                peace_comment_share=peace_c / total if total else 0.0,
                war_comment_share=war_c / total if total else 0.0,
                peace_like_share=peace_l / likes if likes else 0.0,
                war_like_share=war_l / likes if likes else 0.0,
                coverage=covered / total if total else 0.0,
            )
        )
    return trends


def corpus_coverage(
    comments: Sequence[Comment], scores: Iterable[IntentScore]
) -> tuple[float, float]:
    """(comment coverage, like coverage): share carrying >= 1 polar phrase."""
    by_id = _score_map(scores)
    total = len(comments)
    likes = sum(c.like_count for c in comments)
    covered = sum(1 for c in comments if by_id[c.id].has_polar_match)
    covered_likes = sum(c.like_count for c in comments if by_id[c.id].has_polar_match)
    return (covered / total if total else 0.0, covered_likes / likes if likes else 0.0)


def user_intent_overlap(
    scores: Iterable[IntentScore], comments: Sequence[Comment]
) -> tuple[set[str], set[str], set[str], float]:
    """User sets posting peace-class and war-class comments, their overlap,
    and the Jaccard index between them (0 when both sets are empty)."""
    by_id = _score_map(scores)
    peace_users: set[str] = set()
    war_users: set[str] = set()
    for c in comments:
        s = by_id.get(c.id)
        if s is None:
            continue
        if s.intent_class == PEACE:
            peace_users.add(c.user_id)
        elif s.intent_class == WAR:
            war_users.add(c.user_id)
    both = peace_users & war_users
    union = peace_users | war_users
    jaccard = len(both) / len(union) if union else 0.0
    return peace_users, war_users, both, jaccard


def token_shift(
    window_a: Iterable[Sequence[str]],
    window_b: Iterable[Sequence[str]],
    top_n: int = 20,
    stopwords: Iterable[str] | None = None,
) -> tuple[list[tuple[str, float]], list[tuple[str, float]]]:
    """Tokens with the biggest relative-frequency gain in each window.

    Unigram distributions P_a and P_b are compared over the union
    vocabulary; list 1 ranks tokens by P_a - P_b, list 2 by P_b - P_a.
    Ties break lexicographically. Stopwords, when given, are dropped before
    the distributions are computed.
    """
    stop = set(stopwords) if stopwords else set()

    def distribution(window) -> Counter:
        counts: Counter[str] = Counter()
        for doc in window:
            tokens = getattr(doc, "tokens", doc)
            counts.update(t for t in tokens if t not in stop)
        return counts

    counts_a, counts_b = distribution(window_a), distribution(window_b)
    total_a, total_b = sum(counts_a.values()), sum(counts_b.values())
    if total_a == 0 or total_b == 0:
        raise ValueError("empty window")
    vocab = set(counts_a) | set(counts_b)
    diffs = {t: counts_a[t] / total_a - counts_b[t] / total_b for t in vocab}
    up_a = sorted(vocab, key=lambda t: (-diffs[t], t))[:top_n]
    up_b = sorted(vocab, key=lambda t: (diffs[t], t))[:top_n]
    return [(t, diffs[t]) for t in up_a], [(t, -diffs[t]) for t in up_b]


def write_trends_csv(trends: Sequence[DailyTrend], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "date",
                "total_comments",
                "total_likes",
                "peace_comment_share",
                "war_comment_share",
                "peace_like_share",
                "war_like_share",
                "coverage",
            ]
        )
        for t in trends:
            writer.writerow(
                [
                    t.date.isoformat(),
                    t.total_comments,
                    t.total_likes,
                    repr(t.peace_comment_share),
                    repr(t.war_comment_share),
                    repr(t.peace_like_share),
                    repr(t.war_like_share),
                    repr(t.coverage),
                ]
            )
