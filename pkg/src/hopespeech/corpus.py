"""Comment corpus ingestion, normalization and mining plumbing.

Covers the data-pipeline side of the toolkit: JSONL comment/video dumps,
whitespace tokenization with punctuation/emoji stripping, search-query
expansion, popularity filtering, nationality attribution from self-report
templates, and collective-intent trigram mining.
"""

from __future__ import annotations

import json
import math
import re
import unicodedata
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from datetime import datetime, timezone
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

__all__ = [
    "Comment",
    "TokenizedComment",
    "VideoRecord",
    "QuerySet",
    "CorpusSummary",
    "tokenize",
    "tokenize_comment",
    "build_query_set",
    "filter_popular",
    "extract_country_mentions",
    "collective_intent_trigrams",
    "read_comments_jsonl",
    "write_comments_jsonl",
    "read_video_records",
    "load_alias_map",
    "load_word_list",
    "summarize_corpus",
]


@dataclass(frozen=True)
class Comment:
    """One social-media comment."""

    id: str
    video_id: str
    user_id: str
    timestamp: datetime  # UTC, second resolution
    like_count: int
    text: str

    def __post_init__(self):
        if self.like_count < 0:
            raise ValueError(f"comment {self.id}: like_count must be >= 0")
        if self.timestamp.tzinfo is None:
            object.__setattr__(self, "timestamp", self.timestamp.replace(tzinfo=timezone.utc))
        else:
            object.__setattr__(self, "timestamp", self.timestamp.astimezone(timezone.utc))


@dataclass(frozen=True)
class TokenizedComment:
    comment_id: str
    tokens: tuple[str, ...]


@dataclass
class VideoRecord:
    video_id: str
    comment_count: int = 0
    relevant: bool = False


@dataclass
class QuerySet:
    """Search queries: seeds, trend-expanded queries, and the news cross product."""

    seed: list[str]
    related: list[str]
    news_channels: list[str]
    final: list[str] = field(default_factory=list)


# Characters dropped before whitespace splitting: punctuation (P*), symbols
# incl. emoji (S*), format controls such as ZWJ that glue emoji sequences
# (Cf), and variation selectors. Digits and combining marks stay so that
# Indic scripts survive intact.
@lru_cache(maxsize=None)
def _strip_char(ch: str) -> bool:
    if 0xFE00 <= ord(ch) <= 0xFE0F:
        return True
    cat = unicodedata.category(ch)
    return cat[0] in ("P", "S") or cat == "Cf"


# Latin blocks with case: Basic/Latin-1/Extended-A/B plus Extended Additional
# and Extended-C/D. Other cased scripts (Cyrillic, Greek) are left verbatim.
def _lower_latin(ch: str) -> str:
    o = ord(ch)
    if o < 0x250 or 0x1E00 <= o <= 0x1EFF or 0x2C60 <= o <= 0x2C7F or 0xA720 <= o <= 0xA7FF:
        return ch.lower()
    return ch


def tokenize(text: str) -> list[str]:
    """Strip punctuation/emoji, lowercase Latin script, split on whitespace.

    Idempotent: re-tokenizing the joined output reproduces the tokens.
    Empty or all-symbol input yields an empty list.
    """
    cleaned = "".join(_lower_latin(ch) for ch in text if not _strip_char(ch))
    return cleaned.split()


def tokenize_comment(comment: Comment) -> TokenizedComment:
    return TokenizedComment(comment.id, tuple(tokenize(comment.text)))


def build_query_set(seed: Sequence[str], related: Sequence[str], news: Sequence[str]) -> QuerySet:
    """Expand related queries with "<query> <channel>" concatenations.

    final = dedup(related + related x news), order-preserving.
    """
    if not related or not news:
        raise ValueError("empty expansion input")
    final: list[str] = []
    seen: set[str] = set()
    for q in related:
        if q not in seen:
            seen.add(q)
            final.append(q)
    for q in related:
        for n in news:
            combined = f"{q} {n}"
            if combined not in seen:
                seen.add(combined)
                final.append(combined)
    return QuerySet(seed=list(seed), related=list(related), news_channels=list(news), final=final)


def filter_popular(videos: Iterable[VideoRecord], min_comments: int = 11) -> list[VideoRecord]:
    """Keep annotator-relevant videos with at least ``min_comments`` comments."""
    return [v for v in videos if v.relevant and v.comment_count >= min_comments]


def _find_subsequence(haystack: Sequence[str], needle: Sequence[str]) -> Iterator[int]:
    n = len(needle)
    if n == 0:
        return
    for i in range(len(haystack) - n + 1):
        if tuple(haystack[i : i + n]) == tuple(needle):
            yield i


def extract_country_mentions(
    comments: Iterable[Comment],
    templates: Sequence[str],
    gazetteer: Mapping[str, str],
    window: int = 5,
    multi_attribution: bool = False,
) -> dict[str, tuple[set[str], int]]:
    """Attribute nationality from self-report templates ("i am from", ...).

    For every template occurrence, the ``window`` tokens following the
    template are scanned and the first gazetteer hit is attributed: the
    country's mention count goes up and the occurrence is recorded for the
    commenting user. Aliases may span two tokens ("sri lanka"); the longer
    alias is tried first at each position. A user's nationality is the
    modal country over their occurrences (ties -> unattributed); with
    ``multi_attribution`` the user joins every country they ever matched.

    Returns {canonical country: (user set, mention count)}.
    """
    tok_templates = [tuple(tokenize(t)) for t in templates]
    tok_templates = [t for t in tok_templates if t]
    mention_counts: Counter[str] = Counter()
    user_hits: dict[str, Counter[str]] = defaultdict(Counter)

    def first_hit(tail: list[str]) -> str | None:
        for i in range(len(tail)):
            if i + 1 < len(tail):
                country = gazetteer.get(f"{tail[i]} {tail[i + 1]}")
                if country is not None:
                    return country
            country = gazetteer.get(tail[i])
            if country is not None:
                return country
        return None

    for comment in comments:
        tokens = tokenize(comment.text)
        for tmpl in tok_templates:
            for start in _find_subsequence(tokens, tmpl):
                tail = tokens[start + len(tmpl) : start + len(tmpl) + window]
                country = first_hit(tail)
                if country is not None:
                    mention_counts[country] += 1
                    user_hits[comment.user_id][country] += 1

    users_by_country: dict[str, set[str]] = defaultdict(set)
    for user, hits in user_hits.items():
        if multi_attribution:
            for country in hits:
                users_by_country[country].add(user)
            continue
        top = hits.most_common()
        if len(top) > 1 and top[0][1] == top[1][1]:
            continue  # tied modal country: leave unattributed
        users_by_country[top[0][0]].add(user)

    return {
        country: (users_by_country.get(country, set()), count)
        for country, count in mention_counts.items()
    }


def collective_intent_trigrams(
    corpus: Iterable[TokenizedComment | Sequence[str]],
    volitional_verbs: Iterable[str],
) -> list[tuple[str, int, int]]:
    """Rank "we <volitional-verb> ..." trigrams against the full trigram table.

    Every trigram in the corpus is counted; ranks (1-based) are assigned by
    descending frequency with lexicographic tie-breaking. Output keeps only
    trigrams whose first token is "we" and second token is a volitional verb,
    each carrying its rank in the unfiltered table.
    """
    verbs = set(volitional_verbs)
    counts: Counter[tuple[str, str, str]] = Counter()
    for doc in corpus:
        tokens = doc.tokens if isinstance(doc, TokenizedComment) else tuple(doc)
        for i in range(len(tokens) - 2):
            counts[tokens[i : i + 3]] += 1
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    out = []
    for rank, (tri, freq) in enumerate(ranked, start=1):
        if tri[0] == "we" and tri[1] in verbs:
            out.append((" ".join(tri), freq, rank))
    return out


def parse_timestamp(raw: str) -> datetime:
    """ISO-8601, UTC assumed when the offset is missing."""
    ts = datetime.fromisoformat(raw.replace("Z", "+00:00"))
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def comment_from_json(obj: Mapping) -> Comment:
    return Comment(
        id=str(obj["id"]),
        video_id=str(obj["video_id"]),
        user_id=str(obj["user_id"]),
        timestamp=parse_timestamp(obj["timestamp"]),
        like_count=int(obj["like_count"]),
        text=obj["text"],
    )


def comment_to_json(c: Comment) -> dict:
    return {
        "id": c.id,
        "video_id": c.video_id,
        "user_id": c.user_id,
        "timestamp": c.timestamp.strftime("%Y-%m-%dT%H:%M:%SZ"),
        "like_count": c.like_count,
        "text": c.text,
    }


def read_comments_jsonl(
    path: str | Path,
    window: tuple[datetime, datetime] | None = None,
    dedupe: bool = True,
) -> list[Comment]:
    """Load a JSON Lines comment dump.

    Comments outside ``window`` (inclusive start, exclusive end) are dropped
    when a window is given. Duplicate ids keep the first occurrence (raw
    crawls routinely repeat records); pass ``dedupe=False`` to fail instead.
    """
    comments: list[Comment] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                comment = comment_from_json(obj)
            except (KeyError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad comment record: {exc}") from exc
            if comment.id in seen:
                if not dedupe:
                    raise ValueError(f"{path}:{lineno}: duplicate comment id {comment.id!r}")
                continue
            if window is not None and not (window[0] <= comment.timestamp < window[1]):
                continue
            seen.add(comment.id)
            comments.append(comment)
    return comments


def write_comments_jsonl(comments: Iterable[Comment], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for c in comments:
            fh.write(json.dumps(comment_to_json(c), ensure_ascii=False, sort_keys=True))
            fh.write("\n")


def read_video_records(path: str | Path, comments: Iterable[Comment] = ()) -> list[VideoRecord]:
    """Load {video_id, relevant} JSONL; comment_count derived from the corpus."""
    counts = Counter(c.video_id for c in comments)
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            vid = str(obj["video_id"])
            records.append(VideoRecord(vid, counts.get(vid, 0), bool(obj["relevant"])))
    return records


_TSV_COMMENT = re.compile(r"^\s*#")


def load_alias_map(path: str | Path) -> dict[str, str]:
    """UTF-8 TSV ``alias\\tcanonical``; aliases are lowercased on load."""
    mapping: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line.strip() or _TSV_COMMENT.match(line):
                continue
            parts = line.split("\t")
            alias = parts[0].strip().lower()
            canonical = parts[1].strip() if len(parts) > 1 and parts[1].strip() else parts[0].strip()
            if alias:
                mapping[alias] = canonical
    return mapping


def load_word_list(path: str | Path) -> list[str]:
    """One word per line (first TSV column); blanks and # comments skipped."""
    words = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line.strip() or _TSV_COMMENT.match(line):
                continue
            words.append(line.split("\t")[0].strip().lower())
    return words


@dataclass
class CorpusSummary:
    n_comments: int
    n_users: int
    n_videos: int
    total_likes: int
    first_timestamp: datetime | None
    last_timestamp: datetime | None
    mean_tokens: float
    std_tokens: float

    def format(self) -> str:
        lines = [
            f"comments:      {self.n_comments}",
            f"users:         {self.n_users}",
            f"videos:        {self.n_videos}",
            f"total likes:   {self.total_likes}",
        ]
        if self.first_timestamp is not None:
            lines.append(
                "window:        "
                f"{self.first_timestamp:%Y-%m-%d %H:%M:%S} .. {self.last_timestamp:%Y-%m-%d %H:%M:%S} UTC"
            )
        lines.append(f"tokens/comment: {self.mean_tokens:.2f} +/- {self.std_tokens:.2f}")
        return "\n".join(lines)


def summarize_corpus(comments: Sequence[Comment]) -> CorpusSummary:
    lengths = [len(tokenize(c.text)) for c in comments]
    n = len(comments)
    mean = sum(lengths) / n if n else 0.0
    var = sum((x - mean) ** 2 for x in lengths) / n if n else 0.0
    return CorpusSummary(
        n_comments=n,
        n_users=len({c.user_id for c in comments}),
        n_videos=len({c.video_id for c in comments}),
        total_likes=sum(c.like_count for c in comments),
        first_timestamp=min((c.timestamp for c in comments), default=None),
        last_timestamp=max((c.timestamp for c in comments), default=None),
        mean_tokens=mean,
        std_tokens=math.sqrt(var),
    )
