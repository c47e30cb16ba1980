"""Shared synthetic-data generators and brute-force oracles."""

from __future__ import annotations

from datetime import datetime, timedelta, timezone

import numpy as np

from hopespeech.corpus import Comment

# disjoint token inventories per synthetic "language"; one uses Devanagari
# so the corpus mixes scripts like a real multilingual dump
_SYLLABLES = {
    "alpha": ["ba", "ke", "ri", "mo", "tu", "sha", "lin", "dor", "fa", "nu"],
    "beta": ["zu", "pra", "vek", "olt", "gri", "nym", "qua", "ixe", "wol", "hep"],
    "gamma": ["का", "नी", "मु", "तो", "ले", "सु", "हर", "बड"],
}


def language_vocab(name: str, size: int, rng: np.random.Generator) -> list[str]:
    syll = _SYLLABLES[name]
    vocab = set()
    while len(vocab) < size:
        n = int(rng.integers(2, 4))
        vocab.add("".join(syll[int(rng.integers(len(syll)))] for _ in range(n)))
    return sorted(vocab)


def synthetic_language_corpus(
    n_docs: int,
    seed: int = 0,
    languages: tuple[str, ...] = ("alpha", "beta", "gamma"),
    vocab_size: int = 60,
    doc_len: tuple[int, int] = (4, 12),
) -> tuple[list[list[str]], list[str]]:
    """Documents drawn from disjoint per-language vocabularies."""
    rng = np.random.default_rng(seed)
    vocabs = {lang: language_vocab(lang, vocab_size, rng) for lang in languages}
    docs, labels = [], []
    for i in range(n_docs):
        lang = languages[i % len(languages)]
        vocab = vocabs[lang]
        length = int(rng.integers(doc_len[0], doc_len[1] + 1))
        docs.append([vocab[int(rng.integers(len(vocab)))] for _ in range(length)])
        labels.append(lang)
    return docs, labels


def comments_from_docs(
    docs: list[list[str]],
    start: datetime | None = None,
    seed: int = 0,
    n_users: int = 50,
    n_videos: int = 10,
) -> list[Comment]:
    rng = np.random.default_rng(seed)
    start = start or datetime(2019, 2, 14, tzinfo=timezone.utc)
    out = []
    for i, tokens in enumerate(docs):
        out.append(
            Comment(
                id=f"c{i:06d}",
                video_id=f"v{int(rng.integers(n_videos)):04d}",
                user_id=f"u{int(rng.integers(n_users)):05d}",
                timestamp=start + timedelta(minutes=int(rng.integers(0, 60 * 24 * 28))),
                like_count=int(rng.integers(0, 20)),
                text=" ".join(tokens),
            )
        )
    return out


def make_comment(
    cid: str = "c1",
    text: str = "",
    user: str = "u1",
    video: str = "v1",
    ts: str = "2019-02-14T10:00:00+00:00",
    likes: int = 0,
) -> Comment:
    return Comment(cid, video, user, datetime.fromisoformat(ts), likes, text)


# ------------------------------------------------------------------ oracles


def oracle_greedy_score(tokens, entries: dict) -> tuple[int, int, list]:
    """Leftmost-longest reference matcher: at every position scan the whole
    lexicon for the longest phrase starting there; matched tokens are
    consumed. Returns (peace hits, war hits, spans)."""
    tokens = list(tokens)
    spans = []
    m = n = 0
    i = 0
    while i < len(tokens):
        best = None
        for phrase, pol in entries.items():
            L = len(phrase)
            if i + L <= len(tokens) and tuple(tokens[i : i + L]) == tuple(phrase):
                if best is None or L > len(best[0]):
                    best = (phrase, pol)
        if best is None:
            i += 1
            continue
        phrase, pol = best
        spans.append((i, i + len(phrase), " ".join(phrase), pol))
        if pol > 0:
            m += 1
        elif pol < 0:
            n += 1
        i += len(phrase)
    return m, n, spans


def oracle_silhouette(points: np.ndarray, assign: np.ndarray) -> float:
    """Naive per-point silhouette with explicit loops."""
    n = len(points)
    clusters = sorted(set(int(a) for a in assign))
    vals = []
    for i in range(n):
        same = [j for j in range(n) if assign[j] == assign[i] and j != i]
        if not same:
            vals.append(0.0)
            continue
        a = sum(float(np.linalg.norm(points[i] - points[j])) for j in same) / len(same)
        b = min(
            sum(float(np.linalg.norm(points[i] - points[j])) for j in range(n) if assign[j] == c)
            / sum(1 for j in range(n) if assign[j] == c)
            for c in clusters
            if c != assign[i]
        )
        vals.append(0.0 if max(a, b) == 0 else (b - a) / max(a, b))
    return float(np.mean(vals))


def oracle_trigram_counts(docs) -> dict:
    counts: dict[tuple, int] = {}
    for doc in docs:
        toks = list(doc)
        for i in range(len(toks) - 2):
            tri = tuple(toks[i : i + 3])
            counts[tri] = counts.get(tri, 0) + 1
    return counts
