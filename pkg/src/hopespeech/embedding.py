"""Polyglot subword skip-gram embeddings.

One model is trained on the full multilingual corpus (no language
separation). Words are represented as the sum of a per-token vector and
hashed character n-gram vectors, optimized with the skip-gram
negative-sampling objective by plain SGD. Document embeddings are means of
unit-normalized token vectors.
"""

from __future__ import annotations

import json
import struct
import threading
from dataclasses import dataclass, asdict, field
from collections import Counter
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.special import expit

__all__ = [
    "EmbeddingConfig",
    "EmbeddingModel",
    "DocEmbedding",
    "train_embeddings",
    "word_vector",
    "doc_embedding",
    "pair_loss_and_grads",
    "subword_ngrams",
    "save_model",
    "load_model",
    "export_text",
]

_MAGIC = b"PGEM"
_FORMAT_VERSION = 1


@dataclass
class EmbeddingConfig:
    dim: int = 100
    window: int = 5
    negatives: int = 5
    epochs: int = 5
    learning_rate: float = 0.05
    min_count: int = 5
    subword_min: int = 3
    subword_max: int = 6
    bucket_count: int = 2_000_000
    seed: int = 1
    workers: int = 1
    holdout_fraction: float = 0.0  # sentences reserved for before/after loss

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.subword_min > self.subword_max:
            raise ValueError("subword_min must be <= subword_max")
        if self.bucket_count < 1:
            raise ValueError("bucket_count must be >= 1")


def fnv1a_32(data: bytes) -> int:
    h = 0x811C9DC5
    for b in data:
        h ^= b
        h = (h * 0x01000193) & 0xFFFFFFFF
    return h


def subword_ngrams(token: str, nmin: int, nmax: int) -> list[str]:
    """Character n-grams of '<token>' with boundary markers, lengths nmin..nmax."""
    s = f"<{token}>"
    return [s[i : i + n] for n in range(nmin, nmax + 1) for i in range(len(s) - n + 1)]


def _bucket_rows(token: str, cfg: EmbeddingConfig) -> tuple[np.ndarray, np.ndarray]:
    """Unique hashed bucket rows and their multiplicities for a token."""
    grams = subword_ngrams(token, cfg.subword_min, cfg.subword_max)
    if not grams:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.float32)
    rows = Counter(fnv1a_32(g.encode("utf-8")) % cfg.bucket_count for g in grams)
    idx = np.fromiter(sorted(rows), count=len(rows), dtype=np.int64)
    mult = np.array([rows[i] for i in idx], dtype=np.float32)
    return idx, mult


@dataclass
class EmbeddingModel:
    vocab: dict[str, int]
    vocab_vectors: np.ndarray  # (|vocab|, dim) token input vectors
    bucket_vectors: np.ndarray  # (bucket_count, dim) subword vectors
    config: EmbeddingConfig
    output_vectors: np.ndarray | None = None  # training-time only
    epoch_losses: list[float] = field(default_factory=list)
    holdout_losses: tuple[float, float] | None = None  # (initial, final)

    _component_cache: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return self.config.dim

    def components(self, token: str) -> tuple[int | None, np.ndarray, np.ndarray]:
        """(vocab row or None, bucket rows, multiplicities) for a token."""
        cached = self._component_cache.get(token)
        if cached is None:
            rows, mult = _bucket_rows(token, self.config)
            cached = (self.vocab.get(token), rows, mult)
            if len(self._component_cache) < 2_000_000:
                self._component_cache[token] = cached
        return cached


@dataclass
class DocEmbedding:
    comment_id: str
    vector: np.ndarray
    empty: bool


def _log_sigmoid(x: np.ndarray) -> np.ndarray:
    # -softplus(-x), stable for both signs
    return np.where(x >= 0, -np.log1p(np.exp(-np.abs(x))), x - np.log1p(np.exp(-np.abs(x))))


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x, dtype=np.float64)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def pair_loss_and_grads(
    input_vecs: np.ndarray, ctx_vec: np.ndarray, neg_vecs: np.ndarray
) -> tuple[float, np.ndarray, np.ndarray, np.ndarray]:
    """Negative-sampling loss for one (center, context) pair and its gradients.

    The center word's representation is the sum of ``input_vecs`` rows (token
    vector plus subword vectors); every row receives the same gradient.

    Returns (loss, grad_per_input_row, grad_ctx, grad_negs).
    """
    h = input_vecs.sum(axis=0)
    s_pos = float(ctx_vec @ h)
    s_neg = neg_vecs @ h if len(neg_vecs) else np.empty(0)
    loss = -float(_log_sigmoid(np.array([s_pos]))[0]) - float(_log_sigmoid(-s_neg).sum())
    d_pos = float(_sigmoid(np.array([s_pos]))[0]) - 1.0
    d_neg = _sigmoid(s_neg)
    grad_h = d_pos * ctx_vec + (d_neg @ neg_vecs if len(neg_vecs) else 0.0)
    grad_ctx = d_pos * h
    grad_negs = np.outer(d_neg, h)
    return loss, grad_h, grad_ctx, grad_negs


class _TrainState:
    """Shared mutable bits between worker threads."""

    def __init__(self, total_tokens: int, lr0: float):
        self.total_tokens = max(total_tokens, 1)
        self.lr0 = lr0
        self.processed = 0  # racy under >1 worker, by design

    def lr(self) -> float:
        return self.lr0 * max(1.0 - self.processed / self.total_tokens, 1e-4)


def _train_sentences(
    model: EmbeddingModel,
    sentences: Sequence[list[int]],
    word_tokens: list[str],
    cum_neg: np.ndarray,
    state: _TrainState,
    rng: np.random.Generator,
) -> tuple[float, int]:
    """SGD over the given (index-encoded) sentences; returns (loss sum, pairs)."""
    cfg = model.config
    vocab_vecs = model.vocab_vectors
    bucket_vecs = model.bucket_vectors
    out_vecs = model.output_vectors
    K = cfg.negatives
    loss_sum = 0.0
    n_pairs = 0
    comp = [model.components(t) for t in word_tokens]
    eps = np.float32(1e-7)

    for sent in sentences:
        n = len(sent)
        for t in range(n):
            state.processed += 1
            lr = np.float32(state.lr())
            b = int(rng.integers(1, cfg.window + 1))
            lo, hi = max(0, t - b), min(n, t + b + 1)
            center = sent[t]
            _, brows, bmult = comp[center]
            for c in range(lo, hi):
                if c == t:
                    continue
                ctx = sent[c]
                negs = np.searchsorted(cum_neg, rng.random(K)) if K else np.empty(0, np.int64)
                negs = negs[negs != ctx]

                h = vocab_vecs[center].copy()
                if len(brows):
                    h += bmult @ bucket_vecs[brows]
                idxs = np.concatenate(([ctx], negs))
                U = out_vecs[idxs]  # fancy indexing copies
                p = expit(U @ h)
                pc = np.clip(p, eps, 1 - eps)
                loss_sum += -float(np.log(pc[0])) - float(np.log1p(-pc[1:]).sum())
                n_pairs += 1

                g = -lr * p  # ascent on log-likelihood: g = lr * (label - p)
                g[0] += lr
                grad_h = g @ U
                if len(set(idxs.tolist())) == len(idxs):
                    out_vecs[idxs] += np.outer(g, h)
                else:
                    np.add.at(out_vecs, idxs, np.outer(g, h))
                vocab_vecs[center] += grad_h
                if len(brows):
                    bucket_vecs[brows] += np.outer(bmult, grad_h)
    return loss_sum, n_pairs


def _holdout_loss(
    model: EmbeddingModel,
    sentences: Sequence[list[int]],
    cum_neg: np.ndarray,
    word_tokens: list[str],
    seed: int,
) -> float:
    """Mean pair loss on held-out sentences with reproducible negatives."""
    cfg = model.config
    rng = np.random.default_rng(seed)
    loss_sum = 0.0
    n_pairs = 0
    for sent in sentences:
        n = len(sent)
        for t in range(n):
            b = int(rng.integers(1, cfg.window + 1))
            lo, hi = max(0, t - b), min(n, t + b + 1)
            center = sent[t]
            row, brows, bmult = model.components(word_tokens[center])
            h = model.vocab_vectors[row].astype(np.float64)
            if len(brows):
                h = h + bmult @ model.bucket_vectors[brows]
            for c in range(lo, hi):
                if c == t:
                    continue
                ctx = sent[c]
                negs = np.searchsorted(cum_neg, rng.random(cfg.negatives))
                negs = negs[negs != ctx]
                inputs = h[np.newaxis, :]
                loss, *_ = pair_loss_and_grads(
                    inputs, model.output_vectors[ctx].astype(np.float64),
                    model.output_vectors[negs].astype(np.float64),
                )
                loss_sum += loss
                n_pairs += 1
    return loss_sum / max(n_pairs, 1)


def train_embeddings(
    corpus: Iterable[TokenizedLike], config: EmbeddingConfig | None = None
) -> EmbeddingModel:
    """Train subword skip-gram embeddings with negative sampling.

    ``corpus`` yields token sequences (lists of strings or objects with a
    ``tokens`` attribute). Tokens below ``min_count`` are pruned from the
    vocabulary and the training stream but remain embeddable through their
    subwords. Single-worker runs are bit-reproducible for a fixed seed.
    """
    cfg = config or EmbeddingConfig()
    sentences_raw: list[list[str]] = []
    for doc in corpus:
        tokens = list(getattr(doc, "tokens", doc))
        if tokens:
            sentences_raw.append(tokens)

    counts = Counter(tok for sent in sentences_raw for tok in sent)
    kept = sorted(
        (t for t, c in counts.items() if c >= cfg.min_count),
        key=lambda t: (-counts[t], t),
    )
    if not kept:
        raise ValueError("corpus below min_count threshold")
    vocab = {t: i for i, t in enumerate(kept)}

    encoded = []
    for sent in sentences_raw:
        ids = [vocab[t] for t in sent if t in vocab]
        if ids:
            encoded.append(ids)

    rng = np.random.default_rng(cfg.seed)
    bound = np.float32(0.5 / cfg.dim)
    # draw directly in float32: the default 2M-bucket matrix is large
    vocab_vecs = (rng.random((len(vocab), cfg.dim), dtype=np.float32) - np.float32(0.5)) * (2 * bound)
    bucket_vecs = (rng.random((cfg.bucket_count, cfg.dim), dtype=np.float32) - np.float32(0.5)) * (2 * bound)
    out_vecs = np.zeros((len(vocab), cfg.dim), dtype=np.float32)

    model = EmbeddingModel(
        vocab=vocab,
        vocab_vectors=vocab_vecs,
        bucket_vectors=bucket_vecs,
        config=cfg,
        output_vectors=out_vecs,
    )

    freq = np.array([counts[t] for t in kept], dtype=np.float64)
    noise = freq**0.75
    cum_neg = np.cumsum(noise / noise.sum())
    cum_neg[-1] = 1.0

    holdout: list[list[int]] = []
    if cfg.holdout_fraction > 0 and len(encoded) > 1:
        n_hold = max(1, int(len(encoded) * cfg.holdout_fraction))
        hold_idx = set(rng.choice(len(encoded), size=n_hold, replace=False).tolist())
        holdout = [encoded[i] for i in sorted(hold_idx)]
        encoded = [s for i, s in enumerate(encoded) if i not in hold_idx]

    total_tokens = sum(len(s) for s in encoded) * cfg.epochs
    state = _TrainState(total_tokens, cfg.learning_rate)

    if holdout:
        before = _holdout_loss(model, holdout, cum_neg, kept, cfg.seed ^ 0x5EED)

    for epoch in range(cfg.epochs):
        if cfg.workers <= 1:
            loss_sum, n_pairs = _train_sentences(model, encoded, kept, cum_neg, state, rng)
        else:
            shards = [encoded[w :: cfg.workers] for w in range(cfg.workers)]
            results: list[tuple[float, int]] = [(0.0, 0)] * cfg.workers
            threads = []
            for w, shard in enumerate(shards):
                wrng = np.random.default_rng([cfg.seed, epoch, w])

                def run(w=w, shard=shard, wrng=wrng):
                    results[w] = _train_sentences(model, shard, kept, cum_neg, state, wrng)

                threads.append(threading.Thread(target=run))
            for th in threads:
                th.start()
            for th in threads:
                th.join()
            loss_sum = sum(r[0] for r in results)
            n_pairs = sum(r[1] for r in results)
        model.epoch_losses.append(loss_sum / max(n_pairs, 1))

    if holdout:
        after = _holdout_loss(model, holdout, cum_neg, kept, cfg.seed ^ 0x5EED)
        model.holdout_losses = (before, after)
    return model


# typing helper: anything with .tokens or a plain token sequence
TokenizedLike = Sequence


def word_vector(model: EmbeddingModel, token: str) -> np.ndarray:
    """Token vector plus subword vectors; subwords alone when out-of-vocab."""
    if not token:
        raise ValueError("empty token")
    row, brows, bmult = model.components(token)
    vec = np.zeros(model.dim, dtype=np.float64)
    if row is not None:
        vec += model.vocab_vectors[row]
    if len(brows):
        vec += bmult @ model.bucket_vectors[brows]
    return vec


def doc_embedding(model: EmbeddingModel, tokens: Sequence[str], comment_id: str = "") -> DocEmbedding:
    """Mean of unit-normalized token vectors; zero-norm tokens are skipped."""
    acc = np.zeros(model.dim, dtype=np.float64)
    n = 0
    for tok in tokens:
        if not tok:
            continue
        vec = word_vector(model, tok)
        norm = np.linalg.norm(vec)
        if norm == 0.0 or not np.isfinite(norm):
            continue
        acc += vec / norm
        n += 1
    if n == 0:
        return DocEmbedding(comment_id, np.zeros(model.dim, dtype=np.float64), True)
    return DocEmbedding(comment_id, acc / n, False)


def save_model(model: EmbeddingModel, path: str | Path) -> None:
    """Binary format: magic, version, JSON header, then raw float32 matrices."""
    header = {
        "config": asdict(model.config),
        "vocab": list(model.vocab),  # index order
        "dtype": "float32",
        "epoch_losses": [float(x) for x in model.epoch_losses],
    }
    blob = json.dumps(header, ensure_ascii=False, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<IQ", _FORMAT_VERSION, len(blob)))
        fh.write(blob)
        fh.write(np.ascontiguousarray(model.vocab_vectors, dtype=np.float32).tobytes())
        fh.write(np.ascontiguousarray(model.bucket_vectors, dtype=np.float32).tobytes())


def load_model(path: str | Path) -> EmbeddingModel:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _MAGIC:
            raise ValueError(f"{path}: not an embedding model file")
        version, hlen = struct.unpack("<IQ", fh.read(12))
        if version != _FORMAT_VERSION:
            raise ValueError(f"{path}: unsupported model version {version}")
        header = json.loads(fh.read(hlen).decode("utf-8"))
        cfg = EmbeddingConfig(**header["config"])
        vocab = {t: i for i, t in enumerate(header["vocab"])}
        nv = len(vocab) * cfg.dim * 4
        vocab_vecs = np.frombuffer(fh.read(nv), dtype=np.float32).reshape(len(vocab), cfg.dim).copy()
        nb = cfg.bucket_count * cfg.dim * 4
        bucket_vecs = (
            np.frombuffer(fh.read(nb), dtype=np.float32).reshape(cfg.bucket_count, cfg.dim).copy()
        )
    model = EmbeddingModel(vocab=vocab, vocab_vectors=vocab_vecs, bucket_vectors=bucket_vecs, config=cfg)
    model.epoch_losses = list(header.get("epoch_losses", []))
    return model


def export_text(model: EmbeddingModel, path: str | Path) -> None:
    """Plain-text interop dump: 'token v1 v2 ...' with a 'count dim' header."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(model.vocab)} {model.dim}\n")
        for token in model.vocab:
            vec = word_vector(model, token)
            fh.write(token + " " + " ".join(f"{x:.6f}" for x in vec) + "\n")
