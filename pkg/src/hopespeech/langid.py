"""Language identification over document embeddings.

Polyglot document embeddings separate into per-language clusters; k-means
recovers them, a 10-comment audit sample per cluster collects one human
language label each, and new documents take the label of the nearest
centroid. Also holds the evaluation report and the fairness-restriction
wrapper for external ranked predictors.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.spatial.distance import cdist

__all__ = [
    "LanguageTag",
    "ClusterModel",
    "EvalReport",
    "select_k",
    "kmeans",
    "silhouette_mean",
    "label_clusters",
    "draw_audit_samples",
    "classify",
    "classify_batch",
    "evaluate",
    "fair_restrict",
    "save_cluster_model",
    "load_cluster_model",
    "load_label_file",
    "read_ranked_predictions",
]

UNKNOWN = "unknown"

_SIL_SUBSAMPLE = 2000
_KMEANS_TOL = 1e-4
_KMEANS_MAX_ITER = 300


@dataclass(frozen=True)
class LanguageTag:
    language: str
    script_variant: str = "native"  # "native" | "romanized"

    def __post_init__(self):
        if self.script_variant not in ("native", "romanized"):
            raise ValueError(f"bad script_variant {self.script_variant!r}")

    def render(self) -> str:
        """Romanized variants are reported with an "(E)" suffix."""
        return f"{self.language} (E)" if self.script_variant == "romanized" else self.language


@dataclass
class ClusterModel:
    k: int
    centroids: np.ndarray  # (k, dim)
    labels: list[LanguageTag | None]
    inertia: float
    seed: int
    audit_samples: list[list[dict]] | None = None  # per cluster: sampled comments
    dominance_counts: list[int | None] | None = None
    inertia_history: list[float] = field(default_factory=list, repr=False)

    @property
    def labeled(self) -> bool:
        return all(tag is not None for tag in self.labels)


def _as_matrix(doc_embeddings) -> np.ndarray:
    if isinstance(doc_embeddings, np.ndarray):
        return np.asarray(doc_embeddings, dtype=np.float64)
    rows = [getattr(d, "vector", d) for d in doc_embeddings]
    return np.asarray(rows, dtype=np.float64)


def _kmeans_pp_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(points)
    centroids = np.empty((k, points.shape[1]))
    centroids[0] = points[rng.integers(n)]
    d2 = ((points - centroids[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total <= 0:  # all remaining mass at chosen centroids
            centroids[j] = points[rng.integers(n)]
            continue
        r = rng.random() * total
        idx = int(np.searchsorted(np.cumsum(d2), r))
        idx = min(idx, n - 1)
        centroids[j] = points[idx]
        d2 = np.minimum(d2, ((points - centroids[j]) ** 2).sum(axis=1))
    return centroids


def kmeans(doc_embeddings, k: int, seed: int = 0) -> ClusterModel:
    """Lloyd's algorithm from k-means++ seeding.

    Stops when the largest centroid shift drops below 1e-4 or after 300
    iterations. An emptied cluster is re-seeded at the point farthest from
    its nearest centroid. Deterministic for a fixed seed.
    """
    points = _as_matrix(doc_embeddings)
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(np.unique(points, axis=0)) < k:
        raise ValueError(f"fewer distinct points than k={k}")
    rng = np.random.default_rng(seed)
    centroids = _kmeans_pp_init(points, k, rng)

    history: list[float] = []
    for _ in range(_KMEANS_MAX_ITER):
        d2 = cdist(points, centroids, "sqeuclidean")
        assign = d2.argmin(axis=1)
        min_d2 = d2[np.arange(len(points)), assign]
        history.append(float(min_d2.sum()))

        new_centroids = centroids.copy()
        for j in range(k):
            mask = assign == j
            if mask.any():
                new_centroids[j] = points[mask].mean(axis=0)
            else:
                far = int(min_d2.argmax())
                new_centroids[j] = points[far]
                min_d2 = min_d2.copy()
                min_d2[far] = 0.0
        shift = float(np.sqrt(((new_centroids - centroids) ** 2).sum(axis=1)).max())
        centroids = new_centroids
        if shift < _KMEANS_TOL:
            break

    d2 = cdist(points, centroids, "sqeuclidean")
    inertia = float(d2[np.arange(len(points)), d2.argmin(axis=1)].sum())
    return ClusterModel(
        k=k,
        centroids=centroids,
        labels=[None] * k,
        inertia=inertia,
        seed=seed,
        inertia_history=history,
    )


def silhouette_mean(points: np.ndarray, assign: np.ndarray) -> float:
    """Mean silhouette coefficient; singleton clusters score 0."""
    dist = cdist(points, points)
    clusters = np.unique(assign)
    if len(clusters) < 2:
        raise ValueError("silhouette needs at least 2 clusters")
    scores = np.zeros(len(points))
    masks = {c: assign == c for c in clusters}
    for i in range(len(points)):
        own = masks[assign[i]]
        n_own = own.sum()
        if n_own <= 1:
            scores[i] = 0.0
            continue
        a = dist[i, own].sum() / (n_own - 1)
        b = min(dist[i, masks[c]].mean() for c in clusters if c != assign[i])
        denom = max(a, b)
        scores[i] = 0.0 if denom == 0 else (b - a) / denom
    return float(scores.mean())


def select_k(doc_embeddings, k_range: Sequence[int] = range(2, 13), seed: int = 0) -> int:
    """Pick k maximizing the mean silhouette coefficient over the sample.

    Silhouettes are computed on an independent seeded subsample of at most
    2,000 points to bound the O(n^2) distance matrix. Ties go to the
    smallest k.
    """
    points = _as_matrix(doc_embeddings)
    ks = sorted(set(int(k) for k in k_range))
    if not ks or ks[0] < 2:
        raise ValueError("k_range must start at 2 or above")
    if len(points) < max(ks) + 1:
        raise ValueError(f"sample too small: need at least {max(ks) + 1} points")
    if len(np.unique(points, axis=0)) == 1:
        raise ValueError("degenerate sample: all points identical")

    sil_rng = np.random.default_rng([seed, 0x51])
    if len(points) > _SIL_SUBSAMPLE:
        idx = sil_rng.choice(len(points), size=_SIL_SUBSAMPLE, replace=False)
        sample = points[np.sort(idx)]
    else:
        sample = points

    best_k, best_score = None, -np.inf
    for k in ks:
        try:
            model = kmeans(points, k, seed)
        except ValueError:
            continue  # fewer distinct points than this k
        assign = cdist(sample, model.centroids, "sqeuclidean").argmin(axis=1)
        if len(np.unique(assign)) < 2:
            continue
        score = silhouette_mean(sample, assign)
        if score > best_score:
            best_k, best_score = k, score
    if best_k is None:
        raise ValueError("degenerate sample: no k in range is clusterable")
    return best_k


def draw_audit_samples(
    model: ClusterModel,
    doc_embeddings,
    comments: Sequence,
    sample_size: int = 10,
    seed: int = 0,
) -> list[list[dict]]:
    """Seeded uniform sample of up to ``sample_size`` comments per cluster.

    ``comments`` aligns with ``doc_embeddings``; entries may be Comment
    objects, (id, text) pairs, or plain strings. The sample is what an
    annotator reads to assign the cluster's dominant language.
    """
    points = _as_matrix(doc_embeddings)
    if len(points) != len(comments):
        raise ValueError("doc_embeddings and comments must align")
    assign = cdist(points, model.centroids, "sqeuclidean").argmin(axis=1)
    rng = np.random.default_rng([seed, 0xA1])
    samples: list[list[dict]] = []
    for j in range(model.k):
        members = np.flatnonzero(assign == j)
        take = min(sample_size, len(members))
        chosen = rng.choice(members, size=take, replace=False) if take else np.empty(0, int)
        bucket = []
        for i in sorted(int(x) for x in chosen):
            c = comments[i]
            if hasattr(c, "id"):
                bucket.append({"comment_id": c.id, "text": c.text})
            elif isinstance(c, (tuple, list)):
                bucket.append({"comment_id": str(c[0]), "text": str(c[1])})
            else:
                bucket.append({"comment_id": str(i), "text": str(c)})
        samples.append(bucket)
    return samples


def label_clusters(
    model: ClusterModel,
    doc_embeddings,
    comments: Sequence,
    labels: Mapping[int, LanguageTag],
    sample_size: int = 10,
    seed: int = 0,
    dominance_counts: Mapping[int, int] | None = None,
) -> ClusterModel:
    """Attach one human language tag per cluster; samples kept for audit."""
    missing = [j for j in range(model.k) if j not in labels]
    if missing:
        raise ValueError(f"unlabeled cluster: {missing}")
    samples = draw_audit_samples(model, doc_embeddings, comments, sample_size, seed)
    return ClusterModel(
        k=model.k,
        centroids=model.centroids,
        labels=[labels[j] for j in range(model.k)],
        inertia=model.inertia,
        seed=model.seed,
        audit_samples=samples,
        dominance_counts=[
            (dominance_counts or {}).get(j) for j in range(model.k)
        ],
        inertia_history=list(model.inertia_history),
    )


def classify(model: ClusterModel, doc) -> LanguageTag:
    """Label of the Euclidean-nearest centroid; empty docs map to "unknown"."""
    if not model.labeled:
        raise ValueError("unlabeled model")
    if getattr(doc, "empty", False):
        return LanguageTag(UNKNOWN)
    vec = np.asarray(getattr(doc, "vector", doc), dtype=np.float64)
    d2 = ((model.centroids - vec) ** 2).sum(axis=1)
    return model.labels[int(d2.argmin())]


def classify_batch(model: ClusterModel, docs) -> list[LanguageTag]:
    return [classify(model, d) for d in docs]


@dataclass
class LanguageMetrics:
    precision: float
    recall: float
    f1: float
    support_share: float


@dataclass
class EvalReport:
    accuracy: float
    per_language: dict[str, LanguageMetrics]

    def format(self) -> str:
        lines = [f"accuracy: {self.accuracy:.4f}", "language\tP\tR\tF1\tshare"]
        for lang, m in self.per_language.items():
            lines.append(f"{lang}\t{m.precision:.4f}\t{m.recall:.4f}\t{m.f1:.4f}\t{m.support_share:.4f}")
        return "\n".join(lines)


def evaluate(predictions: Sequence, gold: Sequence) -> EvalReport:
    """Micro accuracy plus per-language precision/recall/F1 and support share."""
    if len(predictions) != len(gold):
        raise ValueError(f"length mismatch: {len(predictions)} predictions vs {len(gold)} gold")
    if not gold:
        raise ValueError("empty evaluation set")

    def key(x) -> str:
        return x.render() if isinstance(x, LanguageTag) else str(x)

    preds = [key(p) for p in predictions]
    golds = [key(g) for g in gold]
    correct = sum(p == g for p, g in zip(preds, golds))
    labels = sorted(set(golds) | set(preds))
    per: dict[str, LanguageMetrics] = {}
    for lang in labels:
        tp = sum(1 for p, g in zip(preds, golds) if p == lang and g == lang)
        n_pred = preds.count(lang)
        n_gold = golds.count(lang)
        precision = tp / n_pred if n_pred else 0.0
        recall = tp / n_gold if n_gold else 0.0
        f1 = 2 * precision * recall / (precision + recall) if (precision + recall) else 0.0
        per[lang] = LanguageMetrics(precision, recall, f1, n_gold / len(golds))
    return EvalReport(accuracy=correct / len(golds), per_language=per)


def fair_restrict(
    ranked_predictions: Sequence[tuple[str, float]], corpus_languages: Iterable[str]
) -> str:
    """Highest-confidence prediction restricted to the corpus's languages.

    ``ranked_predictions`` must already be ordered by descending confidence.
    Returns "unknown" when no ranked language occurs in the corpus.
    """
    if not ranked_predictions:
        raise ValueError("empty ranked prediction list")
    allowed = set(corpus_languages)
    for language, _confidence in ranked_predictions:
        if language in allowed:
            return language
    return UNKNOWN


def save_cluster_model(model: ClusterModel, path: str | Path) -> None:
    obj = {
        "k": model.k,
        "seed": model.seed,
        "inertia": model.inertia,
        "centroids": [[float(x) for x in row] for row in model.centroids],
        "labels": [
            None if tag is None else {"language": tag.language, "script_variant": tag.script_variant}
            for tag in model.labels
        ],
        "audit_samples": model.audit_samples,
        "dominance_counts": model.dominance_counts,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, ensure_ascii=False, sort_keys=True, indent=1)
        fh.write("\n")


def load_cluster_model(path: str | Path) -> ClusterModel:
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    labels = [
        None if t is None else LanguageTag(t["language"], t.get("script_variant", "native"))
        for t in obj["labels"]
    ]
    return ClusterModel(
        k=int(obj["k"]),
        centroids=np.asarray(obj["centroids"], dtype=np.float64),
        labels=labels,
        inertia=float(obj["inertia"]),
        seed=int(obj["seed"]),
        audit_samples=obj.get("audit_samples"),
        dominance_counts=obj.get("dominance_counts"),
    )


def load_label_file(path: str | Path) -> dict[int, LanguageTag]:
    """TSV: cluster_index <tab> language [<tab> native|romanized]."""
    labels: dict[int, LanguageTag] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            idx = int(parts[0])
            variant = parts[2].strip() if len(parts) > 2 and parts[2].strip() else "native"
            labels[idx] = LanguageTag(parts[1].strip(), variant)
    return labels


def read_ranked_predictions(path: str | Path) -> list[tuple[str, list[tuple[str, float]]]]:
    """External-predictor adapter: JSONL of {comment_id, ranked:[{language, confidence}]}."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            ranked = [(r["language"], float(r["confidence"])) for r in obj["ranked"]]
            out.append((str(obj.get("comment_id", "")), ranked))
    return out
