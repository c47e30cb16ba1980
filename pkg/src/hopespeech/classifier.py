"""Hope-speech detection.

Features are token n-grams (lengths 1..3) over a frozen training-time
vocabulary, the comment's lexicon intent score, and its document
embedding. The model is L2-regularized logistic regression fit by
full-batch gradient descent with backtracking line search. Evaluation
repeats stratified 80/10/10 splits; dataset construction uses
uncertainty sampling stratified over four weekly sub-corpora.
"""

from __future__ import annotations

import json
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.special import expit
from scipy.stats import rankdata

from .corpus import parse_timestamp
from .embedding import EmbeddingModel, doc_embedding
from .intent import PhraseLexicon, score_comment

logger = logging.getLogger(__name__)

__all__ = [
    "HOPE",
    "NOT_HOPE",
    "INDETERMINATE",
    "LabeledExample",
    "FeatureVector",
    "HopeClassifier",
    "EvalSummary",
    "extract_ngrams",
    "build_feature_vocab",
    "featurize",
    "feature_matrix",
    "logistic_objective",
    "logistic_gradient",
    "fit_logistic",
    "train",
    "evaluate_repeated",
    "auc_score",
    "select_threshold",
    "uncertainty_sample",
    "certainty_spot_checks",
    "wild_run",
    "wild_precision",
    "cohen_kappa",
    "week_bucket",
    "read_labeled_jsonl",
    "save_classifier",
    "load_classifier",
]

HOPE = "hope"
NOT_HOPE = "not_hope"
INDETERMINATE = "indeterminate"

NGRAM_MAX = 3
DEFAULT_LAMBDA_GRID = (0.01, 0.1, 1.0, 10.0)


@dataclass
class LabeledExample:
    comment_id: str
    text: str
    tokens: tuple[str, ...]
    label: str  # hope | not_hope | indeterminate (consensus)
    week_bucket: int = 1
    annotator_labels: dict[str, str] = field(default_factory=dict)


@dataclass
class FeatureVector:
    ngram_features: dict  # feature id -> count (str keys until a vocab is frozen)
    intent_score: int
    embedding: np.ndarray


@dataclass
class HopeClassifier:
    weights: np.ndarray  # |vocab| + 1 (intent) + dim (embedding)
    bias: float
    regularization: float
    feature_vocab: dict[str, int]
    embedding_dim: int
    threshold: float = 0.5
    embedding_model_ref: str = ""

    def decision_scores(self, X: sp.spmatrix | np.ndarray) -> np.ndarray:
        return np.asarray(X @ self.weights).ravel() + self.bias

    def predict_proba(self, X) -> np.ndarray:
        return expit(self.decision_scores(X))


@dataclass
class EvalSummary:
    precision: tuple[float, float]  # (mean, sample std)
    recall: tuple[float, float]
    f1: tuple[float, float]
    auc: tuple[float, float]
    runs: int
    per_run: dict[str, list[float]] = field(default_factory=dict, repr=False)

    def format(self) -> str:
        def fmt(name, pair):
            return f"{name}: {pair[0] * 100:.2f} +/- {pair[1] * 100:.2f}%"

        return "  ".join(
            [fmt("P", self.precision), fmt("R", self.recall), fmt("F1", self.f1),
             f"AUC: {self.auc[0] * 100:.2f} +/- {self.auc[1] * 100:.2f}", f"runs: {self.runs}"]
        )


def extract_ngrams(tokens: Sequence[str], max_n: int = NGRAM_MAX) -> Counter:
    """Counts of space-joined token n-grams, n = 1..max_n."""
    counts: Counter[str] = Counter()
    for n in range(1, max_n + 1):
        for i in range(len(tokens) - n + 1):
            counts[" ".join(tokens[i : i + n])] += 1
    return counts


def build_feature_vocab(docs_ngrams: Iterable[Counter], min_df: int = 2) -> dict[str, int]:
    """Frozen n-gram -> column map; n-grams under the document frequency cut
    are dropped. Ids are assigned in sorted n-gram order for reproducibility."""
    df: Counter[str] = Counter()
    for counts in docs_ngrams:
        df.update(counts.keys())
    kept = sorted(g for g, d in df.items() if d >= min_df)
    return {g: i for i, g in enumerate(kept)}


def featurize(
    tokens: Sequence[str],
    lexicon: PhraseLexicon,
    embedding_model: EmbeddingModel,
    feature_vocab: Mapping[str, int] | None = None,
) -> FeatureVector:
    """n-gram counts + intent score + document embedding for one comment.

    With a frozen vocabulary, unseen n-grams are dropped and keys are column
    ids; without one (training pass, before the vocabulary is built) the raw
    string-keyed counts are returned.
    """
    ngrams = extract_ngrams(tokens)
    if feature_vocab is not None:
        ngrams = {feature_vocab[g]: c for g, c in ngrams.items() if g in feature_vocab}
    else:
        ngrams = dict(ngrams)
    intent = score_comment(tokens, lexicon).score
    emb = doc_embedding(embedding_model, tokens).vector
    return FeatureVector(ngram_features=ngrams, intent_score=intent, embedding=emb)


def feature_matrix(
    fvs: Sequence[FeatureVector],
    vocab_size: int,
    use_ngrams: bool = True,
    use_intent: bool = True,
    use_embedding: bool = True,
) -> sp.csr_matrix:
    """Rows [ngram columns | intent | embedding dims]; the layout is fixed,
    disabled feature groups are zeroed so ablations share one weight shape."""
    if not fvs:
        raise ValueError("no feature vectors")
    dim = len(fvs[0].embedding)
    n_cols = vocab_size + 1 + dim
    rows, cols, vals = [], [], []
    for i, fv in enumerate(fvs):
        if use_ngrams:
            for j, c in fv.ngram_features.items():
                rows.append(i)
                cols.append(int(j))
                vals.append(float(c))
        if use_intent and fv.intent_score != 0:
            rows.append(i)
            cols.append(vocab_size)
            vals.append(float(fv.intent_score))
        if use_embedding:
            for d, x in enumerate(fv.embedding):
                if x != 0.0:
                    rows.append(i)
                    cols.append(vocab_size + 1 + d)
                    vals.append(float(x))
    return sp.csr_matrix((vals, (rows, cols)), shape=(len(fvs), n_cols))


def logistic_objective(X, y: np.ndarray, w: np.ndarray, b: float, lam: float) -> float:
    """Mean logistic loss + lam/2 * ||w||^2 (bias unregularized)."""
    z = np.asarray(X @ w).ravel() + b
    s = np.where(y > 0.5, z, -z)  # y in {0,1}
    return float(np.logaddexp(0.0, -s).mean() + 0.5 * lam * (w @ w))


def logistic_gradient(X, y: np.ndarray, w: np.ndarray, b: float, lam: float):
    z = np.asarray(X @ w).ravel() + b
    r = expit(z) - y
    gw = np.asarray(X.T @ r).ravel() / len(y) + lam * w
    gb = float(r.mean())
    return gw, gb


def fit_logistic(
    X,
    y: np.ndarray,
    lam: float = 1.0,
    max_iter: int = 500,
    tol: float = 1e-5,
) -> tuple[np.ndarray, float, list[float]]:
    """Full-batch gradient descent with backtracking line search.

    Deterministic (zero init). Stops when the gradient norm (weights and
    bias jointly) falls below ``tol`` or after ``max_iter`` accepted steps.
    Returns (weights, bias, objective history); the history is
    non-increasing by construction.
    """
    y = np.asarray(y, dtype=np.float64)
    if len(np.unique(y)) < 2:
        raise ValueError("degenerate labels: single-class training set")
    w = np.zeros(X.shape[1])
    b = 0.0
    obj = logistic_objective(X, y, w, b, lam)
    history = [obj]
    step = 1.0
    for _ in range(max_iter):
        gw, gb = logistic_gradient(X, y, w, b, lam)
        gnorm2 = float(gw @ gw) + gb * gb
        if np.sqrt(gnorm2) < tol:
            break
        step = min(step * 2.0, 1e4)  # warm-started backtracking
        while True:
            w_new = w - step * gw
            b_new = b - step * gb
            obj_new = logistic_objective(X, y, w_new, b_new, lam)
            if obj_new <= obj - 1e-4 * step * gnorm2 or step < 1e-12:
                break
            step *= 0.5
        if obj_new > obj:  # line search bottomed out
            break
        w, b, obj = w_new, b_new, obj_new
        history.append(obj)
    return w, b, history


def _labels01(examples: Sequence[LabeledExample]) -> np.ndarray:
    bad = [e.label for e in examples if e.label not in (HOPE, NOT_HOPE)]
    if bad:
        raise ValueError(f"unresolved labels in training data: {sorted(set(bad))}")
    return np.array([1.0 if e.label == HOPE else 0.0 for e in examples])


def train(
    examples: Sequence[LabeledExample],
    lexicon: PhraseLexicon,
    embedding_model: EmbeddingModel,
    lam: float = 1.0,
    min_df: int = 2,
    max_iter: int = 500,
    tol: float = 1e-5,
    threshold: float = 0.5,
    embedding_model_ref: str = "",
) -> HopeClassifier:
    """Fit the classifier on consensus-labeled examples.

    Indeterminate examples are excluded. The n-gram vocabulary is frozen
    from this training set.
    """
    usable = [e for e in examples if e.label != INDETERMINATE]
    y = _labels01(usable)
    ngram_docs = [extract_ngrams(e.tokens) for e in usable]
    vocab = build_feature_vocab(ngram_docs, min_df=min_df)
    fvs = [featurize(e.tokens, lexicon, embedding_model, vocab) for e in usable]
    X = feature_matrix(fvs, len(vocab))
    w, b, _ = fit_logistic(X, y, lam=lam, max_iter=max_iter, tol=tol)
    return HopeClassifier(
        weights=w,
        bias=b,
        regularization=lam,
        feature_vocab=vocab,
        embedding_dim=embedding_model.dim,
        threshold=threshold,
        embedding_model_ref=embedding_model_ref,
    )


def _prf(y_true: np.ndarray, y_pred: np.ndarray) -> tuple[float, float, float]:
    tp = float(((y_pred == 1) & (y_true == 1)).sum())
    fp = float(((y_pred == 1) & (y_true == 0)).sum())
    fn = float(((y_pred == 0) & (y_true == 1)).sum())
    p = tp / (tp + fp) if tp + fp else 0.0
    r = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f1


def auc_score(y_true: np.ndarray, scores: np.ndarray) -> float:
    """Rank-statistic AUC; tied scores receive half credit."""
    y_true = np.asarray(y_true)
    n_pos = int((y_true == 1).sum())
    n_neg = int((y_true == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs both classes")
    ranks = rankdata(scores)  # average ranks on ties
    r_pos = float(ranks[y_true == 1].sum())
    return (r_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def select_threshold(y_true: np.ndarray, probs: np.ndarray) -> float:
    """F1-maximizing probability cut on validation data; 0.5 when nothing
    scores above zero F1.

    Candidate cuts are the midpoints between consecutive distinct
    probabilities (plus the all-positive cut), so the chosen threshold sits
    mid-margin instead of exactly on a validation score. Ties prefer the
    lower threshold.
    """
    uniq = sorted(set(float(p) for p in probs))
    candidates = [uniq[0]] + [(a + b) / 2 for a, b in zip(uniq, uniq[1:])]
    best_t, best_f1 = 0.5, 0.0
    for t in candidates:
        _, _, f1 = _prf(y_true, (probs >= t).astype(int))
        if f1 > best_f1:
            best_t, best_f1 = t, f1
    return best_t if best_f1 > 0 else 0.5


def _stratified_split(
    n_by_class: Mapping[str, list[int]],
    splits: tuple[float, float, float],
    rng: np.random.Generator,
) -> tuple[list[int], list[int], list[int]]:
    train_idx: list[int] = []
    val_idx: list[int] = []
    test_idx: list[int] = []
    for label in sorted(n_by_class):
        idx = np.array(n_by_class[label])
        rng.shuffle(idx)
        n = len(idx)
        n_tr = int(np.floor(splits[0] * n))
        n_va = int(np.floor(splits[1] * n))
        n_te = n - n_tr - n_va
        if min(n_tr, n_va, n_te) < 1:
            raise ValueError(f"class too small for stratified split: {label!r} has {n} examples")
        train_idx.extend(idx[:n_tr].tolist())
        val_idx.extend(idx[n_tr : n_tr + n_va].tolist())
        test_idx.extend(idx[n_tr + n_va :].tolist())
    return sorted(train_idx), sorted(val_idx), sorted(test_idx)


def evaluate_repeated(
    examples: Sequence[LabeledExample],
    lexicon: PhraseLexicon,
    embedding_model: EmbeddingModel,
    runs: int = 100,
    seed: int = 0,
    splits: tuple[float, float, float] = (0.8, 0.1, 0.1),
    lambda_grid: Sequence[float] = DEFAULT_LAMBDA_GRID,
    min_df: int = 2,
    max_iter: int = 300,
    use_ngrams: bool = True,
    use_intent: bool = True,
    use_embedding: bool = True,
) -> EvalSummary:
    """Repeated random stratified 80/10/10 evaluation.

    Each run trains on the 80% split for every lambda in the grid, picks
    lambda and the decision threshold on the 10% validation split by F1,
    and reports precision/recall/F1 (at that threshold) plus threshold-free
    AUC on the untouched 10% test split. Feature-group switches support
    ablations. Results are mean +/- sample std over runs.
    """
    usable = [e for e in examples if e.label != INDETERMINATE]
    y_all = _labels01(usable)
    by_class: dict[str, list[int]] = defaultdict(list)
    for i, e in enumerate(usable):
        by_class[e.label].append(i)

    # Featurize once; only the n-gram vocabulary is split-dependent.
    ngram_docs = [extract_ngrams(e.tokens) for e in usable]
    intents = [score_comment(e.tokens, lexicon).score for e in usable]
    embeds = [doc_embedding(embedding_model, e.tokens).vector for e in usable]

    metrics: dict[str, list[float]] = {"precision": [], "recall": [], "f1": [], "auc": []}
    for run in range(runs):
        rng = np.random.default_rng([seed, run])
        tr, va, te = _stratified_split(by_class, splits, rng)
        vocab = build_feature_vocab((ngram_docs[i] for i in tr), min_df=min_df)

        def matrix(idxs):
            fvs = [
                FeatureVector(
                    {vocab[g]: c for g, c in ngram_docs[i].items() if g in vocab},
                    intents[i],
                    embeds[i],
                )
                for i in idxs
            ]
            return feature_matrix(
                fvs, len(vocab),
                use_ngrams=use_ngrams, use_intent=use_intent, use_embedding=use_embedding,
            )

        X_tr, X_va, X_te = matrix(tr), matrix(va), matrix(te)
        y_tr, y_va, y_te = y_all[tr], y_all[va], y_all[te]

        best = None  # (val_f1, -lam, w, b, threshold)
        for lam in lambda_grid:
            w, b, _ = fit_logistic(X_tr, y_tr, lam=lam, max_iter=max_iter)
            val_probs = expit(np.asarray(X_va @ w).ravel() + b)
            t = select_threshold(y_va, val_probs)
            _, _, val_f1 = _prf(y_va, (val_probs >= t).astype(int))
            cand = (val_f1, -lam, w, b, t)
            if best is None or cand[:2] > best[:2]:
                best = cand
        _, _, w, b, t = best
        test_probs = expit(np.asarray(X_te @ w).ravel() + b)
        p, r, f1 = _prf(y_te, (test_probs >= t).astype(int))
        metrics["precision"].append(p)
        metrics["recall"].append(r)
        metrics["f1"].append(f1)
        metrics["auc"].append(auc_score(y_te, test_probs))

    def summarize(xs: list[float]) -> tuple[float, float]:
        arr = np.array(xs)
        std = float(arr.std(ddof=1)) if len(arr) > 1 else 0.0
        return float(arr.mean()), std

    return EvalSummary(
        precision=summarize(metrics["precision"]),
        recall=summarize(metrics["recall"]),
        f1=summarize(metrics["f1"]),
        auc=summarize(metrics["auc"]),
        runs=runs,
        per_run=metrics,
    )


@dataclass(frozen=True)
class PoolItem:
    comment_id: str
    week_bucket: int
    features: FeatureVector


def uncertainty_sample(
    classifier: HopeClassifier,
    pool: Sequence[PoolItem],
    batch_size: int,
    labeled_ids: Iterable[str] = (),
) -> list[PoolItem]:
    """Pick the items whose predicted probability is nearest 0.5.

    Selection is stratified across week buckets: quotas are filled
    round-robin in bucket order, so remainders spread evenly and shortfalls
    in one bucket flow to the others. Already-labeled ids are excluded.
    """
    exclude = set(labeled_ids)
    candidates = [item for item in pool if item.comment_id not in exclude]
    if not candidates:
        raise ValueError("empty pool: nothing left to sample")
    X = feature_matrix([c.features for c in candidates], len(classifier.feature_vocab))
    probs = classifier.predict_proba(X)

    queues: dict[int, list[PoolItem]] = defaultdict(list)
    order = {}
    for item, p in zip(candidates, probs):
        queues[item.week_bucket].append(item)
        order[item.comment_id] = (abs(float(p) - 0.5), item.comment_id)
    for bucket in queues.values():
        bucket.sort(key=lambda it: order[it.comment_id])

    buckets = sorted(queues)
    picked: list[PoolItem] = []
    cursors = {b: 0 for b in buckets}
    while len(picked) < batch_size:
        progressed = False
        for b in buckets:
            if len(picked) >= batch_size:
                break
            if cursors[b] < len(queues[b]):
                picked.append(queues[b][cursors[b]])
                cursors[b] += 1
                progressed = True
        if not progressed:
            break  # pool exhausted
    return picked


def certainty_spot_checks(
    classifier: HopeClassifier,
    pool: Sequence[PoolItem],
    n: int,
    labeled_ids: Iterable[str] = (),
    hi: float = 0.95,
    lo: float = 0.05,
) -> list[PoolItem]:
    """Most-confident predictions (p > hi and p < lo), for auditing rounds."""
    exclude = set(labeled_ids)
    candidates = [item for item in pool if item.comment_id not in exclude]
    if not candidates or n <= 0:
        return []
    X = feature_matrix([c.features for c in candidates], len(classifier.feature_vocab))
    scored = list(zip(candidates, classifier.predict_proba(X)))
    high = sorted(
        ((it, p) for it, p in scored if p > hi), key=lambda x: (-x[1], x[0].comment_id)
    )
    low = sorted(((it, p) for it, p in scored if p < lo), key=lambda x: (x[1], x[0].comment_id))
    n_high = n // 2
    return [it for it, _ in high[:n_high]] + [it for it, _ in low[: n - n_high]]


def week_bucket(timestamp: datetime | str, corpus_start: datetime | str, n_buckets: int = 4) -> int:
    """1-based weekly sub-corpus index, clamped to ``n_buckets``."""
    ts = parse_timestamp(timestamp) if isinstance(timestamp, str) else timestamp
    start = parse_timestamp(corpus_start) if isinstance(corpus_start, str) else corpus_start
    weeks = int((ts - start) // timedelta(days=7))
    return min(max(weeks + 1, 1), n_buckets)


@dataclass
class WildPrediction:
    comment_id: str
    probability: float
    day: str


@dataclass
class WildRunResult:
    sampled_ids: dict[str, list[str]]  # day -> sampled comment ids
    positives: list[WildPrediction]


def wild_run(
    classifier: HopeClassifier,
    comments: Sequence,
    featurizer: Callable[[Sequence[str]], FeatureVector],
    per_day_quota: int = 1000,
    seed: int = 0,
) -> WildRunResult:
    """Score a seeded per-day sample of unlabeled comments.

    Days with fewer comments than the quota contribute everything (with a
    warning). Comments scoring at or above the classifier threshold come
    back as predicted positives for human verification.
    """
    from .corpus import tokenize  # local import to avoid cycle at module load

    by_day: dict[str, list] = defaultdict(list)
    for c in comments:
        by_day[c.timestamp.date().isoformat()].append(c)

    rng = np.random.default_rng(seed)
    sampled_ids: dict[str, list[str]] = {}
    positives: list[WildPrediction] = []
    for day in sorted(by_day):
        bucket = by_day[day]
        if len(bucket) <= per_day_quota:
            if len(bucket) < per_day_quota:
                logger.warning("day %s has %d < quota %d comments; taking all", day, len(bucket), per_day_quota)
            chosen = list(range(len(bucket)))
        else:
            chosen = sorted(rng.choice(len(bucket), size=per_day_quota, replace=False).tolist())
        picked = [bucket[i] for i in chosen]
        sampled_ids[day] = [c.id for c in picked]
        fvs = [featurizer(tokenize(c.text)) for c in picked]
        X = feature_matrix(fvs, len(classifier.feature_vocab))
        probs = classifier.predict_proba(X)
        for c, p in zip(picked, probs):
            if p >= classifier.threshold:
                positives.append(WildPrediction(c.id, float(p), day))
    return WildRunResult(sampled_ids=sampled_ids, positives=positives)


def wild_precision(
    positives: Sequence[WildPrediction],
    verdicts: Mapping[str, bool],
    criteria_tags: Mapping[str, Sequence[str]] | None = None,
) -> tuple[float | None, Counter]:
    """Verified precision and the per-criterion breakdown of true positives.

    Returns (precision, breakdown); precision is None ("n/a") when the
    classifier emitted no positives.
    """
    if not positives:
        return None, Counter()
    missing = [p.comment_id for p in positives if p.comment_id not in verdicts]
    if missing:
        raise ValueError(f"unverified positives: {missing[:5]}")
    confirmed = [p for p in positives if verdicts[p.comment_id]]
    breakdown: Counter[str] = Counter()
    if criteria_tags:
        for p in confirmed:
            breakdown.update(criteria_tags.get(p.comment_id, ()))
    return len(confirmed) / len(positives), breakdown


def cohen_kappa(labels_a: Sequence, labels_b: Sequence) -> float:
    """Chance-corrected agreement between two annotators.

    kappa = (p_o - p_e) / (1 - p_e) with p_e from the marginal label
    distributions; defined as 1.0 when both annotators are constant and
    identical (p_e = 1).
    """
    if len(labels_a) != len(labels_b):
        raise ValueError(f"length mismatch: {len(labels_a)} vs {len(labels_b)}")
    if not labels_a:
        raise ValueError("empty label sequences")
    n = len(labels_a)
    p_o = sum(a == b for a, b in zip(labels_a, labels_b)) / n
    counts_a = Counter(labels_a)
    counts_b = Counter(labels_b)
    p_e = sum(counts_a[l] * counts_b.get(l, 0) for l in counts_a) / (n * n)
    if p_e >= 1.0:
        return 1.0
    return (p_o - p_e) / (1.0 - p_e)


def read_labeled_jsonl(path: str | Path) -> list[LabeledExample]:
    """JSONL: {comment_id, text, label, week_bucket, annotator_labels}."""
    from .corpus import tokenize

    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            label = obj["label"]
            if label not in (HOPE, NOT_HOPE, INDETERMINATE):
                raise ValueError(f"{path}:{lineno}: bad label {label!r}")
            out.append(
                LabeledExample(
                    comment_id=str(obj["comment_id"]),
                    text=obj["text"],
                    tokens=tuple(tokenize(obj["text"])),
                    label=label,
                    week_bucket=int(obj.get("week_bucket", 1)),
                    annotator_labels=dict(obj.get("annotator_labels", {})),
                )
            )
    return out


def save_classifier(clf: HopeClassifier, path: str | Path) -> None:
    obj = {
        "lambda": clf.regularization,
        "threshold": clf.threshold,
        "bias": clf.bias,
        "feature_vocab": clf.feature_vocab,
        "embedding_dim": clf.embedding_dim,
        "weights": [float(x) for x in clf.weights],
        "embedding_model_ref": clf.embedding_model_ref,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, ensure_ascii=False, sort_keys=True)
        fh.write("\n")


def load_classifier(path: str | Path) -> HopeClassifier:
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    return HopeClassifier(
        weights=np.asarray(obj["weights"], dtype=np.float64),
        bias=float(obj["bias"]),
        regularization=float(obj["lambda"]),
        feature_vocab={str(k): int(v) for k, v in obj["feature_vocab"].items()},
        embedding_dim=int(obj["embedding_dim"]),
        threshold=float(obj["threshold"]),
        embedding_model_ref=obj.get("embedding_model_ref", ""),
    )
