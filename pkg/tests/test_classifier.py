import numpy as np
import pytest
import scipy.sparse as sp

from hopespeech.classifier import (
    HOPE,
    NOT_HOPE,
    INDETERMINATE,
    FeatureVector,
    HopeClassifier,
    LabeledExample,
    PoolItem,
    _stratified_split,
    auc_score,
    build_feature_vocab,
    certainty_spot_checks,
    cohen_kappa,
    evaluate_repeated,
    extract_ngrams,
    feature_matrix,
    featurize,
    fit_logistic,
    load_classifier,
    logistic_gradient,
    logistic_objective,
    save_classifier,
    select_threshold,
    train,
    uncertainty_sample,
    week_bucket,
    wild_precision,
    wild_run,
)
from hopespeech.intent import PhraseLexicon

from helpers import make_comment


def logit(p):
    return float(np.log(p / (1 - p)))


def example(cid, text, label, bucket=1):
    from hopespeech.corpus import tokenize

    return LabeledExample(cid, text, tuple(tokenize(text)), label, bucket)


def separable_dataset(n_per_class=120, seed=0):
    """Unigram-separable labeled texts."""
    rng = np.random.default_rng(seed)
    fillers = [f"f{i}" for i in range(20)]
    out = []
    for i in range(n_per_class):
        pad = " ".join(fillers[int(rng.integers(20))] for _ in range(5))
        out.append(example(f"h{i}", f"sunshine {pad}", HOPE, bucket=1 + i % 4))
        out.append(example(f"n{i}", f"thunder {pad}", NOT_HOPE, bucket=1 + i % 4))
    return out


class TestFeaturize:
    def test_ngram_enumeration(self):
        counts = extract_ngrams(["we", "want", "peace"])
        assert counts == {
            "we": 1,
            "want": 1,
            "peace": 1,
            "we want": 1,
            "want peace": 1,
            "we want peace": 1,
        }

    def test_intent_feature(self, lexicon, small_model):
        fv = featurize(["we", "want", "peace"], lexicon, small_model)
        assert fv.intent_score == 1
        assert "we want peace" in fv.ngram_features

    def test_empty_tokens(self, lexicon, small_model):
        fv = featurize([], lexicon, small_model)
        assert fv.ngram_features == {}
        assert fv.intent_score == 0
        assert not fv.embedding.any()

    def test_frozen_vocab_drops_unseen(self, lexicon, small_model):
        vocab = {"peace": 0}
        fv = featurize(["we", "want", "peace"], lexicon, small_model, vocab)
        assert fv.ngram_features == {0: 1}

    def test_vocab_min_df(self):
        docs = [extract_ngrams(["a", "b"]), extract_ngrams(["a", "c"])]
        vocab = build_feature_vocab(docs, min_df=2)
        assert list(vocab) == ["a"]

    def test_matrix_layout(self, small_model):
        fv = FeatureVector({0: 2}, -3, np.array([0.5, 0.0, -0.5]))
        X = feature_matrix([fv], vocab_size=2)
        dense = X.toarray()[0]
        assert dense.tolist() == [2.0, 0.0, -3.0, 0.5, 0.0, -0.5]
        X_no_intent = feature_matrix([fv], 2, use_intent=False).toarray()[0]
        assert X_no_intent[2] == 0.0


class TestLogistic:
    def random_problem(self, rng, n=30, d=8):
        X = sp.csr_matrix(rng.normal(0, 1, (n, d)) * (rng.random((n, d)) > 0.4))
        y = (rng.random(n) > 0.5).astype(float)
        if y.min() == y.max():
            y[0] = 1 - y[0]
        return X, y

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(12)
        eps = 1e-5
        for _ in range(20):
            X, y = self.random_problem(rng)
            lam = float(rng.choice([0.0, 0.1, 1.0]))
            w = rng.normal(0, 1, X.shape[1])
            b = float(rng.normal())
            gw, gb = logistic_gradient(X, y, w, b, lam)
            numeric = np.zeros(len(w) + 1)
            for j in range(len(w)):
                wp, wm = w.copy(), w.copy()
                wp[j] += eps
                wm[j] -= eps
                numeric[j] = (
                    logistic_objective(X, y, wp, b, lam) - logistic_objective(X, y, wm, b, lam)
                ) / (2 * eps)
            numeric[-1] = (
                logistic_objective(X, y, w, b + eps, lam)
                - logistic_objective(X, y, w, b - eps, lam)
            ) / (2 * eps)
            analytic = np.concatenate([gw, [gb]])
            rel = np.linalg.norm(analytic - numeric) / np.linalg.norm(numeric)
            assert rel <= 1e-6

    def test_separable_reaches_perfect_training_accuracy(self):
        rng = np.random.default_rng(3)
        X = np.vstack([rng.normal(2, 0.3, (40, 2)), rng.normal(-2, 0.3, (40, 2))])
        y = np.array([1.0] * 40 + [0.0] * 40)
        w, b, _ = fit_logistic(sp.csr_matrix(X), y, lam=1e-4, max_iter=300)
        preds = (X @ w + b > 0).astype(float)
        assert (preds == y).all()

    def test_huge_lambda_shrinks_weights_to_prior(self):
        rng = np.random.default_rng(5)
        X = sp.csr_matrix(rng.normal(0, 1, (60, 4)))
        y = np.array([1.0] * 45 + [0.0] * 15)
        w_small, _, _ = fit_logistic(X, y, lam=0.01, max_iter=300)
        w, b, _ = fit_logistic(X, y, lam=100.0, max_iter=3000)
        assert np.abs(w).max() < 1e-2
        assert np.linalg.norm(w) < np.linalg.norm(w_small)
        from scipy.special import expit

        assert expit(b) == pytest.approx(0.75, abs=0.02)  # class prior via bias

    def test_objective_nonincreasing(self):
        rng = np.random.default_rng(8)
        X, y = self.random_problem(rng, n=50, d=10)
        _, _, history = fit_logistic(X, y, lam=0.1, max_iter=100)
        assert all(b <= a + 1e-12 for a, b in zip(history, history[1:]))

    def test_single_class_rejected(self):
        X = sp.csr_matrix(np.ones((5, 2)))
        with pytest.raises(ValueError, match="degenerate labels"):
            fit_logistic(X, np.ones(5), lam=1.0)


class TestAuc:
    def test_perfect_and_reversed(self):
        y = np.array([0, 0, 1, 1])
        assert auc_score(y, np.array([0.1, 0.2, 0.8, 0.9])) == 1.0
        assert auc_score(y, np.array([0.9, 0.8, 0.2, 0.1])) == 0.0

    def test_ties_half_credit(self):
        y = np.array([0, 1])
        assert auc_score(y, np.array([0.5, 0.5])) == 0.5

    def test_single_class_rejected(self):
        with pytest.raises(ValueError, match="both classes"):
            auc_score(np.array([1, 1]), np.array([0.5, 0.6]))


class TestThreshold:
    def test_picks_f1_maximizer(self):
        y = np.array([0, 0, 1, 1])
        probs = np.array([0.1, 0.4, 0.6, 0.9])
        t = select_threshold(y, probs)
        assert 0.4 < t <= 0.6

    def test_fallback(self):
        y = np.array([0, 0])  # F1 is always 0 without positives
        assert select_threshold(y, np.array([0.2, 0.8])) == 0.5


class TestTrainAndPersistence:
    def test_train_end_to_end(self, lexicon, small_model, tmp_path):
        data = separable_dataset(40)
        clf = train(data, lexicon, small_model, lam=0.01, embedding_model_ref="model.bin")
        assert len(clf.weights) == len(clf.feature_vocab) + 1 + small_model.dim
        X = feature_matrix(
            [featurize(e.tokens, lexicon, small_model, clf.feature_vocab) for e in data],
            len(clf.feature_vocab),
        )
        preds = (clf.predict_proba(X) >= 0.5).astype(float)
        truth = np.array([1.0 if e.label == HOPE else 0.0 for e in data])
        assert (preds == truth).mean() >= 0.99

        path = tmp_path / "clf.json"
        save_classifier(clf, path)
        loaded = load_classifier(path)
        assert np.array_equal(loaded.weights, clf.weights)
        assert loaded.feature_vocab == clf.feature_vocab
        assert loaded.bias == clf.bias
        assert loaded.embedding_model_ref == "model.bin"

    def test_indeterminate_excluded(self, lexicon, small_model):
        data = separable_dataset(30)
        data.append(example("x", "sunshine maybe", INDETERMINATE))
        clf = train(data, lexicon, small_model, lam=0.1)
        assert "maybe" not in clf.feature_vocab  # appears once, in the excluded row

    def test_single_class_rejected(self, lexicon, small_model):
        data = [e for e in separable_dataset(30) if e.label == HOPE]
        with pytest.raises(ValueError, match="degenerate labels"):
            train(data, lexicon, small_model)

    def test_decision_flips_exactly_at_threshold(self, lexicon, small_model):
        data = separable_dataset(40)
        clf = train(data, lexicon, small_model, lam=0.1)
        fv = featurize(data[0].tokens, lexicon, small_model, clf.feature_vocab)
        X = feature_matrix([fv], len(clf.feature_vocab))
        p = float(clf.predict_proba(X)[0])
        assert (p >= p) and not (p >= np.nextafter(p, 1))  # boundary check at p


class TestEvaluateRepeated:
    def test_separable(self, lexicon, small_model):
        data = separable_dataset(60, seed=2)
        summary = evaluate_repeated(
            data, lexicon, small_model, runs=20, seed=1, lambda_grid=(0.01,), max_iter=120
        )
        assert summary.f1[0] >= 0.99
        assert summary.f1[1] <= 0.01
        assert summary.auc[0] >= 0.99
        assert summary.runs == 20

    def test_split_disjoint_and_stratified(self):
        by_class = {"a": list(range(60)), "b": list(range(60, 160))}
        rng = np.random.default_rng(0)
        tr, va, te = _stratified_split(by_class, (0.8, 0.1, 0.1), rng)
        assert not (set(tr) & set(va)) and not (set(tr) & set(te)) and not (set(va) & set(te))
        assert sorted(tr + va + te) == list(range(160))
        a_tr = sum(1 for i in tr if i < 60)
        assert a_tr == 48  # floor(0.8 * 60)

    def test_class_too_small(self):
        by_class = {"a": list(range(5)), "b": list(range(5, 100))}
        with pytest.raises(ValueError, match="class too small"):
            _stratified_split(by_class, (0.8, 0.1, 0.1), np.random.default_rng(0))


def manual_classifier(threshold=0.5):
    """Probability equals sigmoid of the single embedding feature."""
    return HopeClassifier(
        weights=np.array([0.0, 1.0]),  # [intent weight, embedding weight]
        bias=0.0,
        regularization=1.0,
        feature_vocab={},
        embedding_dim=1,
        threshold=threshold,
    )


def pool_item(cid, p, bucket=1):
    return PoolItem(cid, bucket, FeatureVector({}, 0, np.array([logit(p)])))


class TestUncertaintySample:
    def test_margin_ordering_single_bucket(self):
        pool = [pool_item("a", 0.1), pool_item("b", 0.49), pool_item("c", 0.9), pool_item("d", 0.51)]
        picked = uncertainty_sample(manual_classifier(), pool, 2)
        assert {it.comment_id for it in picked} == {"b", "d"}

    def test_equal_stratification_over_buckets(self):
        pool = [
            pool_item(f"c{b}{i}", 0.3 + 0.01 * i, bucket=b) for b in range(1, 5) for i in range(5)
        ]
        picked = uncertainty_sample(manual_classifier(), pool, 8)
        per_bucket = {b: sum(1 for it in picked if it.week_bucket == b) for b in range(1, 5)}
        assert per_bucket == {1: 2, 2: 2, 3: 2, 4: 2}

    def test_remainder_round_robin(self):
        pool = [pool_item(f"c{b}{i}", 0.4, bucket=b) for b in range(1, 5) for i in range(5)]
        picked = uncertainty_sample(manual_classifier(), pool, 6)
        per_bucket = {b: sum(1 for it in picked if it.week_bucket == b) for b in range(1, 5)}
        assert per_bucket == {1: 2, 2: 2, 3: 1, 4: 1}

    def test_shortfall_flows_to_other_buckets(self):
        pool = [pool_item("a1", 0.5, 1)] + [pool_item(f"b{i}", 0.4, 2) for i in range(6)]
        picked = uncertainty_sample(manual_classifier(), pool, 4)
        assert len(picked) == 4

    def test_labeled_ids_excluded_and_exhaustion(self):
        pool = [pool_item("a", 0.5), pool_item("b", 0.6)]
        picked = uncertainty_sample(manual_classifier(), pool, 5, labeled_ids={"a"})
        assert [it.comment_id for it in picked] == ["b"]
        with pytest.raises(ValueError, match="empty pool"):
            uncertainty_sample(manual_classifier(), pool, 2, labeled_ids={"a", "b"})

    def test_spot_checks(self):
        pool = [pool_item("hi", 0.99), pool_item("lo", 0.01), pool_item("mid", 0.5)]
        picked = certainty_spot_checks(manual_classifier(), pool, 2)
        assert {it.comment_id for it in picked} == {"hi", "lo"}


class TestWildRun:
    def make_comments(self):
        # text encodes the probability the featurizer should produce
        cs = []
        for day, probs in (("2019-02-14", [0.9, 0.2]), ("2019-02-15", [0.7, 0.6, 0.1])):
            for i, p in enumerate(probs):
                cs.append(
                    make_comment(
                        f"{day}-{i}", f"p{int(p * 10)}", ts=f"{day}T10:00:00+00:00"
                    )
                )
        return cs

    @staticmethod
    def featurizer(tokens):
        p = int(tokens[0][1:]) / 10
        return FeatureVector({}, 0, np.array([logit(p)]))

    def test_positives_above_threshold(self, caplog):
        import logging

        comments = self.make_comments()
        clf = manual_classifier(threshold=0.65)
        with caplog.at_level(logging.WARNING):
            result = wild_run(clf, comments, self.featurizer, per_day_quota=5, seed=0)
        assert {p.comment_id for p in result.positives} == {"2019-02-14-0", "2019-02-15-0"}
        assert "quota" in caplog.text  # both days are short of the quota
        assert sum(len(v) for v in result.sampled_ids.values()) == 5

    def test_quota_sampling_deterministic(self):
        comments = self.make_comments()
        clf = manual_classifier()
        r1 = wild_run(clf, comments, self.featurizer, per_day_quota=2, seed=3)
        r2 = wild_run(clf, comments, self.featurizer, per_day_quota=2, seed=3)
        assert r1.sampled_ids == r2.sampled_ids
        assert all(len(v) == 2 for v in r1.sampled_ids.values())

    def test_threshold_above_one_yields_na_precision(self):
        comments = self.make_comments()
        clf = manual_classifier(threshold=1.01)
        result = wild_run(clf, comments, self.featurizer, per_day_quota=5, seed=0)
        assert result.positives == []
        precision, breakdown = wild_precision(result.positives, {})
        assert precision is None
        assert breakdown == {}

    def test_precision_and_breakdown(self):
        from hopespeech.classifier import WildPrediction

        positives = [WildPrediction(f"c{i}", 0.9, "2019-02-14") for i in range(4)]
        verdicts = {"c0": True, "c1": True, "c2": True, "c3": False}
        criteria = {"c0": ["P8"], "c1": ["P2", "P8"], "c2": ["P6"], "c3": ["N3"]}
        precision, breakdown = wild_precision(positives, verdicts, criteria)
        assert precision == pytest.approx(3 / 4)
        assert breakdown == {"P8": 2, "P2": 1, "P6": 1}

    def test_unverified_positive_rejected(self):
        from hopespeech.classifier import WildPrediction

        with pytest.raises(ValueError, match="unverified"):
            wild_precision([WildPrediction("c0", 0.9, "d")], {})


class TestWeekBucket:
    def test_buckets(self):
        start = "2019-02-14T00:00:00Z"
        assert week_bucket("2019-02-14T05:00:00Z", start) == 1
        assert week_bucket("2019-02-21T00:00:00Z", start) == 2
        assert week_bucket("2019-03-07T00:00:00Z", start) == 4
        assert week_bucket("2019-04-01T00:00:00Z", start) == 4  # clamped


class TestCohenKappa:
    def test_identical_mixed_sequences(self):
        assert cohen_kappa(["x", "y", "x"], ["x", "y", "x"]) == 1.0

    def test_hand_computed_zero(self):
        # p_o = 0.5, p_e = 0.5 -> kappa = 0
        assert cohen_kappa(["x", "x", "y", "y"], ["x", "y", "x", "y"]) == pytest.approx(0.0)

    def test_constant_equal_defined_one(self):
        assert cohen_kappa(["a", "a"], ["a", "a"]) == 1.0

    def test_constant_different(self):
        assert cohen_kappa(["a", "a"], ["b", "b"]) == pytest.approx(0.0)

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="length mismatch"):
            cohen_kappa(["a"], ["a", "b"])

    def test_empty(self):
        with pytest.raises(ValueError, match="empty"):
            cohen_kappa([], [])

    def test_range_property(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            n = int(rng.integers(1, 30))
            a = [str(x) for x in rng.integers(0, 3, n)]
            b = [str(x) for x in rng.integers(0, 3, n)]
            k = cohen_kappa(a, b)
            assert -1.0 - 1e-9 <= k <= 1.0 + 1e-9
