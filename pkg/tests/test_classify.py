import math

import numpy as np
import pytest
from scipy import stats

from shufkde import bitsum as bs
from shufkde import classify as cl
from shufkde import datafiles as df
from shufkde import lsq, privacy, protocol, synth
from shufkde.errors import EmptyClass, InvalidParam


def unit_rows(rng, n, d):
    X = rng.standard_normal((n, d))
    return X / np.linalg.norm(X, axis=1, keepdims=True)


def constant_model(value, n=10, d=3):
    """Released model whose query equals `value` for every input."""
    spec = lsq.LsqSpec(lsq.KERNEL_GAUSSIAN, d)
    pairs = lsq.PairSet(spec, 1, omegas=np.zeros((1, d)), phases=np.zeros(1))
    f = np.array([[value * n / math.sqrt(2.0)]])
    return protocol.ReleasedModel(spec, n, 1, f, public_seed=0, pairs=pairs)


def hand_classifier(values, n=10, d=3):
    models = [constant_model(v, n, d) for v in values]
    spec = models[0].spec
    counts = np.full(len(values), n)
    return cl.ClassifierModel(spec, len(values), 1, math.inf, bs.VARIANT_EXACT,
                              counts, models)


class TestLabelRandomizedResponse:
    def test_infinite_eps_is_identity(self):
        rng = np.random.default_rng(0)
        labels = rng.integers(0, 5, 1000)
        assert np.array_equal(cl.randomize_labels(labels, 5, math.inf, rng), labels)

    def test_zero_eps_is_uniform(self):
        rng = np.random.default_rng(1)
        m, trials = 4, 10**5
        reported = cl.randomize_labels(np.full(trials, 2), m, 0.0, rng)
        counts = np.bincount(reported, minlength=m)
        chi2, pvalue = stats.chisquare(counts)
        assert pvalue > 1e-3

    def test_keep_rate_matches_formula(self):
        rng = np.random.default_rng(2)
        m, eps, trials = 14, 5.0, 10**5
        reported = cl.randomize_labels(np.full(trials, 3), m, eps, rng)
        keep_p = privacy.label_keep_probability(eps, m)  # e^5/(e^5+13)
        rate = np.mean(reported == 3)
        se = math.sqrt(keep_p * (1 - keep_p) / trials)
        assert abs(rate - keep_p) <= 4.0 * se

    def test_full_marginal_chi_square(self):
        rng = np.random.default_rng(3)
        m, eps, trials = 6, 2.0, 10**5
        true = 4
        reported = cl.randomize_labels(np.full(trials, true), m, eps, rng)
        keep_p = privacy.label_keep_probability(eps, m)
        expected = np.full(m, trials * (1 - keep_p) / (m - 1))
        expected[true] = trials * keep_p
        counts = np.bincount(reported, minlength=m)
        chi2, pvalue = stats.chisquare(counts, expected)
        assert pvalue > 1e-3

    def test_single_label_wrapper(self):
        rng = np.random.default_rng(4)
        assert cl.randomize_label(2, 3, math.inf, rng) == 2
        with pytest.raises(InvalidParam):
            cl.randomize_labels(np.array([5]), 3, 1.0, rng)


def make_mixture(seed, m=2, per_class=25, d=8, sep=math.pi / 3, noise=0.08):
    rng = np.random.default_rng(seed)
    return synth.gen_synthetic(m, per_class, d, sep, noise, rng)


class TestTrain:
    def test_exact_grouping_matches_true_classes(self):
        ds, _ = make_mixture(5)
        spec = lsq.LsqSpec(lsq.KERNEL_GAUSSIAN, ds.dim)
        model, _ = cl.train(ds, spec, 8, bs.VARIANT_EXACT, master_seed=7)
        assert np.array_equal(model.counts, np.bincount(ds.labels, minlength=ds.m))
        assert model.n == ds.n

    def test_per_class_query_mean_matches_brute_kde(self):
        # exact bitsum, eps_lbl = inf: the per-class estimate is unbiased
        # for the per-class brute-force KDE
        ds, _ = make_mixture(6, per_class=20)
        spec = lsq.LsqSpec(lsq.KERNEL_GAUSSIAN, ds.dim)
        rng = np.random.default_rng(8)
        y = unit_rows(rng, 1, ds.dim)[0]
        runs = 10**3
        vals = np.empty((runs, ds.m))
        for t in range(runs):
            model, _ = cl.train(ds, spec, 4, bs.VARIANT_EXACT, master_seed=1000 + t)
            for c in range(ds.m):
                vals[t, c] = protocol.query(model.models[c], y)
        for c in range(ds.m):
            expected = lsq.kde_exact(
                lsq.KERNEL_GAUSSIAN, ds.vectors[ds.labels == c], y[None])[0]
            se = vals[:, c].std(ddof=1) / math.sqrt(runs)
            assert abs(vals[:, c].mean() - expected) <= 4.0 * se

    def test_one_user_per_class(self):
        rng = np.random.default_rng(9)
        ds = df.LabeledDataset(unit_rows(rng, 3, 6), np.arange(3), 3)
        spec = lsq.LsqSpec(lsq.KERNEL_GAUSSIAN, 6)
        model, _ = cl.train(ds, spec, 4, bs.VARIANT_EXACT, master_seed=1)
        assert model.counts.tolist() == [1, 1, 1]
        assert all(rm.n == 1 for rm in model.models)

    def test_deterministic_model_files(self, tmp_path):
        ds, _ = make_mixture(10)
        spec = lsq.LsqSpec(lsq.KERNEL_GAUSSIAN, ds.dim)
        budget = privacy.BudgetSpec(4.0, 1e-5, privacy.MODE_ADVANCED)
        paths = []
        for run in range(2):
            model, _ = cl.train(ds, spec, 8, bs.VARIANT_3NB, master_seed=42,
                                eps_label=5.0, budget=budget)
            path = tmp_path / f"clf{run}.json"
            cl.save_classifier(path, model)
            paths.append(path)
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_counts_sum_to_n(self):
        ds, _ = make_mixture(11, m=3, per_class=10)
        spec = lsq.LsqSpec(lsq.KERNEL_GAUSSIAN, ds.dim)
        for seed in range(5):
            model, _ = cl.train(ds, spec, 4, bs.VARIANT_EXACT, master_seed=seed,
                                eps_label=1.0)
            assert model.counts.sum() == ds.n

    def test_empty_reported_class_is_an_error(self):
        rng = np.random.default_rng(12)
        # labels only ever use classes 0 and 1 out of m = 3
        ds = df.LabeledDataset(unit_rows(rng, 6, 5), np.array([0, 1, 0, 1, 0, 1]), 3)
        spec = lsq.LsqSpec(lsq.KERNEL_GAUSSIAN, 5)
        with pytest.raises(EmptyClass):
            cl.train(ds, spec, 4, bs.VARIANT_EXACT, master_seed=0)

    def test_budget_required_for_private_variants(self):
        ds, _ = make_mixture(13)
        spec = lsq.LsqSpec(lsq.KERNEL_GAUSSIAN, ds.dim)
        with pytest.raises(InvalidParam):
            cl.train(ds, spec, 4, bs.VARIANT_3NB, master_seed=0)

    def test_classifier_file_round_trip(self, tmp_path):
        ds, _ = make_mixture(14)
        spec = lsq.LsqSpec(lsq.KERNEL_GAUSSIAN, ds.dim)
        model, _ = cl.train(ds, spec, 8, bs.VARIANT_EXACT, master_seed=5)
        path = tmp_path / "clf.json"
        cl.save_classifier(path, model)
        back = cl.load_classifier(path)
        queries = ds.vectors[:5]
        assert np.array_equal(cl.classify_batch(back, queries),
                              cl.classify_batch(model, queries))


class TestClassify:
    def test_argmax_of_constant_models(self):
        model = hand_classifier([0.1, 0.9])
        y = np.array([1.0, 0.0, 0.0])
        assert cl.classify(model, y) == 1

    def test_tie_breaks_to_smallest_index(self):
        model = hand_classifier([0.4, 0.4, 0.2])
        y = np.array([0.0, 1.0, 0.0])
        assert cl.classify(model, y) == 0

    def test_scale_invariance_of_argmax(self):
        ds, _ = make_mixture(15, m=3, per_class=15)
        spec = lsq.LsqSpec(lsq.KERNEL_GAUSSIAN, ds.dim)
        model, _ = cl.train(ds, spec, 16, bs.VARIANT_EXACT, master_seed=3)
        queries = ds.vectors[::4]
        before = cl.classify_batch(model, queries)
        for rm in model.models:
            rm.f_tilde = rm.f_tilde * 7.5
        assert np.array_equal(cl.classify_batch(model, queries), before)


class TestDecode:
    def _vocab(self, rng, planted, extra=20):
        vectors = np.vstack([planted[None], unit_rows(rng, extra, planted.size)])
        terms = ["planted"] + [f"term{i:03d}" for i in range(extra)]
        return df.Vocabulary(terms, vectors)

    def test_full_ranking_is_a_permutation(self):
        rng = np.random.default_rng(16)
        model = hand_classifier([0.5])
        vocab = df.Vocabulary([f"w{i}" for i in range(6)], unit_rows(rng, 6, 3))
        ranking = cl.decode_class(model, 0, vocab, k=6)
        assert sorted(term for term, _ in ranking) == sorted(vocab.terms)

    def test_planted_center_ranks_first(self):
        ds, centers = make_mixture(17, m=2, per_class=40, d=16)
        spec = lsq.LsqSpec(lsq.KERNEL_GAUSSIAN, ds.dim)
        rng = np.random.default_rng(18)
        vocab = self._vocab(rng, centers[0])
        hits = 0
        for seed in range(20):
            model, _ = cl.train(ds, spec, 128, bs.VARIANT_EXACT, master_seed=seed)
            ranking = cl.decode_class(model, 0, vocab, k=3)
            hits += ranking[0][0] == "planted"
        assert hits >= 19

    def test_score_ties_break_lexicographically(self):
        rng = np.random.default_rng(19)
        v = unit_rows(rng, 1, 3)[0]
        vocab = df.Vocabulary(["zed", "apple"], np.vstack([v, v]))
        model = hand_classifier([0.5])
        ranking = cl.decode_class(model, 0, vocab, k=2)
        assert [t for t, _ in ranking] == ["apple", "zed"]
        assert ranking[0][1] == ranking[1][1]

    def test_k_bounds(self):
        rng = np.random.default_rng(20)
        vocab = df.Vocabulary(["a", "b"], unit_rows(rng, 2, 3))
        model = hand_classifier([0.5])
        with pytest.raises(InvalidParam):
            cl.decode_class(model, 0, vocab, k=3)


class TestEvaluate:
    def test_always_right_scores_one(self):
        # class-1 model dominates everywhere; all-true-1 labels
        model = hand_classifier([0.1, 0.9])
        rng = np.random.default_rng(21)
        Y = unit_rows(rng, 30, 3)
        labels = np.ones(30, dtype=int)
        accuracy, confusion = cl.evaluate(model, Y, labels)
        assert accuracy == 1.0
        assert confusion[1, 1] == 30 and confusion.sum() == 30

    def test_accuracy_equals_trace_over_n(self):
        ds, _ = make_mixture(22, m=3, per_class=15)
        spec = lsq.LsqSpec(lsq.KERNEL_GAUSSIAN, ds.dim)
        model, _ = cl.train(ds, spec, 16, bs.VARIANT_EXACT, master_seed=2)
        accuracy, confusion = cl.evaluate(model, ds.vectors, ds.labels)
        assert accuracy == pytest.approx(np.trace(confusion) / ds.n, rel=1e-12)
        assert confusion.sum() == ds.n

    def test_constant_predictor_hits_chance_level(self):
        model = hand_classifier([0.9, 0.1, 0.1, 0.1])
        rng = np.random.default_rng(23)
        Y = unit_rows(rng, 4000, 3)
        labels = rng.integers(0, 4, 4000)
        accuracy, _ = cl.evaluate(model, Y, labels)
        se = math.sqrt(0.25 * 0.75 / 4000)
        assert abs(accuracy - 0.25) <= 4.0 * se


class TestDebiasedCounts:
    def test_infinite_eps_is_identity(self):
        counts = np.array([5, 7, 3])
        assert np.allclose(cl.debiased_counts(counts, math.inf), counts)

    def test_statistical_recovery(self):
        rng = np.random.default_rng(24)
        m, eps = 4, 2.0
        true = np.array([4000, 100, 800, 100])
        labels = np.repeat(np.arange(m), true)
        reported = cl.randomize_labels(labels, m, eps, rng)
        est = cl.debiased_counts(np.bincount(reported, minlength=m), eps)
        assert np.all(np.abs(est - true) < 200)

    def test_chance_level_unrecoverable(self):
        with pytest.raises(InvalidParam):
            cl.debiased_counts(np.array([3, 3]), 0.0)
