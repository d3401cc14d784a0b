import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from samadiego.surrogates import (
    Infeasible, SurrogateConfig, UnsupportedError, default_pool, fit, kriging_corr, predict,
    predict_with_uncertainty, r2_score, rbf_phi,
)
from samadiego.surrogates.kriging import CORRELATIONS, TRENDS, correlation_matrix
from samadiego.surrogates.base import pairwise
from samadiego.types import SearchSpace

INTERPOLATING_RBF = ("linear", "cubic", "tps", "poly4", "poly5")


def unique_designs(space, n, seed):
    rng = np.random.default_rng(seed)
    seen, out = set(), []
    while len(out) < n:
        x = tuple(rng.integers(0, space.levels))
        if x not in seen:
            seen.add(x)
            out.append(x)
    return np.array(out)


class TestPool:
    def test_counts(self):
        pool = default_pool()
        assert len(pool) == 31
        fam = [c.family for c in pool]
        assert (fam.count("rbf"), fam.count("kriging"), fam.count("forest"), fam.count("svr")) == (9, 15, 1, 6)
        assert len({c.id for c in pool}) == 31

    def test_ids_round_trip(self):
        for c in default_pool():
            assert SurrogateConfig.parse(c.id) == c
        assert "kriging:matern52:linear" in [c.id for c in default_pool()]


class TestRbfPhi:
    def test_examples(self):
        assert rbf_phi("linear", 1.0) == 1.0
        assert rbf_phi("poly5", 2.0) == 32.0
        assert rbf_phi("poly4", 1.0) == 0.0
        assert rbf_phi("cubic", 2.0) == 8.0
        assert rbf_phi("tps", 2.0) == pytest.approx(4 * math.log(2))

    def test_log_kernels_zero_at_origin(self):
        assert rbf_phi("tps", 0.0) == 0.0
        assert rbf_phi("poly4", 0.0) == 0.0

    def test_shape_kernels(self):
        assert rbf_phi("gaussian", 1.0, eps=2.0) == pytest.approx(math.exp(-4))
        assert rbf_phi("mq", 1.0, eps=2.0) == pytest.approx(math.sqrt(5))
        assert rbf_phi("imq", 1.0, eps=2.0) == pytest.approx(1 / math.sqrt(5))
        assert rbf_phi("iq", 1.0, eps=2.0) == pytest.approx(1 / 5)

    def test_negative_distance(self):
        with pytest.raises(ValueError):
            rbf_phi("cubic", -0.1)


class TestKrigingCorr:
    def test_examples(self):
        for kind in CORRELATIONS:
            assert kriging_corr(kind, [0.3, 0.5], [0.3, 0.5], 2.0) == 1.0
        assert kriging_corr("ou", [0.0], [1.0], 1.0) == pytest.approx(math.exp(-1), abs=1e-5)
        assert kriging_corr("matern32", [0.4], [0.4], 3.0) == 1.0

    def test_closed_forms(self):
        d = 0.7
        assert kriging_corr("sqexp", [0], [d], 2.0) == pytest.approx(math.exp(-2 * d * d))
        a = math.sqrt(3) * 2 * d
        assert kriging_corr("matern32", [0], [d], 2.0) == pytest.approx((1 + a) * math.exp(-a))
        a = math.sqrt(5) * 2 * d
        assert kriging_corr("matern52", [0], [d], 2.0) == pytest.approx((1 + a + a * a / 3) * math.exp(-a))

    def test_theta_positive(self):
        with pytest.raises(ValueError):
            kriging_corr("ou", [0], [1], 0.0)

    @given(st.lists(st.floats(0, 1), min_size=3, max_size=3), st.lists(st.floats(0, 1), min_size=3, max_size=3),
           st.floats(1e-3, 50), st.sampled_from(CORRELATIONS))
    def test_symmetric_and_bounded(self, x, y, theta, kind):
        r = kriging_corr(kind, x, y, theta)
        assert r == pytest.approx(kriging_corr(kind, y, x, theta))
        assert 0 <= r <= 1

    @pytest.mark.parametrize("kind", CORRELATIONS)
    def test_monotone_in_distance(self, kind):
        vals = [kriging_corr(kind, [0.0, 0.2], [d, 0.2], 3.0) for d in np.linspace(0, 1, 21)]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    @pytest.mark.parametrize("kind", CORRELATIONS)
    def test_matrix_matches_pairwise_formula(self, kind):
        space = SearchSpace.ordinal(3, 11)
        X = unique_designs(space, 6, 1)
        Z = X / 10.0
        D = pairwise(Z, Z, binary=False, levels=space.levels, per_dim=kind.startswith("matern"))
        R = correlation_matrix(kind, 1.7, D, 3, False)
        ref = np.array([[kriging_corr(kind, a, b, 1.7) for b in Z] for a in Z])
        np.testing.assert_allclose(R, ref, rtol=1e-12, atol=1e-15)


class TestR2:
    def test_examples(self):
        y = [1.0, 2.0, 3.0]
        assert r2_score(y, y) == 1.0
        assert r2_score(y, [2.0] * 3) == 0.0
        assert r2_score(y, [1.0, 2.0, 4.0]) == pytest.approx(0.5)

    def test_errors(self):
        with pytest.raises(ValueError):
            r2_score([1, 1, 1], [1, 2, 3])
        with pytest.raises(ValueError):
            r2_score([1, 2], [1])


class TestFitContract:
    def test_rbf_linear_two_points(self):
        space = SearchSpace.ordinal(1, 3)
        model = fit(SurrogateConfig("rbf", "linear"), [[0], [2]], [0.0, 2.0], space)
        assert predict(model, [0]) == pytest.approx(0.0)
        assert predict(model, [1]) == pytest.approx(1.0)
        assert predict(model, [2]) == pytest.approx(2.0)

    def test_single_point_and_length_mismatch(self):
        space = SearchSpace.binary(2)
        for c in default_pool():
            with pytest.raises(ValueError):
                fit(c, [[0, 1]], [1.0], space)
        with pytest.raises(ValueError):
            fit(default_pool()[0], [[0, 1], [1, 1]], [1.0], space)

    def test_duplicated_rows_never_raise(self):
        space = SearchSpace.binary(3)
        X = [[0, 1, 0], [0, 1, 0], [1, 1, 0], [0, 0, 1]]
        y = [1.0, -1.0, 0.5, 0.2]
        for c in default_pool():
            m = fit(c, X, y, space)
            if isinstance(m, Infeasible):
                assert m.config == c and not m
            else:
                assert np.isfinite(predict(m, np.array(X))).all()
        # conflicting targets at one design cannot be interpolated
        assert isinstance(fit(SurrogateConfig("rbf", "cubic"), X, y, space), Infeasible)

    def test_invalid_design_on_predict(self):
        space = SearchSpace.binary(2)
        m = fit(SurrogateConfig("rbf", "cubic"), [[0, 0], [1, 0], [0, 1]], [0.0, 1.0, 2.0], space)
        with pytest.raises(ValueError):
            predict(m, [2, 0])
        with pytest.raises(ValueError):
            predict(m, [0, 0, 0])

    def test_svr_has_no_uncertainty(self):
        space = SearchSpace.binary(3)
        X = unique_designs(space, 6, 0)
        m = fit(SurrogateConfig("svr", "rbf"), X, np.arange(6.0), space)
        assert not m.supports_uncertainty
        with pytest.raises(UnsupportedError):
            predict_with_uncertainty(m, X[0])

    def test_uncertainty_flags(self):
        space = SearchSpace.binary(4)
        X = unique_designs(space, 10, 0)
        y = X.sum(1) - 2.0
        for c in default_pool():
            m = fit(c, X, y, space)
            assert m, c.id
            assert m.supports_uncertainty == (c.family != "svr")


@settings(max_examples=8, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(4, 20), binary=st.booleans())
def test_interpolation(seed, n, binary):
    space = SearchSpace.binary(6) if binary else SearchSpace.ordinal(3, 11)
    n = min(n, space.cardinality())
    X = unique_designs(space, n, seed)
    y = np.random.default_rng(seed).normal(size=n)
    configs = [SurrogateConfig("rbf", k) for k in INTERPOLATING_RBF]
    configs += [SurrogateConfig("kriging", c, t) for c in CORRELATIONS for t in TRENDS]
    for c in configs:
        m = fit(c, X, y, space)
        if not m:
            # trends with more terms than points are legitimately unidentifiable
            assert c.family == "kriging" and c.trend != "constant", (c.id, m.reason)
            continue
        mean, sd = predict_with_uncertainty(m, X)
        np.testing.assert_allclose(mean, y, atol=1e-6, err_msg=c.id)
        np.testing.assert_allclose(sd, 0, atol=1e-6, err_msg=c.id)
        np.testing.assert_allclose(mean, predict(m, X), atol=1e-12)


def test_kriging_zero_sd_at_training_point():
    space = SearchSpace.ordinal(2, 21)
    X = unique_designs(space, 12, 3)
    y = np.sin(X[:, 0] / 3.0) + X[:, 1] / 10.0
    m = fit(SurrogateConfig("kriging", "matern52", "constant"), X, y, space)
    mean, sd = predict_with_uncertainty(m, X[4])
    assert mean == pytest.approx(y[4], abs=1e-6) and sd <= 1e-6
    _, sd_far = predict_with_uncertainty(m, np.array([20, 0]) if (20, 0) not in map(tuple, X) else np.array([0, 20]))
    assert sd_far > 1e-6


class TestForest:
    def setup_method(self):
        self.space = SearchSpace.binary(8)
        self.X = unique_designs(self.space, 40, 5)
        self.y = self.X @ np.arange(8.0) - 10

    def test_predictions_within_target_range(self):
        m = fit(SurrogateConfig("forest"), self.X, self.y, self.space)
        P = predict(m, unique_designs(self.space, 100, 9))
        assert P.min() >= self.y.min() - 1e-12 and P.max() <= self.y.max() + 1e-12

    def test_sd_is_spread_of_trees(self):
        m = fit(SurrogateConfig("forest"), self.X, self.y, self.space)
        Q = unique_designs(self.space, 15, 2)
        per_tree = np.stack([t.predict(Q / 1.0) for t in m.forest.estimators_])
        mean, sd = predict_with_uncertainty(m, Q)
        np.testing.assert_allclose(mean, per_tree.mean(0), atol=1e-5)
        np.testing.assert_allclose(sd, per_tree.std(0), atol=1e-5)

    def test_identical_trees_zero_sd(self):
        m = fit(SurrogateConfig("forest"), self.X, self.y, self.space)
        m._trees = [m._trees[0]] * len(m._trees)
        _, sd = predict_with_uncertainty(m, unique_designs(self.space, 10, 4))
        np.testing.assert_allclose(sd, 0, atol=1e-12)

    def test_deterministic_for_seed(self):
        a = fit(SurrogateConfig("forest"), self.X, self.y, self.space, seed=3)
        b = fit(SurrogateConfig("forest"), self.X, self.y, self.space, seed=3)
        Q = unique_designs(self.space, 10, 4)
        np.testing.assert_array_equal(predict(a, Q), predict(b, Q))


def test_svr_linear_fits_linear_data():
    space = SearchSpace.ordinal(4, 11)
    X = unique_designs(space, 80, 11)
    y = 0.05 * X.sum(1) - 1.0
    y = (y - y.mean()) / y.std()   # the pool always sees standardized targets
    m = fit(SurrogateConfig("svr", "linear"), X[:60], y[:60], space)
    assert r2_score(y[60:], predict(m, X[60:])) >= 0.99


def test_warm_start_hint_accepted():
    space = SearchSpace.binary(6)
    X = unique_designs(space, 20, 1)
    y = X.sum(1) - 3.0
    c = SurrogateConfig("kriging", "sqexp", "constant")
    first = fit(c, X, y, space)
    again = fit(c, X, y, space, hint={"theta": first.theta})
    np.testing.assert_allclose(predict(again, X), y, atol=1e-6)
