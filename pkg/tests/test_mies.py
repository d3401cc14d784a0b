import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from samadiego.mies import (
    geometric_difference, mies_optimize, mutate_ordinal, reflect,
)
from samadiego.types import SearchSpace, design_key


def onemax(X):
    return X.sum(axis=1).astype(float)


class CountingScore:
    def __init__(self, fn):
        self.fn, self.calls = fn, 0

    def __call__(self, X):
        self.calls += len(X)
        return self.fn(X)


class TestMutation:
    def test_mean_jump_matches_step(self):
        rng = np.random.default_rng(0)
        d = geometric_difference(np.full(10**5, 3.0), rng)
        assert np.abs(d).mean() == pytest.approx(3.0, rel=0.1)
        assert abs(d.mean()) < 0.05

    def test_tiny_step_keeps_value(self):
        rng = np.random.default_rng(1)
        out = [mutate_ordinal(40, 1e-6, 101, rng) for _ in range(2000)]
        assert out.count(40) >= 1995

    def test_reflection_at_bounds(self):
        assert reflect([-1, -3, 0], 101).tolist() == [1, 3, 0]
        assert reflect([101, 100, 205], 101).tolist() == [99, 100, 5]
        rng = np.random.default_rng(2)
        for _ in range(500):
            v = mutate_ordinal(0, 5.0, 11, rng)
            assert 0 <= v <= 10

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            mutate_ordinal(11, 1.0, 11, np.random.default_rng(0))

    @given(st.integers(-10_000, 10_000), st.integers(2, 200))
    def test_reflect_in_range(self, v, levels):
        assert 0 <= int(reflect(v, levels)) <= levels - 1


class TestOptimize:
    def test_onemax(self):
        res = mies_optimize(onemax, SearchSpace.binary(10), 2000, seed=0)
        assert res.design.tolist() == [1] * 10

    def test_ordinal_sphere(self):
        space = SearchSpace.ordinal(3, 101)
        res = mies_optimize(lambda X: -((X - 50) ** 2).sum(1).astype(float), space, 5000, seed=1)
        assert np.abs(res.design - 50).max() <= 2

    def test_constant_score(self):
        space = SearchSpace.binary(6)
        tabu = [np.zeros(6, int)]
        res = mies_optimize(lambda X: np.zeros(len(X)), space, 200, seed=3, tabu=tabu)
        assert set(res.trace) == {0.0}
        assert design_key(res.design) != design_key(tabu[0])

    def test_tabu_optimum_excluded(self):
        space = SearchSpace.binary(2)
        res = mies_optimize(onemax, space, 100, seed=0, tabu=[np.array([1, 1])])
        assert res.design.tolist() != [1, 1]
        assert res.score == 1.0

    def test_fully_tabu(self):
        space = SearchSpace.binary(2)
        with pytest.raises(ValueError):
            mies_optimize(onemax, space, 100, seed=0, tabu=[[0, 0], [0, 1], [1, 0], [1, 1]])

    def test_budget_below_population(self):
        with pytest.raises(ValueError):
            mies_optimize(onemax, SearchSpace.binary(4), 3, seed=0)

    @settings(max_examples=20, deadline=None)
    @given(budget=st.integers(4, 400), seed=st.integers(0, 1000), n_tabu=st.integers(0, 30))
    def test_budget_and_tabu_respected(self, budget, seed, n_tabu):
        space = SearchSpace(SearchSpace.binary(4).variables + SearchSpace.ordinal(2, 5).variables)
        rng = np.random.default_rng(seed)
        tabu = space.random(rng, n_tabu)
        score = CountingScore(lambda X: -np.abs(X - 1).sum(1).astype(float))
        res = mies_optimize(score, space, budget, seed=seed, tabu=tabu)
        assert score.calls == res.evaluations <= budget
        assert design_key(res.design) not in {design_key(t) for t in tabu}
        assert all(a <= b for a, b in zip(res.trace, res.trace[1:]))

    def test_deterministic(self):
        space = SearchSpace(SearchSpace.binary(5).variables + SearchSpace.ordinal(3, 21).variables)
        f = lambda X: np.sin(X).sum(1)
        a = mies_optimize(f, space, 500, seed=9)
        b = mies_optimize(f, space, 500, seed=9)
        assert a.design.tolist() == b.design.tolist() and a.trace == b.trace

    def test_init_parents_used(self):
        space = SearchSpace.binary(30)
        start = np.ones((1, 30), int)
        res = mies_optimize(onemax, space, 4, seed=0, init=start)
        assert res.design.tolist() == [1] * 30
