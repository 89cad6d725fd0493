import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from depthtest.depth import MAHALANOBIS, PROJECTION, SPATIAL, DepthKind, DepthSpec, make_context
from depthtest.errors import DimensionMismatch, EmptyInput
from depthtest.qindex import QPair, q_pair, quality_index, quality_index_bruteforce, relative_rank, relative_ranks

X = np.array([[0.0], [1.0], [2.0]])
Y = np.array([[0.5], [1.5]])


class TestRelativeRank:
    def test_hand_count(self):
        assert relative_rank([0.5], make_context(X, MAHALANOBIS)) == pytest.approx(2 / 3, abs=1e-15)

    def test_deepest_reference_point(self):
        assert relative_rank([1.0], make_context(X, MAHALANOBIS)) == 1.0

    def test_far_tail(self):
        assert relative_rank([1e3], make_context(X, MAHALANOBIS)) == 0.0

    def test_batch_matches_single(self):
        rng = np.random.default_rng(0)
        ctx = make_context(rng.normal(size=(20, 2)), SPATIAL)
        ys = rng.normal(size=(15, 2))
        assert np.array_equal(relative_ranks(ys, ctx), [relative_rank(y, ctx) for y in ys])


class TestQualityIndex:
    def test_hand_values(self):
        assert quality_index(X, Y) == pytest.approx(2 / 3, abs=1e-15)
        assert quality_index(Y, X) == pytest.approx(1 / 3, abs=1e-15)

    def test_identical_samples(self):
        # with distinct depths the j-th deepest point counts j references, so Q = (m + 1) / (2m)
        rng = np.random.default_rng(1)
        x = rng.normal(size=(25, 3))
        for spec in (MAHALANOBIS, SPATIAL, PROJECTION):
            assert quality_index(x, x, spec) == pytest.approx(26 / 50, abs=1e-15)

    def test_tie_saturation(self):
        # every point of a symmetric pair has the same depth, so each comparison is a tie
        x = np.array([[0.0], [1.0]])
        for spec in (MAHALANOBIS, SPATIAL, PROJECTION):
            assert quality_index(x, x, spec) == 1.0

    def test_empty_other(self):
        with pytest.raises(EmptyInput):
            quality_index(X, np.empty((0, 1)))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            quality_index(X, np.zeros((3, 2)))

    def test_bruteforce_hand_value(self):
        assert quality_index_bruteforce(X, Y) == pytest.approx(2 / 3, abs=1e-15)

    @pytest.mark.parametrize("spec", [MAHALANOBIS, SPATIAL, DepthSpec(DepthKind.PROJECTION, 50, 2)])
    def test_bruteforce_sweep(self, spec):
        rng = np.random.default_rng(2)
        worst = 0.0
        for _ in range(50):
            m, n = rng.integers(5, 40, size=2)
            x = rng.normal(size=(m, 2))
            y = rng.normal(size=(n, 2)) * rng.uniform(0.5, 2.0) + rng.normal(scale=0.5, size=2)
            worst = max(worst, abs(quality_index(x, y, spec) - quality_index_bruteforce(x, y, spec)))
        assert worst == 0.0

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(3, 30), st.integers(1, 30))
    def test_bruteforce_with_ties(self, seed, m, n):
        # integer-valued data produces many exact depth ties
        rng = np.random.default_rng(seed)
        x = rng.integers(-3, 4, size=(m, 1)).astype(float)
        x[:2, 0] = (0.0, 1.0)
        y = rng.integers(-3, 4, size=(n, 1)).astype(float)
        q = quality_index(x, y, SPATIAL)
        assert q == quality_index_bruteforce(x, y, SPATIAL)
        assert 0.0 <= q <= 1.0


class TestQPair:
    def test_hand_pair(self):
        q = q_pair(X, Y)
        assert (q.m, q.n) == (3, 2)
        assert q.q_fg == pytest.approx(2 / 3, abs=1e-15)
        assert q.q_gf == pytest.approx(1 / 3, abs=1e-15)

    def test_range_validated(self):
        with pytest.raises(ValueError):
            QPair(1.2, 0.5, 3, 3)

    def test_concentrated_sample_is_central(self):
        # x sits in the middle of y's spread: y looks outlying to x and x looks central to y
        rng = np.random.default_rng(3)
        x = rng.normal(scale=0.3, size=(200, 2))
        y = rng.normal(scale=2.0, size=(200, 2))
        q = q_pair(x, y)
        assert q.q_fg < 0.5 < q.q_gf

    def test_null_centering(self):
        rng = np.random.default_rng(4)
        pairs = [q_pair(rng.normal(size=(300, 2)), rng.normal(size=(300, 2))) for _ in range(200)]
        assert abs(np.mean([p.q_fg for p in pairs]) - 0.5) < 0.01
        assert abs(np.mean([p.q_gf for p in pairs]) - 0.5) < 0.01
