import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from depthtest.errors import DomainError
from depthtest.qindex import QPair
from depthtest.teststat import (StatSpec, anti_diagonal_intersections, critical_value, e_statistic, ellipse_matrix,
                                er_contains, evaluate, m_statistic, r_statistic, region_boundary, statistic,
                                statistic_at, w_statistic)

from oracles import chi2_1_sf_reference

HAND = QPair(2 / 3, 1 / 3, 3, 2)
CHI2_95 = 3.841458820694124

unit = st.floats(0.0, 1.0)
sizes = st.integers(2, 2000)
lams = st.floats(1e-3, 1e3)


class TestHandValues:
    def test_w(self):
        assert w_statistic(HAND, 0.5) == pytest.approx(0.4, rel=1e-12)

    def test_m(self):
        assert m_statistic(HAND) == pytest.approx(0.4, rel=1e-12)
        assert m_statistic(QPair(1.0, 0.5, 2, 2)) == pytest.approx(3.0, rel=1e-12)

    def test_r_and_e(self):
        assert r_statistic(HAND, 1.0, 0.3) == pytest.approx(0.8, rel=1e-12)
        assert e_statistic(HAND, 1.0) == pytest.approx(0.8, rel=1e-12)

    def test_center_is_zero(self):
        q = QPair(0.5, 0.5, 10, 7)
        for spec in (StatSpec.W(0.3), StatSpec.M(), StatSpec.R(0.4, 1.0), StatSpec.E()):
            assert statistic(q, spec) == 0.0

    def test_w_boundary_weight(self):
        a, b = QPair(0.7, 0.1, 5, 5), QPair(0.7, 0.9, 5, 5)
        assert w_statistic(a, 1.0) == w_statistic(b, 1.0)

    def test_e_anti_diagonal(self):
        c, lam = 0.08, 0.3
        q = QPair(0.5 + c, 0.5 - c, 40, 60)
        expected = 6 * 40 * 60 / 100 * 4 * lam * c * c
        assert e_statistic(q, lam) == pytest.approx(expected, rel=1e-12)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            w_statistic(HAND, 1.5)
        with pytest.raises(DomainError):
            r_statistic(HAND, 0.0, 0.0)
        with pytest.raises(DomainError):
            e_statistic(HAND, -1.0)
        with pytest.raises(DomainError):
            StatSpec.R(0.5, 2.0)
        with pytest.raises(DomainError):
            StatSpec("M", omega=0.5)


class TestIdentities:
    @given(unit, unit, sizes, sizes, st.floats(1e-3, 1.0, exclude_max=True))
    def test_w_equals_rotated_r(self, a, b, m, n, omega):
        q = QPair(a, b, m, n)
        lam = (1 - omega) / omega
        assert w_statistic(q, omega) == pytest.approx(r_statistic(q, lam, 0.0) / (1 + lam), rel=1e-12, abs=1e-300)

    @given(unit, unit, sizes, sizes)
    def test_e_one_is_twice_w_half(self, a, b, m, n):
        q = QPair(a, b, m, n)
        assert e_statistic(q, 1.0) == pytest.approx(2 * w_statistic(q, 0.5), rel=1e-12, abs=1e-300)

    @given(unit, unit, sizes, sizes, lams)
    def test_e_is_r_at_quarter_pi(self, a, b, m, n, lam):
        q = QPair(a, b, m, n)
        scale = 12 * m * n / (m + n) * (1 + lam)
        assert abs(e_statistic(q, lam) - r_statistic(q, lam, math.pi / 4)) <= 1e-12 * scale

    @given(unit, unit, sizes, lams, st.floats(0.0, 1.0))
    def test_swap_symmetry(self, a, b, m, lam, omega):
        q, s = QPair(a, b, m, m), QPair(b, a, m, m)
        assert m_statistic(q) == m_statistic(s)
        assert e_statistic(q, lam) == pytest.approx(e_statistic(s, lam), rel=1e-12, abs=1e-300)
        assert w_statistic(q, omega) == pytest.approx(w_statistic(s, 1 - omega), rel=1e-12, abs=1e-300)

    @given(lams, st.floats(-math.pi / 2, math.pi / 2))
    def test_ellipse_eigenvalues(self, lam, theta):
        vals = np.linalg.eigvalsh(ellipse_matrix(lam, theta))
        assert vals == pytest.approx(sorted([1.0, lam]), rel=1e-12, abs=1e-12 * max(1.0, lam))

    @given(st.floats(1e-3, 100.0))
    def test_e_scale_law(self, lam):
        spec = StatSpec.E(lam)
        assert spec.scale() == 2 * lam
        assert StatSpec.R(lam, math.pi / 4).scale() == pytest.approx(2 * lam, rel=1e-12)


class TestEvaluate:
    def test_critical_point(self):
        # W with omega = 1 reads only q_fg, so pick q_fg to land on the chi-square(1) 95% point
        m = n = 300
        u = math.sqrt(CHI2_95 / (12 * m * n / (m + n)))
        res = evaluate(QPair(0.5 + u, 0.5, m, n), StatSpec.W(1.0))
        assert res.value == pytest.approx(CHI2_95, rel=1e-12)
        assert res.p_asymptotic == pytest.approx(0.05, abs=1e-9)

    def test_zero_value(self):
        res = evaluate(QPair(0.5, 0.5, 50, 50), StatSpec.E())
        assert res.value == 0.0 and res.p_asymptotic == 1.0 and not res.reject

    def test_e_scale_and_p(self):
        q = QPair(0.55, 0.47, 100, 120)
        res = evaluate(q, StatSpec.E(0.3))
        assert res.scale == pytest.approx(0.6, rel=1e-15)
        assert res.p_asymptotic == pytest.approx(chi2_1_sf_reference(res.value / 0.6), abs=1e-12)
        assert res.reject == (res.p_asymptotic <= 0.05)

    def test_default_omega_resolved(self):
        res = evaluate(QPair(0.6, 0.45, 30, 10), StatSpec.W())
        assert res.spec.omega == pytest.approx(0.25)

    def test_with_empirical(self):
        res = evaluate(QPair(0.6, 0.45, 30, 10), StatSpec.M()).with_empirical(0.01)
        assert res.p_empirical == 0.01 and res.reject and res.calibration == "permutation"

    def test_labels(self):
        assert StatSpec.E(0.3).label == "E(0.3)"
        assert StatSpec.W().label == "W(n/(m+n))"
        assert StatSpec.M().label == "M"


class TestRegion:
    def test_er_contains(self):
        assert er_contains(0.0, 0.0, 5, 5, 0.3, 0.7, 0.1)
        assert er_contains(1.0, 0.0, 2, 2, 0.0, 1.0, 1.0)
        assert not er_contains(1.0 + 1e-9, 0.0, 2, 2, 0.0, 1.0, 1.0)
        with pytest.raises(DomainError):
            er_contains(0.0, 0.0, 2, 2, 0.0, 1.0, 0.0)
        with pytest.raises(DomainError):
            er_contains(0.0, 0.0, 2, 2, 0.0, -1.0, 1.0)

    def test_square_half_width(self):
        b = region_boundary(StatSpec.M(), 300, 300)
        half = math.sqrt(600 * CHI2_95 / (12 * 300 * 300))
        assert half == pytest.approx(0.0462, abs=5e-5)
        assert np.max(np.abs(b - 0.5)) == pytest.approx(half, abs=1e-12)
        assert np.all(np.isclose(np.max(np.abs(b - 0.5), axis=1), half, rtol=0, atol=1e-12))

    @pytest.mark.parametrize("spec", [StatSpec.W(0.5), StatSpec.W(0.2), StatSpec.W(), StatSpec.M(),
                                      StatSpec.E(0.3), StatSpec.E(1.0), StatSpec.R(0.5, 0.4)])
    def test_level_set(self, spec):
        m, n = 300, 200
        level = critical_value(spec, m, n, 0.05)
        for p in region_boundary(spec, m, n, points=64):
            assert abs(statistic_at(spec, m, n, *p) - level) <= 1e-9

    @pytest.mark.parametrize("spec", [StatSpec.W(0.5), StatSpec.E(0.3), StatSpec.M()])
    def test_counter_clockwise_closed(self, spec):
        b = region_boundary(spec, 100, 100, points=128) - 0.5
        area = 0.5 * np.sum(b[:, 0] * np.roll(b[:, 1], -1) - np.roll(b[:, 0], -1) * b[:, 1])
        assert area > 0

    def test_e_axes_follow_theta(self):
        # for lambda < 1 the long axis of E lies along the anti-diagonal
        b = region_boundary(StatSpec.E(0.3), 300, 300) - 0.5
        far = b[np.argmax(np.hypot(b[:, 0], b[:, 1]))]
        assert far[0] * far[1] < 0

    @pytest.mark.parametrize("spec", [StatSpec.W(0.5), StatSpec.W(0.2), StatSpec.W(0.9), StatSpec.M(),
                                      StatSpec.E(0.3), StatSpec.E(1.0)])
    def test_anti_diagonal_intersections(self, spec):
        m = n = 300
        t = math.sqrt((m + n) * CHI2_95 / (12 * m * n))
        pts = anti_diagonal_intersections(spec, m, n)
        assert pts == pytest.approx(np.array([[0.5 + t, 0.5 - t], [0.5 - t, 0.5 + t]]), abs=1e-9)
        level = critical_value(spec, m, n, 0.05)
        for p in pts:
            assert statistic_at(spec, m, n, *p) == pytest.approx(level, rel=1e-9)

    def test_too_few_points(self):
        with pytest.raises(DomainError):
            region_boundary(StatSpec.M(), 10, 10, points=4)
