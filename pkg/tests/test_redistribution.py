import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from willmore.curves import curve_catalog
from willmore.grid import discrete_curvature, polygon, segment_lengths
from willmore.monitor import MonitorModel, MonitorParams, monitor_values
from willmore.redistribution import (awar_step, equidistribution_targets, invert_parameters,
                                     resample_curve, resample_field, war_parameters,
                                     war_redistribute, weighted_cumulative)
from willmore.verification import mesh_quality

from .conftest import random_star

SQUARE = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
RHO4 = np.linspace(0, 1, 5)
positive = arrays(float, 16, elements=st.floats(0.05, 20.0))


def old_cumulative_at(ds, m, rho_new):
    """Piecewise-linear cumulative weight of the old mesh at new parameters."""
    _, w, _ = weighted_cumulative(ds, m)
    return np.interp(rho_new, np.arange(len(ds) + 1) / len(ds), w)


def nonuniform_polygon(M, rng):
    rho = np.sort(rng.uniform(0, 1, M))
    rho = (rho - rho[0]) * 0.9 + np.arange(M) / M * 0.1
    th = 2 * np.pi * rho
    return np.column_stack((np.cos(th), 0.5 * np.sin(th)))


class TestWeights:
    def test_unweighted(self):
        ds = np.array([0.5, 1.0, 2.0])
        omega, w, L = weighted_cumulative(ds, np.ones(3))
        assert np.allclose(omega, ds) and L == pytest.approx(3.5)

    def test_hand(self):
        omega, w, L = weighted_cumulative(np.ones(4), np.array([1.0, 1, 3, 3]))
        assert np.allclose(omega, [1, 2, 3, 2])
        assert np.allclose(w, [0, 1, 3, 6, 8]) and L == 8

    def test_already_equidistributed(self):
        omega, _, _ = weighted_cumulative(np.ones(4), np.array([1.0, 3, 1, 3]))
        assert np.allclose(omega, 2)

    def test_nonpositive_monitor(self):
        with pytest.raises(ValueError):
            weighted_cumulative(np.ones(3), np.array([1.0, 0.0, 1.0]))


class TestTargets:
    def test_hand(self):
        assert np.allclose(equidistribution_targets(8.0, 4), [0, 2, 4, 6, 8])

    @given(st.floats(0.1, 100), st.integers(4, 50))
    def test_progression(self, L, M):
        t = equidistribution_targets(L, M)
        assert t[0] == 0 and t[-1] == pytest.approx(L)
        assert np.allclose(np.diff(t), L / M)


class TestInvert:
    def test_identity(self):
        w = np.linspace(0, 8, 5)
        assert np.allclose(invert_parameters(w, RHO4, w), RHO4)

    def test_hand(self):
        r = invert_parameters([0, 1, 3, 6, 8], RHO4, [0, 2, 4, 6, 8])
        assert np.allclose(r, [0, 0.375, 0.5 + 0.25 / 3, 0.75, 1])

    def test_hits_node(self):
        assert invert_parameters([0, 1, 3, 6, 8], RHO4, [3.0])[0] == pytest.approx(0.5)


class TestResample:
    def test_identity(self):
        X = polygon(12)
        rho = np.arange(13) / 12
        assert np.allclose(resample_curve(X, rho, rho[:-1]), X)

    def test_midpoint(self):
        Xn = resample_curve(SQUARE, RHO4, np.array([0.125, 0.25, 0.5, 0.75]))
        assert np.allclose(Xn[0], 0.5 * (SQUARE[0] + SQUARE[1]))

    def test_square_hand(self):
        Xn = resample_curve(SQUARE, RHO4, np.array([0, 0.375, 0.5 + 0.25 / 3, 0.75]))
        assert np.allclose(Xn[1], 0.5 * (SQUARE[1] + SQUARE[2]))

    def test_field(self):
        f = np.array([0.0, 1.0, 0.0, -1.0])
        assert np.allclose(resample_field(f, RHO4, np.array([0.125, 0.875])), [0.5, -0.5])
        assert np.allclose(resample_field(f, RHO4, RHO4[:-1], cubic=True), f)


class TestWar:
    @given(positive, positive)
    def test_exact_equidistribution(self, ds, m):
        M = len(ds)
        rho_new = np.append(_war_from_segments(ds, m), 1.0)
        _, _, L = weighted_cumulative(ds, m)
        inc = np.diff(old_cumulative_at(ds, m, rho_new))
        assert np.abs(inc / (L / M) - 1).max() < 1e-12
        assert np.all(np.diff(rho_new) > 0)

    def test_unweighted_nonuniform_polygon(self, rng):
        X = nonuniform_polygon(40, rng)
        Xn = war_redistribute(X, np.ones(40))
        assert Xn.shape == X.shape and np.allclose(Xn[0], X[0])
        R1_old, _ = mesh_quality(X, np.ones(40))
        R1_new, _ = mesh_quality(Xn, np.ones(40))
        assert R1_new < R1_old

    def test_uniform_polygon_fixed_point(self):
        X = polygon(32)
        assert np.allclose(war_redistribute(X, np.ones(32)), X, atol=1e-14)

    @given(st.lists(st.floats(0.2, 2.9), min_size=3, max_size=3, unique=True),
           st.floats(0.3, 3.0))
    def test_idempotent_unweighted(self, angles, scale):
        # centrally symmetric equilateral hexagon: chord-uniform but not regular
        a = np.sort(angles)
        a = np.concatenate((a, a + np.pi))
        X = scale * np.cumsum(np.column_stack((np.cos(a), np.sin(a))), axis=0)
        once = war_redistribute(X, np.ones(6))
        twice = war_redistribute(once, np.ones(6))
        assert np.abs(twice - once).max() < 1e-12 * scale

    @given(st.integers(0, 2**31 - 1))
    def test_nodes_on_old_polygon(self, seed):
        rng = np.random.default_rng(seed)
        X = random_star(24, rng)
        m = 1 + rng.uniform(0, 3, 24)
        rho = war_parameters(X, m)
        Xn = war_redistribute(X, m)
        j = np.floor(rho * 24).astype(int)
        a, b = X[j], X[(j + 1) % 24]
        cross = (b - a)[:, 0] * (Xn - a)[:, 1] - (b - a)[:, 1] * (Xn - a)[:, 0]
        assert np.abs(cross).max() < 1e-12
        assert np.all(np.diff(rho) > 0) and rho[0] == 0

    def test_R2_unity_on_frozen_geometry(self, rng):
        X = random_star(30, rng)
        m = 1 + rng.uniform(0, 2, 30)
        rho = np.append(war_parameters(X, m), 1.0)
        ds, _ = segment_lengths(X)
        inc = np.diff(old_cumulative_at(ds, m, rho))
        assert inc.max() / inc.min() == pytest.approx(1.0, abs=1e-10)


def _war_from_segments(ds, m):
    """WAR parameters computed from segment data alone."""
    M = len(ds)
    _, w, L = weighted_cumulative(ds, m)
    rho = invert_parameters(w, np.arange(M + 1) / M, equidistribution_targets(L, M))
    rho[0] = 0.0
    return rho[:M]


class TestAwar:
    def test_circle_fixed_point(self):
        X = polygon(50)
        res = awar_step(X, discrete_curvature(X), MonitorParams())
        assert res.indicators.Q == pytest.approx(1.0)
        assert res.indicators.C1 == pytest.approx(0.0, abs=1e-10)
        assert np.allclose(res.X, X, atol=1e-12)

    def test_flat_curvature(self):
        X = polygon(16)
        res = awar_step(X, np.zeros(16), MonitorParams())
        assert res.model is MonitorModel.LINEAR
        assert np.allclose(res.m, 1.0) and np.allclose(res.X, X, atol=1e-12)

    def test_flower_improves_R2(self):
        s = curve_catalog("flower32", 100)
        res = awar_step(s.X, s.kappa, MonitorParams())
        _, R2_in = mesh_quality(s.X, res.m)
        M = s.M
        m_new = resample_field(res.m, np.arange(M + 1) / M, res.rho)
        _, R2_out = mesh_quality(res.X, m_new)
        assert R2_out <= R2_in

    def test_flower_improves_R2_cubic_recomputed(self):
        s = curve_catalog("flower32", 100)
        res = awar_step(s.X, s.kappa, MonitorParams(), cubic=True)
        _, R2_in = mesh_quality(s.X, res.m)
        m_new = monitor_values(res.X, discrete_curvature(res.X), res.model, res.params)
        _, R2_out = mesh_quality(res.X, m_new)
        assert R2_out <= R2_in
