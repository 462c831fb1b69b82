"""Spectral checks: potentials, oscillation counting, threshold classification."""

from __future__ import annotations

import mpmath as mp
import numpy as np
import pytest
from scipy.linalg import eigh_tridiagonal

from anwaves.linearized import (count_negative_eigenvalues, potential_V, potential_tilde,
                                regular_solution, spectral_report, susy_residual,
                                threshold_test)
from anwaves.radial import RadialField, RadialGrid
from anwaves.stationary import solve_stationary

mp.mp.dps = 50


def fd_negative_count(vfun, r_max=40.0, n=12000) -> int:
    """Dense finite-difference oracle: Dirichlet Hamiltonian of
    -d^2/dr^2 + 2/r^2 + V on (0, r_max), count of negative eigenvalues."""
    h = r_max / (n + 1)
    r = h * np.arange(1, n + 1)
    diag = 2.0 / h**2 + 2.0 / r**2 + vfun(r)
    off = np.full(n - 1, -1.0 / h**2)
    vals = eigh_tridiagonal(diag, off, select="v", select_range=(-np.inf, 0.0),
                            eigvals_only=True)
    return int(np.sum(vals < 0.0))


def field_from_fun(vfun, r_min=1e-3, r_max=40.0, n=4001) -> RadialField:
    g = RadialGrid.loguniform(r_min, r_max, n)
    return RadialField(g, vfun(g.r))


def random_well(rng):
    """Random compactly supported test potential: sum of smooth bumps."""
    k = rng.integers(1, 4)
    centers = rng.uniform(1.0, 8.0, k)
    widths = rng.uniform(0.3, 1.5, k)
    depths = rng.uniform(-40.0, 15.0, k)

    def vfun(r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        for c, w, d in zip(centers, widths, depths):
            s = np.clip((r - c) / w, -1.0, 1.0)
            out += d * np.maximum(0.0, 1.0 - s**2) ** 3
        return out

    return vfun


class TestPotentialV:
    def test_n0_identically_zero(self):
        m0 = solve_stationary(0)
        V = potential_V(m0)
        assert np.max(np.abs(V.values)) < 1e-10

    def test_decay_bound(self, q1):
        V = potential_V(q1)
        r = V.grid.r
        weighted = r**6 * np.abs(V.values)
        assert np.isfinite(np.max(weighted))
        # r^6 V approaches -4 alpha (alpha + n pi) from the tail expansions
        limit = 4.0 * q1.alpha * (q1.alpha + np.pi)
        assert np.max(weighted) == pytest.approx(limit, rel=1e-3)
        assert r[-1] ** 6 * V.values[-1] == pytest.approx(-limit, rel=1e-6)

    def test_origin_limit_against_series_oracle(self, q1):
        """V near 0 matches a 50-digit evaluation of the raw formula with Q
        from the interior series."""
        beta = mp.mpf(q1.beta)
        gamma = mp.mpf(2) / 15 * (beta**5 - beta**3)

        def v_exact(r):
            r = mp.mpf(r)
            Q = beta * r + gamma * r**3
            return float(2 * (mp.cos(2 * Q) - 1) / r**2
                         + (1 - 2 * mp.cos(2 * Q) + 2 * Q * mp.sin(2 * Q) + mp.cos(4 * Q)) / r**4)

        V = potential_V(q1)
        for r_test in (1e-4, 1e-3, 5e-3):
            i = int(np.argmin(np.abs(V.grid.r - r_test)))
            assert V.values[i] == pytest.approx(v_exact(V.grid.r[i]), rel=1e-6)
        # closed-form limit: V(0) = -4 beta^2 + (20/3) beta^4
        limit = -4.0 * q1.beta**2 + 20.0 / 3.0 * q1.beta**4
        assert V.values[0] == pytest.approx(limit, rel=1e-5)


class TestPotentialTilde:
    def test_nonnegative(self, q1, q2):
        for m in (q1, q2):
            Vt = potential_tilde(m)
            assert np.min(Vt.values) >= -1e-10

    def test_decay_at_infinity(self, q1):
        Vt = potential_tilde(q1)
        assert Vt.values[-1] < 1e-6

    def test_n0_zero_rule(self):
        m0 = solve_stationary(0)
        assert np.max(np.abs(potential_tilde(m0).values)) == 0.0


class TestNegativeEigenvalues:
    def test_free_operator(self):
        f = field_from_fun(lambda r: np.zeros_like(r))
        assert count_negative_eigenvalues(f) == 0

    def test_profile_potentials(self, q1, q2):
        for m in (q1, q2):
            assert count_negative_eigenvalues(potential_V(m)) == 0

    def test_deep_well_has_bound_states(self):
        vfun = lambda r: -50.0 * ((r > 1.0) & (r < 2.0)).astype(float)
        count = count_negative_eigenvalues(field_from_fun(vfun))
        assert count >= 1
        assert count == fd_negative_count(vfun)

    def test_oracle_agreement_random_ensemble(self):
        """Exact count match with the dense eigensolve on 20 random potentials."""
        rng = np.random.default_rng(2024)
        for _ in range(20):
            vfun = random_well(rng)
            ours = count_negative_eigenvalues(field_from_fun(vfun))
            oracle = fd_negative_count(vfun)
            assert ours == oracle

    def test_scaling_covariance(self):
        """V -> V(./lam)/lam^2 preserves the count (lam = 0.5, 2)."""
        rng = np.random.default_rng(99)
        for _ in range(5):
            vfun = random_well(rng)
            base = count_negative_eigenvalues(field_from_fun(vfun, r_max=40.0))
            for lam in (0.5, 2.0):
                scaled = lambda r: vfun(np.asarray(r) / lam) / lam**2
                got = count_negative_eigenvalues(
                    field_from_fun(scaled, r_max=40.0 * lam))
                assert got == base

    def test_comparison_operator_ground_state_positive(self, q1):
        """Regular solution of L_V - Vt stays positive (it is ~ r^2 Q_r)."""
        V = potential_V(q1)
        Vt = potential_tilde(q1)
        diff = RadialField(V.grid, V.values - Vt.values)
        count, _, phi, _ = regular_solution(diff)
        assert count == 0
        assert np.all(phi > 0.0)


class TestThreshold:
    def test_free_operator_neither(self):
        f = field_from_fun(lambda r: np.zeros_like(r))
        res = threshold_test(f)
        assert res.classification == "neither"
        assert res.growth_exponent == pytest.approx(2.0, abs=0.1)

    def test_profiles_neither(self, q1, q2):
        for m in (q1, q2):
            res = threshold_test(potential_V(m))
            assert res.classification == "neither"

    def test_tuned_well_eigenvalue_at_crossing(self):
        """Bisection on the well depth until the growing branch flips sign:
        at the crossing the classification reads 'eigenvalue'."""

        def c_plus(depth):
            vfun = lambda r: -depth * np.exp(-((r - 1.5) ** 2))
            return threshold_test(field_from_fun(vfun)).c_plus

        # the growing-branch coefficient changes sign whenever a new bound
        # state is pulled in; (1, 3) brackets the first crossing
        lo, hi = 1.0, 3.0
        assert c_plus(lo) > 0 and c_plus(hi) < 0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if c_plus(mid) > 0:
                lo = mid
            else:
                hi = mid
        depth = 0.5 * (lo + hi)
        vfun = lambda r: -depth * np.exp(-((r - 1.5) ** 2))
        res = threshold_test(field_from_fun(vfun))
        assert res.classification == "eigenvalue"
        assert res.growth_exponent == pytest.approx(-1.0, abs=0.2)


class TestSusyResidual:
    def test_profiles(self, q1, q2):
        assert susy_residual(q1) < 1e-5
        assert susy_residual(q2) < 1e-5

    def test_n0(self):
        assert susy_residual(solve_stationary(0)) == 0.0


class TestReport:
    def test_full_report(self, q1):
        rep = spectral_report(q1)
        assert rep.negative_count == 0
        assert rep.classification == "neither"
        assert rep.susy_residual < 1e-5
        assert rep.v_tilde_min >= -1e-10
