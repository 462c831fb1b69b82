"""Evolution of the reduced 5d equation: stationarity, conservation, convergence."""

from __future__ import annotations

import numpy as np
import pytest

from anwaves.evolution import (EvolutionConfig, EvolveInstability, build_coupling,
                               conserved_energy, evolve, free_energy, gaussian_bump,
                               nonlinearity_Z, psi_from_u, rhs, strichartz_S,
                               u_from_psi, wavemap_residual)
from anwaves.radial import PairState, RadialField, RadialGrid, sobolev_norms


def zero_state(g):
    z = np.zeros(g.n)
    return PairState(RadialField(g, z, "even"), RadialField(g, z.copy(), "even"))


def even_pulse(r, center=2.0, width=0.5):
    return np.exp(-((r - center) / width) ** 2) + np.exp(-((r + center) / width) ** 2)


class TestConfig:
    def test_cfl_guard(self):
        g = RadialGrid.uniform(10.0, 501)
        with pytest.raises(ValueError):
            EvolutionConfig(grid=g, t_final=1.0, cfl=0.7, check_padding=False)

    def test_padding_rule(self):
        g = RadialGrid.uniform(10.0, 501)
        with pytest.raises(ValueError):
            EvolutionConfig(grid=g, t_final=20.0, r_local=2.0)

    def test_coupling_needs_profile(self):
        g = RadialGrid.uniform(10.0, 501)
        with pytest.raises(ValueError):
            EvolutionConfig(grid=g, t_final=1.0, coupling="adkins_nappi",
                            check_padding=False)


class TestNonlinearityOp:
    def test_zero_u(self, q1):
        for r in (0.3, 1.0, 7.0):
            assert nonlinearity_Z(r, 0.0, q1) == 0.0

    def test_matches_vectorized_path(self, q1):
        g = RadialGrid.uniform(10.0, 501)
        c = build_coupling(q1, g)
        from anwaves.nonlinearity import evaluate_Z
        u = 0.3 * np.exp(-g.r)
        z_vec = evaluate_Z(u, g.r, c.zcoef)
        i = 150
        assert nonlinearity_Z(g.r[i], u[i], q1) == pytest.approx(z_vec[i], rel=1e-12)


class TestRhs:
    def test_zero_state_is_stationary(self, q1):
        g = RadialGrid.uniform(10.0, 501)
        cfg = EvolutionConfig(grid=g, t_final=1.0, coupling="adkins_nappi", smap=q1,
                              check_padding=False)
        d = rhs(zero_state(g), cfg)
        assert np.max(np.abs(d.u.values)) == 0.0
        assert np.max(np.abs(d.ut.values)) == 0.0

    def test_free_newton_static(self):
        # u = r^-3 on an exterior grid is annihilated by the free operator
        from anwaves.evolution import _accel
        g = RadialGrid(np.linspace(1.0, 9.0, 8001))
        a = _accel(g.r**-3.0, g.r, g.h, None)
        assert np.max(np.abs(a[2:-2])) < 1e-8

    def test_static_operator_refinement(self, q1):
        """PDE residual of the interpolated stationary state decreases at
        stencil order under evolution-grid refinement."""
        from anwaves.nonlinearity import a_over_q3
        from anwaves.radial import deriv1_samples, deriv2_samples
        prof = q1.profile()

        def residual(n_nodes):
            g = RadialGrid.uniform(8.0, n_nodes)
            r = g.r
            psi = prof(r)
            psi_r = deriv1_samples(psi, g.h, "odd")
            psi_rr = deriv2_samples(psi, g.h, "odd")
            q = prof.q_over_r(r)
            qs = prof.sinq_over_r(r)
            # stationary equation: psi_rr + (2/r) psi_r = sin(2 psi)/r^2 + A(psi)(1-cos 2 psi)/r^4
            lhs = psi_rr[1:] + 2.0 * psi_r[1:] / r[1:]
            rhs_exact = 2.0 * qs[1:] * np.cos(psi[1:]) / r[1:] \
                + 2.0 * a_over_q3(psi[1:]) * q[1:] ** 3 * qs[1:] ** 2 * r[1:]
            return np.max(np.abs(lhs - rhs_exact)[4:-4])

        # stay in the stencil-dominated regime: below h ~ 0.02 the fixed
        # interpolation floor of the profile spline takes over
        e1, e2 = residual(201), residual(401)
        order = np.log2(e1 / e2)
        assert order > 3.3


class TestEvolve:
    def test_zero_data_stays_zero(self, q1):
        g = RadialGrid.uniform(8.0, 401)
        cfg = EvolutionConfig(grid=g, t_final=2.0, coupling="adkins_nappi", smap=q1,
                              check_padding=False)
        _, fin, _ = evolve(zero_state(g), cfg)
        assert np.max(np.abs(fin.u.values)) == 0.0
        assert np.max(np.abs(fin.ut.values)) == 0.0

    def test_finite_speed(self):
        g = RadialGrid.uniform(16.0, 801)
        u0 = np.where((g.r > 1) & (g.r < 2),
                      np.exp(np.e) * np.exp(-1 / np.clip((g.r - 1) * (2 - g.r), 1e-300, None)),
                      0.0)
        init = PairState(RadialField(g, u0, "even"), RadialField(g, np.zeros(g.n), "even"))
        cfg = EvolutionConfig(grid=g, t_final=6.0, coupling="free", check_padding=False)
        series, _, _ = evolve(init, cfg, exterior_a=3.0)
        assert max(series.exterior) < 1e-10

    def test_self_convergence_order(self):
        finals = {}
        for n in (301, 601, 1201):
            g = RadialGrid.uniform(12.0, n)
            init = PairState(RadialField(g, even_pulse(g.r), "even"),
                             RadialField(g, np.zeros(g.n), "even"))
            cfg = EvolutionConfig(grid=g, t_final=2.0, coupling="free",
                                  check_padding=False)
            _, fin, _ = evolve(init, cfg)
            finals[n] = fin.u.values
        d1 = np.max(np.abs(finals[301] - finals[601][::2]))
        d2 = np.max(np.abs(finals[601] - finals[1201][::2]))
        order = np.log2(d1 / d2)
        assert 3.5 < order < 4.5

    def test_time_reversal(self):
        g = RadialGrid.uniform(10.0, 501)
        init = PairState(RadialField(g, even_pulse(g.r), "even"),
                         RadialField(g, np.zeros(g.n), "even"))
        cfg = EvolutionConfig(grid=g, t_final=2.0, coupling="free", check_padding=False)
        _, mid, _ = evolve(init, cfg)
        back = PairState(mid.u, RadialField(g, -mid.ut.values, "even"), 0.0)
        _, fin, _ = evolve(back, cfg)
        assert np.max(np.abs(fin.u.values - init.u.values)) < 1e-6
        assert np.max(np.abs(fin.ut.values + init.ut.values)) < 1e-6

    def test_instability_detector(self):
        # deliberately over-CFL: the detector must abort, not NaN silently
        g = RadialGrid.uniform(10.0, 501)
        init = PairState(RadialField(g, even_pulse(g.r), "even"),
                         RadialField(g, np.zeros(g.n), "even"))
        cfg = EvolutionConfig(grid=g, t_final=5.0, coupling="free", cfl=1.45,
                              cfl_max=1.5, sample_every=5, check_padding=False)
        with pytest.raises(EvolveInstability):
            evolve(init, cfg)

    def test_energy_conservation_and_refinement(self, q1):
        """Relative drift < 1e-5 on a resolved run; drift shrinks at >= 2nd
        order under simultaneous (h, dt) refinement."""
        drifts = {}
        for n in (501, 1001):
            g = RadialGrid.uniform(15.0, n)
            cfg = EvolutionConfig(grid=g, t_final=5.0, coupling="adkins_nappi",
                                  smap=q1, r_local=2.0, check_padding=False)
            series, _, _ = evolve(gaussian_bump(g, 1e-2), cfg)
            E = np.asarray(series.energy)
            drifts[n] = float(np.max(np.abs(E / E[0] - 1.0)))
        assert drifts[1001] < 1e-5
        assert np.log2(drifts[501] / drifts[1001]) > 2.0


class TestConservedEnergy:
    def test_zero(self):
        g = RadialGrid.uniform(10.0, 501)
        z = PairState(RadialField(g, np.zeros(g.n), "odd"),
                      RadialField(g, np.zeros(g.n), "odd"))
        assert conserved_energy(z, n_degree=0) == 0.0

    def test_stationary_state_energy_is_static_energy(self, q1):
        g = RadialGrid.uniform(25.0, 2501)
        psi = psi_from_u(zero_state(g), q1)
        E = conserved_energy(psi, n_degree=1)
        assert E == pytest.approx(q1.energy, rel=1e-6)


class TestConversions:
    def test_round_trip(self, q1):
        g = RadialGrid.uniform(10.0, 501)
        u0 = 0.1 * even_pulse(g.r)
        u1 = 0.05 * even_pulse(g.r, center=1.0)
        state = PairState(RadialField(g, u0, "even"), RadialField(g, u1, "even"), t=1.5)
        back = u_from_psi(psi_from_u(state, q1), q1)
        assert np.max(np.abs(back.u.values - u0)) < 1e-12
        assert np.max(np.abs(back.ut.values - u1)) < 1e-12
        assert back.t == 1.5

    def test_zero_u_gives_q(self, q1):
        g = RadialGrid.uniform(10.0, 501)
        psi = psi_from_u(zero_state(g), q1)
        assert np.max(np.abs(psi.u.values - q1.profile()(g.r))) == 0.0

    def test_norm_comparability(self, q1):
        """3d pair norm of (psi - Q, psi_t) vs 5d pair norm of (u, u_t):
        two-sided bounds with moderate constants over random smooth states."""
        from anwaves.radial import deriv1_samples, weighted_integral
        g = RadialGrid.uniform(12.0, 601)
        rng = np.random.default_rng(5)
        ratios = []
        for _ in range(8):
            c, w = rng.uniform(1.0, 4.0), rng.uniform(0.4, 1.0)
            amp = rng.uniform(0.1, 1.0)
            u0 = amp * even_pulse(g.r, c, w)
            u1 = amp * rng.uniform(-1, 1) * even_pulse(g.r, c * 0.8, w)
            state = PairState(RadialField(g, u0, "even"), RadialField(g, u1, "even"))
            w0 = g.r * u0
            w1 = g.r * u1
            w0_r = deriv1_samples(w0, g.h, "odd")
            n3_sq = weighted_integral(RadialField(g, w0_r**2 + w1**2), 2, 0, g.r_max)
            u0_r = deriv1_samples(u0, g.h, "even")
            n5_sq = weighted_integral(RadialField(g, u0_r**2 + u1**2), 4, 0, g.r_max)
            ratios.append(np.sqrt(n3_sq / n5_sq))
        assert max(ratios) / min(ratios) < 25.0
        assert 0.05 < min(ratios) and max(ratios) < 20.0


class TestStrichartz:
    def test_zero_trajectory(self, q1):
        g = RadialGrid.uniform(8.0, 401)
        cfg = EvolutionConfig(grid=g, t_final=1.0, coupling="adkins_nappi", smap=q1,
                              check_padding=False)
        series, _, _ = evolve(zero_state(g), cfg)
        assert strichartz_S(series) == 0.0

    def test_linear_scaling_free(self):
        g = RadialGrid.uniform(12.0, 601)
        lam = 2.0
        results = {}
        for scale in (1.0, lam):
            init = PairState(RadialField(g, scale * even_pulse(g.r), "even"),
                             RadialField(g, np.zeros(g.n), "even"))
            cfg = EvolutionConfig(grid=g, t_final=3.0, coupling="free",
                                  check_padding=False)
            series, _, _ = evolve(init, cfg)
            results[scale] = series
        s3_1 = results[1.0].s3_accum[-1]
        s3_2 = results[lam].s3_accum[-1]
        assert s3_2 == pytest.approx(lam**3 * s3_1, rel=1e-9)
        s5_1 = results[1.0].s5_accum[-1]
        s5_2 = results[lam].s5_accum[-1]
        assert s5_2 == pytest.approx(lam**5 * s5_1, rel=1e-9)

    def test_small_data_proportionality(self, q1):
        """S over [0, 20] scales like eps within a factor 2 across a decade."""
        s_over_eps = {}
        for eps in (1e-3, 1e-2):
            g = RadialGrid.uniform(22.5, 1126)
            cfg = EvolutionConfig(grid=g, t_final=20.0, coupling="adkins_nappi",
                                  smap=q1, r_local=2.0, check_padding=False)
            series, _, _ = evolve(gaussian_bump(g, eps), cfg)
            s_over_eps[eps] = strichartz_S(series) / eps
        lo, hi = sorted(s_over_eps.values())
        assert hi / lo < 2.0


class TestWavemapResidual:
    def test_exact_solution(self):
        for t, r in ((1.0, 1.0), (0.1, 0.37), (2.5, 0.05)):
            assert abs(wavemap_residual(t, r)) < 1e-12

    def test_negative_control(self):
        assert abs(wavemap_residual(1.0, 1.0, time_power=2)) > 0.1

    def test_blowup_time_rejected(self):
        with pytest.raises(ValueError):
            wavemap_residual(0.0, 1.0)


class TestStabilityShadow:
    def test_small_perturbation_disperses(self, q1):
        g = RadialGrid.uniform(22.5, 1126)
        cfg = EvolutionConfig(grid=g, t_final=20.0, coupling="adkins_nappi",
                              smap=q1, r_local=2.0, check_padding=False)
        series, fin, _ = evolve(gaussian_bump(g, 1e-2), cfg)
        assert series.local_energy[-1] <= 0.1 * series.local_energy[0]
        assert max(series.h_norm) <= 2.0 * series.h_norm[0]
        assert np.isfinite(strichartz_S(series))
