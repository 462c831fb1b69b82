"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see every line; all
tolerances are fixed here, none deferred to calibration.
"""

from __future__ import annotations

import numpy as np
import pytest

from anwaves.channels import (channel_experiment, newton_family_data, project_pi_a,
                              random_exterior_data)
from anwaves.evolution import (EvolutionConfig, evolve, gaussian_bump, strichartz_S,
                               wavemap_residual)
from anwaves.linearized import (count_negative_eigenvalues, potential_V,
                                potential_tilde, susy_residual, threshold_test)
from anwaves.radial import PairState, RadialField, RadialGrid
from anwaves.stationary import (ShootingParams, minimize_static_energy, pohozaev_W,
                                shoot, solve_stationary)
from test_linearized import fd_negative_count, field_from_fun, random_well


def report(idx: int, name: str, ok: bool, detail: str = ""):
    tag = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {idx:2d} [{tag}] {name}" + (f" ({detail})" if detail else ""))
    assert ok, f"criterion {idx}: {name} {detail}"


def test_criterion_01_stationary_solutions(q1, q2, q3):
    ok = True
    details = []
    for m in (q1, q2, q3):
        res = shoot(ShootingParams(alpha=m.alpha, beta=m.beta, n=m.n))
        boundary = abs(m.Q.values[-1] - (m.n * np.pi - m.alpha / m.Q.grid.r_max**2))
        ok &= res.mismatch < 1e-9
        ok &= bool(np.all(m.Q_r.values > 0.0))
        ok &= bool(np.all(m.Q.values > 0.0) and np.all(m.Q.values < m.n * np.pi))
        ok &= boundary < 1e-6
        ok &= m.alpha > 0.0 and m.beta > 0.0
        details.append(f"n={m.n}: mismatch={res.mismatch:.1e}")
    report(1, "stationary profiles n=1,2,3 converge with verified properties",
           ok, "; ".join(details))


def test_criterion_02_uniqueness_shadow(q1):
    g = q1.Q.grid
    sups = []
    for init_vals in (2.0 * np.arctan(g.r), np.pi * np.minimum(1.0, g.r)):
        phi = minimize_static_energy(1, RadialField(g, init_vals))
        sups.append(float(np.max(np.abs(phi.values - q1.Q.values))))
    ok = all(s < 1e-4 for s in sups)
    report(2, "energy minimizer agrees with shooting from two initializations",
           ok, f"sup distances {sups[0]:.2e}, {sups[1]:.2e}")


def test_criterion_03_pohozaev_monitor(q1, q2):
    ok = True
    details = []
    for m in (q1, q2):
        W = pohozaev_W(m).values
        final_err = abs(W[-1] + (m.n * np.pi) ** 2)
        monotone = bool(np.all(np.diff(W) <= 1e-10))
        ok &= monotone and final_err < 1e-3
        details.append(f"n={m.n}: |W(R)+n^2 pi^2|={final_err:.1e} monotone={monotone}")
    report(3, "W non-increasing with the correct terminal value", ok, "; ".join(details))


def test_criterion_04_degree_zero_degeneracy():
    m0 = solve_stationary(0)
    q_sup = float(np.max(np.abs(m0.Q.values)))
    v_sup = float(np.max(np.abs(potential_V(m0).values)))
    ok = q_sup < 1e-8 and v_sup < 1e-10
    report(4, "n=0 profile and potential vanish identically",
           ok, f"|Q|={q_sup:.1e} |V|={v_sup:.1e}")


def test_criterion_05_spectral_claims(q1, q2):
    ok = True
    details = []
    for m in (q1, q2):
        V = potential_V(m)
        count = count_negative_eigenvalues(V)
        cls = threshold_test(V).classification
        ok &= count == 0 and cls == "neither"
        details.append(f"n={m.n}: count={count} threshold={cls}")
    rng = np.random.default_rng(2024)
    mismatches = 0
    for _ in range(20):
        vfun = random_well(rng)
        if count_negative_eigenvalues(field_from_fun(vfun)) != fd_negative_count(vfun):
            mismatches += 1
    ok &= mismatches == 0
    details.append(f"oracle mismatches 0/20" if mismatches == 0
                   else f"oracle mismatches {mismatches}/20")
    report(5, "no negative spectrum, threshold neither, oscillation oracle agrees",
           ok, "; ".join(details))


def test_criterion_06_factorization_identity(q1, q2):
    ok = True
    details = []
    for m in (q1, q2):
        resid = susy_residual(m)
        vt_min = float(np.min(potential_tilde(m).values))
        ok &= resid < 1e-5 and vt_min >= -1e-10
        details.append(f"n={m.n}: resid={resid:.1e} min Vt={vt_min:.1e}")
    report(6, "(L_V - Vt)(r^2 Q_r) = 0 within stencil error, Vt >= 0",
           ok, "; ".join(details))


def test_criterion_07_evolution_correctness(q1):
    # (a) stationarity of the profile data over T = 10
    g = RadialGrid.uniform(15.0, 1001)
    cfg = EvolutionConfig(grid=g, t_final=10.0, coupling="adkins_nappi", smap=q1,
                          r_local=2.0, check_padding=False)
    z = PairState(RadialField(g, np.zeros(g.n), "even"),
                  RadialField(g, np.zeros(g.n), "even"))
    series_q, _, _ = evolve(z, cfg)
    h_sup = max(series_q.h_norm)
    # (b) conserved-energy drift on a resolved perturbed run
    series_p, _, _ = evolve(gaussian_bump(g, 1e-2), cfg)
    E = np.asarray(series_p.energy)
    drift = float(np.max(np.abs(E / E[0] - 1.0)))
    # (c) free-wave self-convergence order

    def pulse(r):
        return np.exp(-((r - 2.0) / 0.5) ** 2) + np.exp(-((r + 2.0) / 0.5) ** 2)

    finals = {}
    for n in (301, 601, 1201):
        gg = RadialGrid.uniform(12.0, n)
        init = PairState(RadialField(gg, pulse(gg.r), "even"),
                         RadialField(gg, np.zeros(gg.n), "even"))
        c = EvolutionConfig(grid=gg, t_final=2.0, coupling="free", check_padding=False)
        _, fin, _ = evolve(init, c)
        finals[n] = fin.u.values
    d1 = np.max(np.abs(finals[301] - finals[601][::2]))
    d2 = np.max(np.abs(finals[601] - finals[1201][::2]))
    order = float(np.log2(d1 / d2))
    ok = h_sup < 1e-6 and drift < 1e-5 and 3.5 < order < 4.5
    report(7, "stationarity, energy conservation, 4th-order self-convergence",
           ok, f"h_norm={h_sup:.1e} drift={drift:.1e} order={order:.2f}")


def test_criterion_08_stability_shadow(q1):
    results = {}
    for label, (r_max, nodes) in {"base": (22.5, 1126), "fine": (22.5, 1688)}.items():
        g = RadialGrid.uniform(r_max, nodes)
        cfg = EvolutionConfig(grid=g, t_final=20.0, coupling="adkins_nappi", smap=q1,
                              r_local=2.0, check_padding=False)
        series, _, _ = evolve(gaussian_bump(g, 1e-2), cfg)
        results[label] = series
    s = results["base"]
    local_ok = s.local_energy[-1] <= 0.1 * s.local_energy[0]
    h_ok = max(s.h_norm) <= 2.0 * s.h_norm[0]
    s_base = strichartz_S(results["base"])
    s_fine = strichartz_S(results["fine"])
    s_ok = np.isfinite(s_base) and abs(s_fine / s_base - 1.0) < 0.05
    ok = bool(local_ok and h_ok and s_ok)
    report(8, "eps=1e-2 perturbation of Q1 disperses; S-norm grid-stable",
           ok, f"local {s.local_energy[0]:.2e}->{s.local_energy[-1]:.2e} "
               f"h x{max(s.h_norm) / s.h_norm[0]:.3f} S={s_base:.5f} "
               f"dS={abs(s_fine / s_base - 1.0):.3%}")


def test_criterion_09_channel_formulas():
    a, T = 2.0, 6.0
    r_max = 2.0 * a + T + 2.0
    grid = RadialGrid.uniform(r_max, int(round(r_max / 0.01)) + 1)
    rng = np.random.default_rng(20250810)
    worst_ortho = 0.0
    ratios = []
    for _ in range(50):
        d = random_exterior_data(grid, a, rng)
        p = project_pi_a(d.u, d.ut, a)
        worst_ortho = max(worst_ortho, p.orthogonality_residual)
        ratios.append(channel_experiment(d, a, T)["ratio"])
    p5 = float(np.percentile(ratios, 5.0))

    grid_fam = RadialGrid.uniform(r_max, int(round(r_max / 0.008)) + 1)
    cone_errs = {}
    for which, exact in (("static", lambda t, r: r**-3.0),
                         ("velocity", lambda t, r: t * r**-3.0)):
        d = newton_family_data(grid_fam, a, which)
        res = channel_experiment(d, a, T, data_tail="newton", freeze_outer=6)
        fin = res["final_forward"]
        cone = fin.u.grid.r >= a + fin.t
        cone_errs[which] = float(np.max(np.abs(fin.u.values[cone]
                                               - exact(fin.t, fin.u.grid.r[cone]))))
    ok = (worst_ortho < 1e-8 and p5 > 0.0
          and cone_errs["static"] < 1e-8 and cone_errs["velocity"] < 1e-8)
    report(9, "projection orthogonality, exact P(a) cone solutions, positive ratio",
           ok, f"ortho={worst_ortho:.1e} p5={p5:.3f} "
               f"cone=({cone_errs['static']:.1e}, {cone_errs['velocity']:.1e})")


def test_criterion_10_blowup_residual():
    rng = np.random.default_rng(314159)
    worst = 0.0
    for _ in range(100):
        t = float(rng.uniform(0.05, 5.0))
        r = float(rng.uniform(0.05, 5.0))
        worst = max(worst, abs(wavemap_residual(t, r)))
    control = abs(wavemap_residual(1.0, 1.0, time_power=2))
    ok = worst < 1e-12 and control > 0.1
    report(10, "self-similar profile annihilated, negative control rejected",
           ok, f"max|res|={worst:.1e} control={control:.3f}")
