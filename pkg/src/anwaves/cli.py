"""Command-line scenarios and artifact emission.

Subcommands: stationary, spectrum, evolve, stability, channels,
blowup-residual, sweep.  Every scenario is deterministic given
(config, seed) and writes CSV/JSON artifacts with metadata headers.

Exit codes: 0 all in-config assertions pass; 1 assertion failure;
2 usage/config error; 3 numerical failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import channels as ch
from . import evolution as ev
from . import linearized as lin
from . import stationary as st
from .config import ConfigError, RunConfig, build_config, parse_config
from .output import meta_block, write_csv, write_json
from .radial import RadialGrid

EXIT_PASS = 0
EXIT_ASSERT = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


def _out_dir(cfg: RunConfig) -> Path:
    d = Path(cfg.out_dir)
    d.mkdir(parents=True, exist_ok=True)
    return d


def _grid(cfg: RunConfig) -> RadialGrid:
    return RadialGrid.uniform(cfg.r_max, cfg.nodes)


# ---------------------------------------------------------------------------
# scenarios
# ---------------------------------------------------------------------------

def scenario_stationary(cfg: RunConfig) -> int:
    out = _out_dir(cfg)
    status = EXIT_PASS
    for n in cfg.degrees:
        smap = st.solve_stationary(n)
        checks = st.verify_stationary(smap)
        W = st.pohozaev_W(smap)
        ok = all(v for v in checks.values() if isinstance(v, bool))
        if n > 0:
            ok = ok and checks["w_final_err"] < 1e-3 and checks["boundary_tail_resid"] < 1e-6
        meta = meta_block(cfg.echo(), grid_signature=smap.Q.grid.signature())
        if cfg.emit_csv:
            write_csv(out / f"stationary_n{n}.csv",
                      {"r": smap.Q.grid.r, "Q": smap.Q.values,
                       "Q_r": smap.Q_r.values, "W": W.values}, meta)
        if cfg.emit_json:
            write_json(out / f"stationary_n{n}.json",
                       {"n": n, "alpha": smap.alpha, "beta": smap.beta,
                        "energy": smap.energy, "checks": checks, "pass": ok}, meta)
        print(f"stationary n={n}: alpha={smap.alpha:.9g} beta={smap.beta:.9g} "
              f"energy={smap.energy:.9g} [{'PASS' if ok else 'FAIL'}]")
        if not ok:
            status = EXIT_ASSERT
    return status


def scenario_spectrum(cfg: RunConfig) -> int:
    out = _out_dir(cfg)
    status = EXIT_PASS
    for n in cfg.degrees:
        smap = st.solve_stationary(n)
        V = lin.potential_V(smap)
        Vt = lin.potential_tilde(smap)
        rep = lin.spectral_report(smap)
        ok = (rep.negative_count == 0 and rep.classification == "neither"
              and rep.susy_residual < 1e-5 and rep.v_tilde_min >= -1e-10)
        if n == 0:
            ok = rep.negative_count == 0 and float(np.max(np.abs(V.values))) < 1e-10
        meta = meta_block(cfg.echo(), grid_signature=V.grid.signature())
        if cfg.emit_csv:
            write_csv(out / f"potential_n{n}.csv",
                      {"r": V.grid.r, "V": V.values, "V_tilde": Vt.values}, meta)
        if cfg.emit_json:
            write_json(out / f"spectrum_n{n}.json",
                       {"n": n, "negative_count": rep.negative_count,
                        "threshold": rep.classification,
                        "growth_exponent": rep.growth_exponent,
                        "susy_residual": rep.susy_residual,
                        "v_tilde_min": rep.v_tilde_min, "pass": ok}, meta)
        print(f"spectrum n={n}: negative_count={rep.negative_count} "
              f"threshold={rep.classification} susy={rep.susy_residual:.3g} "
              f"[{'PASS' if ok else 'FAIL'}]")
        if not ok:
            status = EXIT_ASSERT
    return status


def _run_evolution(cfg: RunConfig, n: int):
    grid = _grid(cfg)
    smap = st.solve_stationary(n) if n > 0 else None
    coupling = "adkins_nappi" if n > 0 else "free"
    snapshot_times = tuple(np.linspace(0.0, cfg.t_final, 5)[1:]) if cfg.emit_snapshots else ()
    config = ev.EvolutionConfig(grid=grid, t_final=cfg.t_final, coupling=coupling,
                                smap=smap, cfl=cfg.cfl, boundary=cfg.boundary,
                                sample_every=cfg.sample_every, r_local=cfg.r_local,
                                snapshot_times=snapshot_times)
    init = ev.gaussian_bump(grid, cfg.eps, cfg.r0, cfg.sigma)
    series, final, snaps = ev.evolve(init, config)
    return series, final, snaps, config


def _emit_run(cfg: RunConfig, series, snaps, grid_sig: str, out: Path):
    meta = meta_block(cfg.echo(), grid_signature=grid_sig, seed=cfg.seed)
    arrays = series.as_arrays()
    if cfg.emit_csv:
        write_csv(out / "evolve_run.csv",
                  {"t": arrays["times"], "energy": arrays["energy"],
                   "h1_l2": arrays["h1_l2"], "h2_h1": arrays["h2_h1"],
                   "h_norm": arrays["h_norm"], "local_energy": arrays["local_energy"],
                   "s3_accum": arrays["s3_accum"], "s5_accum": arrays["s5_accum"]}, meta)
    for t_snap, state in snaps.items():
        write_csv(out / "snapshots" / f"t{t_snap:g}.csv",
                  {"r": state.grid.r, "u": state.u.values, "u_t": state.ut.values}, meta)
    return meta


def scenario_evolve(cfg: RunConfig) -> int:
    out = _out_dir(cfg)
    n = cfg.degrees[0]
    try:
        series, final, snaps, config = _run_evolution(cfg, n)
    except ev.EvolveInstability as exc:
        write_json(out / "evolve_failure.json",
                   {"error": str(exc), "t_last": exc.t_last}, meta_block(cfg.echo()))
        print(f"evolve: INSTABILITY ({exc})")
        return EXIT_NUMERICAL
    meta = _emit_run(cfg, series, snaps, config.grid.signature(), out)
    drift = float(np.max(np.abs(np.asarray(series.energy) / series.energy[0] - 1.0))) \
        if series.energy[0] != 0 else 0.0
    if cfg.emit_json:
        write_json(out / "evolve_run.json",
                   {"n": n, "energy_drift": drift, "s_norm": ev.strichartz_S(series),
                    "final_time": series.times[-1]}, meta)
    print(f"evolve n={n}: T={series.times[-1]:g} energy_drift={drift:.3g} [PASS]")
    return EXIT_PASS


def scenario_stability(cfg: RunConfig) -> int:
    out = _out_dir(cfg)
    n = cfg.degrees[0]
    if n < 1:
        raise ConfigError("stability scenario needs a degree >= 1 (key: degrees)")
    try:
        series, final, snaps, config = _run_evolution(cfg, n)
    except ev.EvolveInstability as exc:
        write_json(out / "stability.json",
                   {"error": str(exc), "t_last": exc.t_last}, meta_block(cfg.echo()))
        print(f"stability: INSTABILITY ({exc})")
        return EXIT_NUMERICAL
    meta = _emit_run(cfg, series, snaps, config.grid.signature(), out)
    local0 = series.local_energy[0]
    local_T = series.local_energy[-1]
    h0 = series.h_norm[0]
    h_max = max(series.h_norm)
    s_norm = ev.strichartz_S(series)
    local_ok = local_T <= 0.1 * local0 if local0 > 0 else True
    h_ok = h_max <= 2.0 * h0 if h0 > 0 else True
    # large perturbations (eps > 0.05) are exploratory: record, do not assert
    asserted = cfg.eps <= 0.05
    ok = (local_ok and h_ok and np.isfinite(s_norm)) if asserted else True
    if cfg.emit_json:
        write_json(out / "stability.json",
                   {"n": n, "eps": cfg.eps, "local_energy_initial": local0,
                    "local_energy_final": local_T, "local_energy_decayed": local_ok,
                    "h_norm_initial": h0, "h_norm_max": h_max, "h_norm_bounded": h_ok,
                    "s_norm": s_norm, "asserted": asserted, "pass": ok}, meta)
    print(f"stability n={n} eps={cfg.eps:g}: local {local0:.3e}->{local_T:.3e} "
          f"h_norm x{h_max / h0 if h0 > 0 else 1:.2f} S={s_norm:.4g} "
          f"[{'PASS' if ok else 'FAIL'}]")
    return EXIT_PASS if ok else EXIT_ASSERT


def scenario_channels(cfg: RunConfig) -> int:
    out = _out_dir(cfg)
    a, T = cfg.a, cfg.t_channel
    support = 2.0 * a
    r_max = support + T + 2.0
    h = min(0.01, a / 100.0)
    grid = RadialGrid.uniform(r_max, int(round(r_max / h)) + 1)
    rng = np.random.default_rng(cfg.seed)

    worst_ortho = 0.0
    ratios = []
    member_rows = {"member": [], "ratio": [], "pi_norm2": [], "pi_perp_norm2": [],
                   "ext_forward": [], "ext_backward": []}
    series0 = None
    for i in range(cfg.ensemble):
        data = ch.random_exterior_data(grid, a, rng)
        proj = ch.project_pi_a(data.u, data.ut, a)
        worst_ortho = max(worst_ortho, proj.orthogonality_residual)
        res = ch.channel_experiment(data, a, T)
        ratios.append(res["ratio"])
        member_rows["member"].append(i)
        member_rows["ratio"].append(res["ratio"])
        member_rows["pi_norm2"].append(res["pi_norm2"])
        member_rows["pi_perp_norm2"].append(res["pi_perp_norm2"])
        member_rows["ext_forward"].append(res["exterior_forward"][-1])
        member_rows["ext_backward"].append(res["exterior_backward"][-1])
        if series0 is None:
            series0 = res

    fam = {}
    # finer grid than the ensemble needs: the cone comparison is an absolute 1e-8 check
    h_fam = min(0.008, a / 100.0)
    grid_fam = RadialGrid.uniform(r_max, int(round(r_max / h_fam)) + 1)
    for which, exact in (("static", lambda t, r: r**-3.0),
                         ("velocity", lambda t, r: t * r**-3.0)):
        d = ch.newton_family_data(grid_fam, a, which)
        res = ch.channel_experiment(d, a, T, data_tail="newton", freeze_outer=6)
        fin = res["final_forward"]
        cone = fin.u.grid.r >= a + fin.t
        cone_err = float(np.max(np.abs(fin.u.values[cone]
                                       - exact(fin.t, fin.u.grid.r[cone]))))
        fam[which] = {"cone_error": cone_err, "degenerate": res["degenerate"]}

    finite = [r for r in ratios if np.isfinite(r)]
    p5 = float(np.percentile(finite, 5.0)) if finite else 0.0
    ok = (worst_ortho < 1e-8 and p5 > 0.0
          and fam["static"]["cone_error"] < 1e-8 and fam["static"]["degenerate"]
          and fam["velocity"]["cone_error"] < 1e-8 and fam["velocity"]["degenerate"])
    meta = meta_block(cfg.echo(), grid_signature=grid.signature(), seed=cfg.seed)
    if cfg.emit_csv:
        write_csv(out / f"channels_a{a:g}.csv",
                  {"t": series0["times"], "exterior_forward": series0["exterior_forward"],
                   "exterior_backward": series0["exterior_backward"]}, meta)
        write_csv(out / f"channel_members_a{a:g}.csv", member_rows, meta)
    if cfg.emit_json:
        write_json(out / "channel_constant.json",
                   {"a": a, "t_channel": T, "count": cfg.ensemble,
                    "ratio_percentile_5": p5,
                    "ratio_min": float(np.min(finite)) if finite else None,
                    "ratio_median": float(np.median(finite)) if finite else None,
                    "worst_orthogonality_residual": worst_ortho,
                    "families": fam, "pass": ok}, meta)
    print(f"channels a={a:g}: ortho={worst_ortho:.2e} ratio_p5={p5:.4f} "
          f"cone_err=({fam['static']['cone_error']:.2e}, "
          f"{fam['velocity']['cone_error']:.2e}) [{'PASS' if ok else 'FAIL'}]")
    return EXIT_PASS if ok else EXIT_ASSERT


def scenario_blowup_residual(cfg: RunConfig) -> int:
    out = _out_dir(cfg)
    rng = np.random.default_rng(cfg.seed)
    ts = rng.uniform(0.05, 5.0, cfg.samples)
    rs = rng.uniform(0.05, 5.0, cfg.samples)
    resid = np.array([ev.wavemap_residual(t, r) for t, r in zip(ts, rs)])
    control = abs(ev.wavemap_residual(1.0, 1.0, time_power=2))
    worst = float(np.max(np.abs(resid)))
    ok = worst < 1e-12 and control > 0.1
    meta = meta_block(cfg.echo(), seed=cfg.seed)
    if cfg.emit_csv:
        write_csv(out / "blowup_residuals.csv",
                  {"t": ts, "r": rs, "residual": resid}, meta)
    if cfg.emit_json:
        write_json(out / "blowup_residual.json",
                   {"max_abs_residual": worst, "negative_control": control,
                    "samples": cfg.samples, "pass": ok}, meta)
    print(f"blowup-residual: max|res|={worst:.3e} control={control:.3f} "
          f"[{'PASS' if ok else 'FAIL'}]")
    return EXIT_PASS if ok else EXIT_ASSERT


_SCENARIOS = {
    "stationary": scenario_stationary,
    "spectrum": scenario_spectrum,
    "evolve": scenario_evolve,
    "stability": scenario_stability,
    "channels": scenario_channels,
    "blowup-residual": scenario_blowup_residual,
}


def run_scenario(cfg: RunConfig) -> int:
    """Dispatch one validated config; returns the exit code."""
    if cfg.scenario not in _SCENARIOS:
        raise ConfigError(f"unknown scenario {cfg.scenario!r} (key: scenario)")
    return _SCENARIOS[cfg.scenario](cfg)


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def _sweep_entry(args):
    idx, cfg = args
    try:
        code = run_scenario(cfg)
    except (st.SolveFailure, st.ConvergenceFailure, ev.EvolveInstability,
            ArithmeticError) as exc:
        print(f"sweep[{idx}]: numerical failure: {exc}")
        code = EXIT_NUMERICAL
    return idx, code


def scenario_sweep(cfg: RunConfig, param: str, values: list, workers: int) -> int:
    """Run cfg.scenario once per parameter value, each entry in its own worker."""
    entries = []
    for i, v in enumerate(values):
        sub = build_config(cfg.echo(), {param: v,
                                        "out_dir": str(Path(cfg.out_dir) / f"sweep_{i:03d}")})
        entries.append((i, sub))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = sorted(pool.map(_sweep_entry, entries))
    else:
        results = [_sweep_entry(e) for e in entries]
    codes = [c for _, c in results]
    write_json(Path(cfg.out_dir) / "sweep.json",
               {"scenario": cfg.scenario, "param": param,
                "values": values, "exit_codes": codes},
               meta_block(cfg.echo(), seed=cfg.seed))
    return max(codes) if codes else EXIT_PASS


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", type=str, default=None, help="flat key=value config file")
    p.add_argument("--out", type=str, default=None, help="output directory")
    p.add_argument("--seed", type=int, default=None, help="random seed")
    p.add_argument("--n", type=str, default=None,
                   help="degree or comma-separated degrees (overrides 'degrees')")
    p.add_argument("--nodes", type=int, default=None)
    p.add_argument("--r-max", dest="r_max", type=float, default=None)
    p.add_argument("--cfl", type=float, default=None)
    p.add_argument("--t-final", dest="t_final", type=float, default=None)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--r0", type=float, default=None)
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--t-channel", dest="t_channel", type=float, default=None)
    p.add_argument("--ensemble", type=int, default=None)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--boundary", type=str, default=None)
    p.add_argument("--snapshots", action="store_true", help="emit field snapshots")


def _make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anwaves",
        description="Stationary profiles, spectral checks, 5d evolution, and "
                    "exterior-energy channels for equivariant Adkins-Nappi wave maps.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _SCENARIOS:
        p = sub.add_parser(name, help=f"run the {name} scenario")
        _add_common(p)
    p = sub.add_parser("sweep", help="run a scenario over a parameter list")
    _add_common(p)
    p.add_argument("--scenario", type=str, required=True, choices=sorted(_SCENARIOS))
    p.add_argument("--param", type=str, required=True, help="swept key, e.g. eps")
    p.add_argument("--values", type=str, required=True, help="comma-separated values")
    p.add_argument("--workers", type=int, default=1)
    return parser


def _overrides_from_args(args: argparse.Namespace) -> dict:
    ov = {}
    mapping = {"out": "out_dir", "n": "degrees", "snapshots": "emit_snapshots"}
    for attr in ("out", "seed", "n", "nodes", "r_max", "cfl", "t_final", "eps", "r0",
                 "sigma", "a", "t_channel", "ensemble", "samples", "boundary"):
        val = getattr(args, attr, None)
        if val is not None:
            ov[mapping.get(attr, attr)] = val
    if getattr(args, "snapshots", False):
        ov["emit_snapshots"] = True
    return ov


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = _make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        file_values = parse_config(args.config) if args.config else {}
        overrides = _overrides_from_args(args)
        if "out_dir" not in overrides and "out_dir" not in file_values:
            env_out = os.environ.get("ANWAVES_OUT")
            if env_out:
                overrides["out_dir"] = env_out
        cfg = build_config(file_values, overrides)
        if args.command == "sweep":
            cfg.scenario = args.scenario
            cfg.validate()
            values = [v for v in args.values.split(",") if v]
            return scenario_sweep(cfg, args.param, values, args.workers)
        cfg.scenario = args.command
        cfg.validate()
        return run_scenario(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (st.SolveFailure, st.ConvergenceFailure, ev.EvolveInstability,
            ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
