"""Time evolution of the reduced 5d semilinear wave equation.

The perturbation u of a degree-n profile (psi = Q + r u) is advanced by a
classical RK4 method of lines:

    u_tt = u_rr + (4/r) u_r - V(r) u - Z(r, u)        (coupled)
    u_tt = u_rr + (4/r) u_r                           (free)

on a uniform radial grid containing the origin, with even-parity ghost
extension of (u, u_t) through r = 0 and 4th-order centered stencils.  The
default outer boundary is causal padding: the grid ends far enough out
that nothing reflected can reach the diagnostics window within the run;
an optional sponge layer damps outgoing waves for long runs.

Monitors recorded along the run: the conserved energy of the azimuth
angle psi, the pair Sobolev norms, the local 5d energy on {r <= A}, and
the accumulating time integrals of the scattering (Strichartz-type) norm
S = L^3_t W^{1,30/7} cap L^5_t W^{1,50/13}.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import CubicSpline

from . import nonlinearity as nl
from .radial import (PairState, RadialField, RadialGrid, deriv1_samples,
                     deriv2_samples, sobolev_norms, wkp_norm)
from .stationary import StationaryMap

__all__ = [
    "EvolutionConfig",
    "DiagnosticSeries",
    "CouplingData",
    "EvolveInstability",
    "build_coupling",
    "nonlinearity_Z",
    "rhs",
    "evolve",
    "conserved_energy",
    "local_energy",
    "free_energy",
    "psi_from_u",
    "u_from_psi",
    "strichartz_S",
    "wavemap_residual",
    "gaussian_bump",
]

CFL_DEFAULT = 0.5


class EvolveInstability(RuntimeError):
    """Raised when the run loses stability; carries partial diagnostics."""

    def __init__(self, message, series=None, t_last=None):
        super().__init__(message)
        self.series = series
        self.t_last = t_last


@dataclass(frozen=True)
class CouplingData:
    """Profile data interpolated onto the evolution grid."""

    smap: StationaryMap
    Q: np.ndarray
    Q_r: np.ndarray
    q_over_r: np.ndarray
    V: np.ndarray
    zcoef: dict

    @property
    def n(self) -> int:
        return self.smap.n


def build_coupling(smap: StationaryMap, grid: RadialGrid) -> CouplingData:
    """Interpolate Q onto `grid` and precompute V and the Z coefficient arrays."""
    prof = smap.profile()
    r = grid.r
    Q = prof(r)
    q = prof.q_over_r(r)
    qs = prof.sinq_over_r(r)
    V = nl.potential_values(Q, q, qs)
    zcoef = nl.z_coefficients(r, Q, q, qs)
    return CouplingData(smap, Q, prof.deriv(r), q, V, zcoef)


def nonlinearity_Z(r: float, u: float, smap: StationaryMap) -> float:
    """Pointwise nonlinearity Z(r, u) about the given profile."""
    prof = smap.profile()
    ra = np.atleast_1d(float(r))
    coef = nl.z_coefficients(ra, prof(ra), prof.q_over_r(ra), prof.sinq_over_r(ra))
    return float(nl.evaluate_Z(np.atleast_1d(float(u)), ra, coef)[0])


@dataclass(frozen=True)
class EvolutionConfig:
    grid: RadialGrid
    t_final: float
    coupling: str = "free"               # "free" | "adkins_nappi"
    smap: StationaryMap | None = None    # required for adkins_nappi
    cfl: float = CFL_DEFAULT
    dt: float | None = None
    cfl_max: float = CFL_DEFAULT
    boundary: str = "padding"            # "padding" | "sponge"
    sponge_width: float = 0.1            # fraction of the domain
    sponge_strength: float = 5.0
    sample_every: int = 10
    r_local: float = 2.0
    snapshot_times: tuple = ()
    check_padding: bool = True
    # nodes at the outer edge held at zero acceleration; imposes the exact
    # static-tail behavior for non-compact Newton-type data (both P(a)
    # families have u_tt = 0), harmless for padded compact data
    freeze_outer: int = 0

    def __post_init__(self):
        if not self.grid.includes_origin:
            raise ValueError("evolution grid must include the origin")
        if self.coupling not in ("free", "adkins_nappi"):
            raise ValueError(f"unknown coupling {self.coupling!r}")
        if self.coupling == "adkins_nappi" and self.smap is None:
            raise ValueError("adkins_nappi coupling needs a stationary profile")
        if self.boundary not in ("padding", "sponge"):
            raise ValueError(f"unknown boundary {self.boundary!r}")
        step = self.dt if self.dt is not None else self.cfl * self.grid.h
        if step / self.grid.h > self.cfl_max * (1 + 1e-12):
            raise ValueError(f"dt/h = {step / self.grid.h:.3f} exceeds cfl_max = {self.cfl_max}")
        if self.check_padding and self.boundary == "padding" \
                and self.grid.r_max < self.r_local + self.t_final:
            raise ValueError("padding rule violated: r_max < r_local + t_final")

    @property
    def step(self) -> float:
        return self.dt if self.dt is not None else self.cfl * self.grid.h


@dataclass
class DiagnosticSeries:
    """Per-sample monitors of one run."""

    times: list = field(default_factory=list)
    energy: list = field(default_factory=list)
    h1_l2: list = field(default_factory=list)
    h2_h1: list = field(default_factory=list)
    h_norm: list = field(default_factory=list)
    local_energy: list = field(default_factory=list)
    s3_accum: list = field(default_factory=list)   # int ||u||^3_{W^{1,30/7}} dt
    s5_accum: list = field(default_factory=list)   # int ||u||^5_{W^{1,50/13}} dt
    exterior: list = field(default_factory=list)   # optional, see exterior_a

    def as_arrays(self) -> dict:
        return {k: np.asarray(v) for k, v in self.__dict__.items()}


# ---------------------------------------------------------------------------
# right-hand side
# ---------------------------------------------------------------------------

def _laplacian5(u: np.ndarray, r: np.ndarray, h: float) -> np.ndarray:
    ur = deriv1_samples(u, h, "even")
    urr = deriv2_samples(u, h, "even")
    out = np.empty_like(u)
    out[1:] = urr[1:] + 4.0 * ur[1:] / r[1:]
    out[0] = 5.0 * urr[0]
    return out


def _accel(u: np.ndarray, r: np.ndarray, h: float, coupling: CouplingData | None) -> np.ndarray:
    a = _laplacian5(u, r, h)
    if coupling is not None:
        a -= coupling.V * u + nl.evaluate_Z(u, r, coupling.zcoef)
    return a


def rhs(state: PairState, config: EvolutionConfig) -> PairState:
    """(u_t, Lap5 u - V u - Z(r, u)) as a PairState-shaped derivative."""
    if state.u.parity != "even":
        raise ValueError("evolution state must be even at the origin")
    g = state.grid
    coupling = None
    if config.coupling == "adkins_nappi":
        coupling = build_coupling(config.smap, g)
    if not np.all(np.isfinite(state.u.values)) or not np.all(np.isfinite(state.ut.values)):
        raise EvolveInstability("non-finite state", t_last=state.t)
    a = _accel(state.u.values, g.r, g.h, coupling)
    return PairState(RadialField(g, state.ut.values, "even"),
                     RadialField(g, a, "even"), state.t)


# ---------------------------------------------------------------------------
# energies
# ---------------------------------------------------------------------------

def conserved_energy(psi: PairState, n_degree: int | None = None) -> float:
    """Energy of the azimuth angle: E = 1/2 int (psi_t^2 + psi_r^2 + 2 sin^2 psi / r^2
    + (psi - sin psi cos psi)^2 / r^4) r^2 dr.

    `psi` holds (psi, psi_t) as an odd-parity pair on a uniform origin
    grid.  Beyond the grid the static series tail (degree inferred from
    psi(r_max) unless given) is added in closed form.
    """
    g = psi.grid
    r = g.r
    p = psi.u.values
    pt = psi.ut.values
    pr = deriv1_samples(p, g.h, "odd" if g.includes_origin else None)
    p_over_r = np.empty_like(p)
    if g.includes_origin:
        p_over_r[0] = pr[0]
        p_over_r[1:] = p[1:] / r[1:]
    else:
        p_over_r = p / r
    A_over_r = nl.a_over_q3(p) * p**2 * p_over_r      # (psi - sin psi cos psi)/r
    integrand = (pt**2 + pr**2) * r**2 + 2.0 * np.sin(p) ** 2 + A_over_r**2
    core = 0.5 * simpson(integrand, x=r)
    n = n_degree if n_degree is not None else int(round(p[-1] / np.pi))
    tail = 0.0
    if n != 0:
        alpha_t = (n * np.pi - p[-1]) * r[-1] ** 2
        tail = (n * np.pi) ** 2 / (2.0 * r[-1]) + alpha_t**2 / r[-1] ** 3
    return float(core + tail)


def free_energy(state: PairState) -> float:
    """5d energy 1/2 int (u_t^2 + u_r^2) r^4 dr of the perturbation itself."""
    g = state.grid
    ur = deriv1_samples(state.u.values, g.h, "even" if g.includes_origin else None)
    integrand = (state.ut.values**2 + ur**2) * g.r**4
    return float(0.5 * simpson(integrand, x=g.r))


def local_energy(state: PairState, radius: float) -> float:
    """int_{r <= radius} (u_t^2 + u_r^2) r^4 dr."""
    g = state.grid
    ur = deriv1_samples(state.u.values, g.h, "even" if g.includes_origin else None)
    mask = g.r <= radius
    integrand = (state.ut.values**2 + ur**2) * g.r**4
    return float(simpson(integrand[mask], x=g.r[mask]))


def exterior_energy_values(state: PairState, a: float) -> float:
    """int_{a}^{r_max} (u_t^2 + u_r^2) r^4 dr (base for the channel diagnostics)."""
    g = state.grid
    if a >= g.r_max:
        return 0.0
    ur = deriv1_samples(state.u.values, g.h, "even" if g.includes_origin else None)
    dens = (state.ut.values**2 + ur**2) * g.r**4
    spl = CubicSpline(g.r, dens)
    return float(spl.integrate(max(a, g.r_min), g.r_max))


# ---------------------------------------------------------------------------
# conversions psi <-> u
# ---------------------------------------------------------------------------

def psi_from_u(state: PairState, smap: StationaryMap) -> PairState:
    """psi = Q + r u, psi_t = r u_t (odd-parity pair)."""
    g = state.grid
    prof = smap.profile()
    psi = prof(g.r) + g.r * state.u.values
    psi_t = g.r * state.ut.values
    return PairState(RadialField(g, psi, "odd"), RadialField(g, psi_t, "odd"), state.t)


def _odd_limit_over_r(w: np.ndarray, h: float) -> float:
    """lim_{r->0} w(r)/r for an odd profile: 8th-order derivative at the node r = 0."""
    return (8.0 / 5.0 * w[1] - 2.0 / 5.0 * w[2]
            + 8.0 / 105.0 * w[3] - 1.0 / 140.0 * w[4]) / h


def u_from_psi(psi: PairState, smap: StationaryMap) -> PairState:
    """u = (psi - Q)/r, u_t = psi_t / r.

    The difference psi - Q vanishes linearly at r = 0; the origin values
    are its odd-parity derivatives there, taken at 8th order so the
    round trip through psi_from_u is an identity to ~1e-12.
    """
    g = psi.grid
    prof = smap.profile()
    w = psi.u.values - prof(g.r)
    wt = psi.ut.values
    u = np.empty_like(w)
    ut = np.empty_like(w)
    if g.includes_origin:
        u[1:] = w[1:] / g.r[1:]
        ut[1:] = wt[1:] / g.r[1:]
        u[0] = _odd_limit_over_r(w, g.h)
        ut[0] = _odd_limit_over_r(wt, g.h)
    else:
        u = w / g.r
        ut = wt / g.r
    return PairState(RadialField(g, u, "even"), RadialField(g, ut, "even"), psi.t)


# ---------------------------------------------------------------------------
# time stepping
# ---------------------------------------------------------------------------

def _sponge_profile(grid: RadialGrid, width_frac: float, strength: float) -> np.ndarray:
    r_s = grid.r_max * (1.0 - width_frac)
    s = np.clip((grid.r - r_s) / (grid.r_max - r_s), 0.0, 1.0)
    return strength * s**3


def evolve(initial: PairState, config: EvolutionConfig,
           exterior_a: float | None = None):
    """Advance to t_final with classical RK4; returns (series, final_state, snapshots).

    Diagnostics are sampled every `sample_every` steps (and at the start
    and end).  The run aborts with EvolveInstability if the monitored
    energy grows by more than 10% or the state loses finiteness.  With
    `exterior_a` set, the exterior energy beyond a + |t| is recorded per
    sample (used by the channel experiments).
    """
    g = config.grid
    if initial.u.parity != "even" or initial.ut.parity != "even":
        raise ValueError("initial data must be even at the origin")
    r = g.r
    h = g.h
    dt = config.step
    n_steps = int(np.ceil(config.t_final / dt - 1e-12))
    coupling = build_coupling(config.smap, g) if config.coupling == "adkins_nappi" else None
    sponge = _sponge_profile(g, config.sponge_width, config.sponge_strength) \
        if config.boundary == "sponge" else None

    u = initial.u.values.copy()
    v = initial.ut.values.copy()
    t = initial.t

    def acc(uu, vv):
        a = _accel(uu, r, h, coupling)
        if sponge is not None:
            a -= sponge * vv
        if config.freeze_outer:
            a[-config.freeze_outer:] = 0.0
        return a

    series = DiagnosticSeries()
    snapshots = {}
    snap_left = sorted(config.snapshot_times)
    e_ref = None

    def sample(tt, uu, vv):
        nonlocal e_ref
        state = PairState(RadialField(g, uu, "even"), RadialField(g, vv, "even"), tt)
        if coupling is not None:
            e = conserved_energy(psi_from_u(state, coupling.smap), n_degree=coupling.n)
        else:
            e = free_energy(state)
        norms = sobolev_norms(state)
        series.times.append(tt)
        series.energy.append(e)
        series.h1_l2.append(norms["h1_l2"])
        series.h2_h1.append(norms["h2_h1"])
        series.h_norm.append(norms["h_norm"])
        series.local_energy.append(local_energy(state, config.r_local))
        w3 = wkp_norm(state.u, 30.0 / 7.0)
        w5 = wkp_norm(state.u, 50.0 / 13.0)
        if series.s3_accum:
            dt_s = tt - series.times[-2]
            series.s3_accum.append(series.s3_accum[-1] + 0.5 * dt_s * (w3**3 + sample.w3_prev**3))
            series.s5_accum.append(series.s5_accum[-1] + 0.5 * dt_s * (w5**5 + sample.w5_prev**5))
        else:
            series.s3_accum.append(0.0)
            series.s5_accum.append(0.0)
        sample.w3_prev, sample.w5_prev = w3, w5
        if exterior_a is not None:
            series.exterior.append(exterior_energy_values(state, exterior_a + abs(tt)))
        if e_ref is None:
            e_ref = e
        scale = max(abs(e_ref), 1e-30)
        if not np.isfinite(e) or (e - e_ref) > 0.1 * scale:
            raise EvolveInstability(
                f"energy grew {(e - e_ref) / scale:.1%} by t = {tt:.4f}",
                series=series, t_last=tt)

    sample(t, u, v)
    for step_i in range(n_steps):
        dt_i = min(dt, config.t_final - t)
        k1u, k1v = v, acc(u, v)
        u2, v2 = u + 0.5 * dt_i * k1u, v + 0.5 * dt_i * k1v
        k2u, k2v = v2, acc(u2, v2)
        u3, v3 = u + 0.5 * dt_i * k2u, v + 0.5 * dt_i * k2v
        k3u, k3v = v3, acc(u3, v3)
        u4, v4 = u + dt_i * k3u, v + dt_i * k3v
        k4u, k4v = v4, acc(u4, v4)
        u = u + dt_i / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        v = v + dt_i / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        t = t + dt_i
        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
            raise EvolveInstability("state lost finiteness",
                                    series=series, t_last=t - dt_i)
        last = step_i == n_steps - 1
        if (step_i + 1) % config.sample_every == 0 or last:
            sample(t, u, v)
        while snap_left and t >= snap_left[0] - 0.5 * dt_i:
            snapshots[snap_left.pop(0)] = PairState(
                RadialField(g, u.copy(), "even"), RadialField(g, v.copy(), "even"), t)
    final = PairState(RadialField(g, u, "even"), RadialField(g, v, "even"), t)
    return series, final, snapshots


def strichartz_S(series: DiagnosticSeries) -> float:
    """Scattering norm from the accumulated time integrals:
    max( (int ||u||^3)^{1/3}, (int ||u||^5)^{1/5} )  (intersection convention)."""
    if not series.s3_accum:
        return 0.0
    return float(max(series.s3_accum[-1] ** (1.0 / 3.0), series.s5_accum[-1] ** (1.0 / 5.0)))


# ---------------------------------------------------------------------------
# self-similar blow-up residual (negative benchmark)
# ---------------------------------------------------------------------------

def wavemap_residual(t: float, r: float, time_power: int = 1) -> float:
    """Pure wave-map operator applied to the profile 2 arctan(r / t^k).

    With k = 1 this is the exact self-similar blow-up solution of
    psi_tt - psi_rr - (2/r) psi_r + sin(2 psi)/r^2 = 0 and the residual
    vanishes identically; k != 1 serves as a negative control.  Analytic
    derivatives throughout; t = 0 is the blow-up time (domain error).
    """
    if t == 0:
        raise ValueError("blow-up time t = 0")
    if r <= 0:
        raise ValueError("radius must be positive")
    k = time_power
    w = r / t**k
    one = 1.0 + w * w
    psi_tt = 2.0 * k * (k + 1.0) * w / (t**2 * one) - 4.0 * k**2 * w**3 / (t**2 * one**2)
    psi_rr = -4.0 * w / (t ** (2 * k) * one**2)
    two_over_r_psi_r = 4.0 / (w * t ** (2 * k) * one)
    sin2psi_over_r2 = 4.0 * (1.0 - w * w) / (w * t ** (2 * k) * one**2)
    return float(psi_tt - psi_rr - two_over_r_psi_r + sin2psi_over_r2)


def gaussian_bump(grid: RadialGrid, eps: float, r0: float = 1.0, sigma: float = 0.25) -> PairState:
    """Standard perturbation family: u0 = eps exp(-((r - r0)/sigma)^2), u1 = 0."""
    u0 = eps * np.exp(-((grid.r - r0) / sigma) ** 2)
    return PairState(RadialField(grid, u0, "even"),
                     RadialField(grid, np.zeros(grid.n), "even"), 0.0)
