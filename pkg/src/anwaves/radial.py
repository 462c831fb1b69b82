"""Radial grids and discrete calculus.

Everything downstream works with radial profiles f(r) sampled on one of two
grid families:

* uniform grids in r that include the origin (used by the time evolution;
  fields carry a parity so stencils can be reflected through r = 0), and
* grids uniform in the logarithmic coordinate x = log r (used by the
  stationary ODE, whose equation is asymptotically autonomous in x).

This module supplies first/second derivatives (4th order in the interior,
2nd-order one-sided at edges, parity-aware at the origin), the radial
Laplacian in d = 3 and d = 5, weighted quadrature of integrals
``int f(r) r^k dr``, and the Sobolev/Lebesgue norms used as run monitors.

All functions are pure; nothing here mutates its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

__all__ = [
    "RadialGrid",
    "RadialField",
    "PairState",
    "differentiate",
    "second_derivative",
    "radial_laplacian",
    "weighted_integral",
    "sobolev_norms",
    "wkp_norm",
]


@dataclass(frozen=True)
class RadialGrid:
    """Strictly increasing radial nodes, uniform in r or in x = log r.

    Attributes
    ----------
    r : np.ndarray
        Node radii.  ``r[0] == 0`` is allowed only for ``coord == "r"``.
    coord : str
        ``"r"`` for uniform spacing in r, ``"log"`` for uniform spacing in
        x = log r.
    """

    r: np.ndarray
    coord: str = "r"

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        object.__setattr__(self, "r", r)
        if r.ndim != 1 or r.size < 5:
            raise ValueError("grid needs at least 5 nodes")
        if np.any(np.diff(r) <= 0):
            raise ValueError("grid nodes must be strictly increasing")
        if self.coord not in ("r", "log"):
            raise ValueError(f"unknown grid coordinate {self.coord!r}")
        if self.coord == "log" and r[0] <= 0:
            raise ValueError("log grid requires r_min > 0")
        if self.coord == "r" and r[0] < 0:
            raise ValueError("negative radius")
        x = np.log(r) if self.coord == "log" else r
        steps = np.diff(x)
        h = steps[0]
        if not np.allclose(steps, h, rtol=1e-10, atol=0.0):
            raise ValueError("grid must be uniform in its native coordinate")
        object.__setattr__(self, "_h", float(h))

    @property
    def h(self) -> float:
        """Spacing in the native coordinate (r or x = log r)."""
        return self._h

    @property
    def n(self) -> int:
        return self.r.size

    @property
    def r_min(self) -> float:
        return float(self.r[0])

    @property
    def r_max(self) -> float:
        return float(self.r[-1])

    @property
    def includes_origin(self) -> bool:
        return self.coord == "r" and self.r[0] == 0.0

    def signature(self) -> str:
        """Short descriptive string used in output file headers."""
        return f"{self.coord}:[{self.r_min:.9g},{self.r_max:.9g}]:n={self.n}"

    @staticmethod
    def uniform(r_max: float, n: int) -> "RadialGrid":
        """Uniform grid on [0, r_max] with n nodes (origin included)."""
        return RadialGrid(np.linspace(0.0, r_max, n), coord="r")

    @staticmethod
    def loguniform(r_min: float, r_max: float, n: int) -> "RadialGrid":
        """Grid with n nodes uniform in log r on [r_min, r_max]."""
        if r_min <= 0:
            raise ValueError("log grid requires r_min > 0")
        return RadialGrid(np.exp(np.linspace(np.log(r_min), np.log(r_max), n)), coord="log")


@dataclass(frozen=True)
class RadialField:
    """Values of a radial profile on a grid, with parity at the origin.

    Parity ('even' | 'odd' | None) only matters for origin-containing
    grids, where it fixes the ghost extension used by the stencils.
    """

    grid: RadialGrid
    values: np.ndarray
    parity: str | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if v.shape != self.grid.r.shape:
            raise ValueError("field/grid size mismatch")
        if not np.all(np.isfinite(v)):
            raise ValueError("field contains non-finite values")
        if self.parity not in (None, "even", "odd"):
            raise ValueError(f"unknown parity {self.parity!r}")

    def with_values(self, values: np.ndarray) -> "RadialField":
        return RadialField(self.grid, values, self.parity)


@dataclass(frozen=True)
class PairState:
    """Cauchy pair (u, u_t) on a shared grid at time t."""

    u: RadialField
    ut: RadialField
    t: float = 0.0

    def __post_init__(self):
        if self.u.grid is not self.ut.grid and not np.array_equal(self.u.grid.r, self.ut.grid.r):
            raise ValueError("pair components must share one grid")

    @property
    def grid(self) -> RadialGrid:
        return self.u.grid


# ---------------------------------------------------------------------------
# low-level stencils on uniformly spaced samples
# ---------------------------------------------------------------------------

def deriv1_samples(f: np.ndarray, h: float, parity: str | None = None) -> np.ndarray:
    """First derivative of uniformly spaced samples, 4th order throughout.

    Centered stencils in the interior, one-sided 4th-order stencils at the
    edges.  With even/odd parity the sample f[0] sits at the symmetry point
    and ghost values f[-k] = +/- f[k] replace the one-sided left edge.
    """
    d = np.empty_like(f)
    d[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / (12.0 * h)
    d[-2] = (3.0 * f[-1] + 10.0 * f[-2] - 18.0 * f[-3] + 6.0 * f[-4] - f[-5]) / (12.0 * h)
    d[-1] = (25.0 * f[-1] - 48.0 * f[-2] + 36.0 * f[-3]
             - 16.0 * f[-4] + 3.0 * f[-5]) / (12.0 * h)
    if parity == "even":
        d[0] = 0.0
        d[1] = (f[1] - 8.0 * f[0] + 8.0 * f[2] - f[3]) / (12.0 * h)
    elif parity == "odd":
        d[0] = (16.0 * f[1] - 2.0 * f[2]) / (12.0 * h)
        d[1] = (-f[1] - 8.0 * f[0] + 8.0 * f[2] - f[3]) / (12.0 * h)
    else:
        d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2]
                + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h)
        d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h)
    return d


def deriv2_samples(f: np.ndarray, h: float, parity: str | None = None) -> np.ndarray:
    """Second derivative; same stencil orders and parity handling as above."""
    if f.size < 6:
        raise ValueError("second derivative needs at least 6 samples")
    h2 = h * h
    d = np.empty_like(f)
    d[2:-2] = (-f[:-4] + 16.0 * f[1:-3] - 30.0 * f[2:-2] + 16.0 * f[3:-1] - f[4:]) / (12.0 * h2)
    d[-2] = (10.0 * f[-1] - 15.0 * f[-2] - 4.0 * f[-3] + 14.0 * f[-4]
             - 6.0 * f[-5] + f[-6]) / (12.0 * h2)
    d[-1] = (45.0 * f[-1] - 154.0 * f[-2] + 214.0 * f[-3] - 156.0 * f[-4]
             + 61.0 * f[-5] - 10.0 * f[-6]) / (12.0 * h2)
    if parity == "even":
        d[0] = (-30.0 * f[0] + 32.0 * f[1] - 2.0 * f[2]) / (12.0 * h2)
        d[1] = (16.0 * f[0] - 30.0 * f[1] + 16.0 * f[2] - f[3] - f[1]) / (12.0 * h2)
    elif parity == "odd":
        d[0] = 0.0
        d[1] = (16.0 * f[0] - 30.0 * f[1] + 16.0 * f[2] - f[3] + f[1]) / (12.0 * h2)
    else:
        d[0] = (45.0 * f[0] - 154.0 * f[1] + 214.0 * f[2] - 156.0 * f[3]
                + 61.0 * f[4] - 10.0 * f[5]) / (12.0 * h2)
        d[1] = (10.0 * f[0] - 15.0 * f[1] - 4.0 * f[2] + 14.0 * f[3]
                - 6.0 * f[4] + f[5]) / (12.0 * h2)
    return d


# ---------------------------------------------------------------------------
# field-level operations
# ---------------------------------------------------------------------------

def differentiate(f: RadialField) -> RadialField:
    """d f / d r, parity-aware at an origin node.

    On log grids the chain rule f_r = f_x / r is applied after stencils in x.
    The derivative flips parity (even -> odd and vice versa).
    """
    g = f.grid
    if g.coord == "log":
        fx = deriv1_samples(f.values, g.h, None)
        vals = fx / g.r
        return RadialField(g, vals, None)
    parity = f.parity if g.includes_origin else None
    vals = deriv1_samples(f.values, g.h, parity)
    out_parity = {"even": "odd", "odd": "even"}.get(f.parity or "", None)
    return RadialField(g, vals, out_parity)


def second_derivative(f: RadialField) -> RadialField:
    """d^2 f / d r^2 with the same stencil treatment as `differentiate`."""
    g = f.grid
    if g.coord == "log":
        fx = deriv1_samples(f.values, g.h, None)
        fxx = deriv2_samples(f.values, g.h, None)
        return RadialField(g, (fxx - fx) / g.r**2, None)
    parity = f.parity if g.includes_origin else None
    return RadialField(g, deriv2_samples(f.values, g.h, parity), f.parity)


def radial_laplacian(f: RadialField, d: int) -> RadialField:
    """f_rr + ((d-1)/r) f_r for d in {3, 5}.

    At an origin node the removable singularity is evaluated as d * f_rr(0),
    which requires even parity there.
    """
    if d not in (3, 5):
        raise ValueError("dimension must be 3 or 5")
    g = f.grid
    if g.coord == "log":
        fx = deriv1_samples(f.values, g.h, None)
        fxx = deriv2_samples(f.values, g.h, None)
        return RadialField(g, (fxx + (d - 2) * fx) / g.r**2, None)
    if g.includes_origin:
        if f.parity != "even":
            raise ValueError("radial Laplacian at the origin needs an even field")
        fr = deriv1_samples(f.values, g.h, "even")
        frr = deriv2_samples(f.values, g.h, "even")
        vals = np.empty_like(f.values)
        vals[1:] = frr[1:] + (d - 1) * fr[1:] / g.r[1:]
        vals[0] = d * frr[0]
        return RadialField(g, vals, "even")
    fr = deriv1_samples(f.values, g.h, None)
    frr = deriv2_samples(f.values, g.h, None)
    return RadialField(g, frr + (d - 1) * fr / g.r, None)


def weighted_integral(f: RadialField, k: int, a: float, b: float) -> float:
    """Composite quadrature of ``int_a^b f(r) r^k dr``.

    The integrand is interpolated by a cubic spline in the grid's native
    coordinate and the spline integrated exactly, so the rule is 4th order
    on smooth data.  [a, b] must lie inside the grid extent.
    """
    g = f.grid
    if b < a:
        raise ValueError("integration bounds out of order")
    tol = 1e-12 * max(1.0, abs(g.r_min), abs(g.r_max))
    if a < g.r_min - tol or b > g.r_max + tol:
        raise ValueError(f"interval [{a}, {b}] outside grid [{g.r_min}, {g.r_max}]")
    a = min(max(a, g.r_min), g.r_max)
    b = min(max(b, g.r_min), g.r_max)
    if a == b:
        return 0.0
    if g.coord == "log":
        # int f r^k dr = int f e^{(k+1)x} dx
        x = np.log(g.r)
        integrand = f.values * np.exp((k + 1) * x)
        spl = CubicSpline(x, integrand)
        return float(spl.integrate(np.log(a), np.log(b)))
    integrand = f.values * g.r**k
    spl = CubicSpline(g.r, integrand)
    return float(spl.integrate(a, b))


def _norm_sq(values: np.ndarray, grid: RadialGrid, k: int) -> float:
    return weighted_integral(RadialField(grid, values, None), k, grid.r_min, grid.r_max)


def sobolev_norms(s: PairState) -> dict:
    """Pair norms on R^5 used as evolution monitors.

    Returns a dict with
      ``h1_l2``  = || (u, u_t) ||_{H^1 x L^2},
      ``h2_h1``  = || (u, u_t) ||_{H^2 x H^1},
      ``h_norm`` = max of the two (the intersection-space convention).
    All integrals carry the radial weight r^4; the angular constant is
    dropped throughout, consistently.
    """
    g = s.grid
    ur = differentiate(s.u).values
    lap_u = radial_laplacian(s.u, 5).values
    utr = differentiate(s.ut).values
    u_h1 = _norm_sq(ur**2, g, 4)
    u_h2 = _norm_sq(lap_u**2, g, 4)
    ut_l2 = _norm_sq(s.ut.values**2, g, 4)
    ut_h1 = _norm_sq(utr**2, g, 4)
    h1_l2 = np.sqrt(u_h1 + ut_l2)
    h2_h1 = np.sqrt(u_h2 + ut_h1)
    return {"h1_l2": float(h1_l2), "h2_h1": float(h2_h1), "h_norm": float(max(h1_l2, h2_h1))}


def wkp_norm(f: RadialField, p: float) -> float:
    """Inhomogeneous W^{1,p} norm (int (|f|^p + |f_r|^p) r^4 dr)^{1/p}.

    Used with p = 30/7 and 50/13 by the scattering monitor; any p >= 1 is
    accepted.
    """
    if p < 1:
        raise ValueError("wkp_norm requires p >= 1")
    g = f.grid
    fr = differentiate(f).values
    total = _norm_sq(np.abs(f.values) ** p + np.abs(fr) ** p, g, 4)
    return float(total ** (1.0 / p))
