"""Pointwise closed forms of the reduced 5d wave equation.

Writing the azimuth angle as psi = Q(r) + r u(t, r) about a degree-n
stationary profile Q turns the equivariant equation into a radial
semilinear wave equation on R^{1+5},

    u_tt - u_rr - (4/r) u_r + V(r) u + Z(r, u) = 0,

with a potential V and a nonlinearity Z = u^2 Z2(r) + u^3 Z3(r, ru)
+ u^4 Z4(r, ru) + u^5 Z5(ru).  This module evaluates V and the Z pieces
in a cancellation-free way: every trig combination that vanishes to high
order at small argument is computed through a dedicated factor function
with a Taylor branch (coefficients below are exact rationals).

The decomposition implemented here satisfies, identically in (r, u) and
for any profile Q,

    V u + Z(r, u) = -2u/r^2 + [N(Q + ru) - N(Q)] / r,

where N(psi) = sin(2 psi)/r^2 + (psi - sin psi cos psi)(1 - cos 2 psi)/r^4
is the full stationary nonlinearity; the tests verify this against
high-precision arithmetic.

Conventions: q = Q/r and qs = sin(Q)/r are supplied by the caller (both
have finite limits Q'(0) at the origin).
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "k_sin2",
    "k_1mcos2",
    "k_sin4",
    "k_cos2",
    "k_cos4",
    "k_mixed",
    "z5_factor",
    "qz2_factor",
    "gprime_over_q4",
    "a_over_q3",
    "potential_values",
    "z_coefficients",
    "evaluate_Z",
]

# switch to the Taylor branch below these argument sizes; both branches
# agree to ~1e-12 at the switch point
PHI_SMALL = 0.05
Q_SMALL = 0.15


def _branched(arg, direct, coeffs, small=PHI_SMALL):
    """Evaluate direct(arg) for |arg| >= small, a Horner series in arg^2 below."""
    a = np.asarray(arg, dtype=float)
    scalar = a.ndim == 0
    a = np.atleast_1d(a)
    out = np.empty_like(a)
    mask = np.abs(a) < small
    if np.any(~mask):
        out[~mask] = direct(a[~mask])
    if np.any(mask):
        y = a[mask] ** 2
        acc = np.full_like(y, coeffs[-1])
        for c in reversed(coeffs[:-1]):
            acc = acc * y + c
        out[mask] = acc
    return out[0] if scalar else out


# -- factors in phi = r*u ---------------------------------------------------

def k_sin2(phi):
    """(sin 2phi - 2 phi) / phi^3  ->  -4/3."""
    return _branched(
        phi, lambda p: (np.sin(2 * p) - 2 * p) / p**3,
        (-4 / 3, 4 / 15, -8 / 315, 4 / 2835, -8 / 155925, 8 / 6081075))


def k_1mcos2(phi):
    """(1 - cos 2phi) / phi^2  ->  2."""
    return _branched(
        phi, lambda p: 2 * np.sin(p) ** 2 / p**2,
        (2.0, -2 / 3, 4 / 45, -2 / 315, 4 / 14175, -4 / 467775))


def k_sin4(phi):
    """(sin 4phi - 4 phi) / phi^3  ->  -32/3."""
    return _branched(
        phi, lambda p: (np.sin(4 * p) - 4 * p) / p**3,
        (-32 / 3, 128 / 15, -1024 / 315, 2048 / 2835, -16384 / 155925, 65536 / 6081075))


def k_cos2(phi):
    """(cos 2phi - 1 + 2 phi^2) / phi^4  ->  2/3."""
    return _branched(
        phi, lambda p: (np.cos(2 * p) - 1 + 2 * p**2) / p**4,
        (2 / 3, -4 / 45, 2 / 315, -4 / 14175, 4 / 467775, -8 / 42567525))


def k_cos4(phi):
    """(cos 4phi - 1 + 8 phi^2) / phi^4  ->  32/3."""
    return _branched(
        phi, lambda p: (np.cos(4 * p) - 1 + 8 * p**2) / p**4,
        (32 / 3, -256 / 45, 512 / 315, -4096 / 14175, 16384 / 467775, -131072 / 42567525))


def k_mixed(phi):
    """(phi sin 2phi + (1 - cos 2phi)/2 - 3 phi^2) / phi^4  ->  -5/3."""
    return _branched(
        phi, lambda p: (p * np.sin(2 * p) + np.sin(p) ** 2 - 3 * p**2) / p**4,
        (-5 / 3, 14 / 45, -1 / 35, 22 / 14175, -26 / 467775, 4 / 2837835))


def z5_factor(phi):
    """Quintic kernel (phi - sin 2phi / 2 - phi cos 2phi + sin 4phi / 4) / phi^5 -> 4/3.

    This equals (phi - sin phi cos phi)(1 - cos 2phi) / phi^5 exactly.
    """
    return _branched(
        phi, lambda p: (p - np.sin(2 * p) / 2 - p * np.cos(2 * p) + np.sin(4 * p) / 4) / p**5,
        (4 / 3, -32 / 45, 164 / 945, -368 / 14175, 1256 / 467775, -3968 / 19348875))


# -- factors in Q -----------------------------------------------------------

def qz2_factor(Q):
    """(2Q cos 2Q + 3 sin 2Q - 2 sin 4Q) / Q^3  ->  40/3."""
    return _branched(
        Q, lambda q: (2 * q * np.cos(2 * q) + 3 * np.sin(2 * q) - 2 * np.sin(4 * q)) / q**3,
        (40 / 3, -224 / 15, 656 / 105, -4048 / 2835, 32656 / 155925, -3968 / 184275),
        small=Q_SMALL)


def _tg(Q):
    """(Q cos Q - sin Q cos 2Q) / Q^3  ->  5/3."""
    return _branched(
        Q, lambda q: (q * np.cos(q) - np.sin(q) * np.cos(2 * q)) / q**3,
        (5 / 3, -29 / 30, 181 / 840, -1229 / 45360, 44281 / 19958400, -671 / 5241600),
        small=Q_SMALL)


def gprime_over_q4(Q):
    """(1 - 2 cos 2Q + 2Q sin 2Q + cos 4Q) / Q^4  ->  20/3.

    Uses the exact factorization 4 sin Q (Q cos Q - sin Q cos 2Q) of the
    numerator, which removes the cancellation near every multiple of pi.
    """
    Q = np.asarray(Q, dtype=float)
    return 4.0 * np.sinc(Q / np.pi) * _tg(Q)


def a_over_q3(Q):
    """(Q - sin Q cos Q) / Q^3  ->  2/3."""
    return _branched(
        Q, lambda q: (q - np.sin(2 * q) / 2) / q**3,
        (2 / 3, -2 / 15, 4 / 315, -2 / 2835, 4 / 155925, -4 / 6081075),
        small=Q_SMALL)


# -- assembled potential and nonlinearity ------------------------------------

def potential_values(Q, q, qs):
    """Linearization potential V = 2(cos 2Q - 1)/r^2 + g'(Q)/r^4.

    Evaluated as -4 qs^2 + q^4 * (g'(Q)/Q^4) with q = Q/r, qs = sin(Q)/r,
    so it is finite at the origin and free of cancellation for r large.
    """
    Q = np.asarray(Q, dtype=float)
    return -4.0 * np.asarray(qs) ** 2 + np.asarray(q) ** 4 * gprime_over_q4(Q)


def z_coefficients(r, Q, q, qs):
    """Radial coefficient arrays of the nonlinearity decomposition.

    Returns a dict of arrays keyed by term: ``z2`` multiplies u^2; ``c31``..
    ``c34`` multiply u^3 times the kernels (k_sin2, k_1mcos2, k_sin2,
    k_sin4); ``c41``..``c44`` multiply u^4 times (k_cos2, k_cos4, k_cos2,
    k_mixed).  The quintic coefficient is 1 (kernel z5_factor).
    """
    Q = np.asarray(Q, dtype=float)
    q = np.asarray(q, dtype=float)
    qs = np.asarray(qs, dtype=float)
    r = np.asarray(r, dtype=float)
    cosQ = np.cos(Q)
    c = np.cos(2 * Q)
    s = np.sin(2 * Q)
    s_over_r = 2.0 * qs * cosQ            # sin(2Q)/r
    return {
        "z2": -2.0 * s_over_r + q**3 * qz2_factor(Q),
        "c31": c,                          # cos 2Q
        "c32": -2.0 * qs**2,               # (cos 2Q - 1)/r^2
        "c33": 2.0 * q * qs * cosQ + qs**2,    # (2Q sin 2Q + 1 - cos 2Q)/(2 r^2)
        "c34": -2.0 * (qs * cosQ) ** 2,    # (cos 4Q - 1)/(4 r^2)
        "c41": r * s,                      # r sin 2Q
        "c42": qs * cosQ * c,              # sin 4Q / (4 r)
        "c43": -q * c,                     # -Q cos 2Q / r
        "c44": s_over_r,                   # sin 2Q / r
    }


def evaluate_Z(u, r, coef):
    """Z(r, u) from precomputed coefficients (vectorized over nodes)."""
    u = np.asarray(u, dtype=float)
    phi = np.asarray(r, dtype=float) * u
    u2 = u * u
    cubic = (coef["c31"] + coef["c33"]) * k_sin2(phi) + coef["c32"] * k_1mcos2(phi) \
        + coef["c34"] * k_sin4(phi)
    quartic = (coef["c41"] + coef["c43"]) * k_cos2(phi) + coef["c42"] * k_cos4(phi) \
        + coef["c44"] * k_mixed(phi)
    return u2 * (coef["z2"] + u * (cubic + u * (quartic + u * z5_factor(phi))))
