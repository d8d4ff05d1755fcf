"""Airy cross-product integrals attached to a transversal level crossing.

All integrals are of the form

    int  F(tau1^{1/3} (y - t/tau1)) * G(-tau2^{1/3} (y + t/tau2)) dy

over a half-line, with ``F, G`` drawn from ``Ai, Ai', Bi, Bi'``.  On the
half-line used, one factor always decays super-exponentially, so the
integrals are computed as finite panelled Gauss sums up to a cutoff placed
where the product envelope drops below 1e-18.  Panels are no longer than
half the local Airy wavelength of either factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import RangeError
from .quadrature import panel_gauss
from .specfun import airy_eval, airy_scaled_tail

__all__ = [
    "SlopePair",
    "CrossingIntegrals",
    "mu",
    "nu",
    "nu_sum",
    "full_line_product",
    "airy_product_closed_form",
    "airy_product_derivative",
    "crossing_integrals",
    "T_MAX",
]

T_MAX = 10.0
_QUAD_TOL = 1e-12
_LOG_TAIL = math.log(1e-18)


@dataclass(frozen=True)
class SlopePair:
    """Crossing slopes ``V1'(0) = tau1`` and ``V2'(0) = -tau2``.

    ``tau3`` is derived (``1/tau3 = 1/tau1 + 1/tau2``) and cannot be set.
    """

    tau1: float
    tau2: float
    tau3: float = field(init=False)

    def __post_init__(self):
        if not (self.tau1 > 0 and self.tau2 > 0):
            raise ValueError("slopes tau1, tau2 must be positive")
        object.__setattr__(self, "tau3", 1.0 / (1.0 / self.tau1 + 1.0 / self.tau2))

    def swapped(self):
        return SlopePair(self.tau2, self.tau1)


@dataclass(frozen=True)
class CrossingIntegrals:
    """All crossing integrals at one rescaled energy ``t``."""

    t: float
    mu1: float
    mu2: float
    nuA1R: float
    nuB1R: float
    nuA2R: float
    nuB2R: float
    nuA1L: float
    nuB1L: float
    nuA2L: float
    nuB2L: float


# (first factor, second factor) per (j, side, kind); first is evaluated at
# tau1^{1/3}(y - t/tau1), second at -tau2^{1/3}(y + t/tau2)
_NU_FACTORS = {
    (1, "R", "A"): ("aip", "ai"),
    (1, "R", "B"): ("aip", "bi"),
    (2, "R", "A"): ("ai", "aip"),
    (2, "R", "B"): ("ai", "bip"),
    (1, "L", "A"): ("aip", "ai"),
    (1, "L", "B"): ("bip", "ai"),
    (2, "L", "A"): ("ai", "aip"),
    (2, "L", "B"): ("bi", "aip"),
}


def _check_t(t):
    if not np.isfinite(t) or abs(t) > T_MAX:
        raise RangeError(f"|t| = {abs(t)!r} exceeds the calibrated range {T_MAX}")


def _log_envelope(z, which):
    """Upper bound for log|F(z)| used to place the tail cutoff."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    big = z >= 4.0
    if np.any(big):
        la, lb = airy_scaled_tail(z[big])
        base = la if which in ("ai", "aip") else lb
        if which in ("aip", "bip"):
            base = base + 0.5 * np.log(z[big]) + 0.1
        out[big] = base
    small = ~big
    if np.any(small):
        amp = np.maximum(np.abs(z[small]), 1.0)
        extra = 0.5 if which in ("aip", "bip") else 0.0
        # Bi grows on (0, 4); 4 is a safe bound there
        out[small] = (0.25 + extra) * np.log(amp) + (math.log(4.0) if which[0] == "b" else 0.0)
    return out


def _half_line(first, second, side, t, slopes, tol):
    c1 = slopes.tau1 ** (1.0 / 3.0)
    c2 = slopes.tau2 ** (1.0 / 3.0)
    s1 = t / slopes.tau1
    s2 = t / slopes.tau2
    sign = 1.0 if side == "R" else -1.0

    def args(y):
        return c1 * (y - s1), -c2 * (y + s2)

    # march outwards until the product envelope has died
    y = 0.0
    edges = [0.0]
    while True:
        a, b = args(y)
        wave = max(c1 * math.sqrt(abs(a)), c2 * math.sqrt(abs(b)), 1.0)
        step = min(1.0, 0.5 * math.pi / wave)
        y_next = y + sign * step
        edges.append(y_next)
        a2, b2 = args(np.array([y_next]))
        env = _log_envelope(a2, first)[0] + _log_envelope(b2, second)[0]
        # the decaying factor must be the one whose argument is large
        decaying = a2[0] if side == "R" else b2[0]
        if env < _LOG_TAIL and decaying > 4.0:
            break
        y = y_next
    edges = np.array(edges)
    if side == "L":
        edges = edges[::-1]

    def integrand(yy):
        a, b = args(yy)
        fa = getattr(airy_eval(a.ravel()), first).reshape(a.shape)
        fb = getattr(airy_eval(b.ravel()), second).reshape(b.shape)
        return fa * fb

    return panel_gauss(integrand, edges, tol=tol).value


def nu(j, side, kind, t, slopes, *, tol=_QUAD_TOL):
    """One of the eight half-line integrals ``nu^{kind}_{j,side}(t)``.

    Side ``"R"`` integrates over ``[0, inf)``, side ``"L"`` over
    ``(-inf, 0]``.
    """
    _check_t(t)
    key = (int(j), str(side).upper(), str(kind).upper())
    if key not in _NU_FACTORS:
        raise ValueError(f"no integral nu^{key[2]}_{key[0]},{key[1]}")
    first, second = _NU_FACTORS[key]
    return _half_line(first, second, key[1], float(t), slopes, tol)


def mu(j, t, slopes, *, tol=_QUAD_TOL):
    """``mu_j(t)``: Ai*Ai over ``[0, inf)``.

    ``mu_1`` places ``tau1`` on the decaying factor; ``mu_2`` is ``mu_1``
    with the two slopes exchanged.
    """
    _check_t(t)
    if j == 1:
        return _half_line("ai", "ai", "R", float(t), slopes, tol)
    if j == 2:
        return _half_line("ai", "ai", "R", float(t), slopes.swapped(), tol)
    raise ValueError("j must be 1 or 2")


def nu_sum(j, t, slopes, *, tol=_QUAD_TOL):
    """``nu^A_{j,R}(t) + nu^A_{j,L}(t)``, the full-line kind-A integral."""
    return nu(j, "R", "A", t, slopes, tol=tol) + nu(j, "L", "A", t, slopes, tol=tol)


def full_line_product(t, slopes, *, tol=_QUAD_TOL):
    """Full-line ``int Ai(tau1^{1/3}(y - t/tau1)) Ai(-tau2^{1/3}(y + t/tau2)) dy``.

    Computed as the left half-line plus the right half-line.
    """
    _check_t(t)
    t = float(t)
    return (_half_line("ai", "ai", "R", t, slopes, tol)
            + _half_line("ai", "ai", "L", t, slopes, tol))


def airy_product_closed_form(t, slopes):
    """Closed form ``(tau1 + tau2)^{-1/3} Ai(-tau3^{-2/3} t)`` of the full-line integral."""
    _check_t(t)
    z = -slopes.tau3 ** (-2.0 / 3.0) * t
    return (slopes.tau1 + slopes.tau2) ** (-1.0 / 3.0) * airy_eval(z).ai


def airy_product_derivative(t, slopes):
    """Closed form of ``nu_sum(1) * nu_sum(2)``:
    ``tau3^{1/3} / (tau1 + tau2) * Ai'(-tau3^{-2/3} t)^2``."""
    _check_t(t)
    z = -slopes.tau3 ** (-2.0 / 3.0) * t
    return slopes.tau3 ** (1.0 / 3.0) / (slopes.tau1 + slopes.tau2) * airy_eval(z).aip ** 2


def crossing_integrals(t, slopes, *, tol=_QUAD_TOL):
    """Evaluate ``mu_1, mu_2`` and all eight ``nu`` integrals at ``t``."""
    vals = {f"nu{kind}{j}{side}": nu(j, side, kind, t, slopes, tol=tol)
            for (j, side, kind) in _NU_FACTORS}
    return CrossingIntegrals(t=float(t), mu1=mu(1, t, slopes, tol=tol),
                             mu2=mu(2, t, slopes, tol=tol), **vals)
