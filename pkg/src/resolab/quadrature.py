"""Quadrature rules used by the action and crossing-integral modules.

Two rules live here:

* :func:`tanh_sinh` -- double-exponential quadrature on a finite interval,
  insensitive to algebraic endpoint singularities.  The integrand may
  optionally receive the distances to both endpoints, computed without
  cancellation from the complement of the tanh map.
* :func:`panel_gauss` -- Gauss-Legendre on a user-supplied panel partition
  with an embedded lower-order rule as error estimate and adaptive bisection
  of panels that fail the tolerance.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import ConvergenceError

__all__ = ["tanh_sinh", "panel_gauss", "QuadResult"]


class QuadResult(tuple):
    """``(value, error_estimate)`` with named access."""

    __slots__ = ()

    def __new__(cls, value, error):
        return super().__new__(cls, (value, error))

    @property
    def value(self):
        return self[0]

    @property
    def error(self):
        return self[1]


_TS_TMAX = 4.5  # sqrt(1 - |u|) < 1e-30 beyond this, enough for 1/sqrt endpoint singularities


@lru_cache(maxsize=None)
def _ts_level(level):
    """Abscissae (as u and 1-|u|) and weights of the nodes new at ``level``."""
    step = 2.0 ** -level
    if level == 0:
        k = np.arange(-int(_TS_TMAX), int(_TS_TMAX) + 1)
    else:
        kmax = int(_TS_TMAX / step)
        k = np.arange(-kmax, kmax + 1)
        k = k[k % 2 != 0]
    t = k * step
    s = 0.5 * math.pi * np.sinh(t)
    q = np.exp(-2.0 * np.abs(s))
    comp = 2.0 * q / (1.0 + q)               # 1 - |u|, no cancellation
    u = np.sign(t) * (1.0 - comp)
    w = 0.5 * math.pi * np.cosh(t) * 4.0 * q / (1.0 + q) ** 2
    return u, comp, w


def tanh_sinh(f, a, b, *, tol=1e-14, max_level=10, min_level=3,
              endpoint_distances=False):
    """Integrate ``f`` over ``[a, b]`` with tanh-sinh quadrature.

    Parameters
    ----------
    f : callable
        Vectorised integrand.  Called as ``f(x)`` or, with
        ``endpoint_distances=True``, as ``f(x, x - a, b - x)`` where the two
        distances are accurate even when ``x`` rounds to an endpoint.
    a, b : float
        Finite interval.
    tol : float
        Relative stopping tolerance on successive level estimates.

    Returns
    -------
    QuadResult
        Value and the last level-to-level change.

    Raises
    ------
    ConvergenceError
        If ``max_level`` halvings do not reach ``tol``.
    """
    if a == b:
        return QuadResult(0.0, 0.0)
    half = 0.5 * (b - a)

    def level_sum(level):
        u, comp, w = _ts_level(level)
        pos = u > 0
        dl = np.where(pos, half * (2.0 - comp), half * comp)
        dr = np.where(pos, half * comp, half * (2.0 - comp))
        x = np.where(pos, b - dr, a + dl)
        vals = f(x, dl, dr) if endpoint_distances else f(x)
        vals = np.where(w > 0, vals, 0.0)
        return float(np.sum(w * vals))

    total = level_sum(0)
    estimate = half * total
    for level in range(1, max_level + 1):
        total += level_sum(level)
        new = half * total * 2.0 ** -level
        change = abs(new - estimate)
        estimate = new
        if level >= min_level and change <= tol * max(abs(new), 1e-300):
            return QuadResult(new, change)
    if change <= 10 * tol * max(abs(estimate), 1e-300):
        return QuadResult(estimate, change)
    raise ConvergenceError(f"tanh-sinh did not converge: last change {change:.3e}")


@lru_cache(maxsize=None)
def _gauss(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def panel_gauss(f, edges, *, tol=1e-12, order=24, max_depth=12):
    """Integrate ``f`` over the union of panels ``edges[i]..edges[i+1]``.

    Every panel is evaluated with Gauss-Legendre of ``order`` nodes and of
    ``order // 2 + 2`` nodes; panels whose two estimates differ by more
    than their share of ``tol`` (absolute) are bisected.

    Returns
    -------
    QuadResult
        Value and the summed absolute panel error estimates.
    """
    edges = np.asarray(edges, dtype=float)
    lo = edges[:-1]
    hi = edges[1:]
    xh, wh = _gauss(order)
    xl, wl = _gauss(order // 2 + 2)
    span = float(abs(edges[-1] - edges[0])) or 1.0
    value = 0.0
    error = 0.0
    for _ in range(max_depth + 1):
        c = 0.5 * (lo + hi)
        r = 0.5 * (hi - lo)
        fh = f(c[:, None] + r[:, None] * xh[None, :])
        fl = f(c[:, None] + r[:, None] * xl[None, :])
        ih = r * (fh @ wh)
        il = r * (fl @ wl)
        err = np.abs(ih - il)
        # each panel may use the fraction of tol proportional to its width
        ok = err <= tol * (2.0 * np.abs(r)) / span
        value += float(np.sum(ih[ok]))
        error += float(np.sum(err[ok]))
        lo, hi = lo[~ok], hi[~ok]
        c = c[~ok]
        lo, hi = np.concatenate([lo, c]), np.concatenate([c, hi])
        if lo.size == 0:
            break
    else:
        raise ConvergenceError("panel_gauss exceeded maximum bisection depth")
    return QuadResult(value, error)
