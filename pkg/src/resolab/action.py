"""Well turning points, the action integral and its energy derivatives."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import ConsistencyError, ConvergenceError, RangeError
from .quadrature import tanh_sinh

__all__ = ["ActionData", "turning_points", "action", "action_derivatives",
           "action_prime_direct", "bohr_sommerfeld_energy"]

_ROOT_TOL = 1e-13
_QUAD_TOL = 1e-14
_BASE_STEP = 5e-3
_LEVELS = 4


@dataclass(frozen=True)
class ActionData:
    """Action and derivatives at ``E = 0``.

    ``a1`` is cross-checked against the direct integral
    ``int dt / (2 sqrt(-V1))``; ``a1_direct`` keeps that value.
    """

    a0: float
    a1: float
    a2: float
    a3: float
    a1_direct: float
    base_step: float = _BASE_STEP
    levels: int = _LEVELS
    root_tol: float = _ROOT_TOL
    quad_tol: float = _QUAD_TOL

    def __post_init__(self):
        if not (self.a0 > 0 and self.a1 > 0):
            raise ConsistencyError(f"action data not positive: a0={self.a0}, a1={self.a1}")

    def taylor(self, e):
        """Third-order Taylor polynomial of the action at 0."""
        return self.a0 + self.a1 * e + self.a2 * e * e / 2.0 + self.a3 * e ** 3 / 6.0


def _check_energy(model, e):
    lo, hi, _, _ = model.energy_window()
    if not (lo < e < hi) or not math.isfinite(e):
        raise RangeError(f"E={e!r} outside the two-turning-point window ({lo:.6g}, {hi:.6g})")


def turning_points(model, e):
    """Return ``(x1star, x1)``: the roots of ``V1 = E`` near ``x*`` and near 0."""
    e = float(e)
    _check_energy(model, e)
    if e == 0.0:
        return float(model.xstar), 0.0
    _, _, x_well, x_peak = model.energy_window()
    f = lambda x: float(model.v1(x)) - e
    left = model.xstar - 1.0
    while f(left) <= 0:
        left = model.xstar - 2.0 * (model.xstar - left)
        if left < -1e6:
            raise RangeError(f"no left turning point for E={e!r}")
    x1star = brentq(f, left, x_well, xtol=1e-16, rtol=8.9e-16, maxiter=400)
    x1 = brentq(f, x_well, x_peak, xtol=1e-16, rtol=8.9e-16, maxiter=400)
    for x in (x1star, x1):
        if abs(f(x)) > _ROOT_TOL:
            raise RangeError(f"turning point residual {abs(f(x)):.2e} at E={e!r}")
    return x1star, x1


def action(model, e, *, tol=_QUAD_TOL):
    """``int_{x1*(E)}^{x1(E)} sqrt(E - V1(t)) dt`` by tanh-sinh quadrature."""
    a, b = turning_points(model, e)
    e = float(e)

    def integrand(t):
        return np.sqrt(np.maximum(e - model.v1(t), 0.0))

    return tanh_sinh(integrand, a, b, tol=tol).value


def action_prime_direct(model, *, tol=_QUAD_TOL):
    """``A'(0) = int_{x*}^0 dt / (2 sqrt(-V1(t)))``.

    The integrand has inverse square-root singularities at both ends; the
    depth ``-V1`` is rebuilt from the exact endpoint distances so the
    quadrature nodes next to the ends keep full relative accuracy.
    """
    c = model.c
    rational = model.family == "rational"

    def integrand(t, dl, dr):
        depth = c * dl * dr
        if rational:
            depth = depth / np.sqrt(1.0 + t ** 4)
        return 0.5 / np.sqrt(depth)

    return tanh_sinh(integrand, float(model.xstar), 0.0, tol=tol,
                     endpoint_distances=True).value


def _richardson(values, order_step=2):
    """Richardson tableau for estimates at steps ``d, d/2, d/4, ...`` with
    even error expansion.  Returns the entry with the smallest estimated
    error and that estimate."""
    n = len(values)
    table = [list(values)]
    for k in range(1, n):
        prev = table[-1]
        fac = 2.0 ** (order_step * k)
        table.append([(fac * prev[i + 1] - prev[i]) / (fac - 1.0) for i in range(len(prev) - 1)])
    best, best_err = table[0][-1], abs(table[0][-1] - table[0][-2])
    for k in range(1, n):
        row = table[k]
        for i in range(len(row)):
            ref = table[k - 1][i + 1]
            err = abs(row[i] - ref)
            if err < best_err:
                best, best_err = row[i], err
    return best, best_err


def action_derivatives(model, *, base_step=_BASE_STEP, levels=_LEVELS, check_tol=1e-6):
    """``A(0)`` and ``A'(0), A''(0), A'''(0)`` by Richardson-extrapolated
    central differences.

    Raises
    ------
    ConsistencyError
        If ``A'(0)`` disagrees with :func:`action_prime_direct` by more than
        ``check_tol`` relative.
    """
    cache = {}

    def a(e):
        if e not in cache:
            cache[e] = action(model, e)
        return cache[e]

    a0 = a(0.0)
    d1, d2, d3 = [], [], []
    for k in range(levels):
        d = base_step / 2 ** k
        ap, am = a(d), a(-d)
        app, amm = a(2 * d), a(-2 * d)
        d1.append((ap - am) / (2 * d))
        d2.append((ap - 2 * a0 + am) / d ** 2)
        d3.append((app - 2 * ap + 2 * am - amm) / (2 * d ** 3))
    a1, _ = _richardson(d1)
    a2, _ = _richardson(d2)
    a3, _ = _richardson(d3)
    direct = action_prime_direct(model)
    if abs(a1 - direct) > check_tol * abs(direct):
        raise ConsistencyError(f"A'(0) by differences {a1!r} vs direct integral {direct!r}")
    return ActionData(a0=a0, a1=a1, a2=a2, a3=a3, a1_direct=direct,
                      base_step=base_step, levels=levels)


def bohr_sommerfeld_energy(model, actions, h, k, *, tol=1e-15, maxiter=50):
    """Real ``E`` with ``A(E) = (k + 1/2) pi h``.

    Newton iteration on the numerical action, with the slope taken from
    the Taylor data in ``actions`` (quadratic accuracy is not needed, the
    residual is evaluated exactly).  Returns ``(E, A'(E))``.
    """
    target = (k + 0.5) * math.pi * h
    e = (target - actions.a0) / actions.a1

    def slope(x):
        return actions.a1 + actions.a2 * x + 0.5 * actions.a3 * x * x

    for _ in range(maxiter):
        lo, hi, _, _ = model.energy_window()
        if not (lo < e < hi):
            raise ConvergenceError(f"Newton iterate {e!r} left the action window")
        step = (action(model, e) - target) / slope(e)
        e -= step
        if abs(step) <= tol * max(1.0, abs(e)):
            d = 1e-4
            deriv = (action(model, e + d) - action(model, e - d)) / (2 * d)
            return e, deriv
    raise ConvergenceError(f"Bohr-Sommerfeld Newton did not converge for k={k}, h={h}")
