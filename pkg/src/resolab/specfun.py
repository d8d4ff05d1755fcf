"""Real-argument Airy functions Ai, Bi and their derivatives.

Inside ``|x| <= 10`` values come from exact local Taylor expansions of the
Airy equation ``y'' = x y`` around a table of nodes spaced 0.25 apart.  The
node values are generated once at import by stepping the same expansion:
Bi forward from the origin, Ai backward from x = 10 (where the asymptotic
series is accurate to ~1e-18), and both towards the negative axis from the
closed forms at the origin.  Each stepping direction follows the dominant
solution, so no cancellation builds up.  Outside ``|x| <= 10`` the standard
asymptotic expansions are used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma

from .errors import DomainError, RangeError

__all__ = ["AiryValue", "airy_eval", "airy_scaled_tail", "AIRY_RANGE"]

AIRY_RANGE = (-100.0, 100.0)

_AI0 = 1.0 / (3.0 ** (2.0 / 3.0) * gamma(2.0 / 3.0))
_AIP0 = -1.0 / (3.0 ** (1.0 / 3.0) * gamma(1.0 / 3.0))
_BI0 = 1.0 / (3.0 ** (1.0 / 6.0) * gamma(2.0 / 3.0))
_BIP0 = 3.0 ** (1.0 / 6.0) / gamma(1.0 / 3.0)

_SQRT_PI = math.sqrt(math.pi)

_X_TABLE = 10.0
_NODE_STEP = 0.25
_NODES = np.arange(-_X_TABLE, _X_TABLE + 0.5 * _NODE_STEP, _NODE_STEP)
_TAYLOR_DEGREE = 28
_STEP_DEGREE = 45


@dataclass(frozen=True)
class AiryValue:
    """Values of Ai, Ai', Bi, Bi' at one argument (or an array of them)."""

    ai: float | np.ndarray
    aip: float | np.ndarray
    bi: float | np.ndarray
    bip: float | np.ndarray

    def wronskian(self):
        """Ai*Bi' - Ai'*Bi, identically 1/pi."""
        return self.ai * self.bip - self.aip * self.bi


def _taylor_coefficients(x0, y0, yp0, degree):
    a = np.zeros(degree + 1)
    a[0] = y0
    a[1] = yp0
    a[2] = 0.5 * x0 * y0
    for n in range(3, degree + 1):
        a[n] = (x0 * a[n - 2] + a[n - 3]) / (n * (n - 1))
    return a


def _taylor_step(x0, y0, yp0, delta):
    a = _taylor_coefficients(x0, y0, yp0, _STEP_DEGREE)
    n = np.arange(_STEP_DEGREE + 1)
    powers = delta ** n
    y = float(np.dot(a, powers))
    yp = float(np.dot(a[1:] * n[1:], powers[:-1]))
    return y, yp


# --- asymptotic expansions -------------------------------------------------

def _asymptotic_coefficients(count):
    u = np.empty(count)
    v = np.empty(count)
    u[0] = v[0] = 1.0
    for k in range(1, count):
        u[k] = u[k - 1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k)
        v[k] = -(6 * k + 1) / (6 * k - 1) * u[k]
    return u, v


def _truncation_length(zeta_min):
    # stop just past the smallest term at the smallest zeta the branch sees
    u, _ = _asymptotic_coefficients(80)
    terms = np.abs(u) / zeta_min ** np.arange(80)
    below = np.nonzero(terms < 1e-18)[0]
    if below.size:
        return int(below[0]) + 1
    return int(np.argmin(terms)) + 1


_ZETA_MIN = (2.0 / 3.0) * _X_TABLE ** 1.5
_NTERMS = _truncation_length(_ZETA_MIN)
_U, _V = _asymptotic_coefficients(_NTERMS)


def _series(coeffs, inv_zeta, sign):
    """sum_k sign**k * coeffs[k] * inv_zeta**k by Horner's rule."""
    acc = np.zeros_like(inv_zeta)
    for k in range(len(coeffs) - 1, -1, -1):
        acc = acc * inv_zeta * sign + coeffs[k]
    return acc


def _asym_positive(x):
    zeta = (2.0 / 3.0) * x ** 1.5
    iz = 1.0 / zeta
    q = x ** 0.25
    su_alt = _series(_U, iz, -1.0)
    sv_alt = _series(_V, iz, -1.0)
    su = _series(_U, iz, 1.0)
    sv = _series(_V, iz, 1.0)
    em = np.exp(-zeta)
    ep = np.exp(zeta)
    ai = em / (2.0 * _SQRT_PI * q) * su_alt
    aip = -q * em / (2.0 * _SQRT_PI) * sv_alt
    bi = ep / (_SQRT_PI * q) * su
    bip = q * ep / _SQRT_PI * sv
    return ai, aip, bi, bip


def _asym_negative(x):
    """Values at -x for x > 0."""
    zeta = (2.0 / 3.0) * x ** 1.5
    iz2 = 1.0 / zeta ** 2
    q = x ** 0.25
    ue, uo = _U[0::2], _U[1::2]
    ve, vo = _V[0::2], _V[1::2]
    pu = _series(ue, iz2, -1.0)
    qu = _series(uo, iz2, -1.0) / zeta
    pv = _series(ve, iz2, -1.0)
    qv = _series(vo, iz2, -1.0) / zeta
    phase = zeta - 0.25 * math.pi
    c = np.cos(phase)
    s = np.sin(phase)
    ai = (c * pu + s * qu) / (_SQRT_PI * q)
    bi = (-s * pu + c * qu) / (_SQRT_PI * q)
    aip = q * (s * pv - c * qv) / _SQRT_PI
    bip = q * (c * pv + s * qv) / _SQRT_PI
    return ai, aip, bi, bip


# --- node table ------------------------------------------------------------

def _build_table():
    n = len(_NODES)
    i0 = int(round(_X_TABLE / _NODE_STEP))
    ai = np.empty(n)
    aip = np.empty(n)
    bi = np.empty(n)
    bip = np.empty(n)
    ai[i0], aip[i0], bi[i0], bip[i0] = _AI0, _AIP0, _BI0, _BIP0
    for i in range(i0, 0, -1):
        x0 = _NODES[i]
        ai[i - 1], aip[i - 1] = _taylor_step(x0, ai[i], aip[i], -_NODE_STEP)
        bi[i - 1], bip[i - 1] = _taylor_step(x0, bi[i], bip[i], -_NODE_STEP)
    for i in range(i0, n - 1):
        bi[i + 1], bip[i + 1] = _taylor_step(_NODES[i], bi[i], bip[i], _NODE_STEP)
    a_end, ap_end, _, _ = _asym_positive(np.array([_X_TABLE]))
    ai[-1], aip[-1] = float(a_end[0]), float(ap_end[0])
    for i in range(n - 1, i0 + 1, -1):
        ai[i - 1], aip[i - 1] = _taylor_step(_NODES[i], ai[i], aip[i], -_NODE_STEP)
    ai_c = np.array([_taylor_coefficients(x0, a, ap, _TAYLOR_DEGREE)
                     for x0, a, ap in zip(_NODES, ai, aip)])
    bi_c = np.array([_taylor_coefficients(x0, b, bp, _TAYLOR_DEGREE)
                     for x0, b, bp in zip(_NODES, bi, bip)])
    return ai_c, bi_c


_AI_COEF, _BI_COEF = _build_table()


def _table_eval(coef, x):
    idx = np.rint((x + _X_TABLE) / _NODE_STEP).astype(np.intp)
    d = x - _NODES[idx]
    c = coef[idx]
    y = np.zeros_like(x)
    yp = np.zeros_like(x)
    for n in range(_TAYLOR_DEGREE, 0, -1):
        y = y * d + c[:, n]
        yp = yp * d + n * c[:, n]
    y = y * d + c[:, 0]
    return y, yp


def airy_eval(x):
    """Evaluate Ai, Ai', Bi, Bi' at real ``x`` (scalar or array).

    Accurate to about 1e-14 relative on the supported range
    ``AIRY_RANGE``; arguments outside it raise :class:`RangeError`.
    """
    scalar = np.ndim(x) == 0
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if not np.all(np.isfinite(xa)):
        raise RangeError("Airy argument must be finite")
    lo, hi = AIRY_RANGE
    if np.any(xa < lo) or np.any(xa > hi):
        bad = xa[(xa < lo) | (xa > hi)][0]
        raise RangeError(f"Airy argument {bad!r} outside supported range [{lo}, {hi}]")

    ai = np.empty_like(xa)
    aip = np.empty_like(xa)
    bi = np.empty_like(xa)
    bip = np.empty_like(xa)

    mid = np.abs(xa) <= _X_TABLE
    if np.any(mid):
        xm = xa[mid]
        ai[mid], aip[mid] = _table_eval(_AI_COEF, xm)
        bi[mid], bip[mid] = _table_eval(_BI_COEF, xm)
    pos = xa > _X_TABLE
    if np.any(pos):
        ai[pos], aip[pos], bi[pos], bip[pos] = _asym_positive(xa[pos])
    neg = xa < -_X_TABLE
    if np.any(neg):
        ai[neg], aip[neg], bi[neg], bip[neg] = _asym_negative(-xa[neg])

    if scalar:
        return AiryValue(float(ai[0]), float(aip[0]), float(bi[0]), float(bip[0]))
    return AiryValue(ai, aip, bi, bip)


def airy_scaled_tail(x):
    """Return ``(log|Ai(x)|, log|Bi(x)|)`` for ``x >= 4`` without overflow.

    Valid for arbitrarily large ``x``; used to place quadrature cutoffs.
    """
    scalar = np.ndim(x) == 0
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(~np.isfinite(xa)) or np.any(xa < 4.0):
        raise DomainError("airy_scaled_tail requires finite x >= 4")
    log_ai = np.empty_like(xa)
    log_bi = np.empty_like(xa)
    near = xa <= _X_TABLE
    if np.any(near):
        v = airy_eval(xa[near])
        log_ai[near] = np.log(v.ai)
        log_bi[near] = np.log(v.bi)
    far = ~near
    if np.any(far):
        xf = xa[far]
        zeta = (2.0 / 3.0) * xf ** 1.5
        iz = 1.0 / zeta
        base = -0.25 * np.log(xf) - math.log(_SQRT_PI)
        log_ai[far] = -zeta + base - math.log(2.0) + np.log(_series(_U, iz, -1.0))
        log_bi[far] = zeta + base + np.log(_series(_U, iz, 1.0))
    if scalar:
        return float(log_ai[0]), float(log_bi[0])
    return log_ai, log_bi
