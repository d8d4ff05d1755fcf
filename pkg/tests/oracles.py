"""Reference computations that share no code with the package.

Airy values and crossing integrals come from mpmath; single-channel
eigenvalues from a real-axis shooting method on scipy's ``solve_ivp``.
"""

from __future__ import annotations

import math

import mpmath as mp
import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

mp.mp.dps = 30


def airy_mp(x):
    x = mp.mpf(x)
    return (float(mp.airyai(x)), float(mp.airyai(x, derivative=1)),
            float(mp.airybi(x)), float(mp.airybi(x, derivative=1)))


def _ai(x, d=0):
    return mp.airyai(x, derivative=d)


def _bi(x, d=0):
    return mp.airybi(x, derivative=d)


_FUNCS = {"ai": lambda z: _ai(z), "aip": lambda z: _ai(z, 1),
          "bi": lambda z: _bi(z), "bip": lambda z: _bi(z, 1)}


def half_line_mp(first, second, side, t, tau1, tau2):
    """``int F(tau1^{1/3}(y - t/tau1)) G(-tau2^{1/3}(y + t/tau2)) dy`` over a half-line."""
    t, tau1, tau2 = mp.mpf(t), mp.mpf(tau1), mp.mpf(tau2)
    c1, c2 = mp.cbrt(tau1), mp.cbrt(tau2)
    f, g = _FUNCS[first], _FUNCS[second]

    def integrand(y):
        return f(c1 * (y - t / tau1)) * g(-c2 * (y + t / tau2))

    if side == "R":
        pts = [0] + [mp.mpf(k) for k in range(1, 13)] + [mp.inf]
    else:
        pts = [-mp.inf] + [mp.mpf(-k) for k in range(12, 0, -1)] + [0]
    return float(mp.quad(integrand, pts))


def mu1_mp(t, tau1, tau2):
    return half_line_mp("ai", "ai", "R", t, tau1, tau2)


def rational_v1(x, c=1.0, xstar=-1.0):
    return c * x * (x - xstar) / np.sqrt(1.0 + x ** 4)


def action0_mp(c=1.0, xstar=-1.0):
    """``int_{x*}^0 sqrt(-V1)`` with ``t = x*(1 - s^2)`` removing the endpoint roots."""
    xs = mp.mpf(xstar)

    def v1(x):
        return c * x * (x - xs) / mp.sqrt(1 + x ** 4)

    return float(mp.quad(lambda t: mp.sqrt(-v1(t)), [xs, xs / 2, 0]))


def action_prime0_mp(c=1.0, xstar=-1.0):
    """``int_{x*}^0 dt / (2 sqrt(-V1))`` split at the midpoint.

    Near ``x*`` substitute ``t = x*(1 - s^2)``, near 0 ``t = -s^2``; the
    factor ``s`` cancels analytically and both integrands are smooth.
    """
    xs = mp.mpf(xstar)
    a = -xs
    c = mp.mpf(c)

    def left(s):
        t = xs * (1 - s ** 2)
        return mp.root(1 + t ** 4, 4) / mp.sqrt(c * (1 - s ** 2))

    def right(s):
        t = -s ** 2
        return mp.root(1 + t ** 4, 4) / mp.sqrt(c * (a - s ** 2))

    return float(mp.quad(left, [0, mp.sqrt(mp.mpf(1) / 2)])
                 + mp.quad(right, [0, mp.sqrt(a / 2)]))


def single_channel_eigenvalue(h, e_guess, half_width, *, v=rational_v1, x_left=-6.0,
                              x_right=6.0, x_match=-0.5):
    """Eigenvalue of ``-h^2 u'' + V u`` on the real line near ``e_guess``.

    Shoots decaying solutions from both ends to ``x_match`` and finds the
    zero of their normalised Wronskian by Brent's method in
    ``[e_guess - half_width, e_guess + half_width]``.
    """

    def rhs(x, y, e):
        return [y[1] / h, (v(x) - e) * y[0] / h]

    def side(e, x0):
        q = math.sqrt(v(x0) - e)
        p = q if x0 < x_match else -q
        sol = solve_ivp(rhs, (x0, x_match), [1.0, p], args=(e,), method="DOP853",
                        rtol=1e-13, atol=1e-300)
        u, pp = sol.y[:, -1]
        n = math.hypot(u, pp)
        return u / n, pp / n

    def mismatch(e):
        ul, pl = side(e, x_left)
        ur, pr = side(e, x_right)
        return ul * pr - pl * ur

    return brentq(mismatch, e_guess - half_width, e_guess + half_width, xtol=1e-16,
                  rtol=8.9e-16, maxiter=200)
