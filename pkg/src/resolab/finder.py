"""Resonance search: seeded Muller refinement and argument-principle counts.

All work happens in the rescaled variable ``rho = E h^{-2/3}`` where the
search box is ``[-c0, c0] - i[0, c0 h^{1/3}]`` independently of ``h``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .asymptotics import Resonance, k_window, lambda_k, predict_thm1, predict_thm2
from .coupled_solver import build_mesh, wronskian
from .errors import ConvergenceError, InconclusiveCountError, RangeError, ResolabError

__all__ = ["SearchBox", "FinderResult", "WronskianFunction", "muller", "find_resonances",
           "count_zeros", "counting_box", "seedless_search", "H_RANGE"]

H_RANGE = (5e-3, 0.1)
MULLER_TOL = 1e-12
MULLER_MAXITER = 50
PROXIMITY = 1e-3
# cut positions tried in turn when a cut passes too close to a zero
_SPLIT_FRACTIONS = (0.5, 0.38, 0.62, 0.29, 0.71, 0.45, 0.55)


@dataclass(frozen=True)
class SearchBox:
    """Rectangle in ``rho`` coordinates.

    Built with only ``c0`` and ``h`` it is the box ``[-c0, c0] - i[0, c0 h^{1/3}]``;
    the edges can be overridden for counting and splitting.
    """

    c0: float
    h: float
    re_lo: float | None = None
    re_hi: float | None = None
    im_lo: float | None = None
    im_hi: float | None = None

    def __post_init__(self):
        if not (self.c0 > 0 and self.h > 0):
            raise ValueError("c0 and h must be positive")
        defaults = {"re_lo": -self.c0, "re_hi": self.c0,
                    "im_lo": -self.c0 * self.h ** (1.0 / 3.0), "im_hi": 0.0}
        for name, val in defaults.items():
            if getattr(self, name) is None:
                object.__setattr__(self, name, float(val))
        if not (self.re_lo < self.re_hi and self.im_lo < self.im_hi):
            raise ValueError("empty search box")

    @property
    def corners(self):
        """Counter-clockwise from the lower-left corner."""
        return (complex(self.re_lo, self.im_lo), complex(self.re_hi, self.im_lo),
                complex(self.re_hi, self.im_hi), complex(self.re_lo, self.im_hi))

    def contains(self, rho):
        return self.re_lo <= rho.real <= self.re_hi and self.im_lo <= rho.imag <= self.im_hi

    def energy_corners(self):
        s = self.h ** (2.0 / 3.0)
        return tuple(c * s for c in self.corners)

    def split(self, frac=0.5):
        """Two boxes cut across the longer side at ``frac`` of its length."""
        width = self.re_hi - self.re_lo
        height = self.im_hi - self.im_lo
        kw = dict(c0=self.c0, h=self.h)
        if width >= height:
            mid = self.re_lo + frac * width
            return (SearchBox(re_lo=self.re_lo, re_hi=mid, im_lo=self.im_lo, im_hi=self.im_hi, **kw),
                    SearchBox(re_lo=mid, re_hi=self.re_hi, im_lo=self.im_lo, im_hi=self.im_hi, **kw))
        mid = self.im_lo + frac * height
        return (SearchBox(re_lo=self.re_lo, re_hi=self.re_hi, im_lo=self.im_lo, im_hi=mid, **kw),
                SearchBox(re_lo=self.re_lo, re_hi=self.re_hi, im_lo=mid, im_hi=self.im_hi, **kw))


def counting_box(actions, h, c0):
    """Box used for completeness counts and for the escape check.

    Vertical edges sit halfway between the extreme levels of the window and
    their outside neighbours; the upper edge is lifted to ``+c0 h^{1/3}`` so
    that resonances, which lie just below the real axis, stay well inside.
    """
    ks = k_window(actions, h, c0)
    spacing = math.pi * h ** (1.0 / 3.0) / actions.a1
    if len(ks) == 0:
        lo, hi = -c0, c0
    else:
        lo = lambda_k(actions, h, ks[0]) - 0.5 * spacing
        hi = lambda_k(actions, h, ks[-1]) + 0.5 * spacing
    depth = c0 * h ** (1.0 / 3.0)
    return SearchBox(c0=c0, h=h, re_lo=lo, re_hi=hi, im_lo=-depth, im_hi=depth)


class WronskianFunction:
    """``rho -> w(rho h^{2/3}) exp(log_scale - log_ref)``, analytic in ``rho``.

    Counts evaluations in :attr:`calls`.
    """

    def __init__(self, model, contour, h, *, mesh=None, rtol=None, gs_interval=None):
        kw = {}
        if rtol is not None:
            kw["rtol"] = rtol
        self.model = model
        self.contour = contour
        self.h = float(h)
        self.scale = self.h ** (2.0 / 3.0)
        self.mesh = mesh if mesh is not None else build_mesh(model, contour, h,
                                                             gs_interval=gs_interval, **kw)
        self.calls = 0

    def value(self, rho):
        self.calls += 1
        return wronskian(self.model, self.contour, complex(rho) * self.scale, self.h,
                         mesh=self.mesh)

    def __call__(self, rho, log_ref=0.0):
        v = self.value(rho)
        return v.w * math.exp(v.log_scale - log_ref)


def muller(f, x0, x1, x2, *, tol=MULLER_TOL, maxiter=MULLER_MAXITER):
    """Muller iteration for a zero of ``f``.

    Stops when the step is below ``tol`` (absolute, in the variable of
    ``f``), or when the steps stay within ``1e3 tol`` without decreasing
    for three iterations (floating-point floor of ``f`` reached).

    Returns
    -------
    (root, iterations)

    Raises
    ------
    ConvergenceError
        After ``maxiter`` iterations.
    """
    xs = [complex(x0), complex(x1), complex(x2)]
    fs = [f(x) for x in xs]
    stalled = 0
    best = None
    for it in range(1, maxiter + 1):
        for i, fv in enumerate(fs):
            if fv == 0:
                return xs[i], it
        q0, q1, q2 = xs
        f0, f1, f2 = fs
        h1 = q1 - q0
        h2 = q2 - q1
        d1 = (f1 - f0) / h1
        d2 = (f2 - f1) / h2
        a = (d2 - d1) / (h2 + h1)
        b = a * h2 + d2
        disc = cmath.sqrt(b * b - 4.0 * f2 * a)
        den = b + disc if abs(b + disc) >= abs(b - disc) else b - disc
        if den == 0:
            raise ConvergenceError("Muller denominator vanished")
        step = -2.0 * f2 / den
        x3 = q2 + step
        if not (math.isfinite(x3.real) and math.isfinite(x3.imag)):
            raise ConvergenceError("Muller iterate is not finite")
        if abs(step) < tol:
            return x3, it
        if abs(step) < 1e3 * tol:
            if best is not None and abs(step) >= best:
                stalled += 1
                if stalled >= 3:
                    return x3, it
            best = abs(step) if best is None else min(best, abs(step))
        xs = [q1, q2, x3]
        fs = [f1, f2, f(x3)]
    raise ConvergenceError(f"Muller did not converge in {maxiter} iterations")


def _refine(fn, seed, delta):
    """Muller from ``seed`` with the function normalised at the seed."""
    ref = fn.value(seed).log_scale

    def f(r):
        return fn(r, ref)

    return muller(f, seed - delta, seed + delta, seed)


@dataclass
class FinderResult:
    """Converged resonances plus the entries that did not resolve.

    Iterating the result yields the resonances sorted by ``k``.
    """

    h: float
    c0: float
    resonances: list = field(default_factory=list)
    unresolved: list = field(default_factory=list)    # (k, seed rho, reason)
    boundary: list = field(default_factory=list)      # (k, rho) outside the counting box
    evaluations: int = 0

    def __iter__(self):
        return iter(self.resonances)

    def __len__(self):
        return len(self.resonances)

    def __getitem__(self, i):
        return self.resonances[i]


def _check_h(h):
    if not (H_RANGE[0] <= h <= H_RANGE[1]):
        raise RangeError(f"h={h!r} outside the supported range {H_RANGE}")


def _seed(model, actions, slopes, h, k):
    if float(model.r0) != 0.0:
        return predict_thm1(model, actions, slopes, h, k)
    return predict_thm2(model, actions, slopes, h, k)


def find_resonances(model, contour, actions, slopes, h, c0, *, fn=None, ks=None):
    """Refine one resonance per ``k`` in the window, seeded by the asymptotics.

    Seeds come from the vector-field prediction when ``r0 = 0`` and from
    the zeroth-order prediction otherwise.  Zeros closer than
    ``pi h^{1/3} / (4 A'(0))`` in ``rho`` are merged.
    """
    h = float(h)
    _check_h(h)
    if fn is None:
        fn = WronskianFunction(model, contour, h)
    ks = list(k_window(actions, h, c0)) if ks is None else list(ks)
    box = counting_box(actions, h, c0)
    spacing = math.pi * h ** (1.0 / 3.0) / actions.a1
    merge = 0.25 * spacing
    out = FinderResult(h=h, c0=c0)
    start_calls = fn.calls
    for k in ks:
        seed = _seed(model, actions, slopes, h, k).rho
        try:
            rho, _ = _refine(fn, seed, 0.02 * spacing)
        except ResolabError as exc:
            out.unresolved.append((k, seed, str(exc)))
            continue
        if not box.contains(rho):
            out.boundary.append((k, rho))
            continue
        if any(abs(rho - r.rho) < merge for r in out.resonances):
            continue
        out.resonances.append(Resonance(k=k, rho=rho, h=h, provenance="numeric"))
    out.resonances.sort(key=lambda r: r.k)
    out.evaluations = fn.calls - start_calls
    return out


def _edge_samples(fn, a, b, n0, max_points):
    """Sample arg w along ``a -> b`` until the phase is resolved.

    An interval is bisected when its phase step reaches pi/2, or when it
    departs by more than pi/4 from the step predicted by the phase rate of
    its neighbours.  The second rule catches a zero close to the edge whose
    pi jump is partly cancelled by a fast background rotation.

    Returns the list of ``(rho, WronskianValue)`` including both ends.
    """
    ts = list(np.linspace(0.0, 1.0, n0 + 1))
    vals = {t: fn.value(a + (b - a) * t) for t in ts}
    changed = True
    while changed:
        changed = False
        ts.sort()
        steps = []
        for t0, t1 in zip(ts[:-1], ts[1:]):
            w0, w1 = vals[t0].w, vals[t1].w
            if w0 == 0 or w1 == 0:
                raise InconclusiveCountError("Wronskian vanishes on the boundary",
                                             nearest=a + (b - a) * (t0 if w0 == 0 else t1))
            steps.append(cmath.phase(w1 / w0))
        rates = [s / (t1 - t0) for s, t0, t1 in zip(steps, ts[:-1], ts[1:])]
        new = []
        for i, (t0, t1) in enumerate(zip(ts[:-1], ts[1:])):
            if abs(steps[i]) >= 0.5 * math.pi:
                new.append(0.5 * (t0 + t1))
                continue
            nb = [rates[j] for j in (i - 1, i + 1) if 0 <= j < len(rates)]
            if nb and abs(steps[i] - (t1 - t0) * sum(nb) / len(nb)) > 0.25 * math.pi:
                new.append(0.5 * (t0 + t1))
        if new:
            if len(ts) + len(new) > max_points:
                raise InconclusiveCountError("boundary phase does not resolve", nearest=None)
            for t in new:
                vals[t] = fn.value(a + (b - a) * t)
            ts.extend(new)
            changed = True
    ts.sort()
    return [(a + (b - a) * t, vals[t]) for t in ts]


def _proximity(samples, log_ref):
    """Newton distance ``|f/f'|`` at each interior boundary sample."""
    best = (math.inf, None)
    for i in range(1, len(samples) - 1):
        (r0, v0), (r1, v1), (r2, v2) = samples[i - 1], samples[i], samples[i + 1]
        f0 = v0.w * math.exp(v0.log_scale - log_ref)
        f1 = v1.w * math.exp(v1.log_scale - log_ref)
        f2 = v2.w * math.exp(v2.log_scale - log_ref)
        # second-order three-point derivative on uneven spacing
        d1, d2 = r1 - r0, r2 - r1
        deriv = (-f0 * d2 / (d1 * (d1 + d2)) + f1 * (d2 - d1) / (d1 * d2)
                 + f2 * d1 / (d2 * (d1 + d2)))
        if deriv == 0:
            continue
        step = f1 / deriv
        if abs(step) < best[0]:
            best = (abs(step), r1 - step)
    return best


def _boundary_walk(fn, box, n_edge, max_points, proximity):
    """Sample ``w`` around ``box``; returns ``(winding, samples)``."""
    corners = box.corners
    ref = fn.value(0.5 * (corners[0] + corners[2])).log_scale
    total = 0.0
    walk = []
    for i in range(4):
        a, b = corners[i], corners[(i + 1) % 4]
        n0 = n_edge or max(4, min(64, int(math.ceil(16.0 * abs(b - a)))))
        samples = _edge_samples(fn, a, b, n0, max_points)
        dist, nearest = _proximity(samples, ref)
        if dist < proximity:
            raise InconclusiveCountError(
                f"zero within {dist:.2e} of the box boundary (rho)", nearest=nearest)
        for (_, v0), (_, v1) in zip(samples[:-1], samples[1:]):
            total += cmath.phase(v1.w / v0.w)
        walk.extend(samples if i == 0 else samples[1:])
    return total / (2.0 * math.pi), walk


def _zero_moment(walk):
    """``(1 / 2 pi i) * contour integral of rho d log w`` from boundary samples."""
    acc = 0j
    for (r0, v0), (r1, v1) in zip(walk[:-1], walk[1:]):
        dlog = complex(math.log(abs(v1.w) / abs(v0.w)) + v1.log_scale - v0.log_scale,
                       cmath.phase(v1.w / v0.w))
        acc += 0.5 * (r0 + r1) * dlog
    return acc / (2j * math.pi)


def count_zeros(model, contour, h, c0, *, actions=None, box=None, fn=None, n_edge=None,
                max_points=4000, proximity=PROXIMITY):
    """Winding number of ``w`` around the counting box.

    Parameters
    ----------
    actions : ActionData
        Needed when ``box`` is not given, to place the box edges.
    box : SearchBox, optional
        Explicit box in ``rho`` coordinates.

    Raises
    ------
    InconclusiveCountError
        If a zero is estimated within ``proximity`` (in ``rho``) of the
        boundary, or the phase cannot be resolved.
    """
    h = float(h)
    if box is None:
        if actions is None:
            raise ValueError("count_zeros needs either actions or an explicit box")
        box = counting_box(actions, h, c0)
    if fn is None:
        fn = WronskianFunction(model, contour, h)
    winding, _ = _boundary_walk(fn, box, n_edge, max_points, proximity)
    n = int(round(winding))
    if abs(winding - n) > 1e-6:
        raise InconclusiveCountError(f"non-integer winding {winding!r}", nearest=None)
    return n


def seedless_search(model, contour, actions, h, c0, *, fn=None, max_depth=12):
    """Locate the zeros in the counting box without asymptotic seeds.

    Boxes are cut until each holds at most one zero, which is then refined
    by Muller started from the boundary estimate of the enclosed zero.  ``k`` is assigned as the index
    of the nearest Bohr-Sommerfeld level.
    """
    h = float(h)
    _check_h(h)
    if fn is None:
        fn = WronskianFunction(model, contour, h)
    box = counting_box(actions, h, c0)
    spacing = math.pi * h ** (1.0 / 3.0) / actions.a1
    out = FinderResult(h=h, c0=c0)
    start = fn.calls
    found = []
    stack = [(box, count_zeros(model, contour, h, c0, box=box, fn=fn), 0)]
    while stack:
        b, n, depth = stack.pop()
        if n == 0:
            continue
        if n == 1:
            _, walk = _boundary_walk(fn, b, None, 4000, PROXIMITY)
            start_rho = _zero_moment(walk)
            delta = 1e-3 * min(b.re_hi - b.re_lo, b.im_hi - b.im_lo)
            try:
                rho, _ = _refine(fn, start_rho, delta)
            except ResolabError as exc:
                out.unresolved.append((None, start_rho, str(exc)))
                continue
            if not b.contains(rho):
                out.boundary.append((None, rho))
            found.append(rho)
            continue
        if depth >= max_depth:
            raise ConvergenceError("seedless bisection exceeded its depth limit")
        for frac in _SPLIT_FRACTIONS:
            halves = b.split(frac)
            try:
                counts = [count_zeros(model, contour, h, c0, box=half, fn=fn) for half in halves]
            except InconclusiveCountError:
                continue
            if sum(counts) == n:
                stack.extend((half, c, depth + 1) for half, c in zip(halves, counts))
                break
        else:
            raise InconclusiveCountError(f"no clean split of a box holding {n} zeros",
                                         nearest=0.5 * (b.corners[0] + b.corners[2]))
    for rho in sorted(found, key=lambda r: (r.real, r.imag)):
        k = int(round((rho.real * actions.a1 * h ** (2.0 / 3.0) + actions.a0) / (math.pi * h) - 0.5))
        if any(abs(rho - r.rho) < 0.25 * spacing for r in out.resonances):
            continue
        out.resonances.append(Resonance(k=k, rho=rho, h=h, provenance="numeric"))
    out.resonances.sort(key=lambda r: r.k)
    out.evaluations = fn.calls - start
    return out
