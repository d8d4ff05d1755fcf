"""Crossing model: potentials, interaction, assumption checks and contour.

Only a fixed catalog of closed-form families is supported:

* well potential ``V1``: ``"rational"`` ``c x (x - x*) / sqrt(1 + x^4)`` (the
  default) or ``"polynomial"`` ``c x (x - x*)`` (no finite limits; useful only
  for action sanity checks, fails the limit assumption);
* dissociative potential ``V2 = -tau2 x / sqrt(1 + x^2)``;
* interaction ``W = r0 + i r1(x) h D_x`` with constant ``r0`` and either a
  constant ``r1 = rbar`` or a Gaussian profile ``rbar exp(-x^2 / (2 sigma^2))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .crossing_integrals import SlopePair

__all__ = [
    "CrossingModel",
    "DistortionContour",
    "ContourSamples",
    "AssumptionCheck",
    "ValidationReport",
    "default_model",
    "validate",
    "contour_points",
    "default_contour",
    "ray_phase",
    "FAMILIES",
]

FAMILIES = ("rational", "polynomial")
_FAMILY_CODE = {"rational": 0, "polynomial": 1}


@dataclass(frozen=True)
class CrossingModel:
    """Immutable two-channel crossing model.

    Parameters are those of the closed-form catalog; ``tau1``, ``tau2`` and
    the limits at infinity are derived.
    """

    family: str = "rational"
    c: float = 1.0
    xstar: float = -1.0
    tau2: float = 1.0
    r0: float = 0.0
    rbar: float = 1.0
    r1_sigma: float | None = None
    delta0: float = 0.3

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown potential family {self.family!r}; choose from {FAMILIES}")
        if self.r1_sigma is not None and not self.r1_sigma > 0:
            raise ValueError("r1_sigma must be positive when given")

    # -- potentials --------------------------------------------------------
    def v1(self, x):
        x = np.asarray(x)
        base = self.c * x * (x - self.xstar)
        if self.family == "rational":
            return base / np.sqrt(1.0 + x ** 4)
        return base

    def v2(self, x):
        x = np.asarray(x)
        return -self.tau2 * x / np.sqrt(1.0 + x * x)

    def r0_fn(self, x):
        return np.full(np.shape(x), self.r0, dtype=np.result_type(np.asarray(x), float))

    def r1_fn(self, x):
        x = np.asarray(x)
        if self.r1_sigma is None:
            return np.full(np.shape(x), self.rbar, dtype=np.result_type(x, float))
        return self.rbar * np.exp(-x * x / (2.0 * self.r1_sigma ** 2))

    def r1_prime(self, x):
        x = np.asarray(x)
        if self.r1_sigma is None:
            return np.zeros(np.shape(x), dtype=np.result_type(x, float))
        return -x / self.r1_sigma ** 2 * self.r1_fn(x)

    # -- derived data ------------------------------------------------------
    @property
    def tau1(self):
        return -self.c * self.xstar

    @property
    def slopes(self):
        return SlopePair(self.tau1, self.tau2)

    @property
    def v1_inf_minus(self):
        return self.c if self.family == "rational" else math.inf

    @property
    def v1_inf_plus(self):
        return self.c if self.family == "rational" else math.inf

    @property
    def v2_inf_minus(self):
        return self.tau2

    @property
    def v2_inf_plus(self):
        return -self.tau2

    @property
    def singularities(self):
        """Complex singular points of the potentials (poles / branch points)."""
        pts = [1j, -1j]
        if self.family == "rational":
            pts += [np.exp(1j * math.pi * (2 * k + 1) / 4) for k in range(4)]
        return np.array(pts)

    def kernel_params(self):
        """Flat float64 parameter vector consumed by the compiled ODE kernel."""
        sigma = 0.0 if self.r1_sigma is None else float(self.r1_sigma)
        return np.array([_FAMILY_CODE[self.family], self.c, self.xstar, self.tau2,
                         self.r0, self.rbar, sigma], dtype=np.float64)

    def with_interaction(self, r0=None, rbar=None):
        kw = {}
        if r0 is not None:
            kw["r0"] = float(r0)
        if rbar is not None:
            kw["rbar"] = float(rbar)
        return replace(self, **kw)

    def energy_window(self):
        """Energies ``(e_lo, e_hi)`` for which both well turning points exist."""
        return _energy_window(self)


def default_model(rbar=1.0, r0=0.0):
    """Built-in rational/tanh-like pair with ``x* = -1``, ``c = tau2 = 1``."""
    return CrossingModel(rbar=float(rbar), r0=float(r0))


_WINDOW_CACHE: dict = {}


def _energy_window(model):
    key = (model.family, model.c, model.xstar)
    if key in _WINDOW_CACHE:
        return _WINDOW_CACHE[key]
    v = lambda x: float(model.v1(x))
    well = minimize_scalar(v, bounds=(model.xstar, 0.0), method="bounded",
                           options={"xatol": 1e-12})
    right = minimize_scalar(lambda x: -v(x), bounds=(0.0, 20.0), method="bounded",
                            options={"xatol": 1e-10})
    grid = np.linspace(model.xstar - 200.0, model.xstar, 20001)
    left_sup = float(np.max(model.v1(grid)))
    hi = min(left_sup, -right.fun)
    out = (well.fun, hi, well.x, right.x)
    _WINDOW_CACHE[key] = out
    return out


# -- validation --------------------------------------------------------------

@dataclass(frozen=True)
class AssumptionCheck:
    name: str
    passed: bool
    detail: str = ""
    witness: float | complex | None = None


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def summary(self):
        return "\n".join(f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.detail}"
                         + ("" if c.witness is None else f" (witness {c.witness})")
                         for c in self.checks)


def _fd(f, x, step=1e-4):
    # 4th order central difference, ~1e-13 error for these smooth families
    return (-f(x + 2 * step) + 8 * f(x + step) - 8 * f(x - step) + f(x - 2 * step)) / (12 * step)


def validate(model, *, require_vector_field=False, grid=None):
    """Check the analyticity, limit, sign and interaction assumptions.

    Failures are reported as data; nothing is raised.  With
    ``require_vector_field`` the extra preconditions of the ``h^{7/3}``
    width law (``r0 == 0``, ``r1`` real on the real axis) are checked too.
    """
    checks = []
    if grid is None:
        grid = np.linspace(-30.0, 30.0, 6001)
    xs = model.xstar

    # analyticity: no singular point inside the strip, finite values on it
    sing = model.singularities
    inside = np.abs(sing.imag) < model.delta0 * np.sqrt(1.0 + sing.real ** 2)
    strip_x = grid[::10][:, None] + 1j * model.delta0 * np.sqrt(1 + grid[::10] ** 2)[:, None] \
        * np.linspace(-0.999, 0.999, 9)[None, :]
    finite = np.all(np.isfinite(model.v1(strip_x))) and np.all(np.isfinite(model.v2(strip_x)))
    real_on_real = (np.max(np.abs(np.imag(model.v1(grid.astype(complex))))) == 0.0
                    and np.max(np.abs(np.imag(model.v2(grid.astype(complex))))) == 0.0)
    ok = (not np.any(inside)) and finite and real_on_real
    checks.append(AssumptionCheck(
        "analytic in strip", bool(ok),
        f"delta0={model.delta0}; singularities inside strip: {int(np.sum(inside))}",
        None if not np.any(inside) else complex(sing[inside][0])))

    # limits at +-infinity
    lims = (model.v1_inf_minus, model.v2_inf_minus, model.v1_inf_plus, model.v2_inf_plus)
    ok = all(np.isfinite(lims)) and lims[0] > 0 and lims[1] > 0 and lims[2] > 0 and lims[3] < 0
    checks.append(AssumptionCheck(
        "limits at infinity", bool(ok),
        f"V1(-inf)={lims[0]}, V2(-inf)={lims[1]}, V1(+inf)={lims[2]}, V2(+inf)={lims[3]}"))

    # sign pattern and crossing data
    v1 = model.v1(grid)
    v2 = model.v2(grid)
    a = grid < xs
    b = (grid > xs) & (grid < 0)
    c = grid > 0
    bad = np.concatenate([
        grid[a][~((v1[a] > 0) & (v2[a] > 0))],
        grid[b][~((v1[b] < 0) & (v2[b] > 0))],
        grid[c][~((v2[c] < 0) & (v1[c] > 0))],
    ])
    checks.append(AssumptionCheck(
        "sign pattern", bool(bad.size == 0 and xs < 0),
        "V1>0,V2>0 left of x*; V1<0<V2 on (x*,0); V2<0<V1 right of 0",
        None if bad.size == 0 else float(bad[0])))

    d1_0 = _fd(model.v1, 0.0)
    d2_0 = _fd(model.v2, 0.0)
    d1_s = _fd(model.v1, xs)
    zero_ok = (abs(model.v1(0.0)) < 1e-14 and abs(model.v2(0.0)) < 1e-14
               and abs(model.v1(xs)) < 1e-14)
    slopes_ok = (abs(d1_0 - model.tau1) < 1e-8 and abs(d2_0 + model.tau2) < 1e-8
                 and model.tau1 > 0 and model.tau2 > 0 and d1_s < 0)
    witness = None
    if not slopes_ok:
        witness = 0.0 if (d1_0 <= 0 or d2_0 >= 0) else xs
    checks.append(AssumptionCheck(
        "crossing slopes", bool(zero_ok and slopes_ok),
        f"V1'(0)={d1_0:.12g} (tau1={model.tau1}), V2'(0)={d2_0:.12g} (-tau2={-model.tau2}), "
        f"V1'(x*)={d1_s:.6g}", witness))

    r1_strip = model.r1_fn(strip_x)
    ok = np.isfinite(model.r0) and np.all(np.isfinite(r1_strip))
    checks.append(AssumptionCheck(
        "interaction", bool(ok),
        f"W = r0 + i r1 h D_x with r0={model.r0}, r1(0)={float(model.r1_fn(0.0))}"))

    if require_vector_field:
        r1_real = np.max(np.abs(np.imag(model.r1_fn(grid.astype(complex))))) == 0.0
        ok = model.r0 == 0.0 and r1_real
        checks.append(AssumptionCheck(
            "vector-field interaction", bool(ok),
            "h^{7/3} width law requires r0 == 0 identically and r1 real on the real axis",
            None if ok else 0.0))
    return ValidationReport(tuple(checks))


# -- contour -------------------------------------------------------------------

@dataclass(frozen=True)
class DistortionContour:
    """Real segment ``[-l_left, x_inf]`` followed by the ray
    ``x_inf + s e^{i theta}``, ``0 <= s <= l_right``."""

    theta: float = 0.3
    x_inf: float = 1.0
    l_left: float = 6.0
    l_right: float = 10.0

    def __post_init__(self):
        if not (self.theta >= 0 and self.x_inf > 0 and self.l_left > 0 and self.l_right > 0):
            raise ValueError("contour needs theta >= 0 and positive lengths")

    @property
    def ray_direction(self):
        return complex(math.cos(self.theta), math.sin(self.theta))

    @property
    def end(self):
        return self.x_inf + self.l_right * self.ray_direction

    @property
    def length(self):
        return self.l_left + self.x_inf + self.l_right

    def left_segments(self):
        """``(start, direction, length)`` pieces from ``-l_left`` to 0."""
        return ((complex(-self.l_left), 1.0 + 0j, self.l_left),)

    def right_segments(self):
        """``(start, direction, length)`` pieces from the far end of the ray to 0."""
        d = self.ray_direction
        return ((self.end, -d, self.l_right), (complex(self.x_inf), -1.0 + 0j, self.x_inf))


@dataclass(frozen=True)
class ContourSamples:
    s: np.ndarray      # arc length from -l_left
    x: np.ndarray      # complex path points
    dxds: np.ndarray   # path derivative


def contour_points(contour, n):
    """Sample the contour at ``n`` arc-length-equispaced points."""
    if n < 2:
        raise ValueError("need at least two samples")
    s = np.linspace(0.0, contour.length, n)
    split = contour.l_left + contour.x_inf
    on_ray = s > split
    x = np.where(on_ray, contour.x_inf + (s - split) * contour.ray_direction,
                 -contour.l_left + s + 0j)
    dxds = np.where(on_ray, contour.ray_direction, 1.0 + 0j)
    x[-1] = contour.end
    return ContourSamples(s=s, x=x, dxds=dxds)


def default_contour(model, h, *, theta=0.3, x_inf=1.0, l_left=6.0, truncation=1e-18,
                    min_length=1.0):
    """Contour with ``l_right`` sized so the outgoing channel-2 wave has
    decayed by ``truncation`` at the end of the ray."""
    k_inf = math.sqrt(-model.v2_inf_plus)
    decay = math.sin(theta) * k_inf if theta > 0 else 0.0
    if decay <= 0:
        l_right = 50.0
    else:
        l_right = max(min_length, h * math.log(1.0 / truncation) / decay)
    return DistortionContour(theta=theta, x_inf=x_inf, l_left=l_left, l_right=l_right)


def ray_phase(model, contour, energy, n=400):
    """``Im int_{x_inf}^{x} sqrt(E - V2(t)) dt`` along the ray, cumulatively.

    Uses the branch continuous from ``Re sqrt > 0`` at ``x_inf``.  Returns
    ``(s, im_phase)`` with ``s`` the ray arc length.
    """
    d = contour.ray_direction
    s_nodes, w_nodes = np.polynomial.legendre.leggauss(8)
    edges = np.linspace(0.0, contour.l_right, n + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * np.diff(edges)
    pts = mids[:, None] + half[:, None] * s_nodes[None, :]
    x = contour.x_inf + pts * d
    rad = energy - model.v2(x)
    root = np.sqrt(rad.astype(complex))
    # continuous branch: flip sign where it jumps relative to the previous node
    flat = root.ravel()
    for i in range(1, flat.size):
        if abs(flat[i] + flat[i - 1]) < abs(flat[i] - flat[i - 1]):
            flat[i:] *= -1.0
    if flat[0].real < 0:
        flat *= -1.0
    root = flat.reshape(root.shape)
    panel = (root * d) @ w_nodes * half
    return edges, np.concatenate([[0.0], np.cumsum(panel.imag)])
