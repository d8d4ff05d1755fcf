"""Two-channel shooting along the distorted contour and the 4x4 Wronskian.

The decaying solution spaces at the left end of the real line and at the
far end of the complex ray are propagated to ``x = 0`` with an 8th-order
Dormand-Prince scheme.  The step sequence is chosen adaptively once per
``(model, contour, h)`` at a handful of reference energies spanning the
search box, then frozen.  Every later evaluation reuses the same steps, so
``E -> w(E)`` is an analytic function of ``E`` (no step-selection noise),
which is what the Muller refinement and the argument-principle count need.

Each basis is re-orthonormalised (Gram-Schmidt) every arc length
``gs_interval`` (default ``h``); the real normalisation factors are
accumulated in ``log_scale`` so that ``w * exp(log_scale)`` is the
Wronskian of the unnormalised, analytic-in-``E`` solutions.
"""

from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import DegenerateBasisError, StiffnessError

__all__ = ["SolverMesh", "SideMesh", "SolutionBasis", "WronskianValue", "build_mesh",
           "propagate_basis", "wronskian", "reference_energies",
           "DEFAULT_RTOL", "INDEPENDENCE_FLOOR"]

DEFAULT_RTOL = 1e-11
INDEPENDENCE_FLOOR = 1e-8   # rank-2 condition threshold 1e8
_MESH_CACHE_SIZE = 16
_mesh_cache: OrderedDict = OrderedDict()


@dataclass(frozen=True)
class SideMesh:
    """Frozen step sequence and stage coefficients for one side."""

    side: str
    start: complex
    d_out: complex          # outward direction at the start point
    v1_start: complex
    v2_start: complex
    steps: np.ndarray
    dirs: np.ndarray
    gsflag: np.ndarray
    cv1: np.ndarray
    cv2: np.ndarray
    cr1: np.ndarray
    cr1p: np.ndarray

    @property
    def n_steps(self):
        return int(self.steps.shape[0])


@dataclass(frozen=True)
class SolverMesh:
    h: float
    r0: float
    rtol: float
    gs_interval: float
    left: SideMesh
    right: SideMesh

    def side(self, name):
        return self.left if name == "L" else self.right


@dataclass(frozen=True)
class SolutionBasis:
    """Two solutions at ``x = 0``.

    ``values[i]`` is ``(u1, u2, u1', u2')`` of solution ``i``; the rows are
    orthonormal in the ``(u, h u')`` scaling and the true solutions are
    recovered up to an upper-triangular change of basis with determinant
    ``exp(log_scale)``.
    """

    side: str
    values: np.ndarray
    log_scale: float
    independence: float
    e: complex
    h: float


@dataclass(frozen=True)
class WronskianValue:
    """``w * exp(log_scale)`` is the Wronskian at energy ``e``."""

    w: complex
    log_scale: float
    e: complex
    h: float

    def scaled(self, log_ref=0.0):
        """``w * exp(log_scale - log_ref)``."""
        return self.w * math.exp(self.log_scale - log_ref)

    @property
    def log_abs(self):
        return math.log(abs(self.w)) + self.log_scale if self.w != 0 else -math.inf


def reference_energies(h, c0=2.0):
    """Energies at which the adaptive step sequence is calibrated.

    Corners and centre line of the rescaled box ``[-c0, c0] x [-c0 h^{1/3}, c0 h^{1/3}]``.
    """
    s = h ** (2.0 / 3.0)
    im = c0 * h ** (1.0 / 3.0)
    rho = [complex(x, y) for x in (-c0, 0.0, c0) for y in (-im, 0.0, im)]
    return np.array(rho, dtype=np.complex128) * s


def _side_mesh(model, segments, side, h, erefs, rtol, gs_interval):
    starts = np.array([s[0] for s in segments], dtype=np.complex128)
    dirs = np.array([s[1] for s in segments], dtype=np.complex128)
    lens = np.array([s[2] for s in segments], dtype=np.float64)
    params = np.array(model.kernel_params(), dtype=np.float64)
    max_steps = int(400.0 * lens.sum() / h) + 2000
    out = K.build_mesh(starts, dirs, lens, params, float(h), erefs, float(rtol),
                       float(gs_interval), 0.05 * h, max_steps)
    steps, sdirs, gsflag, cv1, cv2, cr1, cr1p, n, code = out
    if code == K.STEP_UNDERFLOW:
        raise StiffnessError(f"step size underflow on side {side} at h={h} after {n} steps")
    if code == K.MESH_OVERFLOW:
        raise StiffnessError(f"more than {max_steps} steps on side {side} at h={h}")
    v1, v2, _, _ = K.coefficients(starts[0], params)
    return SideMesh(side=side, start=complex(starts[0]), d_out=complex(-dirs[0]),
                    v1_start=complex(v1), v2_start=complex(v2),
                    steps=steps[:n].copy(), dirs=sdirs[:n].copy(), gsflag=gsflag[:n].copy(),
                    cv1=cv1[:n].copy(), cv2=cv2[:n].copy(), cr1=cr1[:n].copy(),
                    cr1p=cr1p[:n].copy())


def build_mesh(model, contour, h, *, rtol=DEFAULT_RTOL, gs_interval=None, energies=None,
               use_cache=True):
    """Calibrate and freeze the step sequence for ``(model, contour, h)``.

    Parameters
    ----------
    energies : array_like of complex, optional
        Reference energies controlling the step size; defaults to
        :func:`reference_energies`.
    gs_interval : float, optional
        Arc length between re-orthonormalisations, default ``h``.
    """
    h = float(h)
    gs = float(h if gs_interval is None else gs_interval)
    erefs = reference_energies(h) if energies is None else np.asarray(energies, dtype=np.complex128)
    key = (model, contour, h, float(rtol), gs, erefs.tobytes())
    if use_cache and key in _mesh_cache:
        _mesh_cache.move_to_end(key)
        return _mesh_cache[key]
    left = _side_mesh(model, contour.left_segments(), "L", h, erefs, rtol, gs)
    right = _side_mesh(model, contour.right_segments(), "R", h, erefs, rtol, gs)
    mesh = SolverMesh(h=h, r0=float(model.r0), rtol=float(rtol), gs_interval=gs,
                      left=left, right=right)
    if use_cache:
        _mesh_cache[key] = mesh
        while len(_mesh_cache) > _MESH_CACHE_SIZE:
            _mesh_cache.popitem(last=False)
    return mesh


def _propagate(mesh, side, energy):
    sm = mesh.side(side)
    y = np.empty((2, 4), dtype=np.complex128)
    log_scale, ind = K.propagate(complex(energy), mesh.h, mesh.r0, sm.v1_start, sm.v2_start,
                                 sm.d_out, sm.steps, sm.dirs, sm.gsflag, sm.cv1, sm.cv2,
                                 sm.cr1, sm.cr1p, y)
    if not np.all(np.isfinite(y)) or not math.isfinite(log_scale):
        raise StiffnessError(f"non-finite state on side {side} at E={energy!r}")
    if ind < INDEPENDENCE_FLOOR:
        raise DegenerateBasisError(
            f"basis on side {side} lost rank at E={energy!r}: independence {ind:.2e}")
    return y, log_scale, ind


def propagate_basis(model, contour, energy, h, side, *, mesh=None, rtol=DEFAULT_RTOL,
                    gs_interval=None):
    """Decaying two-solution basis of side ``"L"`` or ``"R"`` at ``x = 0``."""
    side = str(side).upper()
    if side not in ("L", "R"):
        raise ValueError("side must be 'L' or 'R'")
    if mesh is None:
        mesh = build_mesh(model, contour, h, rtol=rtol, gs_interval=gs_interval)
    y, log_scale, ind = _propagate(mesh, side, energy)
    values = y.copy()
    values[:, 2:] /= mesh.h     # p = h u'  ->  u'
    return SolutionBasis(side=side, values=values, log_scale=log_scale + 2.0 * math.log(mesh.h),
                         independence=ind, e=complex(energy), h=mesh.h)


def wronskian(model, contour, energy, h, *, mesh=None, rtol=DEFAULT_RTOL, gs_interval=None):
    """``det[yL1, yL2, yR1, yR2]`` at ``x = 0`` in the ``(u, h u')`` variables."""
    if mesh is None:
        mesh = build_mesh(model, contour, h, rtol=rtol, gs_interval=gs_interval)
    yl, ll, _ = _propagate(mesh, "L", energy)
    yr, lr, _ = _propagate(mesh, "R", energy)
    m = np.vstack([yl, yr]).T
    return WronskianValue(w=complex(np.linalg.det(m)), log_scale=ll + lr,
                          e=complex(energy), h=mesh.h)
