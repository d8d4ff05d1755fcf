"""Compiled Runge-Kutta kernels for the two-channel system.

State of one solution: ``(u1, u2, p1, p2)`` with ``p = h u'``.  Along a
straight path piece ``x = x0 + s d`` the system reads

    d/ds y = d * A(x) y,
    A = 1/h [[0, 0, 1, 0],
             [0, 0, 0, 1],
             [V1 - E,            h r0,   0,     h r1],
             [h r0 - h^2 r1',    V2 - E, -h r1, 0   ]]

which is ``P u = E u`` with ``W = r0 + i r1 h D`` and its formal adjoint
``W* = r0 - i h D r1``.  Two solutions are carried together and
Gram-Schmidt orthonormalised at the cadence recorded in the mesh.
"""

from __future__ import annotations

import cmath
import math

import numpy as np
from numba import njit
from scipy.integrate._ivp import dop853_coefficients as _dop

N_STAGES = 12
RK_A = np.ascontiguousarray(_dop.A[:N_STAGES, :N_STAGES], dtype=np.float64)
RK_B = np.ascontiguousarray(_dop.B, dtype=np.float64)
RK_C = np.ascontiguousarray(_dop.C[:N_STAGES], dtype=np.float64)
RK_E3 = np.ascontiguousarray(_dop.E3, dtype=np.float64)
RK_E5 = np.ascontiguousarray(_dop.E5, dtype=np.float64)

# error codes returned by the kernels
OK = 0
STEP_UNDERFLOW = 1
MESH_OVERFLOW = 2
RANK_COLLAPSE = 3


@njit(cache=True)
def coefficients(x, params):
    """``(V1, V2, r1, r1')`` at complex ``x`` for the model catalog."""
    fam = params[0]
    c = params[1]
    xs = params[2]
    tau2 = params[3]
    rbar = params[5]
    sig = params[6]
    base = c * x * (x - xs)
    if fam == 0.0:
        v1 = base / cmath.sqrt(1.0 + x * x * x * x)
    else:
        v1 = base
    v2 = -tau2 * x / cmath.sqrt(1.0 + x * x)
    if sig > 0.0:
        r1 = rbar * cmath.exp(-x * x / (2.0 * sig * sig))
        r1p = -x / (sig * sig) * r1
    else:
        r1 = rbar + 0j
        r1p = 0j
    return v1, v2, r1, r1p


@njit(cache=True)
def _rhs(v1e, v2e, r1, r1p, hr0, h, d, y, out):
    inv = d / h
    for k in range(2):
        u1 = y[k, 0]
        u2 = y[k, 1]
        p1 = y[k, 2]
        p2 = y[k, 3]
        out[k, 0] = inv * p1
        out[k, 1] = inv * p2
        out[k, 2] = inv * (v1e * u1 + hr0 * u2 + h * r1 * p2)
        out[k, 3] = inv * ((hr0 - h * h * r1p) * u1 + v2e * u2 - h * r1 * p1)


@njit(cache=True)
def wkb_initial(v1e, v2e, d_out, y):
    """Channel-pure solutions decaying in the outward direction ``d_out``.

    For channel ``j`` with ``q = sqrt(V_j - E)`` on the branch
    ``Re(q d_out) > 0``: ``u = q^{-1/2}``, ``p = -q u``.
    """
    for j in range(2):
        ve = v1e if j == 0 else v2e
        q = cmath.sqrt(ve)
        if (q * d_out).real < 0.0:
            q = -q
        u = 1.0 / cmath.sqrt(q)
        for m in range(4):
            y[j, m] = 0j
        y[j, j] = u
        y[j, 2 + j] = -q * u


@njit(cache=True)
def gram_schmidt(y):
    """Orthonormalise the two rows of ``y`` in place.

    Returns ``(log_det_factor, independence)`` where ``independence`` is the
    norm of the second row's orthogonal remainder relative to its norm.
    """
    n1 = 0.0
    for m in range(4):
        n1 += y[0, m].real ** 2 + y[0, m].imag ** 2
    n1 = math.sqrt(n1)
    for m in range(4):
        y[0, m] /= n1
    dot = 0j
    n2_before = 0.0
    for m in range(4):
        dot += y[0, m].conjugate() * y[1, m]
        n2_before += y[1, m].real ** 2 + y[1, m].imag ** 2
    n2_before = math.sqrt(n2_before)
    for m in range(4):
        y[1, m] -= dot * y[0, m]
    n2 = 0.0
    for m in range(4):
        n2 += y[1, m].real ** 2 + y[1, m].imag ** 2
    n2 = math.sqrt(n2)
    for m in range(4):
        y[1, m] /= n2
    return math.log(n1) + math.log(n2), n2 / n2_before


@njit(cache=True)
def _row_norm(y, k):
    s = 0.0
    for m in range(4):
        s += y[k, m].real ** 2 + y[k, m].imag ** 2
    return math.sqrt(s)


@njit(cache=True)
def build_mesh(seg_start, seg_dir, seg_len, params, h, erefs, rtol, gs_interval,
               first_step, max_steps):
    """Adaptive DOP853 sweep over the path pieces at several reference energies.

    The step size is controlled by the worst error over ``erefs``.  Returns
    the accepted steps with their directions, Gram-Schmidt flags and the
    model coefficients at every stage point, plus an error code.
    """
    n_ref = erefs.shape[0]
    steps = np.empty(max_steps)
    dirs = np.empty(max_steps, dtype=np.complex128)
    gsflag = np.zeros(max_steps, dtype=np.bool_)
    cv1 = np.empty((max_steps, N_STAGES), dtype=np.complex128)
    cv2 = np.empty((max_steps, N_STAGES), dtype=np.complex128)
    cr1 = np.empty((max_steps, N_STAGES), dtype=np.complex128)
    cr1p = np.empty((max_steps, N_STAGES), dtype=np.complex128)
    hr0 = h * params[4]

    ys = np.empty((n_ref, 2, 4), dtype=np.complex128)
    v1, v2, r1, r1p = coefficients(seg_start[0], params)
    for r in range(n_ref):
        wkb_initial(v1 - erefs[r], v2 - erefs[r], -seg_dir[0], ys[r])
        gram_schmidt(ys[r])

    K = np.empty((n_ref, N_STAGES + 1, 2, 4), dtype=np.complex128)
    ytmp = np.empty((2, 4), dtype=np.complex128)
    ynew = np.empty((n_ref, 2, 4), dtype=np.complex128)
    sv1 = np.empty(N_STAGES, dtype=np.complex128)
    sv2 = np.empty(N_STAGES, dtype=np.complex128)
    sr1 = np.empty(N_STAGES, dtype=np.complex128)
    sr1p = np.empty(N_STAGES, dtype=np.complex128)

    n = 0
    step = first_step
    since_gs = 0.0
    for seg in range(seg_start.shape[0]):
        x0 = seg_start[seg]
        d = seg_dir[seg]
        length = seg_len[seg]
        s = 0.0
        while s < length * (1.0 - 1e-15):
            last = False
            if s + step >= length:
                step = length - s
                last = True
            for i in range(N_STAGES):
                a, b, c_, e_ = coefficients(x0 + (s + RK_C[i] * step) * d, params)
                sv1[i] = a
                sv2[i] = b
                sr1[i] = c_
                sr1p[i] = e_
            err = 0.0
            for r in range(n_ref):
                en = erefs[r]
                for i in range(N_STAGES):
                    for k in range(2):
                        for m in range(4):
                            acc = ys[r, k, m]
                            for j in range(i):
                                acc += step * RK_A[i, j] * K[r, j, k, m]
                            ytmp[k, m] = acc
                    _rhs(sv1[i] - en, sv2[i] - en, sr1[i], sr1p[i], hr0, h, d, ytmp, K[r, i])
                for k in range(2):
                    for m in range(4):
                        acc = ys[r, k, m]
                        for i in range(N_STAGES):
                            acc += step * RK_B[i] * K[r, i, k, m]
                        ynew[r, k, m] = acc
                a, b, c_, e_ = coefficients(x0 + (s + step) * d, params)
                _rhs(a - en, b - en, c_, e_, hr0, h, d, ynew[r], K[r, N_STAGES])
                for k in range(2):
                    scale = rtol * max(_row_norm(ys[r], k), _row_norm(ynew[r], k)) + 1e-300
                    e5 = 0.0
                    e3 = 0.0
                    for m in range(4):
                        a5 = 0j
                        a3 = 0j
                        for i in range(N_STAGES + 1):
                            a5 += RK_E5[i] * K[r, i, k, m]
                            a3 += RK_E3[i] * K[r, i, k, m]
                        e5 += (abs(a5) / scale) ** 2
                        e3 += (abs(a3) / scale) ** 2
                    if e5 > 0.0 or e3 > 0.0:
                        val = step * e5 / math.sqrt((e5 + 0.01 * e3) * 4.0)
                        if val > err:
                            err = val
            if err <= 1.0:
                if n >= max_steps:
                    return steps, dirs, gsflag, cv1, cv2, cr1, cr1p, n, MESH_OVERFLOW
                steps[n] = step
                dirs[n] = d
                for i in range(N_STAGES):
                    cv1[n, i] = sv1[i]
                    cv2[n, i] = sv2[i]
                    cr1[n, i] = sr1[i]
                    cr1p[n, i] = sr1p[i]
                for r in range(n_ref):
                    for k in range(2):
                        for m in range(4):
                            ys[r, k, m] = ynew[r, k, m]
                s += step
                since_gs += step
                if since_gs >= gs_interval:
                    gsflag[n] = True
                    since_gs = 0.0
                    for r in range(n_ref):
                        gram_schmidt(ys[r])
                n += 1
                if last:
                    break
                if err == 0.0:
                    fac = 10.0
                else:
                    fac = min(10.0, 0.9 * err ** (-1.0 / 8.0))
                step = step * fac
            else:
                step = step * max(0.2, 0.9 * err ** (-1.0 / 8.0))
                if step < 1e-13 * h:
                    return steps, dirs, gsflag, cv1, cv2, cr1, cr1p, n, STEP_UNDERFLOW
    return steps, dirs, gsflag, cv1, cv2, cr1, cr1p, n, OK


@njit(cache=True)
def propagate(energy, h, r0, v1_start, v2_start, d_out, steps, dirs, gsflag,
              cv1, cv2, cr1, cr1p, y):
    """Fixed-mesh DOP853 propagation of the two decaying solutions.

    ``y`` (2, 4) receives the orthonormal final state.  Returns
    ``(log_scale, min_independence)``.
    """
    hr0 = h * r0
    wkb_initial(v1_start - energy, v2_start - energy, d_out, y)
    log_scale, min_ind = gram_schmidt(y)
    K = np.empty((N_STAGES, 2, 4), dtype=np.complex128)
    ytmp = np.empty((2, 4), dtype=np.complex128)
    for n in range(steps.shape[0]):
        step = steps[n]
        d = dirs[n]
        for i in range(N_STAGES):
            for k in range(2):
                for m in range(4):
                    acc = y[k, m]
                    for j in range(i):
                        acc += step * RK_A[i, j] * K[j, k, m]
                    ytmp[k, m] = acc
            _rhs(cv1[n, i] - energy, cv2[n, i] - energy, cr1[n, i], cr1p[n, i],
                 hr0, h, d, ytmp, K[i])
        for k in range(2):
            for m in range(4):
                acc = y[k, m]
                for i in range(N_STAGES):
                    acc += step * RK_B[i] * K[i, k, m]
                y[k, m] = acc
        if gsflag[n]:
            ls, ind = gram_schmidt(y)
            log_scale += ls
            if ind < min_ind:
                min_ind = ind
    ls, ind = gram_schmidt(y)
    log_scale += ls
    if ind < min_ind:
        min_ind = ind
    return log_scale, min_ind
