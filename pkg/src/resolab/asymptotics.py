"""Semiclassical predictions for the resonances near the crossing energy.

Three predictions are available for index ``k``:

* :func:`predict_thm1` -- width of order ``h^{5/3}`` driven by the
  zeroth-order coupling ``r0(0)``;
* :func:`predict_thm2` -- width of order ``h^{7/3}`` for a pure
  vector-field coupling ``r1 h D``, with the three-term real part;
* :func:`predict_reduced` -- real part from the exact Bohr-Sommerfeld root
  of the numerical action, imaginary part from ``Im G`` built out of the
  half-line crossing integrals.

Energies are reported with nonpositive imaginary parts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .action import bohr_sommerfeld_energy
from .crossing_integrals import mu, nu_sum
from .errors import MisuseError
from .specfun import airy_eval

__all__ = ["Resonance", "PROVENANCES", "lambda_k", "k_window", "predict_thm1",
           "predict_thm2", "im_g", "predict_reduced"]

PROVENANCES = ("numeric", "thm1", "thm2", "reduced")


@dataclass(frozen=True)
class Resonance:
    """A resonance stored in rescaled form; ``e = rho * h^{2/3}``.

    Attributes
    ----------
    k : int
        Bohr-Sommerfeld index of the well level the resonance belongs to.
    rho : complex
        Rescaled energy ``E h^{-2/3}``.
    h : float
    provenance : str
        One of ``numeric``, ``thm1``, ``thm2``, ``reduced``.
    """

    k: int
    rho: complex
    h: float
    provenance: str

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if not self.h > 0:
            raise ValueError("h must be positive")
        object.__setattr__(self, "rho", complex(self.rho))
        if self.provenance != "numeric" and self.rho.imag > 0:
            raise ValueError("predicted resonances must have Im E <= 0")

    @classmethod
    def from_energy(cls, k, e, h, provenance):
        return cls(k=int(k), rho=complex(e) / h ** (2.0 / 3.0), h=float(h),
                   provenance=provenance)

    @property
    def e(self):
        return self.rho * self.h ** (2.0 / 3.0)

    def in_box(self, c0):
        """Whether ``rho`` lies in ``[-c0, c0] - i[0, c0 h^{1/3}]``."""
        return (abs(self.rho.real) <= c0 and self.rho.imag <= 0.0
                and -self.rho.imag <= c0 * self.h ** (1.0 / 3.0))


def lambda_k(actions, h, k):
    """Rescaled Bohr-Sommerfeld level ``(-A(0) + (k + 1/2) pi h) / (A'(0) h^{2/3})``."""
    if not h > 0:
        raise ValueError("h must be positive")
    return (-actions.a0 + (k + 0.5) * math.pi * h) / (actions.a1 * h ** (2.0 / 3.0))


def k_window(actions, h, c0):
    """All ``k >= 0`` with ``|lambda_k(h)| <= c0``, as a ``range``."""
    if not c0 > 0:
        raise ValueError("c0 must be positive")
    s = actions.a1 * h ** (2.0 / 3.0)
    lo = max(0, math.ceil((actions.a0 - c0 * s) / (math.pi * h) - 0.5))
    hi = math.floor((actions.a0 + c0 * s) / (math.pi * h) - 0.5)
    # guard the rounding at the two ends
    while lo <= hi and abs(lambda_k(actions, h, lo)) > c0:
        lo += 1
    while lo <= hi and abs(lambda_k(actions, h, hi)) > c0:
        hi -= 1
    while lo > 0 and abs(lambda_k(actions, h, lo - 1)) <= c0:
        lo -= 1
    while abs(lambda_k(actions, h, hi + 1)) <= c0:
        hi += 1
    return range(lo, hi + 1)


def _real_two_term(actions, lam, h):
    return lam * h ** (2.0 / 3.0) - actions.a2 / (2.0 * actions.a1) * lam ** 2 * h ** (4.0 / 3.0)


def _cubic_term(actions, lam, h):
    return -actions.a3 / (6.0 * actions.a1) * lam ** 3 * h ** 2


def predict_thm1(model, actions, slopes, h, k):
    """Resonance with width ``(2 pi^2 r0^2 / A') (tau1 tau2)^{1/3} (mu1^2 + mu2^2) h^{5/3}``."""
    lam = lambda_k(actions, h, k)
    r0 = float(model.r0_fn(0.0))
    re = _real_two_term(actions, lam, h)
    if r0 == 0.0:
        im = 0.0
    else:
        m1 = mu(1, lam, slopes)
        m2 = mu(2, lam, slopes)
        im = -(2.0 * math.pi ** 2 * r0 ** 2 / actions.a1) \
            * (slopes.tau1 * slopes.tau2) ** (1.0 / 3.0) * (m1 ** 2 + m2 ** 2) * h ** (5.0 / 3.0)
    return Resonance.from_energy(k, complex(re, im), h, "thm1")


def _require_vector_field(model, what):
    if float(model.r0) != 0.0:
        raise MisuseError(f"{what} needs r0 = 0 (pure vector-field coupling), got r0={model.r0!r}")
    r1 = complex(model.r1_fn(0.0))
    if r1.imag != 0.0:
        raise MisuseError(f"{what} needs r1 real on the real axis")
    return r1.real


def predict_thm2(model, actions, slopes, h, k):
    """Resonance for the vector-field coupling, width of order ``h^{7/3}``.

    Raises
    ------
    MisuseError
        If ``r0`` is not identically zero.
    """
    r1 = _require_vector_field(model, "predict_thm2")
    lam = lambda_k(actions, h, k)
    re = _real_two_term(actions, lam, h) + _cubic_term(actions, lam, h)
    z = -slopes.tau3 ** (-2.0 / 3.0) * lam
    aip = airy_eval(z).aip
    im = -(math.pi ** 2 * r1 ** 2 / actions.a1) \
        * (slopes.tau3 ** (1.0 / 3.0) / (slopes.tau1 + slopes.tau2)) * aip ** 2 * h ** (7.0 / 3.0)
    return Resonance.from_energy(k, complex(re, im), h, "thm2")


def im_g(model, slopes, rho_re, *, tol=1e-12):
    """Leading ``Im G = pi^2 r1(0)^2 (nu^A_1R + nu^A_1L)(nu^A_2R + nu^A_2L)`` at ``rho_re``."""
    r1 = complex(model.r1_fn(0.0)).real
    if r1 == 0.0:
        return 0.0
    return math.pi ** 2 * r1 ** 2 * nu_sum(1, rho_re, slopes, tol=tol) \
        * nu_sum(2, rho_re, slopes, tol=tol)


def predict_reduced(model, actions, slopes, h, k, *, evaluate_at="lambda", tol=1e-12):
    """Perturbative root of the reduced quantization condition.

    The real part is the Bohr-Sommerfeld root ``E_BS`` of the numerical
    action; ``Re G`` is not resolved and taken as 0.  The imaginary part is
    ``-h^{7/3} Im G / A'``.

    Parameters
    ----------
    evaluate_at : {"lambda", "bs"}
        ``"lambda"`` evaluates ``Im G`` at ``lambda_k`` with ``A'(0)``, the
        point where the leading-order width is defined.  ``"bs"`` uses
        ``rho_BS = E_BS h^{-2/3}`` and ``A'(E_BS)``; this differs from the
        former at relative order ``h^{2/3}``.
    """
    _require_vector_field(model, "predict_reduced")
    e_bs, a1_bs = bohr_sommerfeld_energy(model, actions, h, k)
    if evaluate_at == "lambda":
        rho, slope = lambda_k(actions, h, k), actions.a1
    elif evaluate_at == "bs":
        rho, slope = e_bs / h ** (2.0 / 3.0), a1_bs
    else:
        raise ValueError("evaluate_at must be 'lambda' or 'bs'")
    im = -h ** (7.0 / 3.0) * im_g(model, slopes, rho, tol=tol) / slope
    return Resonance.from_energy(k, complex(e_bs, im), h, "reduced")
