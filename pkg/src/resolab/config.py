"""Sweep configuration: a nested YAML file mapped onto :class:`SweepConfig`."""

from __future__ import annotations

import math
import os
from dataclasses import asdict, dataclass, field, replace

import yaml

from .errors import ConfigError
from .model import CrossingModel, default_contour

__all__ = ["SweepConfig", "MODES", "load_config", "config_from_dict", "geometric_grid",
           "OUT_ENV"]

MODES = ("thm1-check", "thm2-check", "identities-only", "decoupled-oracle")
OUT_ENV = "RESOLAB_OUT"


def geometric_grid(h_max, h_min, n):
    """``n`` geometrically spaced values from ``h_max`` down to ``h_min``."""
    if n < 2:
        return (float(h_max),)
    ratio = (h_min / h_max) ** (1.0 / (n - 1))
    return tuple(float(h_max * ratio ** i) for i in range(n - 1)) + (float(h_min),)


def _num(value, name):
    # PyYAML reads "1e-3" (no dot) as a string
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name}: expected a number, got {value!r}") from None
    if not math.isfinite(out):
        raise ConfigError(f"{name}: must be finite")
    return out


@dataclass(frozen=True)
class SweepConfig:
    mode: str = "thm2-check"
    # model
    family: str = "rational"
    c: float = 1.0
    xstar: float = -1.0
    tau2: float = 1.0
    rbar: float = 1.0
    r0: float = 0.0
    r1_sigma: float | None = None
    # contour
    theta: float = 0.3
    x_inf: float = 1.0
    l_left: float = 6.0
    truncation: float = 1e-18
    # sweep
    h_grid: tuple = field(default_factory=lambda: geometric_grid(0.08, 0.01, 8))
    c0: float = 1.5
    # tolerances
    ode_rtol: float = 1e-11
    muller_tol: float = 1e-12
    ratio_band: float = 3.0
    reduced_tol: float = 1e-5
    decoupled_im_tol: float = 1e-12
    slope_min: float = 2.1
    r2_min: float = 0.95
    output_dir: str = "resolab_out"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.family not in ("rational", "polynomial"):
            raise ConfigError(f"unknown model family {self.family!r}")
        hs = tuple(float(h) for h in self.h_grid)
        if not hs:
            raise ConfigError("h_grid is empty")
        if any(not (b < a) for a, b in zip(hs[:-1], hs[1:])):
            raise ConfigError("h_grid must be strictly decreasing")
        if any(h <= 0 for h in hs):
            raise ConfigError("h values must be positive")
        object.__setattr__(self, "h_grid", hs)
        for name in ("c0", "ode_rtol", "muller_tol", "ratio_band", "reduced_tol",
                     "decoupled_im_tol", "truncation"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if not 0.0 < self.theta < 0.5 * math.pi:
            raise ConfigError("theta must lie in (0, pi/2)")
        if self.mode == "thm1-check" and self.r0 == 0.0:
            raise ConfigError("thm1-check needs a nonzero r0")
        if self.mode in ("thm2-check", "decoupled-oracle") and self.r0 != 0.0:
            object.__setattr__(self, "r0", 0.0)
        if self.mode == "decoupled-oracle" and self.rbar != 0.0:
            object.__setattr__(self, "rbar", 0.0)

    def model(self):
        return CrossingModel(family=self.family, c=self.c, xstar=self.xstar, tau2=self.tau2,
                             r0=self.r0, rbar=self.rbar, r1_sigma=self.r1_sigma)

    def contour(self, h):
        return default_contour(self.model(), h, theta=self.theta, x_inf=self.x_inf,
                               l_left=self.l_left, truncation=self.truncation)

    def with_mode(self, mode):
        return replace(self, mode=mode)

    def to_dict(self):
        d = asdict(self)
        d["h_grid"] = list(self.h_grid)
        return d


_SECTIONS = {
    "model": ("family", "c", "xstar", "tau2", "rbar", "r0", "r1_sigma"),
    "contour": ("theta", "x_inf", "l_left", "truncation"),
    "tolerances": ("ode_rtol", "muller_tol", "ratio_band", "reduced_tol", "decoupled_im_tol",
                   "slope_min", "r2_min"),
}
_STRINGS = {"mode", "family", "output_dir"}


def config_from_dict(data):
    """Flatten the nested mapping and build a :class:`SweepConfig`."""
    if not isinstance(data, dict):
        raise ConfigError("configuration root must be a mapping")
    flat = {}
    for key, value in data.items():
        if key in _SECTIONS:
            if not isinstance(value, dict):
                raise ConfigError(f"section {key!r} must be a mapping")
            for sub, v in value.items():
                if sub not in _SECTIONS[key]:
                    raise ConfigError(f"unknown key {key}.{sub}")
                flat[sub] = v
        elif key == "h_grid":
            if isinstance(value, dict):
                try:
                    flat["h_grid"] = geometric_grid(_num(value["max"], "h_grid.max"),
                                                    _num(value["min"], "h_grid.min"),
                                                    int(value.get("n", 8)))
                except KeyError as exc:
                    raise ConfigError(f"h_grid needs {exc.args[0]!r}") from None
            elif isinstance(value, (list, tuple)):
                flat["h_grid"] = tuple(_num(v, "h_grid") for v in value)
            else:
                raise ConfigError("h_grid must be a list or a {max, min, n} mapping")
        elif key in ("mode", "c0", "output_dir"):
            flat[key] = value
        else:
            raise ConfigError(f"unknown key {key!r}")
    for key, value in list(flat.items()):
        if key in _STRINGS:
            flat[key] = str(value)
        elif key == "r1_sigma":
            flat[key] = None if value is None else _num(value, key)
        elif key != "h_grid":
            flat[key] = _num(value, key)
    try:
        return SweepConfig(**flat)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path, *, mode=None, out=None):
    """Read a YAML config; ``mode`` and ``out`` override the file.

    The output directory resolves as ``out`` argument, then the
    ``RESOLAB_OUT`` environment variable, then the file.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from None
    data = dict(data or {})
    if mode is not None:
        data["mode"] = mode
    if out is not None:
        data["output_dir"] = out
    elif os.environ.get(OUT_ENV):
        data["output_dir"] = os.environ[OUT_ENV]
    return config_from_dict(data)
