"""Sweep pipeline: numeric resonances against the asymptotic predictions.

:func:`run` executes one configured mode over the ``h`` grid and returns a
:class:`SweepReport`; :func:`emit` writes ``resonances.csv``,
``report.json`` and the diagnostic SVG plots.  Everything written to those
files is a deterministic function of the configuration; wall-clock times
go to a separate ``timings.json``.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .action import action_derivatives
from .asymptotics import k_window, lambda_k, predict_reduced, predict_thm1, predict_thm2
from .crossing_integrals import (SlopePair, airy_product_closed_form, airy_product_derivative,
                                 full_line_product, nu_sum)
from .errors import InconclusiveCountError, InsufficientDataError, ResolabError
from .finder import (MULLER_TOL, WronskianFunction, count_zeros, find_resonances,
                     seedless_search)
from .plots import Series, line_plot
from .specfun import airy_eval

__all__ = ["SweepReport", "run", "fit_slope", "emit", "central_k", "CSV_HEADER",
           "REPORT_KEYS", "EXIT_OK", "EXIT_CHECKS", "EXIT_CONFIG", "EXIT_SOLVER"]

CSV_HEADER = ("h,k,reE_num,imE_num,reE_thm1,imE_thm1,reE_thm2,imE_thm2,"
              "reE_red,imE_red,abs_gap_re,abs_gap_im,ratio_im")
REPORT_KEYS = ("config", "records", "slopes", "identity_checks", "timings", "pass")
EXIT_OK, EXIT_CHECKS, EXIT_CONFIG, EXIT_SOLVER = 0, 2, 3, 4

_NAN = float("nan")
_IDENTITY_SLOPES = ((1.0, 1.0), (1.0, 2.0), (0.5, 1.5))


@dataclass
class SweepReport:
    config: dict
    records: list = field(default_factory=list)
    slopes: dict = field(default_factory=dict)
    identity_checks: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    counters: dict = field(default_factory=dict)
    errors: list = field(default_factory=list)
    wall: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(c["pass"] for c in self.checks + self.identity_checks) and not self.errors

    def exit_code(self):
        if self.errors:
            return EXIT_SOLVER
        return EXIT_OK if self.passed else EXIT_CHECKS

    def to_json(self):
        """The ``report.json`` document (wall-clock data excluded)."""
        return {
            "config": self.config,
            "records": self.records,
            "slopes": self.slopes,
            "identity_checks": self.identity_checks + self.checks,
            "timings": self.counters,
            "pass": self.passed,
        }


def fit_slope(pairs):
    """Least-squares slope of ``log err`` against ``log h``.

    Returns
    -------
    (slope, r2)

    Raises
    ------
    InsufficientDataError
        With fewer than four pairs having finite positive ``h`` and ``err``.
    """
    pts = [(float(h), float(e)) for h, e in pairs
           if h > 0 and e > 0 and math.isfinite(h) and math.isfinite(e)]
    if len(pts) < 4:
        raise InsufficientDataError(f"need at least 4 usable (h, err) pairs, got {len(pts)}")
    x = np.log([p[0] for p in pts])
    y = np.log([p[1] for p in pts])
    slope, icept = np.polyfit(x, y, 1)
    resid = y - (slope * x + icept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(r2)


def central_k(actions, h, c0):
    """Index in the window whose level ``lambda_k`` is closest to 0."""
    ks = k_window(actions, h, c0)
    if len(ks) == 0:
        return None
    return min(ks, key=lambda k: (abs(lambda_k(actions, h, k)), k))


# -- identity suite ------------------------------------------------------------

def identity_suite(full=True):
    """Airy kernel and crossing-integral identity checks (no ODE work)."""
    checks = []
    xs = np.linspace(-20.0, 8.0, 2001)
    v = airy_eval(xs)
    werr = float(np.max(np.abs(v.wronskian() - 1.0 / math.pi)))
    checks.append({"name": "airy_wronskian", "value": werr, "tol": 1e-12, "pass": werr < 1e-12})
    g13, g23 = math.gamma(1.0 / 3.0), math.gamma(2.0 / 3.0)
    exact = (1.0 / (3.0 ** (2.0 / 3.0) * g23), -1.0 / (3.0 ** (1.0 / 3.0) * g13),
             1.0 / (3.0 ** (1.0 / 6.0) * g23))
    v0 = airy_eval(0.0)
    oerr = max(abs(a - b) for a, b in zip((v0.ai, v0.aip, v0.bi), exact))
    checks.append({"name": "airy_origin", "value": oerr, "tol": 1e-13, "pass": oerr < 1e-13})
    ts = np.linspace(-3.0, 3.0, 31 if full else 7)
    for t1, t2 in _IDENTITY_SLOPES:
        sl = SlopePair(t1, t2)
        e_prod = max(abs(full_line_product(t, sl) - airy_product_closed_form(t, sl)) for t in ts)
        e_nu = max(abs(nu_sum(1, t, sl) * nu_sum(2, t, sl) - airy_product_derivative(t, sl))
                   for t in ts)
        tag = f"{t1:g},{t2:g}"
        checks.append({"name": f"airy_product_identity[{tag}]", "value": e_prod, "tol": 1e-8,
                       "pass": e_prod < 1e-8})
        checks.append({"name": f"nu_product_identity[{tag}]", "value": e_nu, "tol": 1e-8,
                       "pass": e_nu < 1e-8})
    return checks


# -- per-h task ----------------------------------------------------------------

def _cplx(z):
    return (_NAN, _NAN) if z is None else (float(z.real), float(z.imag))


def _solve_h(cfg, actions, h, seedless):
    """All work for one ``h``; runs in a worker process."""
    t0 = time.perf_counter()
    model = cfg.model()
    slopes = model.slopes
    contour = cfg.contour(h)
    out = {"h": h, "records": [], "errors": [], "count": None, "converged": 0,
           "window": 0, "evaluations": 0, "mesh_steps": 0, "unresolved": [], "boundary": []}
    ks = list(k_window(actions, h, cfg.c0))
    out["window"] = len(ks)
    numeric = {}
    try:
        fn = WronskianFunction(model, contour, h, rtol=cfg.ode_rtol)
        out["mesh_steps"] = fn.mesh.left.n_steps + fn.mesh.right.n_steps
        if seedless:
            res = seedless_search(model, contour, actions, h, cfg.c0, fn=fn)
        else:
            res = find_resonances(model, contour, actions, slopes, h, cfg.c0, fn=fn)
        numeric = {r.k: r.e for r in res}
        out["converged"] = len(res)
        out["unresolved"] = [[k, repr(s), msg] for k, s, msg in res.unresolved]
        out["boundary"] = [[k, repr(r)] for k, r in res.boundary]
        try:
            out["count"] = count_zeros(model, contour, h, cfg.c0, actions=actions, fn=fn)
        except InconclusiveCountError as exc:
            out["count_error"] = f"{exc} (nearest zero {exc.nearest!r})"
        out["evaluations"] = fn.calls
    except ResolabError as exc:
        out["errors"].append({"h": h, "stage": "solve", "error": f"{type(exc).__name__}: {exc}"})
    vector_field = float(model.r0) == 0.0
    for k in ks:
        rec = {"h": h, "k": k, "lambda": lambda_k(actions, h, k)}
        try:
            p1 = predict_thm1(model, actions, slopes, h, k).e
            p2 = predict_thm2(model, actions, slopes, h, k).e if vector_field else None
            pr = predict_reduced(model, actions, slopes, h, k).e if vector_field else None
        except ResolabError as exc:
            out["errors"].append({"h": h, "k": k, "stage": "predict", "error": str(exc)})
            p1 = p2 = pr = None
        en = numeric.get(k)
        ref = p2 if vector_field else p1
        rec["reE_num"], rec["imE_num"] = _cplx(en)
        rec["reE_thm1"], rec["imE_thm1"] = _cplx(p1)
        rec["reE_thm2"], rec["imE_thm2"] = _cplx(p2)
        rec["reE_red"], rec["imE_red"] = _cplx(pr)
        if en is not None and ref is not None:
            rec["abs_gap_re"] = abs(en.real - ref.real)
            rec["abs_gap_im"] = abs(en.imag - ref.imag)
            rec["ratio_im"] = en.imag / ref.imag if ref.imag != 0 else _NAN
        else:
            rec["abs_gap_re"] = rec["abs_gap_im"] = rec["ratio_im"] = _NAN
        rec["reference"] = "thm2" if vector_field else "thm1"
        rec["provenance"] = {"num": "numeric" if en is not None else None,
                             "thm1": "thm1", "thm2": "thm2" if p2 is not None else None,
                             "red": "reduced" if pr is not None else None}
        rec["tolerances"] = {"ode_rtol": cfg.ode_rtol, "muller_tol": MULLER_TOL}
        out["records"].append(rec)
    out["wall"] = time.perf_counter() - t0
    return out


# -- checks --------------------------------------------------------------------

def _jsonable(v):
    return None if isinstance(v, float) and not math.isfinite(v) else v


def _central_records(report_records, actions, cfg):
    out = []
    for h in cfg.h_grid:
        kc = central_k(actions, h, cfg.c0)
        for rec in report_records:
            if rec["h"] == h and rec["k"] == kc:
                out.append(rec)
    return out


def _mode_checks(cfg, per_h, records, actions):
    checks = []
    if cfg.mode == "identities-only":
        return checks
    for item in per_h:
        h = item["h"]
        ok = item["count"] is not None and item["count"] == item["window"] == item["converged"]
        checks.append({"name": f"completeness[h={h:.6g}]",
                       "value": [item["count"], item["window"], item["converged"]],
                       "tol": 0, "pass": bool(ok)})
    central = _central_records(records, actions, cfg)
    if cfg.mode == "thm2-check":
        for rec in central:
            h = rec["h"]
            band = cfg.ratio_band * h ** (1.0 / 3.0)
            dev = abs(rec["ratio_im"] - 1.0)
            checks.append({"name": f"thm2_width_ratio[h={h:.6g},k={rec['k']}]",
                           "value": rec["ratio_im"], "tol": band,
                           "pass": bool(math.isfinite(dev) and dev <= band)})
        worst = 0.0
        for rec in records:
            if math.isfinite(rec["imE_red"]) and rec["imE_thm2"] != 0:
                worst = max(worst, abs(rec["imE_red"] - rec["imE_thm2"]) / abs(rec["imE_thm2"]))
            elif not math.isfinite(rec["imE_red"]):
                worst = math.inf
        checks.append({"name": "reduced_consistency", "value": _jsonable(worst),
                       "tol": cfg.reduced_tol, "pass": bool(worst < cfg.reduced_tol)})
    elif cfg.mode == "thm1-check":
        ratios = [rec["ratio_im"] for rec in central]
        ok = bool(ratios) and all(math.isfinite(r) for r in ratios) and 0.5 <= ratios[0] <= 1.5
        devs = [abs(r - 1.0) for r in ratios]
        # deviation may grow by at most 0.1 from one h to the next
        mono = all(b <= a + 0.1 for a, b in zip(devs[:-1], devs[1:])) if ok else False
        checks.append({"name": "thm1_width_ratio_first", "value": _jsonable(ratios[0]) if ratios else None,
                       "tol": [0.5, 1.5], "pass": ok})
        checks.append({"name": "thm1_width_ratio_approach",
                       "value": [_jsonable(r) for r in ratios], "tol": 0.1, "pass": bool(mono)})
    elif cfg.mode == "decoupled-oracle":
        for item in per_h:
            h = item["h"]
            ims = [abs(r["imE_num"]) for r in records if r["h"] == h]
            worst = max(ims) if ims else math.inf
            lim = cfg.decoupled_im_tol * h ** (2.0 / 3.0)
            checks.append({"name": f"decoupled_real[h={h:.6g}]", "value": _jsonable(worst),
                           "tol": lim, "pass": bool(worst < lim)})
    return checks


def _slopes(cfg, records, actions):
    if cfg.mode in ("identities-only", "decoupled-oracle"):
        return {}, []
    central = _central_records(records, actions, cfg)
    floor = 100.0 * cfg.ode_rtol
    out = {"central_k": [[r["h"], r["k"]] for r in central],
           "ratio_im": [[r["h"], _jsonable(r["ratio_im"])] for r in central]}
    checks = []
    for name, key in (("re", "abs_gap_re"), ("im", "abs_gap_im")):
        pairs = [(r["h"], r[key]) for r in central
                 if math.isfinite(r[key]) and r[key] > floor * r["h"] ** (2.0 / 3.0)]
        try:
            s, r2 = fit_slope(pairs)
        except InsufficientDataError:
            s, r2 = None, None
        out[name] = {"slope": s, "r2": r2, "points": [list(p) for p in pairs]}
    if cfg.mode == "thm2-check":
        s, r2 = out["re"]["slope"], out["re"]["r2"]
        checks.append({"name": "re_gap_slope", "value": [s, r2],
                       "tol": [cfg.slope_min, cfg.r2_min],
                       "pass": bool(s is not None and s >= cfg.slope_min and r2 >= cfg.r2_min)})
    return out, checks


# -- driver --------------------------------------------------------------------

def run(cfg, *, jobs=1, seedless=False):
    """Execute the configured mode and return the report (no files written)."""
    wall = {}
    t0 = time.perf_counter()
    report = SweepReport(config=cfg.to_dict())
    # where the files go is not part of the computation
    report.config.pop("output_dir", None)
    report.config["seedless"] = bool(seedless)
    report.identity_checks = identity_suite(full=cfg.mode == "identities-only")
    wall["identities"] = time.perf_counter() - t0
    if cfg.mode == "identities-only":
        report.wall = wall
        return report
    t1 = time.perf_counter()
    actions = action_derivatives(cfg.model())
    wall["actions"] = time.perf_counter() - t1
    report.counters["actions"] = {"a0": actions.a0, "a1": actions.a1, "a2": actions.a2,
                                  "a3": actions.a3, "a1_direct": actions.a1_direct}
    t2 = time.perf_counter()
    if jobs > 1 and len(cfg.h_grid) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_solve_h, cfg, actions, h, seedless) for h in cfg.h_grid]
            per_h = [f.result() for f in futures]
    else:
        per_h = [_solve_h(cfg, actions, h, seedless) for h in cfg.h_grid]
    wall["sweep"] = time.perf_counter() - t2
    wall["per_h"] = [[item["h"], item.pop("wall")] for item in per_h]
    for item in per_h:
        report.records.extend(item["records"])
        report.errors.extend(item["errors"])
    report.records.sort(key=lambda r: (-r["h"], r["k"]))
    report.counters["per_h"] = [
        {"h": it["h"], "wronskian_evaluations": it["evaluations"], "mesh_steps": it["mesh_steps"],
         "count": it["count"], "window": it["window"], "converged": it["converged"],
         "unresolved": it["unresolved"], "boundary": it["boundary"],
         "count_error": it.get("count_error")} for it in per_h]
    report.counters["errors"] = report.errors
    report.checks = _mode_checks(cfg, per_h, report.records, actions)
    report.slopes, slope_checks = _slopes(cfg, report.records, actions)
    report.checks.extend(slope_checks)
    report.wall = wall
    return report


# -- output --------------------------------------------------------------------

def _fmt(v):
    return f"{float(v):.16e}" if math.isfinite(float(v)) else "nan"


def _clean(obj):
    """Replace non-finite floats by ``None`` for strict JSON."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def _plots(report):
    hs = sorted({r["h"] for r in report.records})
    out = {}
    ratio = report.slopes.get("ratio_im") if report.slopes else None
    if ratio:
        xs = [p[0] for p in ratio]
        ys = [_NAN if p[1] is None else p[1] for p in ratio]
        series = [Series("Im E numeric / Im E predicted (central k)", xs, ys),
                  Series("1", xs, [1.0] * len(xs), dashed=True)]
        if report.config.get("mode") == "thm2-check":
            band = report.config.get("ratio_band", 3.0)
            series.append(Series("1 + band h^(1/3)", xs, [1 + band * h ** (1 / 3) for h in xs],
                                 dashed=True))
            series.append(Series("1 - band h^(1/3)", xs, [1 - band * h ** (1 / 3) for h in xs],
                                 dashed=True))
        out["width_ratio.svg"] = line_plot(series, title="Width ratio against h", xlabel="h",
                                           ylabel="ratio", logx=True)
    series = []
    for name in ("re", "im"):
        info = report.slopes.get(name) if report.slopes else None
        if not info or not info["points"]:
            continue
        xs = [p[0] for p in info["points"]]
        ys = [p[1] for p in info["points"]]
        series.append(Series(f"|{name.capitalize()} gap|", xs, ys))
        if info["slope"] is not None:
            x = np.log(xs)
            c = float(np.mean(np.log(ys) - info["slope"] * x))
            series.append(Series(f"fit slope {info['slope']:.3f}", xs,
                                 [math.exp(c) * h ** info["slope"] for h in xs], dashed=True))
    if series:
        out["error_scaling.svg"] = line_plot(series, title="Gap to prediction against h",
                                             xlabel="h", ylabel="absolute gap",
                                             logx=True, logy=True)
    if not out and hs:
        out["width_ratio.svg"] = line_plot([], title="Width ratio against h", xlabel="h",
                                           ylabel="ratio")
    return out


def write_csv(report, path):
    lines = [CSV_HEADER]
    for r in report.records:
        vals = [_fmt(r["h"]), str(r["k"])]
        vals += [_fmt(r[c]) for c in CSV_HEADER.split(",")[2:]]
        lines.append(",".join(vals))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def emit(report, directory):
    """Write ``resonances.csv``, ``report.json``, SVG plots and ``timings.json``.

    Returns the list of written paths.

    Raises
    ------
    OSError
        With the offending path in the message.
    """
    written = []
    path = directory

    def target(name):
        return os.path.join(directory, name)

    try:
        os.makedirs(directory, exist_ok=True)
        path = target("resonances.csv")
        write_csv(report, path)
        written.append(path)
        path = target("report.json")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(_clean(report.to_json()), fh, indent=1, sort_keys=True, allow_nan=False)
            fh.write("\n")
        written.append(path)
        for name, svg in _plots(report).items():
            path = target(name)
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(svg)
            written.append(path)
        path = target("timings.json")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(_clean(report.wall), fh, indent=1, sort_keys=True)
            fh.write("\n")
        written.append(path)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return written
