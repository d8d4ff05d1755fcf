"""Acceptance criteria, one test per criterion (criterion 6 has two parts).

Each test prints ``CRITERION n: PASS|FAIL detail`` and the terminal summary
repeats one line per criterion.
"""

import math
import os
import shutil
import subprocess
import sys
import time

import numpy as np
import pytest

from conftest import record_criterion
from resolab.action import action_derivatives
from resolab.asymptotics import k_window
from resolab.config import SweepConfig, load_config
from resolab.crossing_integrals import (SlopePair, airy_product_closed_form,
                                        airy_product_derivative, full_line_product, nu_sum)
from resolab.finder import WronskianFunction, count_zeros, find_resonances
from resolab.harness import central_k, fit_slope, run
from resolab.model import default_contour, default_model
from resolab.specfun import airy_eval

from oracles import airy_mp

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
CONFIGS = os.path.join(ROOT, "configs")

# single-channel shooting eigenvalues of the well (scipy DOP853 + brentq)
P1_LEVELS = {
    0.02: {3: -0.09912303146800529, 4: -0.05958931689271084, 5: -0.020841470893102843,
           6: 0.017092487316087503, 7: 0.054182950015691796, 8: 0.09039964040862974},
    0.04: {1: -0.11941921269923178, 2: -0.040337825596844366, 3: 0.03554595584566904,
           4: 0.10799631135587844},
}


@pytest.fixture(scope="module")
def thm2_report():
    cfg = load_config(os.path.join(CONFIGS, "default.yaml"))
    t0 = time.perf_counter()
    rep = run(cfg)
    return cfg, rep, time.perf_counter() - t0


def _central(rep, cfg):
    from resolab.action import ActionData

    acts = ActionData(**rep.counters["actions"])
    out = []
    for h in cfg.h_grid:
        k = central_k(acts, h, cfg.c0)
        out.append(next(r for r in rep.records if r["h"] == h and r["k"] == k))
    return out


def test_criterion_1_airy_kernel():
    t0 = time.perf_counter()
    v = airy_eval(np.linspace(-20.0, 8.0, 2001))
    werr = float(np.max(np.abs(v.ai * v.bip - v.aip * v.bi - 1 / math.pi)))
    v0 = airy_eval(0.0)
    elapsed = time.perf_counter() - t0
    ref = airy_mp(0.0)
    oerr = max(abs(v0.ai - ref[0]), abs(v0.aip - ref[1]), abs(v0.bi - ref[2]))
    ok = werr < 1e-12 and oerr < 1e-13 and elapsed < 1.0
    record_criterion(1, ok, f"wronskian err {werr:.2e}, origin err {oerr:.2e}, {elapsed:.3f} s")
    assert ok


def test_criterion_2_product_identities():
    t0 = time.perf_counter()
    ts = np.linspace(-3.0, 3.0, 31)
    worst_a = worst_b = 0.0
    for taus in ((1.0, 1.0), (1.0, 2.0), (0.5, 1.5)):
        sl = SlopePair(*taus)
        for t in ts:
            worst_a = max(worst_a, abs(full_line_product(t, sl) - airy_product_closed_form(t, sl)))
            worst_b = max(worst_b, abs(nu_sum(1, t, sl) * nu_sum(2, t, sl)
                                       - airy_product_derivative(t, sl)))
    elapsed = time.perf_counter() - t0
    ok = worst_a < 1e-8 and worst_b < 1e-8 and elapsed < 30.0
    record_criterion(2, ok, f"full-line err {worst_a:.2e}, nu-product err {worst_b:.2e}, "
                            f"{elapsed:.1f} s")
    assert ok


def test_criterion_3_decoupled_oracle():
    t0 = time.perf_counter()
    m = default_model(rbar=0.0, r0=0.0)
    acts = action_derivatives(m)
    worst_im = worst_rel = 0.0
    matched = True
    for h, levels in P1_LEVELS.items():
        res = find_resonances(m, default_contour(m, h), acts, m.slopes, h, 1.5)
        found = {r.k: r.e for r in res}
        matched &= sorted(found) == sorted(levels)
        for k, e in found.items():
            worst_im = max(worst_im, abs(e.imag))
            if k in levels:
                worst_rel = max(worst_rel, abs(e.real - levels[k]) / abs(levels[k]))
    elapsed = time.perf_counter() - t0
    ok = matched and worst_im < 1e-10 and worst_rel < 1e-8 and elapsed < 120.0
    record_criterion(3, ok, f"max |Im E| {worst_im:.1e}, max rel gap {worst_rel:.1e}, "
                            f"levels matched {matched}, {elapsed:.1f} s")
    assert ok


def test_criterion_4_completeness():
    cfg = SweepConfig()
    m = cfg.model()
    acts = action_derivatives(m)
    rows = []
    ok = True
    for h in cfg.h_grid:
        t0 = time.perf_counter()
        fn = WronskianFunction(m, cfg.contour(h), h)
        res = find_resonances(m, cfg.contour(h), acts, m.slopes, h, cfg.c0, fn=fn)
        n = count_zeros(m, cfg.contour(h), h, cfg.c0, actions=acts, fn=fn)
        window = len(k_window(acts, h, cfg.c0))
        elapsed = time.perf_counter() - t0
        rows.append(f"h={h:.4g}: {n}/{window}/{len(res)} in {elapsed:.1f} s")
        ok &= n == window == len(res) and elapsed < 300.0
    record_criterion(4, ok, "count/window/converged " + ", ".join(rows))
    assert ok


def test_criterion_5_constant_coupling_width():
    cfg = load_config(os.path.join(CONFIGS, "thm1.yaml"))
    assert cfg.h_grid == (0.08, 0.057, 0.04, 0.028, 0.02)
    assert cfg.r0 == 0.5 and cfg.rbar == 0.0
    rep = run(cfg)
    ratios = [r["ratio_im"] for r in _central(rep, cfg)]
    devs = [abs(r - 1) for r in ratios]
    first_ok = 0.5 <= ratios[0] <= 1.5
    # each step may move away from 1 by at most 10% of the ratio
    approach_ok = all(b <= a + 0.1 for a, b in zip(devs[:-1], devs[1:]))
    ok = first_ok and approach_ok and not rep.errors
    record_criterion(5, ok, "central-k ratios " + ", ".join(f"{r:.4f}" for r in ratios))
    assert ok


def test_criterion_6_vector_field_width(thm2_report):
    cfg, rep, elapsed = thm2_report
    assert cfg.h_grid == (0.08, 0.057, 0.04, 0.028, 0.02, 0.014, 0.01)
    central = _central(rep, cfg)
    bad = [r["h"] for r in central if not abs(r["ratio_im"] - 1) <= 3 * r["h"] ** (1 / 3)]
    ok = not bad and elapsed < 1800.0
    record_criterion(6, ok, "width ratios " + ", ".join(f"{r['ratio_im']:.4f}" for r in central)
                     + f" ({elapsed:.1f} s)")
    assert ok


def test_criterion_6_real_part_order(thm2_report):
    cfg, rep, _ = thm2_report
    central = _central(rep, cfg)
    floor = 100 * cfg.ode_rtol
    pairs = [(r["h"], r["abs_gap_re"]) for r in central
             if r["abs_gap_re"] > floor * r["h"] ** (2 / 3)]
    slope, r2 = fit_slope(pairs)
    ok = slope >= 2.1 and r2 >= 0.95
    record_criterion(6, ok, f"Re gap slope {slope:.3f} (need >= 2.1), r2 {r2:.5f}")
    assert ok


def test_criterion_7_reduced_consistency(thm2_report):
    _, rep, _ = thm2_report
    worst = max(abs(r["imE_red"] - r["imE_thm2"]) / abs(r["imE_thm2"]) for r in rep.records)
    ok = worst < 1e-5 and len(rep.records) > 0
    record_criterion(7, ok, f"max relative gap {worst:.2e} over {len(rep.records)} points")
    assert ok


def test_criterion_8_determinism(tmp_path):
    cfg_path = os.path.join(CONFIGS, "default.yaml")
    exe = shutil.which("resolab")
    cmd = [exe] if exe else [sys.executable, "-m", "resolab.cli"]
    out = tmp_path / "out"
    blobs = []
    for _ in range(2):
        proc = subprocess.run(cmd + ["run", cfg_path, "--out", str(out)],
                              capture_output=True, text=True, cwd=tmp_path)
        assert proc.returncode in (0, 2), proc.stderr
        blobs.append(((out / "resonances.csv").read_bytes(), (out / "report.json").read_bytes()))
    ok = blobs[0] == blobs[1]
    record_criterion(8, ok, f"csv {len(blobs[0][0])} bytes, json {len(blobs[0][1])} bytes, "
                            f"identical {ok}")
    assert ok
