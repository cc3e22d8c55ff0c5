"""Acceptance criteria, one test each, at their stated sizes and tolerances.

Each test records a PASS/FAIL line that is printed in the terminal summary.
"""

import json
import math
import time

from conftest import record
from linscreen import holp_sample_bound, sis_sample_bound
from linscreen.cli import main
from linscreen.experiments import (
    ExperimentConfig,
    check_ic_enumeration,
    check_rdd_oracle,
    check_noiseless_necessity,
    check_noiseless_sufficiency,
    concentration_probe,
    sweep,
)
from linscreen.randomdesign import CovarianceSpec, SeedPath

MONOTONE_CONFIG = {
    "p": 1000,
    "n_grid": [25, 50, 100, 200, 400],
    "s": 5,
    "rho": 2.0,
    "tau": 1.0,
    "sigma": 1.0,
    "covariance": "identity",
    "replications": 300,
    "seed": 6,
}


def test_c01_rdd_oracle_equivalence():
    start = time.perf_counter()
    res = check_rdd_oracle(SeedPath(1).rng(), matrices=200, p=12, sparsities=(2, 3, 4), c0s=(1.0, 1.5, 2.0))
    elapsed = time.perf_counter() - start
    ok = res["passed"] == res["total"] == 1800 and elapsed < 30
    record(1, ok, f"{res['passed']}/{res['total']} cells agree, {elapsed:.1f} s")
    assert res["passed"] == res["total"] == 1800, res["counterexamples"]
    assert elapsed < 30


def test_c02_noiseless_forward():
    res = check_noiseless_sufficiency(SeedPath(2).rng(), matrices=50, p=12, s=3, rho=2.0, draws=1000)
    ok = res["passed"] == res["total"] == 50_000
    record(2, ok, f"{res['total'] - res['passed']} failures in {res['total']} draws")
    assert ok, res["counterexamples"]


def test_c03_noiseless_converse():
    res = check_noiseless_necessity(SeedPath(3).rng(), matrices=50, p=12, s=3, rho=2.0)
    ok = res["passed"] == res["total"] == 50
    record(3, ok, f"{res['total'] - res['passed']} escapes in {res['total']} failing matrices")
    assert ok, res["counterexamples"]


def test_c04_ic_worst_case_enumeration():
    res = check_ic_enumeration(SeedPath(4).rng(), matrices=100, p=10, sparsities=range(2, 9))
    ok = res["passed"] == res["total"] == 700 and res["max_abs_diff"] <= 1e-12
    record(4, ok, f"{res['passed']}/{res['total']}, max |diff| = {res['max_abs_diff']:.2e}")
    assert ok


def test_c05_sis_holp_separation():
    config = ExperimentConfig(
        p=500, n_grid=(60,), s=5, rho=2.0, tau=1.0, sigma=0.5,
        covariance="equi:0.6", replications=200, seed=5,
    )
    start = time.perf_counter()
    summary, _ = sweep(config)
    elapsed = time.perf_counter() - start
    sis = summary.cell(60, "sis").rate
    holp = summary.cell(60, "holp").rate
    ok = holp >= sis + 0.2 and elapsed < 300
    record(5, ok, f"HOLP {holp:.3f} vs SIS {sis:.3f} (need gap >= 0.2), {elapsed:.1f} s")
    assert elapsed < 300
    assert holp >= sis + 0.2


def _monotone_ok(summary, method):
    cells = [summary.cell(n, method) for n in summary.config.n_grid]
    violations = []
    for a, b in zip(cells, cells[1:]):
        if b.rate < a.rate:
            violations.append((a.rate - b.rate) / math.hypot(a.se, b.se) if a.se or b.se else math.inf)
    return len(violations) <= 1 and all(v <= 2.0 for v in violations), violations


def test_c06_monotone_in_n():
    summary, _ = sweep(ExperimentConfig.from_dict(MONOTONE_CONFIG))
    sis_ok, sis_v = _monotone_ok(summary, "sis")
    holp_ok, holp_v = _monotone_ok(summary, "holp")
    top = summary.cell(400, "holp").rate
    ok = sis_ok and holp_ok and top >= 0.95
    record(6, ok, f"SIS {summary.rates('sis')}, HOLP {summary.rates('holp')}")
    assert sis_ok, sis_v
    assert holp_ok, holp_v
    assert top >= 0.95


def test_c07_sis_concentration():
    rows = concentration_probe(CovarianceSpec("identity", 200), [100, 400], 50, seed=7)
    ratio = rows[1]["sis_max_dev"] / rows[0]["sis_max_dev"]
    record(7, ratio <= 0.8, f"median max deviation ratio n=400/n=100 is {ratio:.3f}")
    assert ratio <= 0.8


def test_c08_holp_scaling():
    p = 2000
    rows = concentration_probe(CovarianceSpec("identity", p), [50, 100], 20, seed=8)
    diag_ok = all(0.5 * r["n"] / p <= r["holp_diag"] <= 2.0 * r["n"] / p for r in rows)
    scaled = [r["holp_offdiag"] * p / math.sqrt(r["n"]) for r in rows]
    off_ok = all(0.05 <= v <= 5.0 for v in scaled)
    ratios = [r["holp_diag"] / r["holp_offdiag"] for r in rows]
    grow_ok = ratios[1] > ratios[0]
    ok = diag_ok and off_ok and grow_ok
    record(8, ok, f"diag*p/n {[round(r['holp_diag'] * p / r['n'], 3) for r in rows]}, "
                  f"off*p/sqrt(n) {[round(v, 3) for v in scaled]}, ratio {[round(v, 2) for v in ratios]}")
    assert diag_ok and off_ok and grow_ok


def _rel(a, b):
    return abs(a - b) / abs(b)


def test_c09_bound_formulas():
    checks = [
        _rel(sis_sample_bound(K=1, rho=1, s=1, sigma=0, tau=1, r=0, p=3, delta=1), 144 * 9 * math.log(9)),
        # (1 + 4 + 1)^2 / (1 - 0.4)^2 = 100
        _rel(sis_sample_bound(K=2, rho=2, s=1, sigma=0.5, tau=1, r=0.1, p=10, delta=0.1),
             144 * 2 * 100 * math.log(300)),
        _rel(holp_sample_bound(Cprime=1, kappa=1, rho=1, s=1, sigma=0, tau=1, p=3, delta=1, c0=2, C=1), 8.0),
        _rel(holp_sample_bound(Cprime=1, kappa=1, rho=1, s=1, sigma=0, tau=1, p=3, delta=1, c0=2, C=0.1),
             2 * math.log(9)),
        # kappa^4 = 16, (2*3 + 1/2)^2 = 42.25
        _rel(holp_sample_bound(Cprime=0.5, kappa=2, rho=2, s=3, sigma=1, tau=2, p=100, delta=0.05, c0=3, C=1),
             16 * 42.25 * math.log(6000)),
    ]
    values_ok = max(checks) <= 1e-9

    mono_ok = True
    grid = (0, 1, 2)
    sis = {}
    holp = {}
    for a in grid:
        for b in grid:
            for c in grid:
                s, sigma = 1 + a, 0.5 * b
                sis[a, b, c] = sis_sample_bound(K=1, rho=1.5, s=s, sigma=sigma, tau=1, r=0.02 * c, p=500, delta=0.05)
                holp[a, b, c] = holp_sample_bound(Cprime=1, kappa=1 + c, rho=1.5, s=s, sigma=sigma, tau=1,
                                                  p=500, delta=0.05, c0=2, C=1)
    for table in (sis, holp):
        for (a, b, c), v in table.items():
            for nxt in ((a + 1, b, c), (a, b + 1, c), (a, b, c + 1)):
                if nxt in table and not table[nxt] > v:
                    mono_ok = False
    # larger tau and larger delta shrink both bounds; larger p grows them
    for fn, kw in ((sis_sample_bound, {"r": 0.01}), (holp_sample_bound, {"kappa": 1.5})):
        base = dict(rho=1.5, s=2, sigma=1.0, tau=1.0, p=500, delta=0.05, **kw)
        mono_ok &= fn(**{**base, "tau": 2.0}) < fn(**base)
        mono_ok &= fn(**{**base, "delta": 0.5}) < fn(**base)
        mono_ok &= fn(**{**base, "p": 5000}) > fn(**base)
    ok = values_ok and mono_ok
    record(9, ok, f"max relative error {max(checks):.1e}, monotone on 3x3x3 grid: {mono_ok}")
    assert values_ok
    assert mono_ok


def test_c10_thread_determinism(tmp_path):
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps(MONOTONE_CONFIG))
    outputs = {}
    for threads in (1, 8):
        d = tmp_path / f"t{threads}"
        d.mkdir()
        rc = main(["--threads", str(threads), "sweep", "--config", str(cfg),
                   "--out", str(d / "summary.csv"), "--trials", str(d / "results.jsonl")])
        assert rc == 0
        outputs[threads] = ((d / "summary.csv").read_bytes(), (d / "results.jsonl").read_bytes())
    same_csv = outputs[1][0] == outputs[8][0]
    same_jsonl = outputs[1][1] == outputs[8][1]
    record(10, same_csv and same_jsonl,
           f"summary.csv identical: {same_csv}, results.jsonl identical: {same_jsonl} "
           f"({len(outputs[1][1])} bytes)")
    assert same_csv and same_jsonl
