"""Acceptance criteria, one PASS/FAIL line each, repeated in the terminal summary."""

import json
import subprocess
import sys
import time

import properties
from jetvariant.cli import main
from jetvariant.corpus import data_dir, run_check, run_corpus
from jetvariant.scenario import load_scenario

LINES = []


def verdict(n, label, ok, elapsed=None, budget=None):
    in_time = budget is None or elapsed < budget
    timing = "" if elapsed is None else f" [{elapsed:.2f}s / {budget:g}s]"
    line = f"{'PASS' if ok and in_time else 'FAIL'}  criterion {n}: {label}{timing}"
    LINES.append(line)
    print(line)
    assert ok, line
    assert in_time, line


def timed(fn, *a, **kw):
    t = time.perf_counter()
    out = fn(*a, **kw)
    return out, time.perf_counter() - t


def statuses(report):
    return {r["id"]: r["status"] for c in report["cases"] for r in c["checks"]}


def cli_json(*argv, capsys):
    capsys.readouterr()
    code = main([*argv, "--json"])
    return code, json.loads(capsys.readouterr().out)


def test_1_euclidean():
    rep, dt = timed(run_corpus, "euclidean")
    st = statuses(rep)
    wanted = ["K2-invariant", "K-flips-under-reflection", "K2-fixed-by-reflection"]
    ok = all(st[k] == "PASS" for k in wanted) and rep["summary"]["fail"] == 0
    verdict(1, "L_X(K^2)=0 for all generators; K -> -K and K^2 fixed under reflection", ok, dt, 1)


def test_2_flux_sl3(capsys):
    rep, dt = timed(run_corpus, "flux-sl3")
    st = statuses(rep)
    ok = st["generators-are-symmetries"] == "PASS" and st["I6-cubed-invariant"] == "PASS"
    verdict(2, "8 generators are symmetries of w_x = w*w_y; I6^3 invariant at order 6", ok, dt, 300)
    t = time.perf_counter()
    code, out = cli_json("hilbert", "flux-sl3", "--max-order", "6", "--seed", "1", "--trials", "8", capsys=capsys)
    dt = time.perf_counter() - t
    verdict(2, f"profile d = {out['d']} (d_k=0 for k<=5, d_6=1)", code == 0 and out["d"] == [0] * 6 + [1], dt, 30)


def test_3_monge():
    rep, dt = timed(run_corpus, "quadrics-monge")
    st = statuses(rep)
    ok = all(st[k] == "PASS" for k in ("J1-first-integral", "J2-first-integral", "K-syzygy"))
    verdict(3, "J1, J2 first integrals at order 6; syzygy reduces to 0", ok and rep["summary"]["fail"] == 0, dt, 120)


def test_4_birkhoff(capsys):
    rep, dt = timed(run_corpus, "birkhoff", fast=True)
    st = statuses(rep)
    ok = st["I2-invariant"] == "PASS" and st["hilbert"] == "PASS" and st["poincare-unstable"] == "PASS"
    verdict(4, "fast: I2 invariant, profile 1 at even orders 2..6, poincare unstable", ok, dt, 60)
    code, out = cli_json("poincare", "birkhoff", "--max-order", "6", capsys=capsys)
    verdict(4, f"cli poincare status {out['status']!r}", code == 0 and out["status"] == "unstable")
    rep, dt = timed(run_corpus, "birkhoff")
    st = statuses(rep)
    ok = st["I4-invariant"] == "PASS" and st["Delta-commutes"] == "PASS" and rep["summary"]["fail"] == 0
    verdict(4, "full: I4 invariant and Delta commutes with the action", ok, dt, 900)


def test_5_pseudogroup():
    scen = load_scenario(data_dir() / "pseudogroup-ux0.json")
    t = time.perf_counter()
    find = run_check(scen, {"id": "find", "kind": "find", "order": 1, "degree": 1, "denominator": "1",
                            "expect_span": ["1", "u_y"]})
    dy = run_check(scen, {"id": "dy", "kind": "derivation_invariant", "derivation": "Dy",
                          "probes": ["u_y", "u_yy"], "order": 2})
    dt = time.perf_counter() - t
    ok = find["status"] == "PASS" and find["result"]["dimension"] == 2 and dy["status"] == "PASS"
    verdict(5, f"order-1 kernel on u_x=0 is span{find['result']['basis']}; D_y invariant", ok, dt, 10)


def test_6_property_suites():
    properties.COUNTS.clear()
    t = time.perf_counter()
    failures = []
    for name, props in properties.SUITES.items():
        for prop in props:
            try:
                prop()
            except Exception as exc:  # report every failing law, not just the first
                failures.append(f"{name}.{prop.__name__}: {exc}")
    dt = time.perf_counter() - t
    few = {k: v for k, v in properties.COUNTS.items() if v < 100}
    label = f"property suites, {sum(properties.COUNTS.values())} cases, {len(failures)} failures"
    verdict(6, label, not failures and not few, dt, 120)


def test_7_determinism():
    cmd = [sys.executable, "-m", "jetvariant.cli", "corpus", "--json"]
    a = subprocess.run(cmd, capture_output=True).stdout
    b = subprocess.run(cmd, capture_output=True).stdout
    verdict(7, f"two full corpus --json runs byte-identical ({len(a)} bytes)", a == b and len(a) > 0)
