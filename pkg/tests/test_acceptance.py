"""Acceptance gate: one check per criterion, each printing a PASS/FAIL line."""

import json
import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES, random_circuit
from tailored_rae.circuit import (
    build_enhanced_circuit,
    build_h2_ansatz,
    build_ldca,
    equal_up_to_phase,
    normalize_cycles,
    unitary_of,
)
from tailored_rae.harness import parse_config, run_compare, run_scan_L, run_scan_pi
from tailored_rae.harness.cli import main
from tailored_rae.harness.experiments import stream_seed
from tailored_rae.inference import ParityDataset, estimate, runtime, summarize
from tailored_rae.noise import damping_kraus
from tailored_rae.pauli import Observable
from tailored_rae.sim import expectation, parity_distribution, run
from tailored_rae.twirl import allocate_shots, twirl_once

H2_THETA0 = -6.057
LDCA_THETAS = [-1.491, 1.838, 1.977, 2.305, -3.124, 2.049, 1.254, -1.791]
XXXX = Observable.from_label("XXXX")
NOISE = {"t1_us": 84, "t2_us": 110, "t_step_ns": 100, "t_gate_ns": 400}


def report(number: int, ok: bool, detail: str, elapsed: float, limit: float | None) -> None:
    timing = f"{elapsed:.1f}s" + (f" (limit {limit:g}s)" if limit else "")
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}; {timing}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def test_criterion_01_expectation_anchors():
    with Timer() as t:
        pi_h2 = expectation(run(build_h2_ansatz(H2_THETA0)), XXXX)
        pi_ldca = expectation(run(build_ldca(LDCA_THETAS)), Observable.from_label("XX"))
    ok = abs(pi_h2 - 0.2238) <= 5e-4 and abs(pi_ldca - 0.39) <= 5e-3 and t.elapsed < 1
    report(1, ok, f"H2 <XXXX> = {pi_h2:.5f} (0.2238 +- 5e-4), LDCA <XX> = {pi_ldca:.5f} (0.39 +- 5e-3)",
           t.elapsed, 1)


def test_criterion_02_noiseless_likelihood_identity():
    with Timer() as t:
        A = build_h2_ansatz(H2_THETA0)
        pi = expectation(run(A), XXXX)
        worst = 0.0
        for L in range(11):
            p = parity_distribution(run(build_enhanced_circuit(A, XXXX, L)), XXXX)
            worst = max(worst, abs(p - 0.5 * (1 + math.cos((2 * L + 1) * math.acos(pi)))))
    report(2, worst < 1e-9 and t.elapsed < 5, f"max |p_even - model| over L=0..10 = {worst:.2e} (< 1e-9)",
           t.elapsed, 5)


def _scan_l(zz_khz: float, coherent: bool) -> dict:
    cfg = parse_config({
        "noise": {**NOISE, "zz_khz": zz_khz, "coherent": coherent},
        "M": 20000, "L_max": 8, "seed": 2022,
    })
    rows = run_scan_L(cfg, "bare")
    return rows[0]


@pytest.fixture(scope="module")
def incoherent_fit():
    with Timer() as t:
        row = _scan_l(0.0, coherent=False)
    return row, t.elapsed


def test_criterion_03_incoherent_fit(incoherent_fit):
    row, elapsed = incoherent_fit
    ok = row["r2"] >= 0.99 and 0 < row["f_fit"] < 1 and elapsed < 30
    report(3, ok, f"T1/T2-only L=0..8 fit R^2 = {row['r2']:.5f} (>= 0.99), f = {row['f_fit']:.4f} in (0,1)",
           elapsed, 30)


def test_criterion_04_coherent_degradation(incoherent_fit):
    base, _ = incoherent_fit
    with Timer() as t:
        row = _scan_l(45.0, coherent=True)
    ok = row["r2"] < base["r2"] and t.elapsed < 30
    report(4, ok, f"R^2 with 45 kHz ZZ = {row['r2']:.4f} < incoherent-only {base['r2']:.4f}", t.elapsed, 30)


def test_criterion_05_rc_restoration():
    cfg = parse_config({
        "noise": {**NOISE, "zz_khz": 75}, "M": 20000, "N": 50, "L": 1, "sweep_points": 200, "seed": 2022,
    })
    with Timer() as t:
        rows = run_scan_pi(cfg, "both")
    fit = {r["arm"]: (r["f_fit"], r["r2"]) for r in rows}
    (f_bare, r2_bare), (f_rc, r2_rc) = fit["bare"], fit["rc"]
    soft = "within" if abs(f_rc - 0.34) <= 0.15 else "outside"
    ok = r2_rc > r2_bare and f_rc < 0.6 and t.elapsed < 300
    report(5, ok, f"R^2 rc {r2_rc:.4f} > bare {r2_bare:.4f}; rc f = {f_rc:.3f} < 0.6 "
           f"({soft} soft band 0.34 +- 0.15; bare f = {f_bare:.3f})", t.elapsed, 300)


def test_criterion_06_rc_logical_equivalence():
    rng = np.random.default_rng(6)
    worst, kinds_ok = 0.0, True
    with Timer() as t:
        for i in range(500):
            n = int(rng.integers(1, 5))
            bare = normalize_cycles(random_circuit(rng, n, int(rng.integers(1, 25))))
            dup = twirl_once(bare, stream_seed(6, i))
            kinds_ok &= dup.kinds() == bare.kinds()
            worst = max(worst, equal_up_to_phase(unitary_of(dup), unitary_of(bare)))
    ok = worst < 1e-9 and kinds_ok and t.elapsed < 60
    report(6, ok, f"500 twirls, max phase-aligned deviation {worst:.2e} (< 1e-9), kinds preserved: {kinds_ok}",
           t.elapsed, 60)


def _synthetic_rmse(pi: float, M: int, Lmax: int, repeats: int, f_fixed=None) -> float:
    m = M // (Lmax + 1)
    estimates = []
    for r in range(repeats):
        rng = np.random.default_rng(stream_seed(7, r, Lmax))
        recs = []
        for L in range(Lmax + 1):
            p0 = 0.5 * (1 + math.cos((2 * L + 1) * math.acos(pi)))
            recs.append((L, m, int(rng.binomial(m, p0))))
        est = estimate(ParityDataset.from_tuples(recs), seed=stream_seed(7, r, Lmax, 1), f_fixed=f_fixed)
        estimates.append(est.pi_hat)
    return summarize(estimates, pi, runtime(M, Lmax, 14, 3)).rmse


def test_criterion_07_enhanced_sampling_property():
    pi = expectation(run(build_h2_ansatz(H2_THETA0)), XXXX)
    with Timer() as t:
        rmse = [_synthetic_rmse(pi, 20000, Lmax, 50) for Lmax in range(3)]
    ok = rmse[0] > rmse[1] > rmse[2] and t.elapsed < 120
    values = ", ".join(f"Lmax={k}: {v:.5f}" for k, v in enumerate(rmse))
    # Diagnostic only: the same datasets with f pinned to its true value of 1.
    known = [_synthetic_rmse(pi, 20000, Lmax, 50, f_fixed=1.0) for Lmax in range(3)]
    ACCEPTANCE_LINES.append(
        "INFO criterion 7 diagnostic (f known, not the criterion): "
        + ", ".join(f"Lmax={k}: {v:.5f}" for k, v in enumerate(known))
    )
    report(7, ok, f"noiseless RMSE with f estimated jointly, {values} (strictly decreasing required)",
           t.elapsed, 120)


def test_criterion_08_bias_reduction():
    cfg = parse_config({
        "noise": {**NOISE, "zz_khz": 75}, "M": 20000, "N": 50, "lmax_values": [1, 2, 3],
        "repeats": 50, "B": 64, "seed": 2022,
    })
    with Timer() as t:
        rows = {(r["method"], r["Lmax"]): r for r in run_compare(cfg, "both")}
    pairs = [(abs(rows["RC-RAE", k]["bias"]), abs(rows["RAE", k]["bias"])) for k in (1, 2, 3)]
    ok = all(rc < bare for rc, bare in pairs) and t.elapsed < 900
    detail = ", ".join(f"Lmax={k}: |bias| RC-RAE {rc:.4f} vs RAE {b:.4f}" for k, (rc, b) in zip((1, 2, 3), pairs))
    report(8, ok, detail, t.elapsed, 900)


def test_criterion_09_algebra_and_accounting():
    rng = np.random.default_rng(9)
    with Timer() as t:
        worst_rt = 0.0
        for _ in range(1000):
            M, Lmax = int(rng.integers(1, 10**6)), int(rng.integers(0, 40))
            n_o, n_a = int(rng.integers(0, 60)), int(rng.integers(1, 60))
            summed = M / (Lmax + 1) * sum((2 * k + 1) + n_o / n_a * k for k in range(Lmax + 1))
            worst_rt = max(worst_rt, abs(runtime(M, Lmax, n_o, n_a) - summed) / summed)
        shots_ok = True
        for _ in range(1000):
            N = int(rng.integers(1, 1000))
            M = int(rng.integers(N, 10**7))
            shots_ok &= sum(allocate_shots(M, N)) == M
        worst_kraus = 0.0
        for _ in range(1000):
            t1, t2 = 10 ** rng.uniform(-6, -3, 2)
            t_step = 10 ** rng.uniform(-9, -6)
            if -math.expm1(-t_step / t1) - math.expm1(-t_step / t2) > 1:
                continue
            worst_kraus = max(worst_kraus, damping_kraus(t1, t2, t_step).completeness_error())
    ok = worst_rt < 1e-9 and shots_ok and worst_kraus < 1e-12 and t.elapsed < 5
    report(9, ok, f"runtime rel. err {worst_rt:.1e}, shot sums exact: {shots_ok}, "
           f"Kraus completeness err {worst_kraus:.1e}", t.elapsed, 5)


DETERMINISM_CONFIGS = {
    "scan-l": {"M": 2000, "L_max": 4, "N": 10, "noise": {"zz_khz": 45}},
    "scan-pi": {"M": 200, "N": 10, "sweep_points": 12, "noise": {"zz_khz": 75}},
    "compare": {"M": 4000, "N": 10, "lmax_values": [1, 2], "repeats": 3, "B": 16,
                "noise": {"zz_khz": 75}},
}


def test_criterion_10_determinism(tmp_path):
    mismatches = []
    with Timer() as t:
        for command, data in DETERMINISM_CONFIGS.items():
            cfg = tmp_path / f"{command}.json"
            cfg.write_text(json.dumps(data))
            dirs = []
            for k in range(2):
                out = tmp_path / f"{command}-{k}"
                assert main([command, "--config", str(cfg), "--seed", "2022", "--out", str(out)]) == 0
                dirs.append(out)
            for path in sorted(dirs[0].iterdir()):
                other = dirs[1] / path.name
                if path.name == "manifest.json":
                    a, b = (json.loads(p.read_text()) for p in (path, other))
                    a.pop("wall_time_s"), b.pop("wall_time_s")
                    same = a == b
                else:
                    same = path.read_bytes() == other.read_bytes()
                if not same:
                    mismatches.append(f"{command}/{path.name}")
    report(10, not mismatches, "byte-identical result files for scan-l, scan-pi, compare"
           + (f"; mismatched: {mismatches}" if mismatches else ""), t.elapsed, None)
