"""Seeded experiment drivers: likelihood scans and estimator comparisons.

Every random draw comes from a stream addressed by ``(seed, spawn_key)``, so
results do not depend on worker count or completion order.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Sequence

import numpy as np

from ..circuit import (
    Circuit,
    build_enhanced_circuit,
    build_h2_ansatz,
    build_reflection_r0,
    two_qubit_gate_count,
)
from ..inference import (
    ParityDataset,
    estimate,
    fit_layer_fidelity,
    fit_sweep_fidelity,
    runtime,
    summarize,
)
from ..noise import NoiseConfig
from ..pauli import Observable
from ..sim import expectation, parity_distribution, run, sample_parities
from ..twirl import allocate_shots, make_ensemble
from .config import ExperimentConfig

ARMS = ("bare", "rc", "both")

SCAN_L_COLUMNS = ("arm", "L", "p_even_exact", "p_even_sampled", "f_fit", "r2")
SCAN_PI_COLUMNS = ("arm", "theta0", "pi_exact", "p_even", "f_fit", "r2")
COMPARE_COLUMNS = ("method", "Lmax", "mean", "bias", "rmse", "se_mean", "se_rmse", "runtime_units_A")
COLUMNS = {"scan_L": SCAN_L_COLUMNS, "scan_pi": SCAN_PI_COLUMNS, "compare": COMPARE_COLUMNS}


def stream_seed(seed: int, *key: int) -> int:
    """64-bit seed for the independent stream ``key`` under ``seed``."""
    ss = np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0])


def _pool_map(fn: Callable, tasks: Sequence, workers: int) -> list:
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


def _arms(arm: str) -> tuple[str, ...]:
    if arm not in ARMS:
        raise ValueError(f"arm must be one of {ARMS}, got {arm!r}")
    return ("bare", "rc") if arm == "both" else (arm,)


def noiseless_pi(A: Circuit, P: Observable) -> float:
    return expectation(run(A), P)


def rc_exact(
    circuit: Circuit, P: Observable, noise: NoiseConfig | None, N: int, M: int, seed: int
) -> tuple[list[float], list[int]]:
    """Exact p_even of each random duplicate, with its shot allocation."""
    ens = make_ensemble(circuit, N, M, seed)
    probs = [parity_distribution(run(d, noise), P) for d in ens.duplicates]
    return probs, list(ens.shots_per_duplicate)


def pooled_counts(probs: Sequence[float], shots: Sequence[int], seed: int) -> int:
    seeds = [stream_seed(seed, i) for i in range(len(probs))]
    return sum(sample_parities(p, m, s).even_count for p, m, s in zip(probs, shots, seeds))


# ---------------------------------------------------------------- scan over L


def _scan_l_task(args):
    cfg, L, arms = args
    A, P, noise = cfg.build_ansatz(), cfg.build_observable(), cfg.build_noise()
    circuit = build_enhanced_circuit(A, P, L)
    out = {}
    if "bare" in arms:
        p = parity_distribution(run(circuit, noise), P)
        rec = sample_parities(p, cfg.M, stream_seed(cfg.seed, L, 0))
        out["bare"] = (p, rec.even_count / cfg.M)
    if "rc" in arms:
        probs, shots = rc_exact(circuit, P, noise, cfg.N, cfg.M, stream_seed(cfg.seed, L, 1))
        p = float(np.dot(probs, shots) / cfg.M)
        even = pooled_counts(probs, shots, stream_seed(cfg.seed, L, 2))
        out["rc"] = (p, even / cfg.M)
    return out


def run_scan_L(cfg: ExperimentConfig, arm: str = "both") -> list[dict]:
    """p_even for L = 0..L_max per arm, with the layer-fidelity fit of the exact values."""
    cfg.check_scenario("scan_L")
    arms = _arms(arm)
    pi = noiseless_pi(cfg.build_ansatz(), cfg.build_observable())
    layers = list(range(cfg.L_max + 1))
    results = _pool_map(_scan_l_task, [(cfg, L, arms) for L in layers], cfg.workers)
    rows = []
    for a in arms:
        exact = [results[L][a][0] for L in layers]
        if len(layers) >= 3:
            f, r2 = fit_layer_fidelity(list(zip(layers, exact)), pi)
        else:
            f, r2 = math.nan, math.nan
        for L in layers:
            p, sampled = results[L][a]
            rows.append(dict(arm=a, L=L, p_even_exact=p, p_even_sampled=sampled, f_fit=f, r2=r2))
    return rows


# ---------------------------------------------------------------- sweep over pi


def sweep_thetas(cfg: ExperimentConfig) -> np.ndarray:
    """theta0 values drawn uniformly from [-pi, pi)."""
    rng = np.random.default_rng(stream_seed(cfg.seed, 0))
    return rng.uniform(-math.pi, math.pi, cfg.sweep_points)


def _scan_pi_task(args):
    cfg, index, theta0, arms = args
    P, noise = cfg.build_observable(), cfg.build_noise()
    A = build_h2_ansatz(theta0)
    pi = noiseless_pi(A, P)
    circuit = build_enhanced_circuit(A, P, cfg.L)
    out = {"pi": pi}
    if "bare" in arms:
        out["bare"] = parity_distribution(run(circuit, noise), P)
    if "rc" in arms:
        probs, shots = rc_exact(circuit, P, noise, cfg.N, cfg.M, stream_seed(cfg.seed, 1, index))
        out["rc"] = float(np.dot(probs, shots) / cfg.M)
    return out


def run_scan_pi(cfg: ExperimentConfig, arm: str = "both") -> list[dict]:
    """Exact p_even at fixed L across a seeded theta0 sweep, fitted per arm."""
    cfg.check_scenario("scan_pi")
    arms = _arms(arm)
    thetas = sweep_thetas(cfg)
    tasks = [(cfg, i, float(t), arms) for i, t in enumerate(thetas)]
    results = _pool_map(_scan_pi_task, tasks, cfg.workers)
    rows = []
    for a in arms:
        f, r2 = fit_sweep_fidelity([(r["pi"], r[a]) for r in results], cfg.L)
        for t, r in zip(thetas, results):
            rows.append(dict(arm=a, theta0=float(t), pi_exact=r["pi"], p_even=r[a], f_fit=f, r2=r2))
    return rows


# ---------------------------------------------------------------- estimator comparison


def shots_per_layer(M: int, Lmax: int) -> int:
    return M // (Lmax + 1)


def _compare_task(args):
    cfg, r, bare_probs, arms = args
    P, noise = cfg.build_observable(), cfg.build_noise()
    A = cfg.build_ansatz()
    top = max(cfg.lmax_values)
    estimates: dict[tuple[str, int], float] = {}

    if "bare" in arms:
        rec = sample_parities(bare_probs[0], cfg.M, stream_seed(cfg.seed, r, 0))
        estimates["SS", 0] = 2 * rec.even_count / cfg.M - 1

    # One ensemble per (repeat, L), shared by every Lmax that includes L.
    rc_probs = {}
    if "rc" in arms:
        for L in range(top + 1):
            circuit = build_enhanced_circuit(A, P, L)
            rc_probs[L], _ = rc_exact(
                circuit, P, noise, cfg.N, shots_per_layer(cfg.M, top), stream_seed(cfg.seed, r, 2, L)
            )

    for Lmax in cfg.lmax_values:
        m = shots_per_layer(cfg.M, Lmax)
        if "bare" in arms:
            recs = [
                (L, m, sample_parities(bare_probs[L], m, stream_seed(cfg.seed, r, 1, Lmax, L)).even_count)
                for L in range(Lmax + 1)
            ]
            est = estimate(
                ParityDataset.from_tuples(recs), B=cfg.B, grid=cfg.grid,
                seed=stream_seed(cfg.seed, r, 4, Lmax, 0),
            )
            estimates["RAE", Lmax] = est.pi_hat
        if "rc" in arms:
            shots = allocate_shots(m, cfg.N)
            recs = [
                (L, m, pooled_counts(rc_probs[L], shots, stream_seed(cfg.seed, r, 3, Lmax, L)))
                for L in range(Lmax + 1)
            ]
            est = estimate(
                ParityDataset.from_tuples(recs), B=cfg.B, grid=cfg.grid,
                seed=stream_seed(cfg.seed, r, 4, Lmax, 1),
            )
            estimates["RC-RAE", Lmax] = est.pi_hat
    return estimates


def run_compare(cfg: ExperimentConfig, arm: str = "both") -> list[dict]:
    """SS, RAE and RC-RAE estimates over ``repeats`` datasets per Lmax.

    Each repeat draws fresh twirled ensembles; bare-circuit probabilities are
    deterministic and computed once.
    """
    cfg.check_scenario("compare")
    arms = _arms(arm)
    A, P, noise = cfg.build_ansatz(), cfg.build_observable(), cfg.build_noise()
    truth = noiseless_pi(A, P)
    top = max(cfg.lmax_values)
    bare_probs = []
    if "bare" in arms:
        bare_probs = [
            parity_distribution(run(build_enhanced_circuit(A, P, L), noise), P) for L in range(top + 1)
        ]
    tasks = [(cfg, r, bare_probs, arms) for r in range(cfg.repeats)]
    per_repeat = _pool_map(_compare_task, tasks, cfg.workers)

    n_a = max(1, two_qubit_gate_count(A))
    n_o = cfg.n_o if cfg.n_o is not None else two_qubit_gate_count(build_reflection_r0(A.num_qubits))
    keys: list[tuple[str, int]] = []
    if "bare" in arms:
        keys.append(("SS", 0))
        keys += [("RAE", L) for L in cfg.lmax_values]
    if "rc" in arms:
        keys += [("RC-RAE", L) for L in cfg.lmax_values]
    rows = []
    for method, Lmax in keys:
        values = [rep[method, Lmax] for rep in per_repeat]
        cost = runtime(cfg.M, Lmax, n_o, n_a)
        if len(values) >= 2:
            s = summarize(values, truth, cost)
            stats = dict(mean=s.mean, bias=s.bias, rmse=s.rmse, se_mean=s.se_mean, se_rmse=s.se_rmse)
        else:
            v = values[0]
            stats = dict(mean=v, bias=v - truth, rmse=abs(v - truth), se_mean=math.nan, se_rmse=math.nan)
        rows.append(dict(method=method, Lmax=Lmax, **stats, runtime_units_A=cost))
    return rows


SCENARIO_RUNNERS = {"scan_L": run_scan_L, "scan_pi": run_scan_pi, "compare": run_compare}


def validate_rows(scenario: str, rows: Iterable[dict]) -> None:
    cols = COLUMNS[scenario]
    for row in rows:
        if tuple(row) != cols:
            raise RuntimeError(f"{scenario} row has columns {tuple(row)}, expected {cols}")
