"""Likelihood model and estimators for enhanced-sampling parity data."""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

PROB_CLAMP = 1e-12
DEFAULT_GRID = (2001, 501)
DEFAULT_B = 64

_GOLDEN = (math.sqrt(5) - 1) / 2


class FlatLikelihoodWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ParityRecord:
    L: int
    shots: int
    even_count: int

    def __post_init__(self):
        if self.L < 0:
            raise ValueError("layer count must be non-negative")
        if not 0 <= self.even_count <= self.shots:
            raise ValueError(f"even_count {self.even_count} outside [0, {self.shots}]")

    @property
    def odd_count(self) -> int:
        return self.shots - self.even_count


@dataclass(frozen=True)
class ParityDataset:
    records: tuple[ParityRecord, ...]

    def __post_init__(self):
        recs = tuple(r if isinstance(r, ParityRecord) else ParityRecord(*r) for r in self.records)
        layers = [r.L for r in recs]
        if len(set(layers)) != len(layers):
            raise ValueError(f"duplicate layer counts in dataset: {layers}")
        object.__setattr__(self, "records", recs)

    @classmethod
    def from_tuples(cls, rows: Iterable[tuple[int, int, int]]) -> ParityDataset:
        return cls(tuple(ParityRecord(int(L), int(m), int(k)) for L, m, k in rows))

    def reflected(self) -> ParityDataset:
        """Dataset with even and odd counts swapped."""
        return ParityDataset(tuple(ParityRecord(r.L, r.shots, r.odd_count) for r in self.records))

    def to_json(self) -> str:
        return json.dumps({"records": [asdict(r) for r in self.records]})

    @classmethod
    def from_json(cls, text: str) -> ParityDataset:
        data = json.loads(text)
        return cls(tuple(ParityRecord(**r) for r in data["records"]))


@dataclass(frozen=True)
class LikelihoodParams:
    pi_hat: float
    f: float
    lam: float
    flat: bool = False


def _params(pi_hat: float, f: float, flat: bool = False) -> LikelihoodParams:
    lam = math.inf if f <= 0 else -math.log(f)
    return LikelihoodParams(float(pi_hat), float(f), lam, flat)


def _check_domain(pi, f) -> None:
    if np.any(np.abs(pi) > 1 + 1e-12):
        raise ValueError(f"pi must lie in [-1, 1], got {pi}")
    if np.any((np.asarray(f) < 0) | (np.asarray(f) > 1)):
        raise ValueError(f"f must lie in [0, 1], got {f}")


def _signal(pi, f, L):
    """f**(L + 1/2) * cos((2L + 1) * arccos(pi))."""
    theta = np.arccos(np.clip(pi, -1.0, 1.0))
    return np.power(f, L + 0.5) * np.cos((2 * L + 1) * theta)


def likelihood(d: int, pi, f, L: int):
    """Probability of parity ``d`` after ``L`` Grover layers with layer fidelity ``f``."""
    if d not in (0, 1):
        raise ValueError("parity must be 0 or 1")
    if L < 0:
        raise ValueError("layer count must be non-negative")
    _check_domain(pi, f)
    s = _signal(pi, f, L)
    return 0.5 * (1 + s) if d == 0 else 0.5 * (1 - s)


def log_likelihood(ds: ParityDataset, pi, f):
    """Joint log-likelihood; ``pi`` and ``f`` broadcast against each other."""
    if not ds.records:
        raise ValueError("empty dataset")
    _check_domain(pi, f)
    pi = np.asarray(pi, dtype=float)
    f = np.asarray(f, dtype=float)
    total = 0.0
    for r in ds.records:
        s = _signal(pi, f, r.L)
        p0 = np.clip(0.5 * (1 + s), PROB_CLAMP, 1 - PROB_CLAMP)
        p1 = np.clip(0.5 * (1 - s), PROB_CLAMP, 1 - PROB_CLAMP)
        total = total + r.even_count * np.log(p0) + r.odd_count * np.log(p1)
    return total


def _grid_loglik(ds: ParityDataset, pis: np.ndarray, fs: np.ndarray) -> np.ndarray:
    """Log-likelihood on the outer grid, shape (len(pis), len(fs))."""
    theta = np.arccos(pis)
    out = np.zeros((pis.size, fs.size))
    for r in ds.records:
        s = np.cos((2 * r.L + 1) * theta)[:, None] * np.power(fs, r.L + 0.5)[None, :]
        if r.even_count:
            out += r.even_count * np.log(np.clip(0.5 * (1 + s), PROB_CLAMP, 1 - PROB_CLAMP))
        if r.odd_count:
            out += r.odd_count * np.log(np.clip(0.5 * (1 - s), PROB_CLAMP, 1 - PROB_CLAMP))
    return out


def _golden_max(func, lo: np.ndarray, hi: np.ndarray, iters: int = 48) -> np.ndarray:
    """Vectorised golden-section search for the maximiser of ``func`` on [lo, hi]."""
    a, b = lo.copy(), hi.copy()
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = func(c), func(d)
    for _ in range(iters):
        left = fc >= fd  # maximum lies in [a, d]
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = b - _GOLDEN * (b - a)
        new_d = a + _GOLDEN * (b - a)
        c_next = np.where(left, new_c, d)
        d_next = np.where(left, c, new_d)
        f_new = func(np.where(left, new_c, new_d))
        fc, fd = np.where(left, f_new, fd), np.where(left, fc, f_new)
        c, d = c_next, d_next
    return 0.5 * (a + b)


def estimate(
    ds: ParityDataset,
    B: int = DEFAULT_B,
    grid: tuple[int, int] = DEFAULT_GRID,
    seed=0,
    f_fixed: float | None = None,
    sweeps: int = 6,
) -> LikelihoodParams:
    """Maximum-likelihood estimate of (pi, f) from parity counts.

    A grid scan over [-1, 1] x [0, 1] seeds ``B`` local refinements from the
    best cells (with seeded sub-cell jitter); each refinement alternates
    golden-section line searches in pi and f. The reported pi is the mean of
    the refined maximisers. Grid ties resolve toward smaller ``|pi|``.

    When every record has L = 0, pi and f are not separately identifiable and
    f is pinned to 1 unless ``f_fixed`` says otherwise. If the likelihood does
    not depend on pi at all, the grid maximiser is returned with ``flat=True``.
    """
    if not ds.records:
        raise ValueError("empty dataset")
    if B < 1:
        raise ValueError("B must be >= 1")
    if f_fixed is None and all(r.L == 0 for r in ds.records):
        f_fixed = 1.0
    n_pi, n_f = grid
    pis = np.linspace(-1.0, 1.0, n_pi)
    fs = np.array([float(f_fixed)]) if f_fixed is not None else np.linspace(0.0, 1.0, n_f)
    ll = _grid_loglik(ds, pis, fs)

    profile = ll.max(axis=1)
    top = profile.max()
    flat = bool(top - profile.min() <= 1e-9 * max(1.0, abs(top)))

    flat_ll = ll.ravel()
    pi_idx, f_idx = np.divmod(np.arange(flat_ll.size), fs.size)
    order = np.lexsort((f_idx, np.abs(pis[pi_idx]), -flat_ll))
    if flat:
        warnings.warn("likelihood is flat in pi; returning grid maximiser", FlatLikelihoodWarning)
        k = order[0]
        return _params(pis[pi_idx[k]], fs[f_idx[k]], flat=True)

    starts = order[:B]
    rng = np.random.default_rng(seed)
    d_pi = pis[1] - pis[0]
    d_f = fs[1] - fs[0] if fs.size > 1 else 0.0
    pi_cur = np.clip(pis[pi_idx[starts]] + rng.uniform(-0.5, 0.5, starts.size) * d_pi, -1, 1)
    f_cur = np.clip(fs[f_idx[starts]] + rng.uniform(-0.5, 0.5, starts.size) * d_f, 0, 1)

    for _ in range(sweeps):
        f_hold = f_cur
        pi_cur = _golden_max(
            lambda x: log_likelihood(ds, x, f_hold),
            np.clip(pi_cur - 2 * d_pi, -1, 1),
            np.clip(pi_cur + 2 * d_pi, -1, 1),
        )
        if f_fixed is None:
            pi_hold = pi_cur
            f_cur = _golden_max(
                lambda x: log_likelihood(ds, pi_hold, x),
                np.clip(f_cur - 2 * d_f, 0, 1),
                np.clip(f_cur + 2 * d_f, 0, 1),
            )
    return _params(float(np.mean(pi_cur)), float(np.mean(f_cur)))


def _fit_decay(layers: np.ndarray, cosines: np.ndarray, observed: np.ndarray) -> tuple[float, float]:
    def sse(f):
        model = 0.5 * (1 + np.power(f, layers + 0.5) * cosines)
        return float(np.sum((observed - model) ** 2))

    res = minimize_scalar(sse, bounds=(0.0, 1.0), method="bounded", options={"xatol": 1e-12})
    candidates = [(sse(0.0), 0.0), (sse(1.0), 1.0), (sse(res.x), float(res.x))]
    best_sse, best_f = min(candidates)
    ss_tot = float(np.sum((observed - observed.mean()) ** 2))
    r2 = 1 - best_sse / ss_tot if ss_tot > 0 else (1.0 if best_sse == 0 else -math.inf)
    return best_f, r2


def fit_layer_fidelity(points: Sequence[tuple[int, float]], pi_known: float) -> tuple[float, float]:
    """Least-squares layer fidelity with pi fixed; returns (f, R^2)."""
    if len(points) < 3:
        raise ValueError("need at least 3 points to fit the layer fidelity")
    layers = np.array([p[0] for p in points], dtype=float)
    observed = np.array([p[1] for p in points], dtype=float)
    cosines = np.cos((2 * layers + 1) * math.acos(max(-1.0, min(1.0, pi_known))))
    return _fit_decay(layers, cosines, observed)


def fit_sweep_fidelity(points: Sequence[tuple[float, float]], L_fixed: int) -> tuple[float, float]:
    """Least-squares layer fidelity over a sweep of known pi at fixed L."""
    if len(points) < 3:
        raise ValueError("need at least 3 points to fit the layer fidelity")
    pis = np.clip(np.array([p[0] for p in points], dtype=float), -1, 1)
    observed = np.array([p[1] for p in points], dtype=float)
    layers = np.full(pis.shape, float(L_fixed))
    return _fit_decay(layers, np.cos((2 * L_fixed + 1) * np.arccos(pis)), observed)


def runtime(M: float, Lmax: int, n_O: int, n_A: int) -> float:
    """Cost of one estimate in units of ansatz executions."""
    if n_A < 1:
        raise ValueError("ansatz must contain at least one two-qubit gate")
    return M * (Lmax + 1) + M * n_O * Lmax / (2 * n_A)


@dataclass(frozen=True)
class EstimateSummary:
    mean: float
    bias: float
    rmse: float
    se_mean: float
    se_rmse: float
    runtime: float


def summarize(estimates: Sequence[float], truth: float, runtime: float) -> EstimateSummary:
    """Mean, bias and RMSE with standard errors (RMSE error by the delta method)."""
    est = np.asarray(estimates, dtype=float)
    if est.size < 2:
        raise ValueError("need at least two estimates")
    n = est.size
    mean = float(est.mean())
    sq = (est - truth) ** 2
    rmse = float(math.sqrt(sq.mean()))
    se_mean = float(est.std(ddof=1) / math.sqrt(n))
    se_rmse = float(sq.std(ddof=1) / math.sqrt(n) / (2 * rmse)) if rmse > 0 else 0.0
    return EstimateSummary(mean, mean - truth, rmse, se_mean, se_rmse, float(runtime))
