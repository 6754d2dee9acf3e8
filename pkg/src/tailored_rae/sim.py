"""Dense density-matrix simulation of cycle-structured circuits."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .circuit import EASY, MAX_DENSE_QUBITS, Circuit, cnot_matrix, easy_cycle_matrix
from .noise import (
    NoiseConfig,
    apply_single_qubit_superop,
    damping_kraus,
    noisy_cnot_unitary,
    register_superop,
)
from .pauli import Observable

# Above this width damping is applied qubit by qubit instead of as one
# register-wide 4**n x 4**n superoperator.
FULL_SUPEROP_MAX_QUBITS = 4


@dataclass(frozen=True)
class ShotRecord:
    shots: int
    even_count: int
    p_even_exact: float | None = None

    def __post_init__(self):
        if not 0 <= self.even_count <= self.shots:
            raise ValueError(f"even_count {self.even_count} outside [0, {self.shots}]")

    @property
    def odd_count(self) -> int:
        return self.shots - self.even_count


def zero_state(n: int) -> np.ndarray:
    rho = np.zeros((2**n, 2**n), dtype=complex)
    rho[0, 0] = 1
    return rho


def check_density_matrix(rho: np.ndarray, atol: float = 1e-10) -> None:
    """Raise AssertionError unless ``rho`` is Hermitian, unit-trace and PSD."""
    assert np.allclose(rho, rho.conj().T, atol=atol), "density matrix not Hermitian"
    assert abs(np.trace(rho) - 1) < atol, f"trace {np.trace(rho).real} != 1"
    assert np.linalg.eigvalsh(rho).min() > -1e-8, "density matrix not positive"


class _Propagator:
    """Caches per-run matrices: CNOT unitaries and damping superoperators."""

    def __init__(self, n: int, cfg: NoiseConfig | None):
        self.n = n
        self.cfg = cfg
        self._cnots: dict[tuple[int, int], np.ndarray] = {}
        self.step_superop = self.gate_superop = None
        if cfg is not None and cfg.incoherent:
            self.step_superop = self._superop(cfg.t_step)
            self.gate_superop = self._superop(cfg.t_gate)

    def _superop(self, duration: float) -> np.ndarray:
        if self.n <= FULL_SUPEROP_MAX_QUBITS:
            return _register_superop_cached(self.cfg.t1, self.cfg.t2, duration, self.n)
        return damping_kraus(self.cfg.t1, self.cfg.t2, duration).superoperator()

    def cnot(self, control: int, target: int) -> np.ndarray:
        key = (control, target)
        if key not in self._cnots:
            if self.cfg is not None and self.cfg.coherent:
                self._cnots[key] = noisy_cnot_unitary(control, target, self.cfg, self.n)
            else:
                self._cnots[key] = cnot_matrix(control, target, self.n)
        return self._cnots[key]

    def damp(self, rho: np.ndarray, superop: np.ndarray | None) -> np.ndarray:
        if superop is None:
            return rho
        if superop.shape[0] == rho.size:
            return (superop @ rho.reshape(-1)).reshape(rho.shape)
        for q in range(self.n):
            rho = apply_single_qubit_superop(rho, superop, q, self.n)
        return rho


@lru_cache(maxsize=32)
def _register_superop_cached(t1: float, t2: float, duration: float, n: int) -> np.ndarray:
    return register_superop(damping_kraus(t1, t2, duration).superoperator(), n)


def run(c: Circuit, cfg: NoiseConfig | None = None, check: bool = False) -> np.ndarray:
    """Evolve |0...0><0...0| through ``c``; ``cfg=None`` is noiseless.

    Every cycle is followed by damping on all qubits (idle ones included) for
    ``t_step`` after easy cycles and ``t_gate`` after hard cycles.
    """
    n = c.num_qubits
    if n > MAX_DENSE_QUBITS:
        raise ValueError(f"simulator limited to {MAX_DENSE_QUBITS} qubits, got {n}")
    prop = _Propagator(n, cfg)
    rho = zero_state(n)
    for cyc in c.cycles:
        if cyc.kind == EASY:
            if cyc.gates:
                u = easy_cycle_matrix(cyc, n)
                rho = u @ rho @ u.conj().T
            rho = prop.damp(rho, prop.step_superop)
        else:
            for g in cyc.gates:
                u = prop.cnot(*g.qubits)
                rho = u @ rho @ u.conj().T
            rho = prop.damp(rho, prop.gate_superop)
        if check:
            check_density_matrix(rho)
    return rho


def parity_signs(support: tuple[int, ...], n: int) -> np.ndarray:
    """(-1)**(parity of the bits in ``support``) for every basis index."""
    idx = np.arange(2**n)
    parity = np.zeros(2**n, dtype=np.int64)
    for q in support:
        parity ^= (idx >> (n - 1 - q)) & 1
    return 1 - 2 * parity


def parity_distribution(rho: np.ndarray, P: Observable) -> float:
    """Probability of even parity on the support of ``P`` in the computational basis."""
    n = P.num_qubits
    diag = np.real(np.diag(rho))
    z_expect = float(np.dot(diag, parity_signs(P.support, n)))
    return min(1.0, max(0.0, 0.5 * (1 + z_expect)))


def expectation(rho: np.ndarray, P: Observable) -> float:
    if rho.shape[0] != 2**P.num_qubits:
        raise ValueError("observable and state dimensions differ")
    return float(np.real(np.trace(rho @ P.matrix())))


def sample_parities(p_even: float, shots: int, seed) -> ShotRecord:
    """Binomial draw of even-parity outcomes from a dedicated seeded generator."""
    if not -1e-12 <= p_even <= 1 + 1e-12:
        raise ValueError(f"p_even {p_even} is not a probability")
    p = min(1.0, max(0.0, float(p_even)))
    rng = np.random.default_rng(seed)
    return ShotRecord(int(shots), int(rng.binomial(int(shots), p)), p)
