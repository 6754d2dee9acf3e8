"""Incoherent T1/T2 Kraus channel and the residual-ZZ noisy CNOT."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping

import numpy as np

from .circuit import embed_single
from .pauli import PAULI_MATRICES

Pair = tuple[int, int]


def _pair(i: int, j: int) -> Pair:
    return (i, j) if i < j else (j, i)


def chain_couplings(n: int, xi: float) -> dict[Pair, float]:
    """Uniform nearest-neighbour coupling map on a linear chain."""
    return {(i, i + 1): xi for i in range(n - 1)}


@dataclass(frozen=True)
class NoiseConfig:
    """Durations in seconds, ZZ strengths in rad/s keyed by unordered qubit pair.

    ``zz_couplings`` accepts a mapping and is stored as a sorted tuple of
    ``((i, j), xi)`` items so configs stay hashable.
    """

    t1: float = 84e-6
    t2: float = 110e-6
    t_step: float = 100e-9
    t_gate: float = 400e-9
    zz_couplings: Mapping[Pair, float] | tuple = field(default_factory=tuple)
    incoherent: bool = True
    coherent: bool = True

    def __post_init__(self):
        for name in ("t1", "t2", "t_step", "t_gate"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be a positive finite duration, got {value!r}")
        couplings = {_pair(*k): float(v) for k, v in dict(self.zz_couplings).items()}
        if any(i == j for i, j in couplings):
            raise ValueError("ZZ coupling needs two distinct qubits")
        object.__setattr__(self, "zz_couplings", tuple(sorted(couplings.items())))
        # Validates alpha + beta <= 1 for both durations used by the simulator.
        damping_parameters(self.t1, self.t2, self.t_step)
        damping_parameters(self.t1, self.t2, self.t_gate)

    @classmethod
    def from_units(
        cls,
        n: int,
        t1_us: float = 84.0,
        t2_us: float = 110.0,
        t_step_ns: float = 100.0,
        t_gate_ns: float = 400.0,
        zz_khz: float = 0.0,
        zz_pairs: list[Pair] | None = None,
        incoherent: bool = True,
        coherent: bool = True,
    ) -> NoiseConfig:
        """Build from lab units; ``zz_khz`` is xi/2pi, applied to every pair."""
        xi = 2 * math.pi * zz_khz * 1e3
        if zz_pairs is None:
            couplings = chain_couplings(n, xi)
        else:
            couplings = {_pair(int(i), int(j)): xi for i, j in zz_pairs}
        return cls(
            t1=t1_us * 1e-6,
            t2=t2_us * 1e-6,
            t_step=t_step_ns * 1e-9,
            t_gate=t_gate_ns * 1e-9,
            zz_couplings=couplings,
            incoherent=incoherent,
            coherent=coherent,
        )

    @property
    def couplings(self) -> dict[Pair, float]:
        return dict(self.zz_couplings)

    def xi(self, i: int, j: int) -> float:
        return self.couplings.get(_pair(i, j), 0.0)


def damping_parameters(t1: float, t2: float, t_step: float) -> tuple[float, float]:
    alpha = -math.expm1(-t_step / t1)
    beta = -math.expm1(-t_step / t2)
    if alpha + beta > 1:
        raise ValueError(
            f"alpha + beta = {alpha + beta:.6g} > 1 for T1={t1:g} s, T2={t2:g} s, "
            f"t_step={t_step:g} s; shorten t_step or lengthen T1/T2"
        )
    return alpha, beta


@dataclass(frozen=True)
class KrausChannel:
    operators: tuple[np.ndarray, ...]

    def completeness_error(self) -> float:
        dim = self.operators[0].shape[0]
        total = sum(e.conj().T @ e for e in self.operators)
        return float(np.max(np.abs(total - np.eye(dim))))

    def superoperator(self) -> np.ndarray:
        """Row-major superoperator: vec(E rho E^dag) = (E kron E*) vec(rho)."""
        return sum(np.kron(e, e.conj()) for e in self.operators)


def damping_kraus(t1: float, t2: float, t_step: float) -> KrausChannel:
    """Combined amplitude damping and dephasing over one time step."""
    alpha, beta = damping_parameters(t1, t2, t_step)
    e1 = np.array([[1, 0], [0, math.sqrt(1 - alpha - beta)]], dtype=complex)
    e2 = np.array([[0, math.sqrt(alpha)], [0, 0]], dtype=complex)
    e3 = np.array([[0, 0], [0, math.sqrt(beta)]], dtype=complex)
    return KrausChannel((e1, e2, e3))


def apply_single_qubit_superop(rho: np.ndarray, superop: np.ndarray, qubit: int, n: int) -> np.ndarray:
    """Apply a 4x4 row-major superoperator to one qubit of an n-qubit state."""
    left, right = 2**qubit, 2 ** (n - qubit - 1)
    t = rho.reshape(left, 2, right, left, 2, right)
    s = superop.reshape(2, 2, 2, 2)  # (i, j, k, l): out[i, j] += s * in[k, l]
    out = np.einsum("ijkl,akbclw->aibcjw", s, t, optimize=False)
    return out.reshape(rho.shape)


def register_superop(superop: np.ndarray, n: int) -> np.ndarray:
    """Full row-major superoperator for the same 4x4 channel on each of n qubits."""
    s = superop.reshape(2, 2, 2, 2)
    full = np.ones((1,) * 4, dtype=complex)
    for _ in range(n):
        # axes: (rows, cols, in_rows, in_cols), each growing by one qubit
        full = np.einsum("abcd,ijkl->aibjckdl", full, s).reshape(
            full.shape[0] * 2, full.shape[1] * 2, full.shape[2] * 2, full.shape[3] * 2
        )
    dim = 2**n
    return full.reshape(dim * dim, dim * dim)


def apply_incoherent(rho: np.ndarray, channel: KrausChannel) -> np.ndarray:
    """Apply the single-qubit channel independently to every qubit."""
    dim = rho.shape[0]
    n = dim.bit_length() - 1
    if rho.shape != (dim, dim) or 2**n != dim:
        raise ValueError(f"density matrix shape {rho.shape} is not 2^n x 2^n")
    if channel.operators[0].shape != (2, 2):
        raise ValueError("apply_incoherent expects a single-qubit channel")
    superop = channel.superoperator()
    for q in range(n):
        rho = apply_single_qubit_superop(rho, superop, q, n)
    return rho


def zz_operator(i: int, j: int, n: int) -> np.ndarray:
    z = PAULI_MATRICES["Z"]
    return embed_single(z, i, n) @ embed_single(z, j, n)


def zz_hamiltonian(control: int, target: int, cfg: NoiseConfig, n: int) -> np.ndarray:
    """Residual ZZ generator seen by a CNOT: the (c, t) term plus spectators of c and t."""
    dim = 2**n
    xi_op = np.zeros((dim, dim), dtype=complex)
    ct = _pair(control, target)
    for (i, j), xi in cfg.zz_couplings:
        if xi == 0 or (i, j) == ct:
            continue
        if control in (i, j) or target in (i, j):
            xi_op += xi * zz_operator(i, j, n)
    xi_ct = cfg.xi(control, target)
    if xi_ct:
        xi_op += xi_ct * zz_operator(control, target, n)
    return xi_op


def expm_hermitian(generator: np.ndarray, t: float) -> np.ndarray:
    """exp(i * generator * t) for Hermitian ``generator`` via eigendecomposition."""
    w, v = np.linalg.eigh(generator)
    return (v * np.exp(1j * w * t)) @ v.conj().T


def noisy_cnot_unitary(control: int, target: int, cfg: NoiseConfig, n: int) -> np.ndarray:
    """Cross-resonance CNOT with residual ZZ acting during the entangling pulse.

    The ZX term carries the sign that makes the xi = 0 limit the ideal CNOT.
    """
    return _noisy_cnot_cached(control, target, cfg, n).copy()


@lru_cache(maxsize=256)
def _noisy_cnot_cached(control: int, target: int, cfg: NoiseConfig, n: int) -> np.ndarray:
    z_c = embed_single(PAULI_MATRICES["Z"], control, n)
    x_t = embed_single(PAULI_MATRICES["X"], target, n)
    gamma = math.pi / (4 * cfg.t_gate)
    generator = -gamma * (z_c @ x_t) + zz_hamiltonian(control, target, cfg, n)
    pre = expm_hermitian(x_t, math.pi / 4)
    post = expm_hermitian(z_c, math.pi / 4)
    return np.exp(-1j * math.pi / 4) * post @ expm_hermitian(generator, cfg.t_gate) @ pre
