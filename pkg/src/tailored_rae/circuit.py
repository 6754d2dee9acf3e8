"""Circuit IR built from alternating easy (single-qubit) and hard (CNOT) cycles.

Qubit 0 is the most significant tensor factor: basis state ``|q0 q1 ... q_{n-1}>``.
All unitary equivalences in this package are taken modulo global phase.

Text dump grammar (one cycle per line)::

    line   := kind ":" gate ("," gate)*     kind in {E, H}
    gate   := name ["(" angle ")"] "@" qubits
    qubits := int ("," int)*  for CNOT written as control->target

Generic fused gates are written ``U[a,b,c,d]@q`` with the four complex entries
in row-major order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .pauli import PAULI_MATRICES, Observable, PauliString

EASY = "easy"
HARD = "hard"

MAX_DENSE_QUBITS = 6

ROTATIONS = ("RX", "RY", "RZ")
SINGLE_QUBIT_KINDS = ("I", "X", "Y", "Z", "H", "RX", "RY", "RZ", "U")

_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def _rotation(axis: str, angle: float) -> np.ndarray:
    pauli = PAULI_MATRICES[axis]
    return math.cos(angle / 2) * np.eye(2) - 1j * math.sin(angle / 2) * pauli


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None
    # Row-major entries of a generic 2x2 unitary (kind "U" only).
    entries: tuple[complex, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if self.kind == "CNOT":
            if len(self.qubits) != 2 or self.qubits[0] == self.qubits[1]:
                raise ValueError(f"CNOT needs two distinct qubits, got {self.qubits}")
        elif self.kind in SINGLE_QUBIT_KINDS:
            if len(self.qubits) != 1:
                raise ValueError(f"{self.kind} acts on exactly one qubit, got {self.qubits}")
        else:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.kind in ROTATIONS:
            if self.angle is None or not math.isfinite(self.angle):
                raise ValueError(f"{self.kind} needs a finite angle")
        if self.kind == "U" and (self.entries is None or len(self.entries) != 4):
            raise ValueError("generic gate needs four matrix entries")
        if any(q < 0 for q in self.qubits):
            raise ValueError("qubit indices must be non-negative")

    @property
    def is_two_qubit(self) -> bool:
        return self.kind == "CNOT"

    def matrix(self) -> np.ndarray:
        """2x2 matrix for single-qubit gates, 4x4 (control first) for CNOT."""
        if self.kind == "CNOT":
            return np.array(
                [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
            )
        if self.kind in ROTATIONS:
            return _rotation(self.kind[1], self.angle)
        if self.kind == "H":
            return _H.copy()
        if self.kind == "U":
            return np.array(self.entries, dtype=complex).reshape(2, 2)
        return PAULI_MATRICES[self.kind].copy()

    def inverse(self) -> Gate:
        if self.kind in ROTATIONS:
            return Gate(self.kind, self.qubits, -self.angle)
        if self.kind == "U":
            return generic_gate(self.matrix().conj().T, self.qubits[0])
        return self

    def __str__(self) -> str:
        if self.kind == "CNOT":
            return f"CNOT@{self.qubits[0]}->{self.qubits[1]}"
        if self.kind in ROTATIONS:
            return f"{self.kind}({self.angle!r})@{self.qubits[0]}"
        if self.kind == "U":
            vals = ",".join(repr(complex(v)) for v in self.entries)
            return f"U[{vals}]@{self.qubits[0]}"
        return f"{self.kind}@{self.qubits[0]}"


def generic_gate(matrix: np.ndarray, qubit: int) -> Gate:
    m = np.asarray(matrix, dtype=complex).reshape(4)
    return Gate("U", (qubit,), entries=tuple(complex(v) for v in m))


# Convenience constructors, mostly for the builders and tests.
def X(q): return Gate("X", (q,))
def Y(q): return Gate("Y", (q,))
def Z(q): return Gate("Z", (q,))
def H(q): return Gate("H", (q,))
def RX(theta, q): return Gate("RX", (q,), float(theta))
def RY(theta, q): return Gate("RY", (q,), float(theta))
def RZ(theta, q): return Gate("RZ", (q,), float(theta))
def CNOT(control, target): return Gate("CNOT", (control, target))


@dataclass(frozen=True)
class Cycle:
    kind: str
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        touched: set[int] = set()
        for g in self.gates:
            if self.kind == EASY and g.is_two_qubit:
                raise ValueError("easy cycle may only hold single-qubit gates")
            if self.kind == HARD and not g.is_two_qubit:
                raise ValueError("hard cycle may only hold CNOTs")
            if touched.intersection(g.qubits):
                raise ValueError(f"gates in a cycle must act on disjoint qubits: {g}")
            touched.update(g.qubits)
        if self.kind not in (EASY, HARD):
            raise ValueError(f"unknown cycle kind {self.kind!r}")

    def gate_on(self, qubit: int) -> Gate | None:
        for g in self.gates:
            if qubit in g.qubits:
                return g
        return None

    def __str__(self) -> str:
        tag = "E" if self.kind == EASY else "H"
        return f"{tag}: " + ", ".join(str(g) for g in self.gates)


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    cycles: tuple[Cycle, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "cycles", tuple(self.cycles))
        if self.num_qubits < 1:
            raise ValueError("circuit needs at least one qubit")
        for cyc in self.cycles:
            for g in cyc.gates:
                if max(g.qubits) >= self.num_qubits:
                    raise ValueError(f"gate {g} outside a {self.num_qubits}-qubit register")

    @classmethod
    def from_gates(cls, num_qubits: int, gates: Iterable[Gate]) -> Circuit:
        """One cycle per gate, in order. Call :func:`normalize_cycles` to compact."""
        cycles = [Cycle(HARD if g.is_two_qubit else EASY, (g,)) for g in gates]
        return cls(num_qubits, tuple(cycles))

    def gates(self) -> list[Gate]:
        return [g for cyc in self.cycles for g in cyc.gates]

    def kinds(self) -> tuple[str, ...]:
        return tuple(c.kind for c in self.cycles)

    def inverse(self) -> Circuit:
        return Circuit(
            self.num_qubits,
            tuple(Cycle(c.kind, tuple(g.inverse() for g in c.gates)) for c in reversed(self.cycles)),
        )

    def __add__(self, other: Circuit) -> Circuit:
        if self.num_qubits != other.num_qubits:
            raise ValueError("cannot concatenate circuits of different width")
        return Circuit(self.num_qubits, self.cycles + other.cycles)

    def dump(self) -> str:
        return "\n".join(str(c) for c in self.cycles)


def _is_identity_up_to_phase(m: np.ndarray, atol: float = 1e-12) -> bool:
    return abs(abs(np.trace(m)) / 2 - 1) < atol and abs(m[0, 1]) < atol and abs(m[1, 0]) < atol


def fuse(first: Gate | None, second: Gate | None) -> Gate | None:
    """Single-qubit gate equivalent to applying ``first`` then ``second``.

    Returns None when the product is the identity up to phase.
    """
    if first is None or first.kind == "I":
        return None if second is None or second.kind == "I" else second
    if second is None or second.kind == "I":
        return first
    if first.kind == second.kind and first.kind in ROTATIONS:
        return Gate(first.kind, first.qubits, first.angle + second.angle)
    product = second.matrix() @ first.matrix()
    if _is_identity_up_to_phase(product):
        return None
    return generic_gate(product, first.qubits[0])


def normalize_cycles(c: Circuit) -> Circuit:
    """Schedule gates as early as possible into strictly alternating cycles.

    The result starts and ends with an easy cycle (possibly empty) and adjacent
    single-qubit gates on a qubit are fused into one.
    """
    n = c.num_qubits
    slots: list[dict[int, Gate]] = [{}]  # even index easy, odd index hard
    last = [-1] * n
    for g in c.gates():
        t = max(last[q] for q in g.qubits)
        if g.is_two_qubit:
            idx = t + 1 if t % 2 == 0 else t + 2
        else:
            idx = t if t % 2 == 0 else t + 1
        while len(slots) <= idx:
            slots.append({})
        slot = slots[idx]
        if g.is_two_qubit:
            slot[g.qubits[0]] = g
        else:
            q = g.qubits[0]
            fused = fuse(slot.get(q), g)
            if fused is None:
                slot.pop(q, None)
            else:
                slot[q] = fused
        for q in g.qubits:
            last[q] = idx
    if len(slots) % 2 == 0:
        slots.append({})
    cycles = []
    for i, slot in enumerate(slots):
        gates = tuple(slot[k] for k in sorted(slot))
        cycles.append(Cycle(EASY if i % 2 == 0 else HARD, gates))
    return Circuit(n, tuple(cycles))


def two_qubit_gate_count(c: Circuit) -> int:
    return sum(1 for g in c.gates() if g.is_two_qubit)


def _kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # np.kron carries noticeable Python overhead for these tiny operands.
    return (a[:, None, :, None] * b[None, :, None, :]).reshape(
        a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]
    )


def kron_all(mats: Sequence[np.ndarray]) -> np.ndarray:
    return reduce(_kron, mats)


def embed_single(m: np.ndarray, qubit: int, n: int) -> np.ndarray:
    mats = [np.eye(2, dtype=complex) for _ in range(n)]
    mats[qubit] = m
    return kron_all(mats)


def cnot_matrix(control: int, target: int, n: int) -> np.ndarray:
    dim = 2**n
    idx = np.arange(dim)
    cbit = (idx >> (n - 1 - control)) & 1
    image = idx ^ (cbit << (n - 1 - target))
    u = np.zeros((dim, dim), dtype=complex)
    u[image, idx] = 1
    return u


def easy_cycle_matrix(cycle: Cycle, n: int) -> np.ndarray:
    mats = [np.eye(2, dtype=complex) for _ in range(n)]
    for g in cycle.gates:
        mats[g.qubits[0]] = g.matrix()
    return kron_all(mats)


def cycle_unitary(cycle: Cycle, n: int) -> np.ndarray:
    if cycle.kind == EASY:
        return easy_cycle_matrix(cycle, n)
    u = np.eye(2**n, dtype=complex)
    for g in cycle.gates:
        u = cnot_matrix(*g.qubits, n) @ u
    return u


def unitary_of(c: Circuit) -> np.ndarray:
    if c.num_qubits > MAX_DENSE_QUBITS:
        raise ValueError(f"dense unitary limited to {MAX_DENSE_QUBITS} qubits, got {c.num_qubits}")
    u = np.eye(2**c.num_qubits, dtype=complex)
    for cyc in c.cycles:
        u = cycle_unitary(cyc, c.num_qubits) @ u
    return u


def equal_up_to_phase(a: np.ndarray, b: np.ndarray) -> float:
    """Max-abs deviation between ``a`` and ``b`` after aligning global phase.

    The phase is read off the entry of largest modulus in ``b``.
    """
    k = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(a[k]) == 0:
        return float(np.max(np.abs(a - b)))
    phase = b[k] / a[k]
    phase /= abs(phase)
    return float(np.max(np.abs(a * phase - b)))


# ---------------------------------------------------------------- builders


def build_h2_ansatz(theta0: float) -> Circuit:
    """Four-qubit hydrogen ansatz; q2 controls CNOTs onto q0, q1 and q3."""
    if not math.isfinite(theta0):
        raise ValueError("theta0 must be finite")
    gates = [X(0), X(1), RY(theta0, 2), CNOT(2, 0), CNOT(2, 1), CNOT(2, 3)]
    return normalize_cycles(Circuit.from_gates(4, gates))


def _ldca_gates(t: Sequence[float]) -> list[Gate]:
    hp, hm = math.pi / 2, -math.pi / 2
    c = lambda: CNOT(0, 1)  # noqa: E731
    return [
        X(0), RZ(t[0], 0), RX(hp, 0), RZ(t[1], 1), H(1),
        c(), RZ(2 * t[2], 1), c(),
        RX(hm, 0), H(0), H(1), RX(hp, 1),
        c(), RZ(-2 * t[2], 1), c(),
        H(0), RX(hm, 1),
        c(), RZ(2 * t[3], 1), c(),
        RX(hp, 0), RX(hp, 1),
        c(), RZ(2 * t[4], 1), c(),
        RX(hm, 0), H(0), RX(hm, 1), H(1),
        c(), RZ(2 * t[4], 1), c(),
        H(0), H(1), RX(hp, 0), H(1),
        c(), RZ(2 * t[5], 1), c(),
        RX(hm, 0), H(0), H(1), RX(hp, 1),
        c(), RZ(-2 * t[5], 1), c(),
        H(0), RX(hm, 1),
        c(), RZ(2 * t[6], 1), c(),
        RX(hp, 0), RX(hp, 1),
        c(), RZ(2 * t[7], 1), c(),
        RX(hm, 0), H(0), RX(hm, 1), H(1),
        c(), RZ(2 * t[7], 1), c(),
        H(0), H(1),
    ]


def build_ldca(thetas: Sequence[float]) -> Circuit:
    """Two-qubit low-depth circuit ansatz with 20 CNOTs (control q0)."""
    thetas = [float(t) for t in thetas]
    if len(thetas) != 8:
        raise ValueError(f"LDCA takes exactly 8 angles, got {len(thetas)}")
    if not all(math.isfinite(t) for t in thetas):
        raise ValueError("LDCA angles must be finite")
    return normalize_cycles(Circuit.from_gates(2, _ldca_gates(thetas)))


def _gray_code_phase_gates(coeffs: dict[frozenset, float], n: int) -> list[Gate]:
    """Gates realising exp(i * sum_S coeffs[S] * Z_S) for nonempty parities S.

    For each target t (highest first) the parities {t} | S, S within 0..t-1,
    are accumulated on t by walking a Gray code over the lower qubits.
    """
    gates: list[Gate] = []
    for t in range(n - 1, -1, -1):
        k = t
        prev = 0
        for step in range(2**k):
            code = step ^ (step >> 1)
            flipped = code ^ prev
            if flipped:
                gates.append(CNOT(flipped.bit_length() - 1, t))
            prev = code
            subset = frozenset([t] + [j for j in range(k) if (code >> j) & 1])
            a = coeffs.get(subset, 0.0)
            if a:
                gates.append(RZ(-2 * a, t))
        if prev:
            gates.append(CNOT(prev.bit_length() - 1, t))
    return gates


def build_reflection_r0(n: int) -> Circuit:
    """Reflection about |0...0> from CNOTs and RZ rotations (2**n - 2 CNOTs)."""
    if n < 1:
        raise ValueError("reflection needs n >= 1")
    if n == 1:
        return normalize_cycles(Circuit.from_gates(1, [Z(0)]))
    # exp(i pi |0><0|) = I - 2|0><0|, and |0><0| = 2**-n sum_S Z_S.
    a = math.pi / 2**n
    coeffs = {}
    for mask in range(1, 2**n):
        coeffs[frozenset(j for j in range(n) if (mask >> j) & 1)] = a
    return normalize_cycles(Circuit.from_gates(n, _gray_code_phase_gates(coeffs, n)))


def pauli_cycle(p: PauliString) -> Cycle:
    gates = tuple(Gate(ch, (q,)) for q, ch in enumerate(p.letters) if ch != "I")
    return Cycle(EASY, gates)


def build_grover_iterate(A: Circuit, P: Observable, r0: Circuit | None = None) -> Circuit:
    """Time order P, A^dagger, R0, A; as an operator G = A R0 A^dagger P."""
    if A.num_qubits != P.num_qubits:
        raise ValueError(
            f"ansatz has {A.num_qubits} qubits but observable {P.label} has {P.num_qubits}"
        )
    n = A.num_qubits
    r0 = build_reflection_r0(n) if r0 is None else r0
    p_part = Circuit(n, (pauli_cycle(P.pauli),))
    return normalize_cycles(p_part + A.inverse() + r0 + A)


def basis_change(P: Observable) -> Cycle:
    """Rotate each non-identity factor of P onto Z (H for X, RX(pi/2) for Y)."""
    if P.pauli.is_identity():
        raise ValueError("basis change undefined for the identity observable")
    gates = []
    for q, ch in enumerate(P.label):
        if ch == "X":
            gates.append(H(q))
        elif ch == "Y":
            gates.append(RX(math.pi / 2, q))
    return Cycle(EASY, tuple(gates))


def build_enhanced_circuit(A: Circuit, P: Observable, L: int, r0: Circuit | None = None) -> Circuit:
    """A followed by L Grover iterates and the measurement basis change for P."""
    if L < 0:
        raise ValueError("layer count L must be >= 0")
    n = A.num_qubits
    out = A
    if L:
        g = build_grover_iterate(A, P, r0)
        for _ in range(L):
            out = out + g
    out = out + Circuit(n, (basis_change(P),))
    return normalize_cycles(out)
