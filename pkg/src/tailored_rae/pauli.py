"""Pauli strings with an explicit phase in {+1, +i, -1, -i}."""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

LETTERS = "IXYZ"

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# (a, b) -> (c, k) with a.b = i**k c
_PRODUCT = {
    ("I", "I"): ("I", 0), ("I", "X"): ("X", 0), ("I", "Y"): ("Y", 0), ("I", "Z"): ("Z", 0),
    ("X", "I"): ("X", 0), ("X", "X"): ("I", 0), ("X", "Y"): ("Z", 1), ("X", "Z"): ("Y", 3),
    ("Y", "I"): ("Y", 0), ("Y", "X"): ("Z", 3), ("Y", "Y"): ("I", 0), ("Y", "Z"): ("X", 1),
    ("Z", "I"): ("Z", 0), ("Z", "X"): ("Y", 1), ("Z", "Y"): ("X", 3), ("Z", "Z"): ("I", 0),
}

# Heisenberg images under CNOT(control, target): letter on one leg -> (control letter, target letter).
_CNOT_CONTROL_IMAGE = {"I": ("I", "I"), "X": ("X", "X"), "Y": ("Y", "X"), "Z": ("Z", "I")}
_CNOT_TARGET_IMAGE = {"I": ("I", "I"), "X": ("I", "X"), "Y": ("Z", "Y"), "Z": ("Z", "Z")}


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Paulis times ``1j ** phase``.

    ``letters[q]`` acts on qubit ``q``; qubit 0 is the most significant tensor factor.
    """

    letters: str
    phase: int = 0

    def __post_init__(self):
        if not self.letters or any(ch not in LETTERS for ch in self.letters):
            raise ValueError(f"invalid Pauli label {self.letters!r}")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def from_label(cls, label: str) -> PauliString:
        """Parse labels such as ``"XXXX"``, ``"-ZI"`` or ``"+iXY"``."""
        phase = 0
        body = label.strip()
        if body.startswith(("+", "-")):
            phase = 0 if body[0] == "+" else 2
            body = body[1:]
        if body.startswith("i"):
            phase += 1
            body = body[1:]
        return cls(body.upper(), phase)

    @classmethod
    def identity(cls, n: int) -> PauliString:
        return cls("I" * n)

    @property
    def num_qubits(self) -> int:
        return len(self.letters)

    @property
    def coefficient(self) -> complex:
        return 1j ** self.phase

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(q for q, ch in enumerate(self.letters) if ch != "I")

    def is_identity(self) -> bool:
        return not self.support

    def is_hermitian(self) -> bool:
        return self.phase in (0, 2)

    def dagger(self) -> PauliString:
        return PauliString(self.letters, -self.phase)

    def __mul__(self, other: PauliString) -> PauliString:
        if self.num_qubits != other.num_qubits:
            raise ValueError("Pauli strings act on different numbers of qubits")
        phase = self.phase + other.phase
        out = []
        for a, b in zip(self.letters, other.letters):
            c, k = _PRODUCT[a, b]
            out.append(c)
            phase += k
        return PauliString("".join(out), phase)

    def matrix(self) -> np.ndarray:
        mats = [PAULI_MATRICES[ch] for ch in self.letters]
        return self.coefficient * reduce(np.kron, mats)

    def conjugate_cnot(self, control: int, target: int) -> PauliString:
        """Return ``CNOT . self . CNOT``."""
        n = self.num_qubits
        result = PauliString("I" * n, self.phase)
        for leg, table in ((control, _CNOT_CONTROL_IMAGE), (target, _CNOT_TARGET_IMAGE)):
            c_letter, t_letter = table[self.letters[leg]]
            image = ["I"] * n
            image[control] = c_letter
            image[target] = t_letter
            result = result * PauliString("".join(image))
        untouched = [
            ch if q not in (control, target) else r
            for q, (ch, r) in enumerate(zip(self.letters, result.letters))
        ]
        return PauliString("".join(untouched), result.phase)

    def __str__(self) -> str:
        prefix = {0: "+", 1: "+i", 2: "-", 3: "-i"}[self.phase]
        return prefix + self.letters


@dataclass(frozen=True)
class Observable:
    """A Hermitian Pauli observable (phase +1), eigenvalues +-1."""

    pauli: PauliString

    def __post_init__(self):
        if self.pauli.phase != 0:
            raise ValueError("observable must carry phase +1")

    @classmethod
    def from_label(cls, label: str) -> Observable:
        return cls(PauliString.from_label(label))

    @property
    def num_qubits(self) -> int:
        return self.pauli.num_qubits

    @property
    def label(self) -> str:
        return self.pauli.letters

    @property
    def support(self) -> tuple[int, ...]:
        return self.pauli.support

    def matrix(self) -> np.ndarray:
        return self.pauli.matrix()
