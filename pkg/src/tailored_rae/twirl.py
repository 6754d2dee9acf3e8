"""Randomized compiling: Pauli-twirled, depth-preserving duplicates of a circuit."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .circuit import EASY, HARD, Circuit, Cycle, Gate, fuse, normalize_cycles
from .pauli import LETTERS, PauliString


def pauli_conjugate_through_hard(hc: Cycle, p: PauliString) -> PauliString:
    """Return the Pauli ``H . p^dag . H^dag`` for a hard cycle ``H``."""
    if hc.kind != HARD:
        raise ValueError("Pauli propagation needs a hard cycle")
    out = p.dagger()
    for g in hc.gates:
        if g.kind != "CNOT":
            raise ValueError(f"cannot propagate a Pauli through non-Clifford gate {g}")
        out = out.conjugate_cnot(*g.qubits)
    return out


def _dress_easy(cycle: Cycle, before: PauliString, after: PauliString) -> Cycle:
    """Fuse ``before``, the cycle's gates, then ``after`` on every qubit."""
    gates = []
    for q in range(len(before.letters)):
        g = fuse(_pauli_gate(before.letters[q], q), cycle.gate_on(q))
        g = fuse(g, _pauli_gate(after.letters[q], q))
        if g is not None:
            gates.append(g)
    return Cycle(EASY, tuple(gates))


def _pauli_gate(letter: str, q: int) -> Gate | None:
    return None if letter == "I" else Gate(letter, (q,))


def _is_alternating(c: Circuit) -> bool:
    kinds = c.kinds()
    return (
        len(kinds) % 2 == 1
        and all(k == (EASY if i % 2 == 0 else HARD) for i, k in enumerate(kinds))
    )


def twirl_once(c: Circuit, seed) -> Circuit:
    """One random duplicate of ``c``.

    A uniformly random Pauli string follows every easy cycle that precedes a
    hard cycle; its image through the hard cycle is undone at the start of the
    next easy cycle. Pauli layers are fused into the easy cycles so the cycle
    structure is unchanged, and sign factors from the propagation are dropped
    as global phase.
    """
    if not _is_alternating(c):
        c = normalize_cycles(c)
    rng = np.random.default_rng(seed)
    n = c.num_qubits
    identity = PauliString.identity(n)
    correction = identity
    cycles = list(c.cycles)
    out = []
    for i in range(0, len(cycles), 2):
        easy = cycles[i]
        if i + 1 < len(cycles):
            letters = "".join(LETTERS[k] for k in rng.integers(0, 4, size=n))
            frame = PauliString(letters)
            out.append(_dress_easy(easy, correction, frame))
            hard = cycles[i + 1]
            out.append(hard)
            correction = pauli_conjugate_through_hard(hard, frame)
            correction = PauliString(correction.letters)
        else:
            out.append(_dress_easy(easy, correction, identity))
    return Circuit(n, tuple(out))


def allocate_shots(M: int, N: int) -> list[int]:
    """N-1 equal shares of floor(M/N); the last duplicate takes the balance."""
    if N < 1:
        raise ValueError("need at least one duplicate")
    if M < N:
        raise ValueError(f"cannot split {M} shots over {N} duplicates")
    share = M // N
    return [share] * (N - 1) + [M - share * (N - 1)]


@dataclass(frozen=True)
class TwirledEnsemble:
    bare: Circuit
    duplicates: tuple[Circuit, ...]
    shots_per_duplicate: tuple[int, ...]
    seeds: tuple[int, ...]
    seed: int | None = None

    def manifest(self) -> list[dict]:
        return [
            {"index": i, "seed": s, "shots": m}
            for i, (s, m) in enumerate(zip(self.seeds, self.shots_per_duplicate))
        ]

    def to_json(self) -> str:
        return json.dumps({"seed": self.seed, "duplicates": self.manifest()}, indent=2)


def split_seeds(seed, count: int) -> list[int]:
    """Independent 64-bit child seeds derived from ``seed``."""
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return [int(child.generate_state(1, np.uint64)[0]) for child in ss.spawn(count)]


def make_ensemble(c: Circuit, N: int, M: int, seed) -> TwirledEnsemble:
    bare = c if _is_alternating(c) else normalize_cycles(c)
    shots = allocate_shots(M, N)
    seeds = split_seeds(seed, N)
    duplicates = tuple(twirl_once(bare, s) for s in seeds)
    return TwirledEnsemble(
        bare, duplicates, tuple(shots), tuple(seeds), seed if isinstance(seed, int) else None
    )
