import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tailored_rae.circuit import CNOT, H, RY, Circuit, build_enhanced_circuit, build_h2_ansatz, build_ldca, unitary_of
from tailored_rae.noise import NoiseConfig
from tailored_rae.pauli import Observable
from tailored_rae.sim import (
    ShotRecord,
    check_density_matrix,
    expectation,
    parity_distribution,
    run,
    sample_parities,
)

XXXX = Observable.from_label("XXXX")
LDCA_THETAS = [-1.491, 1.838, 1.977, 2.305, -3.124, 2.049, 1.254, -1.791]


def test_noiseless_matches_unitary_and_is_pure():
    c = build_h2_ansatz(-6.057)
    rho = run(c)
    psi = unitary_of(c)[:, 0]
    assert np.max(np.abs(rho - np.outer(psi, psi.conj()))) < 1e-10
    assert abs(np.trace(rho @ rho).real - 1) < 1e-10


def test_expectation_anchors():
    assert abs(expectation(run(build_h2_ansatz(-6.057)), XXXX) - 0.2238) < 5e-4
    assert abs(expectation(run(build_ldca(LDCA_THETAS)), Observable.from_label("XX")) - 0.39) < 5e-3
    rho0 = np.diag([1, 0]).astype(complex)
    assert expectation(rho0, Observable.from_label("Z")) == 1.0
    with pytest.raises(ValueError):
        expectation(rho0, XXXX)


def test_parity_of_mixed_state():
    assert parity_distribution(np.eye(16, dtype=complex) / 16, XXXX) == pytest.approx(0.5)


def test_parity_l0_h2():
    p = parity_distribution(run(build_enhanced_circuit(build_h2_ansatz(-6.057), XXXX, 0)), XXXX)
    assert abs(p - 0.6119) < 5e-4


@pytest.mark.parametrize("label", ["ZZZ", "XIY", "IZI"])
def test_parity_exhaustive_enumeration(label):
    rng = np.random.default_rng(7)
    g = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    rho = g @ g.conj().T
    rho /= np.trace(rho)
    P = Observable.from_label(label)
    total = 0.0
    for idx in range(8):
        bits = [(idx >> (2 - q)) & 1 for q in range(3)]
        if sum(bits[q] for q in P.support) % 2 == 0:
            total += rho[idx, idx].real
    p = parity_distribution(rho, P)
    assert 0 <= p <= 1
    assert p == pytest.approx(total, abs=1e-12)


def test_noiseless_likelihood_identity():
    A = build_h2_ansatz(-6.057)
    pi = expectation(run(A), XXXX)
    for L in range(6):
        p = parity_distribution(run(build_enhanced_circuit(A, XXXX, L)), XXXX)
        assert abs(p - 0.5 * (1 + math.cos((2 * L + 1) * math.acos(pi)))) < 1e-9


def test_noisy_run_stays_physical_and_purity_drops():
    cfg = NoiseConfig.from_units(4, zz_khz=45)
    c = build_enhanced_circuit(build_h2_ansatz(-6.057), XXXX, 1)
    rho = run(c, cfg, check=True)
    check_density_matrix(rho)
    assert np.trace(rho @ rho).real < 1


def test_purity_non_increasing_incoherent_cycles():
    cfg = NoiseConfig.from_units(2, t1_us=5, t2_us=7, coherent=False)
    gates = [H(0), CNOT(0, 1), RY(0.7, 1), CNOT(1, 0), H(1)]
    c = Circuit.from_gates(2, gates)
    purities = []
    for k in range(len(c.cycles) + 1):
        rho = run(Circuit(2, c.cycles[:k]), cfg)
        purities.append(np.trace(rho @ rho).real)
    assert all(b <= a + 1e-12 for a, b in zip(purities, purities[1:]))


def test_size_cap():
    with pytest.raises(ValueError):
        run(Circuit(7, ()))


def test_sampler_edges_and_determinism():
    assert sample_parities(1.0, 100, 0).even_count == 100
    assert sample_parities(0.0, 100, 0).even_count == 0
    assert sample_parities(0.3, 1000, 42) == sample_parities(0.3, 1000, 42)
    rec = sample_parities(0.5, 10**6, 3)
    assert abs(rec.even_count / 1e6 - 0.5) < 5e-3
    with pytest.raises(ValueError):
        sample_parities(1.5, 10, 0)
    with pytest.raises(ValueError):
        ShotRecord(10, 11)


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 1), st.integers(0, 5000), st.integers(0, 2**63))
def test_shot_record_bounds(p, shots, seed):
    rec = sample_parities(p, shots, seed)
    assert 0 <= rec.even_count <= shots
    assert rec.odd_count == shots - rec.even_count
