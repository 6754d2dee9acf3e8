import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tailored_rae.circuit import cnot_matrix
from tailored_rae.pauli import LETTERS, Observable, PauliString

labels = st.integers(1, 4).flatmap(lambda n: st.text(alphabet=LETTERS, min_size=n, max_size=n))


def test_from_label_phases():
    assert PauliString.from_label("-XZ").coefficient == -1
    assert PauliString.from_label("iY").coefficient == 1j
    assert PauliString.from_label("-iY").coefficient == -1j
    assert PauliString.from_label("+ZZ") == PauliString("ZZ")


@given(labels, st.integers(0, 3))
def test_hermitian_iff_real_phase(letters, phase):
    p = PauliString(letters, phase)
    m = p.matrix()
    assert np.allclose(m @ m.conj().T, np.eye(m.shape[0]))
    assert p.is_hermitian() == np.allclose(m, m.conj().T)
    assert p.is_hermitian() == (phase % 2 == 0)


@given(labels, st.data())
def test_product_matches_matrices(a, data):
    b = data.draw(st.text(alphabet=LETTERS, min_size=len(a), max_size=len(a)))
    p, q = PauliString(a), PauliString(b)
    assert np.allclose((p * q).matrix(), p.matrix() @ q.matrix())


def test_textbook_cnot_images():
    expect = {"XI": "XX", "IX": "IX", "ZI": "ZI", "IZ": "ZZ"}
    for src, dst in expect.items():
        assert PauliString(src).conjugate_cnot(0, 1) == PauliString(dst)


@pytest.mark.parametrize("n", [2, 3])
def test_cnot_conjugation_exhaustive(n):
    # dense oracle: CNOT P CNOT for every Pauli string and every ordered pair
    for letters in itertools.product(LETTERS, repeat=n):
        p = PauliString("".join(letters))
        for c, t in itertools.permutations(range(n), 2):
            u = cnot_matrix(c, t, n)
            assert np.allclose(p.conjugate_cnot(c, t).matrix(), u @ p.matrix() @ u)


def test_observable_requires_unit_phase():
    with pytest.raises(ValueError):
        Observable(PauliString("XX", 2))
    obs = Observable.from_label("XIZY")
    assert obs.support == (0, 2, 3)
    assert sorted(set(np.round(np.linalg.eigvalsh(obs.matrix()), 12))) == [-1.0, 1.0]
