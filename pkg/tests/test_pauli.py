import functools

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from heavyhex.pauli import PauliOperator, bits_of, commutes, pauli_mul, symplectic_product

N = 3
_MATS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def dense(p: PauliOperator, n: int = N) -> np.ndarray:
    mats = [_MATS[p.letter(q)] for q in range(n)]
    return p.coefficient * functools.reduce(np.kron, reversed(mats))


paulis = st.builds(PauliOperator, st.integers(0, 2**N - 1), st.integers(0, 2**N - 1), st.integers(0, 3))


@settings(max_examples=300, deadline=None)
@given(paulis, paulis)
def test_product_matches_matrices(a, b):
    assert np.allclose(dense(pauli_mul(a, b)), dense(a) @ dense(b))


@settings(max_examples=300, deadline=None)
@given(paulis, paulis)
def test_commutation_matches_matrices(a, b):
    A, B = dense(a), dense(b)
    assert commutes(a, b) == np.allclose(A @ B, B @ A)
    assert symplectic_product(a, b) == (0 if commutes(a, b) else 1)


@settings(max_examples=200, deadline=None)
@given(paulis, paulis, paulis)
def test_associative(a, b, c):
    assert (a * b) * c == a * (b * c)


def test_single_letter_phases():
    x, z = PauliOperator.single("X", 0), PauliOperator.single("Z", 0)
    y = PauliOperator.single("Y", 0)
    assert (x * z) == y.with_phase(3)
    assert (z * x) == y.with_phase(1)
    assert (x * x).is_identity()


def test_string_round_trip():
    p = PauliOperator.from_string("-i X0 Y3 Z7")
    assert PauliOperator.from_string(p.to_string()) == p
    assert p.support == frozenset({0, 3, 7})
    assert p.weight == 3


def test_css_constructors():
    assert PauliOperator.x_type([1, 2]).is_x_type()
    assert PauliOperator.z_type([1, 2]).is_z_type()
    assert not commutes(PauliOperator.x_type([1, 2, 3]), PauliOperator.z_type([3]))


def test_bits_of():
    assert bits_of(0b101001) == [0, 3, 5]
    assert bits_of(0) == []
