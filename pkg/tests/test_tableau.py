"""Tableau against a dense state-vector simulation."""

import numpy as np
import pytest

from heavyhex.pauli import PauliOperator
from heavyhex.tableau import StabilizerTableau, tableau_measure

from test_pauli import dense

N = 4
H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
S = np.diag([1, 1j])


def one_qubit(u, q, n=N):
    mats = [np.eye(2)] * n
    mats[q] = u
    out = mats[-1]
    for m in reversed(mats[:-1]):
        out = np.kron(out, m)
    return out


def cx_matrix(c, t, n=N):
    dim = 2**n
    m = np.zeros((dim, dim))
    for i in range(dim):
        j = i ^ (1 << t) if (i >> c) & 1 else i
        m[j, i] = 1
    return m


def random_pauli(rng, n=N):
    return PauliOperator(int(rng.integers(2**n)), int(rng.integers(2**n)), 2 * int(rng.integers(2)))


@pytest.mark.parametrize("seed", range(40))
def test_random_circuit_agrees_with_statevector(seed):
    rng = np.random.default_rng(seed)
    tab = StabilizerTableau(N)
    psi = np.zeros(2**N, dtype=complex)
    psi[0] = 1
    for _ in range(30):
        r = rng.random()
        if r < 0.25:
            q = int(rng.integers(N))
            tab.apply_h(q)
            psi = one_qubit(H, q) @ psi
        elif r < 0.4:
            q = int(rng.integers(N))
            tab.apply_s(q)
            psi = one_qubit(S, q) @ psi
        elif r < 0.7:
            c, t = (int(v) for v in rng.choice(N, 2, replace=False))
            tab.apply_cx(c, t)
            psi = cx_matrix(c, t) @ psi
        elif r < 0.8:
            p = random_pauli(rng).with_phase(0)
            tab.apply_pauli(p)
            psi = dense(p, N) @ psi
        else:
            obs = random_pauli(rng)
            if obs.is_identity():
                continue
            P = dense(obs, N)
            plus = np.real(np.vdot(psi, (psi + P @ psi) / 2))
            bit, det = tab.measure_pauli(obs, rng)
            if det:
                assert np.isclose(plus, 1 - bit, atol=1e-9)
            else:
                assert np.isclose(plus, 0.5, atol=1e-9)
            proj = (np.eye(2**N) + (-1) ** bit * P) / 2
            psi = proj @ psi
            psi /= np.linalg.norm(psi)
        assert tab.is_valid()
    for stab in tab.stabilizers():
        assert np.allclose(dense(stab, N) @ psi, psi)


def test_forced_outcome_and_copy():
    tab = StabilizerTableau(2)
    tab.apply_h(0)
    out, new = tableau_measure(tab, PauliOperator(z=1), forced=1)
    assert out == 1
    assert new.measure_z(0)[0] == 1 and new.measure_z(0)[1]
    assert not tab.measure_z(0, forced=0)[1]


def test_bell_pair_parities():
    tab = StabilizerTableau(2)
    tab.apply_h(0)
    tab.apply_cx(0, 1)
    for text in ("Z0 Z1", "X0 X1"):
        assert tab.measure_pauli(PauliOperator.from_string(text)) == (0, True)
    assert tab.measure_pauli(PauliOperator.from_string("- Y0 Y1")) == (0, True)


def test_resets():
    tab = StabilizerTableau(1)
    tab.apply_h(0)
    tab.reset_z(0)
    assert tab.measure_z(0) == (0, True)
    tab.reset_x(0)
    assert tab.measure_x(0) == (0, True)


def test_rejects_bad_observables():
    tab = StabilizerTableau(2)
    with pytest.raises(ValueError):
        tab.measure_pauli(PauliOperator(z=1, phase=1))
    with pytest.raises(IndexError):
        tab.measure_pauli(PauliOperator(z=1 << 5))
