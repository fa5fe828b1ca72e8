from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from encoded_gates.pauli import Pauli, in_group, syndrome_of, wire_qubits
from oracles import PAULI, controlled_matrix, pauli_matrix

strings = st.text(alphabet="IXYZ", min_size=3, max_size=3)


def _dense(p: Pauli, n: int) -> np.ndarray:
    # i^phase * prod X^x Z^z, built from the definition
    out = np.eye(1 << n, dtype=complex) * 1j ** p.phase
    for q in range(n):
        op_x = pauli_matrix("".join("X" if w == q and (p.x >> q) & 1 else "I" for w in wire_qubits(n)))
        op_z = pauli_matrix("".join("Z" if w == q and (p.z >> q) & 1 else "I" for w in wire_qubits(n)))
        out = out @ op_x @ op_z
    return out


def test_string_round_trip():
    p = Pauli.from_string("XYZI")
    assert p.to_string(wire_qubits(4)) == "XYZI"
    assert p.weight == 3
    assert Pauli.from_string("-ZZI").phase == 2


def test_leftmost_character_is_highest_qubit():
    assert Pauli.from_string("XII") == Pauli.single("X", 2)


@given(strings)
def test_from_string_matches_kron(text):
    assert np.allclose(_dense(Pauli.from_string(text), 3), pauli_matrix(text))


@given(strings, strings)
def test_product_and_commutation(a, b):
    pa, pb = Pauli.from_string(a), Pauli.from_string(b)
    ma, mb = pauli_matrix(a), pauli_matrix(b)
    assert np.allclose(_dense(pa * pb, 3), ma @ mb)
    assert pa.commutes(pb) == np.allclose(ma @ mb, mb @ ma)


@given(strings, st.sampled_from(list(product(range(3), range(3)))))
def test_cnot_conjugation(text, pair):
    c, t = pair
    if c == t:
        return
    u = controlled_matrix(3, PAULI["X"], [c], [t])
    p = Pauli.from_string(text)
    assert np.allclose(_dense(p.conj_cnot(c, t), 3), u.conj().T @ pauli_matrix(text) @ u)


@given(strings, st.integers(0, 2))
def test_hadamard_conjugation(text, q):
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    full = np.eye(1, dtype=complex)
    for w in wire_qubits(3):
        full = np.kron(full, h if w == q else np.eye(2))
    p = Pauli.from_string(text)
    assert np.allclose(_dense(p.conj_h(q), 3), full @ pauli_matrix(text) @ full)


def test_syndrome_signs():
    stabs = [Pauli.from_string(s) for s in ("XXI", "IXX")]
    assert syndrome_of(Pauli.from_string("ZII"), stabs) == (-1, 1)
    assert syndrome_of(Pauli.from_string("IZI"), stabs) == (-1, -1)
    assert syndrome_of(Pauli.from_string("XII"), stabs) == (1, 1)


@pytest.mark.parametrize("target, expected", [
    ("XIX", True), ("-XIX", False), ("ZII", False), ("IIZ", True), ("XXZ", True), ("III", True),
])
def test_group_membership_tracks_sign(target, expected):
    gens = [Pauli.from_string(s) for s in ("XXI", "IXX", "IIZ")]
    # XIX = XXI * IXX and XXZ = XXI * IIZ; -XIX carries the wrong sign
    assert in_group(Pauli.from_string(target), gens) == expected
