import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from encoded_gates.statevec import (
    H, X, Y, Z, GateMatrix, NormDriftError, StateVector, ZeroProbabilityError, apply_controlled,
    apply_parity_phase, apply_pauli, apply_unitary, basis_state, fidelity, inner_product,
    measure_pauli, phase_aligned,
)
from oracles import PAULI, controlled_matrix, pauli_matrix, random_state

N = 4


def _random_unitary(rng, dim):
    q, r = np.linalg.qr(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))
    return q * (np.diag(r) / abs(np.diag(r)))


def test_basis_state_is_wire_first():
    assert np.flatnonzero(basis_state(3, "100").amplitudes).tolist() == [4]
    assert np.flatnonzero(basis_state(3, 6).amplitudes).tolist() == [6]
    with pytest.raises(ValueError):
        basis_state(3, "10")


def test_x_on_qubit_zero():
    s = apply_unitary(basis_state(3, "000"), X, [0])
    assert np.flatnonzero(s.amplitudes).tolist() == [1]


def test_y_phase():
    s = apply_unitary(basis_state(1, 0), Y, [0])
    assert s.amplitudes[1] == 1j


def test_hadamard_amplitudes():
    s = apply_unitary(basis_state(1, 0), H, [0])
    assert np.allclose(s.amplitudes, [2 ** -0.5, 2 ** -0.5], atol=1e-15)


def test_cnot_truth_table():
    for bits, out in (("00", "00"), ("01", "01"), ("10", "11"), ("11", "10")):
        s = apply_controlled(basis_state(2, bits), X, [1], [0])
        assert np.flatnonzero(s.amplitudes).tolist() == [int(out, 2)]


def test_toffoli_on_110():
    s = apply_controlled(basis_state(3, "110"), X, [2, 1], [0])
    assert np.flatnonzero(s.amplitudes).tolist() == [7]


@pytest.mark.parametrize("controls, targets", [
    ((), (0,)), ((), (3,)), ((3,), (0,)), ((0, 2), (1,)), ((1,), (3, 0)), ((), (0, 2)), ((2,), (0, 3)),
])
def test_matches_dense_oracle(backend, controls, targets):
    rng = np.random.default_rng(len(controls) * 10 + targets[0])
    u = _random_unitary(rng, 1 << len(targets))
    v = random_state(N, rng)
    got = apply_controlled(StateVector(N, v.copy()), GateMatrix("U", u), controls, targets)
    want = controlled_matrix(N, u, controls, targets) @ v
    assert np.abs(got.amplitudes - want).max() < 1e-13


@pytest.mark.parametrize("text", ["XIYZ", "-ZZII", "YYYY", "IIII"])
def test_pauli_matches_kron(backend, text):
    v = random_state(N, np.random.default_rng(3))
    got = apply_pauli(StateVector(N, v.copy()), text).amplitudes
    sign = -1 if text.startswith("-") else 1
    assert np.abs(got - sign * pauli_matrix(text.lstrip("-")) @ v).max() < 1e-14


def test_parity_phase(backend):
    v = random_state(N, np.random.default_rng(4))
    got = apply_parity_phase(StateVector(N, v.copy()), 0b0011, 0b1100).amplitudes
    sign = np.array([-1 if bin(i & 3).count("1") % 2 and bin(i & 12).count("1") % 2 else 1
                     for i in range(1 << N)])
    assert np.abs(got - sign * v).max() < 1e-15


def test_rejects_bad_arguments():
    s = basis_state(2, 0)
    with pytest.raises(ValueError):
        apply_controlled(s, X, [0], [0])
    with pytest.raises(ValueError):
        apply_unitary(s, X, [2])
    with pytest.raises(ValueError):
        apply_unitary(s, X, [0, 1])
    with pytest.raises(ValueError):
        GateMatrix("bad", [[1, 1], [0, 1]])
    with pytest.raises(ValueError):
        StateVector(0)


def test_dagger_names_and_inverse():
    g = GateMatrix("V", np.array([[1, 1j], [1j, 1]]) / np.sqrt(2))
    assert g.dagger().name == "Vdag" and g.dagger().dagger().name == "V"
    assert np.allclose(g.matrix @ g.dagger().matrix, np.eye(2))


def test_gate_matrix_is_read_only():
    with pytest.raises(ValueError):
        X.matrix[0, 0] = 5


unitaries = st.integers(0, 2 ** 32 - 1)


@settings(max_examples=40, deadline=None)
@given(unitaries, st.integers(0, N - 1), st.integers(0, N - 1))
def test_norm_preserved(seed, t, c):
    rng = np.random.default_rng(seed)
    s = StateVector(N, random_state(N, rng))
    g = GateMatrix("U", _random_unitary(rng, 2))
    apply_controlled(s, g, [] if c == t else [c], [t])
    s.check_norm(1e-12)


@settings(max_examples=40, deadline=None)
@given(unitaries, st.sampled_from("XYZ"), st.integers(0, N - 1))
def test_pauli_is_involution(seed, kind, q):
    v = random_state(N, np.random.default_rng(seed))
    s = StateVector(N, v.copy())
    text = "".join(kind if w == q else "I" for w in range(N - 1, -1, -1))
    apply_pauli(apply_pauli(s, text), text)
    assert np.abs(s.amplitudes - v).max() < 1e-15


@settings(max_examples=30, deadline=None)
@given(unitaries, st.integers(1, N - 1))
def test_control_off_is_identity(seed, t):
    # with the control qubit in |0> nothing may change
    rng = np.random.default_rng(seed)
    v = random_state(N, rng).reshape(-1, 2)
    v[:, 1] = 0
    v = v.ravel() / np.linalg.norm(v)
    s = apply_controlled(StateVector(N, v.copy()), GateMatrix("U", _random_unitary(rng, 2)), [0], [t])
    assert np.abs(s.amplitudes - v).max() == 0


def test_norm_drift_detected():
    s = StateVector(1, np.array([1.0, 1e-4]))
    with pytest.raises(NormDriftError):
        s.check_norm()


def test_measure_eigenstate_is_untouched():
    s = apply_unitary(basis_state(1, 0), H, [0])
    value, post = measure_pauli(s, "X", rng_seed=1)
    assert value == 1 and post is s


def test_measure_collapses_and_is_seeded():
    s = apply_unitary(basis_state(1, 0), H, [0])
    outcomes = {measure_pauli(s, "Z", rng_seed=k)[0] for k in range(20)}
    assert outcomes == {1, -1}
    v1, p1 = measure_pauli(s, "Z", rng_seed=5)
    v2, p2 = measure_pauli(s, "Z", rng_seed=5)
    assert v1 == v2 and np.array_equal(p1.amplitudes, p2.amplitudes)
    assert abs(p1.norm() - 1) < 1e-15


def test_postselect_zero_probability():
    with pytest.raises(ZeroProbabilityError):
        measure_pauli(basis_state(1, 0), "Z", postselect=-1)


def test_overlaps_and_dump():
    a = basis_state(2, "01")
    b = apply_unitary(basis_state(2, "00"), X, [0])
    assert inner_product(a, b) == 1 and fidelity(a, b) == 1
    assert a.dump() == "1(01) 1 0"
    rotated = StateVector(1, np.array([1j, 0]))
    assert phase_aligned(rotated)[0] == 1
    with pytest.raises(ValueError):
        inner_product(a, basis_state(3, 0))


def test_z_flips_plus_to_minus():
    plus = apply_unitary(basis_state(1, 0), H, [0])
    minus = apply_unitary(basis_state(1, 1), H, [0])
    assert fidelity(apply_unitary(plus, Z, [0]), minus) > 1 - 1e-15
