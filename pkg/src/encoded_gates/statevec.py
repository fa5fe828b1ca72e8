"""Dense state-vector engine.

Qubit ``q`` is bit ``q`` of the amplitude index (little-endian). Bitstrings
and Pauli strings are written wire-first: the leftmost character is the
highest qubit, so ``basis_state(3, "100")`` has its amplitude at index 4.

Gate application mutates the state in place and returns it, so a 22-qubit
run never copies its 64 MB amplitude array between gates. Use
:meth:`StateVector.copy` when the input must survive.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .pauli import Pauli, wire_qubits

MAX_QUBITS = 24
NORM_TOL = 1e-9
UNITARY_TOL = 1e-12
DUMP_CUTOFF = 1e-14


class NormDriftError(RuntimeError):
    """Raised when a state's norm has drifted beyond :data:`NORM_TOL`."""


class ZeroProbabilityError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class GateMatrix:
    """A named unitary on ``arity`` qubits, checked at construction."""

    name: str
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        m = np.ascontiguousarray(self.matrix, dtype=np.complex128)
        dim = m.shape[0]
        if m.shape != (dim, dim) or dim not in (2, 4):
            raise ValueError(f"gate {self.name}: expected 2x2 or 4x4, got {m.shape}")
        err = np.abs(m @ m.conj().T - np.eye(dim)).max()
        if err > UNITARY_TOL:
            raise ValueError(f"gate {self.name} is not unitary (deviation {err:.2e})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def arity(self) -> int:
        return self.matrix.shape[0].bit_length() - 1

    def dagger(self, name: str | None = None) -> "GateMatrix":
        if name is None:
            name = self.name[:-3] if self.name.endswith("dag") else self.name + "dag"
        return GateMatrix(name, self.matrix.conj().T)

    def is_pauli_x(self) -> bool:
        return np.array_equal(self.matrix, _X)


_S2 = 1 / np.sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)

X = GateMatrix("X", _X)
Y = GateMatrix("Y", [[0, -1j], [1j, 0]])
Z = GateMatrix("Z", [[1, 0], [0, -1]])
H = GateMatrix("H", np.array([[1, 1], [1, -1]]) * _S2)
I2 = GateMatrix("I", np.eye(2))
PAULI_GATES = {"X": X, "Y": Y, "Z": Z}


class StateVector:
    """Normalized complex amplitudes over ``num_qubits`` qubits."""

    __slots__ = ("num_qubits", "amplitudes")

    def __init__(self, num_qubits: int, amplitudes: np.ndarray | None = None):
        if not 1 <= num_qubits <= MAX_QUBITS:
            raise ValueError(f"num_qubits must be in 1..{MAX_QUBITS}, got {num_qubits}")
        size = 1 << num_qubits
        if amplitudes is None:
            amplitudes = np.zeros(size, dtype=np.complex128)
            amplitudes[0] = 1.0
        else:
            amplitudes = np.ascontiguousarray(amplitudes, dtype=np.complex128)
            if amplitudes.shape != (size,):
                raise ValueError(f"expected {size} amplitudes, got shape {amplitudes.shape}")
        self.num_qubits = num_qubits
        self.amplitudes = amplitudes

    def copy(self) -> "StateVector":
        return StateVector(self.num_qubits, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amplitudes, self.amplitudes).real))

    def check_norm(self, tol: float = NORM_TOL) -> None:
        drift = abs(self.norm() - 1.0)
        if drift > tol:
            raise NormDriftError(f"norm drifted by {drift:.3e}")

    def dump(self, cutoff: float = DUMP_CUTOFF) -> str:
        """One line per amplitude above ``cutoff``: ``index(bits) re im``."""
        lines = []
        for i in np.flatnonzero(np.abs(self.amplitudes) >= cutoff):
            a = self.amplitudes[i]
            bits = format(int(i), f"0{self.num_qubits}b")
            lines.append(f"{i}({bits}) {a.real:.15g} {a.imag:.15g}")
        return "\n".join(lines)

    def __repr__(self) -> str:
        return f"StateVector(num_qubits={self.num_qubits})"


def _check_qubits(state: StateVector, qubits: Sequence[int]) -> None:
    if len(set(qubits)) != len(qubits):
        raise ValueError(f"duplicate qubits in {list(qubits)}")
    for q in qubits:
        if not 0 <= q < state.num_qubits:
            raise ValueError(f"qubit {q} out of range for {state.num_qubits} qubits")


def basis_state(num_qubits: int, bits: str | int = 0) -> StateVector:
    if isinstance(bits, str):
        if len(bits) != num_qubits or set(bits) - {"0", "1"}:
            raise ValueError(f"bitstring {bits!r} is not {num_qubits} binary digits")
        index = int(bits, 2)
    else:
        index = int(bits)
    state = StateVector(num_qubits, np.zeros(1 << num_qubits, dtype=np.complex128))
    state.amplitudes[index] = 1.0
    return state


def _control_mask(controls: Sequence[int]) -> int:
    mask = 0
    for c in controls:
        mask |= 1 << c
    return mask


def apply_controlled(state: StateVector, gate: GateMatrix, controls: Sequence[int],
                     targets: Sequence[int]) -> StateVector:
    """Apply ``gate`` to ``targets`` on the subspace where all ``controls`` are 1.

    For a 2-qubit gate ``targets[0]`` is the high bit of the matrix index.
    """
    controls, targets = list(controls), list(targets)
    _check_qubits(state, controls + targets)
    if gate.arity != len(targets):
        raise ValueError(f"gate {gate.name} has arity {gate.arity}, got {len(targets)} targets")
    cmask = _control_mask(controls)
    if gate.arity == 1:
        if gate.is_pauli_x():
            kernels.impl.apply_x(state.amplitudes, targets[0], cmask)
        else:
            kernels.impl.apply_1q(state.amplitudes, gate.matrix, targets[0], cmask)
    else:
        kernels.impl.apply_2q(state.amplitudes, gate.matrix, targets[0], targets[1], cmask)
    return state


def apply_unitary(state: StateVector, gate: GateMatrix, targets: Sequence[int]) -> StateVector:
    return apply_controlled(state, gate, (), targets)


def apply_pauli(state: StateVector, pauli: Pauli | str) -> StateVector:
    if isinstance(pauli, str):
        pauli = Pauli.from_string(pauli, wire_qubits(state.num_qubits))
    if pauli.support >> state.num_qubits:
        raise ValueError("pauli acts outside the register")
    kernels.impl.apply_pauli(state.amplitudes, pauli.x, pauli.z, pauli.phase)
    return state


def apply_parity_phase(state: StateVector, mask_a: int, mask_b: int) -> StateVector:
    """Multiply by -1 wherever both masked parities are odd (a logical CZ)."""
    kernels.impl.apply_parity_phase(state.amplitudes, mask_a, mask_b)
    return state


def inner_product(a: StateVector, b: StateVector) -> complex:
    if a.num_qubits != b.num_qubits:
        raise ValueError(f"dimension mismatch: {a.num_qubits} vs {b.num_qubits} qubits")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: StateVector, b: StateVector) -> float:
    return abs(inner_product(a, b)) ** 2


def phase_aligned(state: StateVector, tol: float = 1e-12) -> np.ndarray:
    """Amplitudes with the first non-negligible entry rotated real-positive."""
    amps = state.amplitudes
    nz = np.flatnonzero(np.abs(amps) > tol)
    if nz.size == 0:
        return amps.copy()
    lead = amps[nz[0]]
    return amps * (abs(lead) / lead)


def measure_pauli(state: StateVector, observable: Pauli | str, rng_seed: int | None = None,
                  postselect: int | None = None, tol: float = 1e-12) -> tuple[int, StateVector]:
    """Projectively measure a Pauli observable.

    Eigenstates return their eigenvalue without consuming randomness and the
    returned state is the input object, untouched. Otherwise the outcome is
    drawn from ``numpy.random.default_rng(rng_seed)`` and a new, renormalized
    post-measurement state is returned. ``postselect`` forces an outcome.
    """
    if isinstance(observable, str):
        obs = Pauli.from_string(observable, wire_qubits(state.num_qubits))
        if len(observable.lstrip("+-")) != state.num_qubits:
            raise ValueError("observable length does not match the register")
    else:
        obs = observable
    if obs.phase % 2:
        raise ValueError("observable is not hermitian")
    flipped = apply_pauli(state.copy(), obs)
    expectation = np.vdot(state.amplitudes, flipped.amplitudes).real
    p_plus = min(max((1.0 + expectation) / 2.0, 0.0), 1.0)

    if postselect is not None:
        if postselect not in (1, -1):
            raise ValueError("postselect must be +1 or -1")
        p = p_plus if postselect == 1 else 1.0 - p_plus
        if p <= tol:
            raise ZeroProbabilityError(f"outcome {postselect:+d} has probability {p:.3e}")
        outcome = postselect
    elif p_plus >= 1.0 - tol:
        return 1, state
    elif p_plus <= tol:
        return -1, state
    else:
        outcome = 1 if np.random.default_rng(rng_seed).random() < p_plus else -1

    p = p_plus if outcome == 1 else 1.0 - p_plus
    if p >= 1.0 - tol:
        return outcome, state
    post = (state.amplitudes + outcome * flipped.amplitudes) / (2.0 * np.sqrt(p))
    return outcome, StateVector(state.num_qubits, post)
