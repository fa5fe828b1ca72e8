"""The 3-qubit and 7-qubit codes, encoding, readout and memory correction.

Codeword and Pauli strings in a :class:`CodeSpec` are block-local and
written by string position: position ``p`` is ``qubits[p]`` of whatever
block the code is placed on. A standalone block uses wire order, so
position 0 is its highest qubit.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np

from .pauli import Pauli, syndrome_of, wire_qubits
from .statevec import StateVector, apply_pauli, measure_pauli

NORMALIZATION_TOL = 1e-10


class UncorrectableError(RuntimeError):
    """Syndrome missing from the table, or still nontrivial after correcting."""


@dataclass(frozen=True, eq=False)
class CodeSpec:
    name: str
    block_size: int
    codeword_zero: tuple[tuple[int, str], ...]
    codeword_one: tuple[tuple[int, str], ...]
    stabilizers: tuple[str, ...]
    logical_x: str
    logical_z: str
    syndrome_table: Mapping[tuple[int, ...], str]
    correctable_errors: tuple[str, ...]

    @property
    def trivial_syndrome(self) -> tuple[int, ...]:
        return (1,) * len(self.stabilizers)

    def codeword(self, label: int) -> tuple[tuple[int, str], ...]:
        return self.codeword_one if label else self.codeword_zero

    def block_qubits(self) -> list[int]:
        return wire_qubits(self.block_size)

    def stabilizer_paulis(self, qubits: Sequence[int] | None = None) -> list[Pauli]:
        qubits = self.block_qubits() if qubits is None else qubits
        return [Pauli.from_string(s, qubits) for s in self.stabilizers]

    def to_json(self) -> dict:
        def signed(words):
            return [("+" if s > 0 else "-") + bits for s, bits in words]

        table = {"".join("+" if v > 0 else "-" for v in k): v
                 for k, v in sorted(self.syndrome_table.items(), reverse=True)}
        return {
            "name": self.name,
            "n": self.block_size,
            "codewords": {"zero": signed(self.codeword_zero), "one": signed(self.codeword_one)},
            "stabilizers": list(self.stabilizers),
            "logical_x": self.logical_x,
            "logical_z": self.logical_z,
            "syndrome_table": table,
        }


@dataclass(frozen=True)
class LogicalReadout:
    alpha: complex
    beta: complex
    leakage: float


def hamming_parity_checks() -> list[str]:
    """Rows of the [7,4] Hamming parity-check matrix, supports {4567},{2367},{1357}."""
    supports = ({4, 5, 6, 7}, {2, 3, 6, 7}, {1, 3, 5, 7})
    return ["".join("1" if p in s else "0" for p in range(1, 8)) for s in supports]


def _xor(a: str, b: str) -> str:
    return "".join("1" if x != y else "0" for x, y in zip(a, b))


def _build_table(stabilizers: Sequence[str], n: int, kinds: Sequence[str]) -> dict:
    qubits = wire_qubits(n)
    stabs = [Pauli.from_string(s, qubits) for s in stabilizers]
    table = {(1,) * len(stabs): "I" * n}
    for kind in kinds:
        for p in range(n):
            err = "I" * p + kind + "I" * (n - p - 1)
            table.setdefault(syndrome_of(Pauli.from_string(err, qubits), stabs), err)
    return table


def _three_bit() -> CodeSpec:
    zero = ("000", "011", "101", "110")
    one = ("111", "100", "010", "001")
    stabilizers = ("XXI", "IXX")
    return CodeSpec(
        name="three_bit",
        block_size=3,
        codeword_zero=tuple((1, w) for w in zero),
        codeword_one=tuple((1, w) for w in one),
        stabilizers=stabilizers,
        logical_x="XII",
        logical_z="ZZZ",
        syndrome_table=MappingProxyType(_build_table(stabilizers, 3, "Z")),
        correctable_errors=("Z",),
    )


def _seven_bit() -> CodeSpec:
    checks = hamming_parity_checks()
    # the even-weight Hamming words are exactly the span of the check rows,
    # listed as XOR combinations of rows {1357}, {2367}, {4567}
    gens = [checks[2], checks[1], checks[0]]
    zero = []
    for k in range(8):
        word = "0" * 7
        for i, g in enumerate(gens):
            if (k >> i) & 1:
                word = _xor(word, g)
        zero.append(word)
    one = [_xor(w, "1" * 7) for w in zero]
    x_checks = tuple(c.replace("1", "X").replace("0", "I") for c in checks)
    z_checks = tuple(c.replace("1", "Z").replace("0", "I") for c in checks)
    stabilizers = x_checks + z_checks
    return CodeSpec(
        name="seven_bit",
        block_size=7,
        codeword_zero=tuple((1, w) for w in zero),
        codeword_one=tuple((1, w) for w in one),
        stabilizers=stabilizers,
        logical_x="X" * 7,
        logical_z="Z" * 7,
        syndrome_table=MappingProxyType(_build_table(stabilizers, 7, "XYZ")),
        correctable_errors=("X", "Y", "Z"),
    )


_REGISTRY = {"three_bit": _three_bit, "seven_bit": _seven_bit}
CODE_NAMES = tuple(_REGISTRY)


@lru_cache(maxsize=None)
def code_registry(name: str) -> CodeSpec:
    try:
        return _REGISTRY[name]()
    except KeyError:
        raise KeyError(f"unknown code {name!r}; expected one of {CODE_NAMES}") from None


def sparse_codeword(code: CodeSpec, label: int, qubits: Sequence[int] | None = None,
                    basis: str = "01") -> tuple[np.ndarray, np.ndarray]:
    """Normalized logical basis state as (physical indices, amplitudes).

    ``basis="pm"`` gives ``(|0_L> +/- |1_L>)/sqrt(2)`` for labels 0/1.
    """
    qubits = code.block_qubits() if qubits is None else list(qubits)
    if basis == "01":
        terms = [(s, w) for s, w in code.codeword(label)]
    elif basis == "pm":
        sign = -1 if label else 1
        terms = list(code.codeword_zero) + [(sign * s, w) for s, w in code.codeword_one]
    else:
        raise ValueError(f"unknown basis {basis!r}")
    idx = np.empty(len(terms), dtype=np.int64)
    amp = np.empty(len(terms), dtype=np.complex128)
    for k, (s, word) in enumerate(terms):
        idx[k] = sum(1 << q for ch, q in zip(word, qubits) if ch == "1")
        amp[k] = s
    amp /= np.sqrt(len(terms))
    return idx, amp


def _check_normalized(alpha: complex, beta: complex) -> None:
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1) > NORMALIZATION_TOL:
        raise ValueError(f"|alpha|^2 + |beta|^2 != 1 for ({alpha}, {beta})")


def encode(code: CodeSpec, alpha: complex, beta: complex) -> StateVector:
    """alpha|0_L> + beta|1_L> on a standalone block."""
    _check_normalized(alpha, beta)
    amps = np.zeros(1 << code.block_size, dtype=np.complex128)
    for label, coeff in ((0, alpha), (1, beta)):
        idx, amp = sparse_codeword(code, label)
        amps[idx] += coeff * amp
    return StateVector(code.block_size, amps)


def decode_logical(code: CodeSpec, state: StateVector) -> LogicalReadout:
    if state.num_qubits != code.block_size:
        raise ValueError(f"state has {state.num_qubits} qubits, code block has {code.block_size}")
    coeffs = []
    for label in (0, 1):
        idx, amp = sparse_codeword(code, label)
        coeffs.append(complex(np.vdot(amp, state.amplitudes[idx])))
    alpha, beta = coeffs
    total = float(np.vdot(state.amplitudes, state.amplitudes).real)
    leakage = max(total - abs(alpha) ** 2 - abs(beta) ** 2, 0.0)
    return LogicalReadout(alpha, beta, leakage)


def _seeds(rng_seed: int | None, count: int) -> list[int]:
    return [int(s) for s in np.random.SeedSequence(rng_seed).generate_state(count)]


def extract_syndrome(code: CodeSpec, state: StateVector, rng_seed: int | None = 0,
                     qubits: Sequence[int] | None = None) -> tuple[tuple[int, ...], StateVector]:
    """Measure each stabilizer in order on the block at ``qubits``."""
    if qubits is None:
        if state.num_qubits != code.block_size:
            raise ValueError("state spans more than one block; pass the block's qubits")
        qubits = code.block_qubits()
    syndrome = []
    for stab, seed in zip(code.stabilizer_paulis(qubits), _seeds(rng_seed, len(code.stabilizers))):
        value, state = measure_pauli(state, stab, seed)
        syndrome.append(value)
    return tuple(syndrome), state


def memory_correction(code: CodeSpec, state: StateVector, rng_seed: int | None = 0,
                      qubits: Sequence[int] | None = None
                      ) -> tuple[tuple[int, ...], str, StateVector]:
    """Syndrome, the table correction, and the corrected state (in place when possible)."""
    qubits = code.block_qubits() if qubits is None else list(qubits)
    syndrome, state = extract_syndrome(code, state, rng_seed, qubits)
    try:
        correction = code.syndrome_table[syndrome]
    except KeyError:
        raise UncorrectableError(f"syndrome {syndrome} not in the {code.name} table") from None
    if set(correction) != {"I"}:
        state = apply_pauli(state, Pauli.from_string(correction, qubits))
    residual, state = extract_syndrome(code, state, rng_seed, qubits)
    if residual != code.trivial_syndrome:
        raise UncorrectableError(f"residual syndrome {residual} after applying {correction}")
    return syndrome, correction, state


def correct_memory(code: CodeSpec, state: StateVector, rng_seed: int | None = 0,
                   qubits: Sequence[int] | None = None) -> StateVector:
    return memory_correction(code, state, rng_seed, qubits)[2]


def single_qubit_errors(code: CodeSpec, kinds: Sequence[str] | None = None) -> list[str]:
    kinds = code.correctable_errors if kinds is None else kinds
    n = code.block_size
    return ["I" * p + k + "I" * (n - p - 1) for p, k in product(range(n), kinds)]
