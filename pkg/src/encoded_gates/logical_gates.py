"""Encoded CNOT and Toffoli circuits over code blocks, and their logical action.

Layouts put the first block on the highest physical qubits and ancillas on
the lowest, so a full-register bitstring reads ``<block 0><block 1>...<anc>``.
Logical basis index ``j`` of an ``m``-block circuit gives block ``b`` the
label ``(j >> (m - 1 - b)) & 1``: block 0 is the most significant bit.

Qubyte control. A gate conditioned on a whole byte is realized by copying
the byte's parity onto a single carrier qubit, applying a singly controlled
gate from it, then uncomputing. ``control_mode="ancilla"`` (default) uses a
dedicated ancilla as carrier; ``"fold"`` reuses the byte's first qubit. In
fold mode a phase error on the carrier becomes a logical phase error on the
byte, which no syndrome can see; the ancilla keeps every single data-qubit
fault recoverable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .codes import CodeSpec, sparse_codeword
from .pauli import Pauli, in_group
from .statevec import PAULI_GATES, H, X, GateMatrix, StateVector, apply_controlled

LOGICAL_TOL = 1e-10
CONTROL_MODES = ("ancilla", "fold")


class LeakageError(RuntimeError):
    """A circuit moved weight out of the logical product space."""


@dataclass(frozen=True)
class Block:
    name: str
    qubits: tuple[int, ...]  # in string-position order

    @property
    def mask(self) -> int:
        return sum(1 << q for q in self.qubits)


@dataclass(frozen=True)
class BlockLayout:
    blocks: tuple[Block, ...]
    ancillas: tuple[int, ...]
    total_qubits: int

    def __post_init__(self) -> None:
        used = [q for b in self.blocks for q in b.qubits] + list(self.ancillas)
        if len(set(used)) != len(used):
            raise ValueError("layout index lists overlap")
        if sorted(used) != list(range(self.total_qubits)):
            raise ValueError("layout does not cover exactly total_qubits qubits")

    @classmethod
    def standard(cls, names: Sequence[str], block_size: int, num_ancillas: int = 0) -> "BlockLayout":
        total = len(names) * block_size + num_ancillas
        wire = iter(range(total - 1, -1, -1))
        blocks = tuple(Block(name, tuple(next(wire) for _ in range(block_size))) for name in names)
        return cls(blocks, tuple(wire), total)

    def block(self, name: str) -> Block:
        for b in self.blocks:
            if b.name == name:
                return b
        raise KeyError(f"no block named {name!r}")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(b.name for b in self.blocks)


@dataclass(frozen=True)
class Op:
    gate: GateMatrix
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()

    @property
    def kind(self) -> str:
        return "controlled" if self.controls else "unitary"

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.controls + self.targets

    def apply(self, state: StateVector) -> StateVector:
        return apply_controlled(state, self.gate, self.controls, self.targets)


@dataclass(frozen=True)
class Circuit:
    name: str
    code_name: str
    layout: BlockLayout
    ops: tuple[Op, ...]
    checkpoints: tuple[tuple[int, tuple[str, ...]], ...] = ()
    steps: tuple[tuple[str, int, int], ...] = ()
    basis: str = "01"
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        for op in self.ops:
            for q in op.qubits:
                if not 0 <= q < self.layout.total_qubits:
                    raise ValueError(f"op references qubit {q} outside the layout")

    def __len__(self) -> int:
        return len(self.ops)

    def blocks_in_code(self, position: int) -> tuple[str, ...]:
        for p, names in self.checkpoints:
            if p == position:
                return names
        return ()

    def step(self, label: str) -> tuple[int, int]:
        for name, start, stop in self.steps:
            if name == label:
                return start, stop
        raise KeyError(label)


@dataclass(frozen=True)
class VGate:
    variant: str
    gate: GateMatrix

    @property
    def matrix(self) -> np.ndarray:
        return self.gate.matrix


def v_gate(variant: str = "exact") -> VGate:
    """Square root of the target flip: ``paper`` is (1/sqrt2)[[1,i],[i,1]], whose
    square is iX; ``exact`` removes the phase so that its square is X."""
    base = np.array([[1, 1j], [1j, 1]]) / np.sqrt(2)
    if variant == "paper":
        return VGate("paper", GateMatrix("V", base))
    if variant == "exact":
        return VGate("exact", GateMatrix("V", np.exp(-1j * np.pi / 4) * base))
    raise ValueError(f"unknown V variant {variant!r}")


# -- circuit assembly -------------------------------------------------------

class _Builder:
    def __init__(self, layout: BlockLayout):
        self.layout = layout
        self.ops: list[Op] = []
        self.steps: list[tuple[str, int, int]] = []

    def cnot(self, control: int, target: int) -> None:
        self.ops.append(Op(X, (target,), (control,)))

    def cu(self, gate: GateMatrix, control: int, target: int) -> None:
        self.ops.append(Op(gate, (target,), (control,)))

    def u(self, gate: GateMatrix, qubit: int) -> None:
        self.ops.append(Op(gate, (qubit,)))

    def step(self, label: str, fn, *args) -> None:
        start = len(self.ops)
        fn(*args)
        self.steps.append((label, start, len(self.ops)))

    def byte_controlled(self, gate: GateMatrix, control: Block, targets: Sequence[int],
                        mode: str) -> None:
        if mode == "fold":
            carrier, feeders = control.qubits[0], control.qubits[1:]
        elif mode == "ancilla":
            if not self.layout.ancillas:
                raise ValueError("ancilla control mode needs an ancilla in the layout")
            carrier, feeders = self.layout.ancillas[0], control.qubits
        else:
            raise ValueError(f"unknown control mode {mode!r}")
        for q in feeders:
            self.cnot(q, carrier)
        for t in targets:
            self.cu(gate, carrier, t)
        for q in reversed(feeders):
            self.cnot(q, carrier)

    def transversal(self, source: Block, dest: Block) -> None:
        for c, t in zip(source.qubits, dest.qubits):
            self.cnot(c, t)

    def finish(self, name: str, code: CodeSpec, basis: str = "01", **params) -> Circuit:
        draft = Circuit(name, code.name, self.layout, tuple(self.ops), (), tuple(self.steps),
                        basis, dict(params))
        return Circuit(name, code.name, self.layout, draft.ops, derive_checkpoints(draft, code),
                       draft.steps, basis, dict(params))


def empty_circuit(code: CodeSpec, names: Sequence[str] = ("C", "T")) -> Circuit:
    return _Builder(BlockLayout.standard(names, code.block_size)).finish("empty", code)


def build_cnot_fig1a(code: CodeSpec, basis: str = "01") -> Circuit:
    """Transversal CNOT, qubit p of one byte onto qubit p of the other.

    In the (+,-) labeling a physical CNOT kicks phase from target to
    control, so the byte playing logical control is the physical target.
    Blocks are named by logical role in both bases; for ``basis="pm"`` the
    cnots run T -> C.
    """
    layout = BlockLayout.standard(("C", "T"), code.block_size)
    b = _Builder(layout)
    c, t = layout.block("C"), layout.block("T")
    if basis == "01":
        b.transversal(c, t)
    elif basis == "pm":
        b.transversal(t, c)
    else:
        raise ValueError(f"unknown basis {basis!r}")
    name = "fig2" if code.name == "seven_bit" else "fig1a"
    return b.finish(name, code, basis)


def build_cnot_fig2(code: CodeSpec) -> Circuit:
    _require(code, "seven_bit", "fig2")
    return build_cnot_fig1a(code)


def build_cnot_fig1b(code: CodeSpec) -> Circuit:
    """Every control qubit flips the target byte's top qubit."""
    _require(code, "three_bit", "fig1b")
    layout = BlockLayout.standard(("C", "T"), code.block_size)
    b = _Builder(layout)
    top = layout.block("T").qubits[0]
    for q in layout.block("C").qubits:
        b.cnot(q, top)
    return b.finish("fig1b", code)


def build_cnot_fig1c(code: CodeSpec) -> Circuit:
    """Parity of the control byte collected on an ancilla, which flips the top target qubit."""
    _require(code, "three_bit", "fig1c")
    layout = BlockLayout.standard(("C", "T"), code.block_size, num_ancillas=1)
    b = _Builder(layout)
    b.byte_controlled(X, layout.block("C"), [layout.block("T").qubits[0]], "ancilla")
    return b.finish("fig1c", code)


def _toffoli(code: CodeSpec, v: VGate, control_mode: str) -> _Builder:
    if control_mode not in CONTROL_MODES:
        raise ValueError(f"unknown control mode {control_mode!r}")
    layout = BlockLayout.standard(("CI", "CII", "T"), code.block_size,
                                  num_ancillas=1 if control_mode == "ancilla" else 0)
    ci, cii = layout.block("CI"), layout.block("CII")
    top = flip_qubits(code, layout.block("T"))
    vdg = v.gate.dagger()
    b = _Builder(layout)
    b.step("step1", b.byte_controlled, v.gate, ci, top, control_mode)
    b.step("step2", b.transversal, ci, cii)
    b.step("step3", b.byte_controlled, vdg, cii, top, control_mode)
    b.step("step4", b.transversal, ci, cii)
    b.step("step5", b.byte_controlled, v.gate, cii, top, control_mode)
    return b


def flip_qubits(code: CodeSpec, block: Block) -> list[int]:
    """Qubits whose joint flip is the logical X of ``block``.

    One qubit for the 3-bit code (any single flip changes parity), all seven
    for the 7-bit code, where a single flip leaves the code space.
    """
    return [q for ch, q in zip(code.logical_x, block.qubits) if ch == "X"]


def build_toffoli_fig3a(code: CodeSpec, v: VGate | None = None,
                        control_mode: str = "ancilla") -> Circuit:
    """V by CI, CII ^= CI, V-dagger by CII, restore CII, V by CII."""
    _require(code, "three_bit", "fig3a")
    v = v or v_gate("exact")
    return _toffoli(code, v, control_mode).finish("fig3a", code, v=v.variant,
                                                   control_mode=control_mode)


def build_toffoli_7bit(code: CodeSpec, v: VGate | None = None,
                       control_mode: str = "ancilla") -> Circuit:
    _require(code, "seven_bit", "toffoli7")
    v = v or v_gate("exact")
    return _toffoli(code, v, control_mode).finish("toffoli7", code, v=v.variant,
                                                   control_mode=control_mode)


def _logical_hadamard_three_bit(b: _Builder, block: Block) -> None:
    # |0_L> = (|+++> + |--->)/sqrt2 -> |+++>, |1_L> -> |--->
    q0, q1, q2 = block.qubits
    for q in block.qubits:
        b.u(H, q)
    b.cnot(q0, q1)
    b.cnot(q0, q2)
    b.u(H, q0)
    b.cnot(q0, q2)
    b.cnot(q0, q1)
    for q in block.qubits:
        b.u(H, q)


def build_toffoli_fig3b(code: CodeSpec, v: VGate | None = None,
                        control_mode: str = "ancilla") -> Circuit:
    """Toffoli on (+,-)-labeled bytes: fig3a conjugated by an encoded basis change."""
    _require(code, "three_bit", "fig3b")
    v = v or v_gate("exact")
    inner = _toffoli(code, v, control_mode)
    b = _Builder(inner.layout)

    def basis_change() -> None:
        for blk in b.layout.blocks:
            _logical_hadamard_three_bit(b, blk)

    b.step("basis_in", basis_change)
    offset = len(b.ops)
    b.ops.extend(inner.ops)
    b.steps.extend((label, s + offset, e + offset) for label, s, e in inner.steps)
    b.step("basis_out", basis_change)
    return b.finish("fig3b", code, "pm", v=v.variant, control_mode=control_mode)


def _require(code: CodeSpec, name: str, gate: str) -> None:
    if code.name != name:
        raise ValueError(f"{gate} is defined for {name}, not {code.name}")


# -- checkpoints by stabilizer propagation ----------------------------------

def _conjugate(p: Pauli, op: Op) -> Pauli | None:
    """op^dagger p op for the gates used here, or None when p stops being a Pauli."""
    gate = op.gate
    if not op.controls and gate.name in PAULI_GATES:
        return p.conj_pauli(Pauli.single(gate.name, op.targets[0]))
    if not op.controls and gate.name == "H":
        return p.conj_h(op.targets[0])
    if len(op.controls) == 1 and gate.is_pauli_x():
        return p.conj_cnot(op.controls[0], op.targets[0])
    # anything else passes only if it commutes with p
    for c in op.controls:
        if (p.x >> c) & 1:
            return None
    for t in op.targets:
        local = "IZXY"[((p.x >> t) & 1) * 2 + ((p.z >> t) & 1)]
        m = PAULI_GATES[local].matrix if local != "I" else np.eye(2)
        if gate.arity != 1 or not np.allclose(m @ gate.matrix, gate.matrix @ m, atol=1e-12):
            return None
    return p


def derive_checkpoints(circuit: Circuit, code: CodeSpec) -> tuple[tuple[int, tuple[str, ...]], ...]:
    """Positions at which each block is a stabilizer eigenstate for every encoded input.

    A block stabilizer S holds at position p when the ops before p pull it
    back to an element of the input group: all block stabilizers plus Z on
    each ancilla (ancillas start in |0>).
    """
    layout = circuit.layout
    generators = [s for blk in layout.blocks for s in code.stabilizer_paulis(blk.qubits)]
    generators += [Pauli.single("Z", a) for a in layout.ancillas]

    checkpoints = []
    for position in range(len(circuit.ops) + 1):
        names = []
        for blk in layout.blocks:
            ok = True
            for stab in code.stabilizer_paulis(blk.qubits):
                p: Pauli | None = stab
                for op in reversed(circuit.ops[:position]):
                    p = _conjugate(p, op)
                    if p is None:
                        break
                if p is None or not in_group(p, generators):
                    ok = False
                    break
            if ok:
                names.append(blk.name)
        if names:
            checkpoints.append((position, tuple(names)))
    return tuple(checkpoints)


# -- simulation and logical action -----------------------------------------

def run_circuit(circuit: Circuit, state: StateVector, start: int = 0,
                stop: int | None = None) -> StateVector:
    for op in circuit.ops[start:stop]:
        op.apply(state)
    return state


def _logical_basis(layout: BlockLayout, code: CodeSpec, basis: str
                   ) -> list[tuple[np.ndarray, np.ndarray]]:
    m = len(layout.blocks)
    per_block = [[sparse_codeword(code, lab, blk.qubits, basis) for lab in (0, 1)]
                 for blk in layout.blocks]
    out = []
    for j in range(1 << m):
        idx = np.zeros(1, dtype=np.int64)
        amp = np.ones(1, dtype=np.complex128)
        for b in range(m):
            bi, ba = per_block[b][(j >> (m - 1 - b)) & 1]
            idx = (idx[:, None] | bi[None, :]).ravel()
            amp = (amp[:, None] * ba[None, :]).ravel()
        out.append((idx, amp))
    return out


def encode_layout(layout: BlockLayout, code: CodeSpec,
                  blocks: Sequence[int | tuple[complex, complex]], basis: str = "01") -> StateVector:
    """Product of per-block logical states; ancillas in |0>.

    Each entry is a logical label (0/1) or an amplitude pair in ``basis``.
    """
    if len(blocks) != len(layout.blocks):
        raise ValueError(f"need {len(layout.blocks)} block states, got {len(blocks)}")
    idx = np.zeros(1, dtype=np.int64)
    amp = np.ones(1, dtype=np.complex128)
    for blk, spec in zip(layout.blocks, blocks):
        coeffs = (1.0, 0.0) if spec == 0 else (0.0, 1.0) if spec == 1 else spec
        if abs(abs(coeffs[0]) ** 2 + abs(coeffs[1]) ** 2 - 1) > 1e-10:
            raise ValueError(f"block amplitudes {coeffs} are not normalized")
        parts_i, parts_a = [], []
        for lab, c in enumerate(coeffs):
            if c == 0:
                continue
            bi, ba = sparse_codeword(code, lab, blk.qubits, basis)
            parts_i.append(bi)
            parts_a.append(c * ba)
        bi, ba = np.concatenate(parts_i), np.concatenate(parts_a)
        idx = (idx[:, None] | bi[None, :]).ravel()
        amp = (amp[:, None] * ba[None, :]).ravel()
    amps = np.zeros(1 << layout.total_qubits, dtype=np.complex128)
    np.add.at(amps, idx, amp)
    return StateVector(layout.total_qubits, amps)


def logical_readout(layout: BlockLayout, code: CodeSpec, state: StateVector,
                    basis: str = "01") -> tuple[np.ndarray, float]:
    """Overlaps with every logical product basis state, and the leftover weight."""
    coeffs = np.array([np.vdot(a, state.amplitudes[i]) for i, a in _logical_basis_cached(
        layout, code, basis)])
    total = float(np.vdot(state.amplitudes, state.amplitudes).real)
    return coeffs, max(total - float(np.sum(np.abs(coeffs) ** 2)), 0.0)


@lru_cache(maxsize=32)
def _logical_basis_cached(layout: BlockLayout, code: CodeSpec, basis: str):
    return _logical_basis(layout, code, basis)


@dataclass(frozen=True)
class LogicalAction:
    matrix: np.ndarray
    leakage: np.ndarray

    @property
    def max_leakage(self) -> float:
        return float(self.leakage.max())


def logical_action_matrix(circuit: Circuit, code: CodeSpec, num_blocks: int | None = None,
                          basis: str | None = None, check: bool = True,
                          tol: float = LOGICAL_TOL) -> LogicalAction:
    """Column j is the logical readout of the circuit applied to encoded basis state j."""
    layout = circuit.layout
    m = len(layout.blocks)
    if num_blocks is not None and num_blocks != m:
        raise ValueError(f"circuit has {m} blocks, expected {num_blocks}")
    if any(len(b.qubits) != code.block_size for b in layout.blocks):
        raise ValueError(f"layout blocks do not match {code.name}")
    basis = basis or circuit.basis
    matrix = np.zeros((1 << m, 1 << m), dtype=np.complex128)
    leakage = np.zeros(1 << m)
    for j in range(1 << m):
        labels = [(j >> (m - 1 - b)) & 1 for b in range(m)]
        state = run_circuit(circuit, encode_layout(layout, code, labels, basis))
        state.check_norm()
        matrix[:, j], leakage[j] = logical_readout(layout, code, state, basis)
    if check and leakage.max() > tol:
        raise LeakageError(f"{circuit.name}: leakage {leakage.max():.3e} exceeds {tol:g}")
    return LogicalAction(matrix, leakage)


def cnot_matrix() -> np.ndarray:
    m = np.eye(4, dtype=np.complex128)
    m[[2, 3]] = m[[3, 2]]
    return m


def toffoli_matrix() -> np.ndarray:
    m = np.eye(8, dtype=np.complex128)
    m[[6, 7]] = m[[7, 6]]
    return m


def compare_up_to_phase(actual: np.ndarray, ideal: np.ndarray) -> tuple[float, complex]:
    """Max entrywise deviation after removing one global phase, and that phase."""
    k = np.unravel_index(np.argmax(np.abs(ideal)), ideal.shape)
    phase = actual[k] / ideal[k] if abs(actual[k]) > 0 else 1.0
    phase = phase / abs(phase) if abs(phase) > 0 else 1.0
    return float(np.abs(actual - phase * ideal).max()), complex(phase)


def control_block_phases(actual: np.ndarray, ideal: np.ndarray, num_targets: int = 1
                         ) -> list[complex]:
    """Phase of each control-setting block of ``actual`` relative to ``ideal``.

    Rows and columns are grouped by the leading (control) label bits; for
    each group the phase is read from the largest ideal entry.
    """
    size = 1 << num_targets
    phases = []
    for g in range(ideal.shape[0] // size):
        sl = slice(g * size, (g + 1) * size)
        sub_a, sub_i = actual[sl, sl], ideal[sl, sl]
        k = np.unravel_index(np.argmax(np.abs(sub_i)), sub_i.shape)
        phases.append(complex(sub_a[k] / sub_i[k]))
    return phases


# -- text dump ---------------------------------------------------------------

def dump_circuit(circuit: Circuit) -> str:
    layout = circuit.layout
    lines = [f"# circuit {circuit.name} code={circuit.code_name} basis={circuit.basis}"]
    for key, value in sorted(circuit.params.items()):
        lines.append(f"# {key}={value}")
    for blk in layout.blocks:
        lines.append(f"# block {blk.name} " + " ".join(f"q{q}" for q in blk.qubits))
    if layout.ancillas:
        lines.append("# ancilla " + " ".join(f"q{q}" for q in layout.ancillas))
    gates: dict[str, GateMatrix] = {}
    for position in range(len(circuit.ops) + 1):
        names = circuit.blocks_in_code(position)
        if names:
            lines.append("CHECKPOINT " + ",".join(names))
        if position == len(circuit.ops):
            break
        op = circuit.ops[position]
        if op.controls and op.gate.is_pauli_x() and len(op.controls) == 1:
            lines.append(f"CNOT c{op.controls[0]} t{op.targets[0]}")
            continue
        gates.setdefault(op.gate.name, op.gate)
        if op.controls:
            ctrl = " ".join(f"c{c}" for c in op.controls)
            lines.append(f"CU {op.gate.name} {ctrl} t{op.targets[0]}")
        else:
            lines.append(f"U {op.gate.name} " + " ".join(f"q{t}" for t in op.targets))
    for name, gate in sorted(gates.items()):
        entries = " ".join(f"{z.real:.17g},{z.imag:.17g}" for z in gate.matrix.ravel())
        lines.append(f"GATE {name} {entries}")
    return "\n".join(lines) + "\n"
