"""Single-fault injection, brute-force recovery tables and fault sweeps.

A fault is a single-qubit Pauli applied at a timeline position: position
``p`` sits just before op ``p``; position ``len(circuit)`` is after the last
op. The recovery table maps the post-gate syndromes of all blocks to a
correction found by search over per-block single-qubit Paulis combined with
at most one logical phase: a sign flip conditioned on one byte
(``Z_L``, the byte's logical Z) or on two bytes (``CZ_L``).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable, Sequence

import numpy as np

from .codes import CodeSpec, UncorrectableError, extract_syndrome, memory_correction
from .logical_gates import Circuit, encode_layout, run_circuit
from .pauli import Pauli, syndrome_of
from .statevec import StateVector, apply_parity_phase, apply_pauli, fidelity

RECOVERY_TOL = 1e-10
KINDS = ("X", "Y", "Z")

SyndromeKey = tuple[tuple[int, ...], ...]


class AmbiguousSyndromeError(RuntimeError):
    def __init__(self, syndrome: SyndromeKey, first: "PauliError | None", second: "PauliError",
                 names: Sequence[str] | None = None):
        self.syndrome = syndrome
        self.faults = (first, second)
        super().__init__(
            f"syndrome {format_syndrome(syndrome, names)} needs incompatible corrections for "
            f"{describe_fault(first)} and {describe_fault(second)}")


@dataclass(frozen=True)
class PauliError:
    qubit: int
    kind: str
    position: int

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"fault kind must be one of {KINDS}, got {self.kind!r}")

    @property
    def pauli(self) -> Pauli:
        return Pauli.single(self.kind, self.qubit)


def describe_fault(fault: PauliError | None) -> str:
    if fault is None:
        return "no fault"
    return f"{fault.kind} on q{fault.qubit} at position {fault.position}"


def inject(state: StateVector, error: PauliError) -> StateVector:
    if not 0 <= error.qubit < state.num_qubits:
        raise ValueError(f"qubit {error.qubit} out of range")
    return apply_pauli(state, error.pauli)


def _parse_kinds(kinds: Iterable[str] | str) -> list[str]:
    if isinstance(kinds, str):
        kinds = kinds.split(",") if "," in kinds else list(kinds)
    kinds = {k.strip().upper() for k in kinds if k.strip()}
    if kinds - set(KINDS):
        raise ValueError(f"fault kinds must be drawn from {KINDS}, got {sorted(kinds)}")
    return sorted(kinds, key=KINDS.index)


def enumerate_fault_points(circuit: Circuit, kinds: Iterable[str] | str,
                           positions: Iterable[int] | str | None = None,
                           blocks: Sequence[str] | None = None,
                           qubits: Sequence[int] | None = None) -> list[PauliError]:
    """Every (position, qubit, kind) combination, in that nesting order.

    ``positions`` may be ``"before"``/``"after"`` or explicit indices;
    ``blocks`` restricts qubits to the named blocks. Qubits run in wire order
    (blocks first, then ancillas).
    """
    kinds = _parse_kinds(kinds)
    last = len(circuit.ops)
    if positions is None or positions == "all":
        positions = range(last + 1)
    elif positions == "before":
        positions = [0]
    elif positions == "after":
        positions = [last]
    layout = circuit.layout
    if qubits is None:
        if blocks is None:
            qubits = [q for b in layout.blocks for q in b.qubits] + list(layout.ancillas)
        else:
            qubits = [q for name in blocks for q in layout.block(name).qubits]
    return [PauliError(q, k, p) for p in positions for q in qubits for k in kinds]


# -- corrections ---------------------------------------------------------------

@dataclass(frozen=True)
class Correction:
    paulis: tuple[tuple[str, str], ...] = ()  # (block, block-local pauli), identities omitted
    phase: tuple[str, ...] = ()  # (), ("Z_L", block) or ("CZ_L", block, block)

    @property
    def conditional(self) -> bool:
        return bool(self.phase)

    def describe(self) -> str:
        parts = [f"{name}:{p}" for name, p in self.paulis]
        if self.phase:
            parts.append(f"{self.phase[0]}({','.join(self.phase[1:])})")
        return " ".join(parts) if parts else "I"

    def apply(self, state: StateVector, circuit: Circuit, code: CodeSpec) -> StateVector:
        layout = circuit.layout
        for name, p in self.paulis:
            apply_pauli(state, Pauli.from_string(p, layout.block(name).qubits))
        if self.phase:
            if self.phase[0] == "Z_L":
                apply_pauli(state, Pauli.from_string(code.logical_z, layout.block(self.phase[1]).qubits))
            else:
                a, b = (layout.block(n) for n in self.phase[1:])
                apply_parity_phase(state, _z_mask(code, a.qubits), _z_mask(code, b.qubits))
        return state


def _z_mask(code: CodeSpec, qubits: Sequence[int]) -> int:
    return sum(1 << q for ch, q in zip(code.logical_z, qubits) if ch == "Z")


def _block_candidates(code: CodeSpec, syndrome: tuple[int, ...]) -> list[str]:
    n = code.block_size
    local = code.block_qubits()
    stabs = code.stabilizer_paulis(local)
    preferred = code.syndrome_table.get(syndrome)
    out = [preferred] if preferred is not None else []
    for p, k in product(range(n), KINDS):
        s = "I" * p + k + "I" * (n - p - 1)
        if syndrome_of(Pauli.from_string(s, local), stabs) == syndrome and s not in out:
            out.append(s)
    if syndrome == code.trivial_syndrome and "I" * n not in out:
        out.insert(0, "I" * n)
    return out


def _candidates(circuit: Circuit, code: CodeSpec, key: SyndromeKey) -> Iterable[Correction]:
    names = circuit.layout.names
    per_block = [_block_candidates(code, s) for s in key]
    phases: list[tuple[str, ...]] = [()]
    phases += [("Z_L", n) for n in names]
    phases += [("CZ_L", a, b) for a, b in combinations(names, 2)]
    for phase in phases:
        for choice in product(*per_block):
            paulis = tuple((n, p) for n, p in zip(names, choice) if set(p) != {"I"})
            yield Correction(paulis, phase)


# -- simulation with faults ------------------------------------------------------

def format_syndrome(key: SyndromeKey, names: Sequence[str] | None = None) -> str:
    names = names or [f"B{i}" for i in range(len(key))]
    return "|".join(f"{n}:" + "".join("+" if v > 0 else "-" for v in s) for n, s in zip(names, key))


def measure_block_syndromes(circuit: Circuit, code: CodeSpec, state: StateVector,
                            rng_seed: int | None = 0) -> tuple[SyndromeKey, StateVector]:
    key = []
    seeds = np.random.SeedSequence(rng_seed).generate_state(len(circuit.layout.blocks))
    for blk, seed in zip(circuit.layout.blocks, seeds):
        s, state = extract_syndrome(code, state, int(seed), blk.qubits)
        key.append(s)
    return tuple(key), state


def run_with_fault(circuit: Circuit, code: CodeSpec, state: StateVector,
                   fault: PauliError | None, intermediate: bool = False,
                   rng_seed: int | None = 0) -> tuple[StateVector, list[str]]:
    """Run the circuit, injecting ``fault`` at its position.

    With ``intermediate`` the blocks listed at each checkpoint get memory
    correction before that slot's fault fires. Returns the state and a log of
    the intermediate corrections that did something.
    """
    log: list[str] = []
    seeds = iter(np.random.SeedSequence(rng_seed).generate_state(len(circuit.ops) + 1))
    for position in range(len(circuit.ops) + 1):
        seed = int(next(seeds))
        if intermediate and position > 0:
            for name in circuit.blocks_in_code(position):
                qubits = circuit.layout.block(name).qubits
                try:
                    syndrome, correction, state = memory_correction(code, state, seed, qubits)
                except UncorrectableError as exc:
                    log.append(f"@{position} {name}: {exc}")
                    continue
                if set(correction) != {"I"}:
                    log.append(f"@{position} {name}:{correction}")
        if fault is not None and fault.position == position:
            inject(state, fault)
        if position < len(circuit.ops):
            circuit.ops[position].apply(state)
    return state, log


def random_payload(circuit: Circuit, code: CodeSpec, rng: np.random.Generator) -> StateVector:
    """Product of independent Haar-random logical qubits, one per block."""
    amps = []
    for _ in circuit.layout.blocks:
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        v /= np.linalg.norm(v)
        amps.append((complex(v[0]), complex(v[1])))
    return encode_layout(circuit.layout, code, amps)


# -- recovery table --------------------------------------------------------------

@dataclass
class RecoveryTable:
    circuit: Circuit
    code: CodeSpec
    entries: dict[SyndromeKey, Correction]
    intermediate: bool = False
    unrecoverable: list[PauliError] = field(default_factory=list)
    nondeterministic: list[PauliError] = field(default_factory=list)

    def lookup(self, key: SyndromeKey) -> Correction | None:
        return self.entries.get(key)

    def conditional_entries(self) -> dict[SyndromeKey, Correction]:
        """Entries that need a logically conditioned sign flip."""
        return {k: c for k, c in self.entries.items() if c.conditional}

    def to_json(self) -> list[dict]:
        names = self.circuit.layout.names
        return [{"syndrome": format_syndrome(k, names), "correction": c.describe(),
                 "conditional_phase": c.conditional} for k, c in self.entries.items()]


@dataclass
class _Trial:
    fault: PauliError | None
    key: SyndromeKey
    faulty: list[StateVector]
    reference: list[StateVector]


def _fixes(corr: Correction, trial: _Trial, circuit: Circuit, code: CodeSpec, tol: float) -> bool:
    for bad, ref in zip(trial.faulty, trial.reference):
        if fidelity(corr.apply(bad.copy(), circuit, code), ref) < 1 - tol:
            return False
    return True


def build_recovery_table(circuit: Circuit, code: CodeSpec, faults: Sequence[PauliError],
                         payload_seed: int = 0, num_payloads: int = 2,
                         intermediate: bool = False, strict: bool = True,
                         tol: float = RECOVERY_TOL) -> RecoveryTable:
    """Derive syndrome -> correction by simulation.

    Every fault is run on ``num_payloads`` random encoded inputs; faults
    sharing a syndrome must share one correction. The fault-free run is
    always included and pins the trivial syndrome to a correction that
    leaves clean outputs alone. Raises :class:`AmbiguousSyndromeError` when
    two individually correctable faults need incompatible corrections
    (unless ``strict`` is False, in which case the first fault wins).
    """
    rng = np.random.default_rng(payload_seed)
    payloads = [random_payload(circuit, code, rng) for _ in range(num_payloads)]
    references = [run_circuit(circuit, p.copy()) for p in payloads]

    table = RecoveryTable(circuit, code, {}, intermediate)
    groups: dict[SyndromeKey, list[_Trial]] = {}
    for i, fault in enumerate([None, *faults]):
        states, keys = [], set()
        for k, payload in enumerate(payloads):
            seed = [payload_seed, i, k]
            out, _ = run_with_fault(circuit, code, payload.copy(), fault, intermediate, seed)
            key, out = measure_block_syndromes(circuit, code, out, seed)
            states.append(out)
            keys.add(key)
        if len(keys) != 1:
            table.nondeterministic.append(fault)
            continue
        groups.setdefault(keys.pop(), []).append(_Trial(fault, key, states, references))

    for key, trials in groups.items():
        chosen = None
        for corr in _candidates(circuit, code, key):
            if all(_fixes(corr, t, circuit, code, tol) for t in trials):
                chosen = corr
                break
        if chosen is None:
            chosen = _resolve_conflict(key, trials, circuit, code, tol, table, strict)
        if chosen is not None:
            table.entries[key] = chosen
    return table


def _resolve_conflict(key, trials, circuit, code, tol, table, strict) -> Correction | None:
    candidates = list(_candidates(circuit, code, key))
    valid = []
    for t in trials:
        ok = [c for c in candidates if _fixes(c, t, circuit, code, tol)]
        if not ok:
            table.unrecoverable.append(t.fault)
        valid.append(ok)
    correctable = [(t, v) for t, v in zip(trials, valid) if v]
    if not correctable:
        return None
    first, first_valid = correctable[0]
    for t, v in correctable[1:]:
        if not set(first_valid) & set(v):
            if strict:
                raise AmbiguousSyndromeError(key, first.fault, t.fault, circuit.layout.names)
            table.unrecoverable.append(t.fault)
    # keep the correction that serves the most faults
    return max(first_valid, key=lambda c: sum(c in v for _, v in correctable))


# -- recovery and sweeps ---------------------------------------------------------

@dataclass
class RecoveryOutcome:
    fault: PauliError | None
    syndromes: dict[str, tuple[int, ...]]
    correction_applied: list[str]
    fidelity: float | None
    recovered: bool | None
    note: str = ""

    def row(self, circuit: Circuit, code: CodeSpec) -> dict:
        f = self.fault
        return {
            "circuit": circuit.name,
            "code": code.name,
            "fault_kind": f.kind if f else "",
            "fault_qubit": f.qubit if f else "",
            "fault_position": f.position if f else "",
            "syndrome_tuple": "|".join(
                f"{n}:" + "".join("+" if v > 0 else "-" for v in s) for n, s in self.syndromes.items()),
            "correction": "; ".join(self.correction_applied) or "I",
            "fidelity": None if self.fidelity is None else round(self.fidelity, 12),
            "recovered": self.recovered,
        }


def recover_joint(table: RecoveryTable, state: StateVector, rng_seed: int | None = 0,
                  reference: StateVector | None = None, tol: float = RECOVERY_TOL
                  ) -> tuple[StateVector, RecoveryOutcome]:
    """Measure every block's syndrome and apply the table's correction.

    A syndrome combination missing from the table is reported and the state
    returned uncorrected. ``fidelity`` is filled in when ``reference`` is given.
    """
    circuit, code = table.circuit, table.code
    key, state = measure_block_syndromes(circuit, code, state, rng_seed)
    syndromes = dict(zip(circuit.layout.names, key))
    corr = table.lookup(key)
    applied: list[str] = []
    note = ""
    if corr is None:
        note = "syndrome not in recovery table"
    else:
        state = corr.apply(state, circuit, code)
        if corr.paulis or corr.phase:
            applied.append(corr.describe())
    fid = recovered = None
    if reference is not None:
        fid = fidelity(state, reference)
        recovered = fid >= 1 - tol
    return state, RecoveryOutcome(None, syndromes, applied, fid, recovered, note)


def sweep(circuit: Circuit, code: CodeSpec, kinds: Iterable[str] | str = KINDS,
          payload_seed: int = 0, table: RecoveryTable | None = None,
          faults: Sequence[PauliError] | None = None, intermediate: bool | None = None,
          tol: float = RECOVERY_TOL) -> list[RecoveryOutcome]:
    """One outcome per fault, each on its own random payload derived from ``payload_seed``."""
    if faults is None:
        faults = enumerate_fault_points(circuit, kinds)
    if table is None:
        table = build_recovery_table(circuit, code, faults, payload_seed,
                                     intermediate=bool(intermediate))
    if intermediate is None:
        intermediate = table.intermediate
    outcomes = []
    for i, fault in enumerate(faults):
        seq = np.random.SeedSequence([payload_seed, 7919, i])
        rng = np.random.default_rng(seq)
        payload = random_payload(circuit, code, rng)
        reference = run_circuit(circuit, payload.copy())
        state, log = run_with_fault(circuit, code, payload, fault, intermediate, [payload_seed, 1, i])
        _, outcome = recover_joint(table, state, [payload_seed, 2, i], reference, tol)
        outcome.fault = fault
        outcome.correction_applied = log + outcome.correction_applied
        outcomes.append(outcome)
    return outcomes


CSV_COLUMNS = ("circuit", "code", "fault_kind", "fault_qubit", "fault_position",
               "syndrome_tuple", "correction", "fidelity", "recovered")


def outcomes_to_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("" if row[k] is None else row[k]) for k in CSV_COLUMNS})
    return buf.getvalue()


def outcomes_to_json(rows: Sequence[dict]) -> str:
    return json.dumps(list(rows), indent=2, sort_keys=True)
