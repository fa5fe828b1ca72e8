"""The acceptance suite behind ``encoded-gates --all``.

Each criterion returns a :class:`CriterionResult`; details hold only
deterministic values so two runs with one seed serialize identically.
Wall times are collected separately.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .codes import code_registry, encode, extract_syndrome, memory_correction, single_qubit_errors
from .error_recovery import (
    AmbiguousSyndromeError, build_recovery_table, enumerate_fault_points, measure_block_syndromes,
    random_payload, recover_joint, run_with_fault, sweep,
)
from .harness import Report, RunConfig, cmd_truth_table, cmd_verify_gate, jsonable
from .logical_gates import (
    build_cnot_fig1a, build_cnot_fig1c, build_toffoli_fig3a, encode_layout, run_circuit,
)
from .statevec import StateVector, apply_pauli, fidelity

FIDELITY_TOL = 1e-10
DUAL_BASIS_TOL = 1e-12
PURITY_TOL = 1e-10


@dataclass
class CriterionResult:
    id: int
    title: str
    passed: bool
    details: dict = field(default_factory=dict)
    limit_s: float | None = None


def _rng(seed: int, criterion: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, criterion]))


def _qubit(rng: np.random.Generator) -> tuple[complex, complex]:
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    v /= np.linalg.norm(v)
    return complex(v[0]), complex(v[1])


def criterion_1(seed: int) -> CriterionResult:
    code = code_registry("three_bit")
    circuit = build_cnot_fig1a(code)
    layout = circuit.layout
    rng = _rng(seed, 1)
    worst = 1.0
    for _ in range(100):
        (alpha, beta), (a, b) = _qubit(rng), _qubit(rng)
        out = run_circuit(circuit, encode_layout(layout, code, [(alpha, beta), (a, b)]))
        # |-Q> swaps the target's logical amplitudes
        expected = StateVector(layout.total_qubits,
                               alpha * encode_layout(layout, code, [0, (a, b)]).amplitudes
                               + beta * encode_layout(layout, code, [1, (b, a)]).amplitudes)
        worst = min(worst, fidelity(out, expected))
    return CriterionResult(1, "CNOT on superposed control and target", worst >= 1 - FIDELITY_TOL,
                           {"trials": 100, "min_fidelity": worst}, 1.0)


def criterion_2(seed: int) -> CriterionResult:
    details = {}
    ok = True
    for gate in ("fig1a", "fig1b", "fig1c", "fig2"):
        rep = cmd_verify_gate(RunConfig("verify-gate", gate=gate).validate())
        details[gate] = {"max_deviation": rep.results["max_deviation"],
                         "max_leakage": max(rep.results["leakage"]), "pass": rep.passed}
        ok &= rep.passed
    return CriterionResult(2, "logical CNOT equivalence", ok, details, 1.0)


def criterion_3(seed: int) -> CriterionResult:
    exact = cmd_verify_gate(RunConfig("verify-gate", gate="fig3a").validate())
    table = cmd_truth_table(RunConfig("truth-table", gate="fig3a").validate())
    paper = cmd_verify_gate(RunConfig("verify-gate", gate="fig3a", v_variant="paper").validate())
    paper_table = cmd_truth_table(RunConfig("truth-table", gate="fig3a", v_variant="paper").validate())
    expected_diag = "phase deviation i on (1,1) control block"
    detected = (not paper.passed and expected_diag in paper.diagnostics
                and paper.results["control_block_phases"] == {"(0,0)": "1", "(0,1)": "1",
                                                              "(1,0)": "1", "(1,1)": "i"})
    rows = [(r["CI"], r["CII"], r["operation"], r["target_action"], r["step1_changed"])
            for r in table.results["rows"]]
    ok = exact.passed and table.passed and detected and not paper_table.passed
    return CriterionResult(3, "Toffoli truth table", ok, {
        "exact_max_deviation": exact.results["max_deviation"],
        "rows": rows,
        "paper_v_diagnostics": paper.diagnostics,
        "paper_v_truth_table": [r["phase"] for r in paper_table.results["rows"]],
    }, 1.0)


def criterion_4(seed: int) -> CriterionResult:
    code = code_registry("three_bit")
    plus = np.array([1, 1]) / np.sqrt(2)
    minus = np.array([1, -1]) / np.sqrt(2)
    devs = {}
    for label, sign, single in (("+", 1, plus), ("-", -1, minus)):
        oracle = np.kron(np.kron(single, single), single)
        state = encode(code, 1 / np.sqrt(2), sign / np.sqrt(2))
        devs[label] = float(np.abs(state.amplitudes - oracle).max())
    rep = cmd_verify_gate(RunConfig("verify-gate", gate="fig3b").validate())
    ok = max(devs.values()) <= DUAL_BASIS_TOL and rep.passed
    return CriterionResult(4, "dual-basis encoding and +/- Toffoli", ok, {
        "encode_deviation": devs, "fig3b_max_deviation": rep.results["max_deviation"],
        "fig3b_leakage": max(rep.results["leakage"])})


def criterion_5(seed: int) -> CriterionResult:
    code = code_registry("seven_bit")
    rng = _rng(seed, 5)
    worst, count = 1.0, 0
    for _ in range(8):
        alpha, beta = _qubit(rng)
        clean = encode(code, alpha, beta)
        for err in single_qubit_errors(code, "XYZ"):
            noisy = apply_pauli(clean.copy(), err)
            _, _, fixed = memory_correction(code, noisy, count)
            worst = min(worst, fidelity(fixed, clean))
            count += 1
    return CriterionResult(5, "7-bit memory correction", worst >= 1 - FIDELITY_TOL and count == 168,
                           {"cases": count, "min_fidelity": worst}, 5.0)


def _idle_syndrome(code, position: int, kind: str) -> tuple[int, ...]:
    n = code.block_size
    idle = encode(code, 1 / np.sqrt(2), 1 / np.sqrt(2))
    apply_pauli(idle, "I" * position + kind + "I" * (n - position - 1))
    return extract_syndrome(code, idle)[0]


def criterion_6(seed: int) -> CriterionResult:
    code = code_registry("three_bit")
    failures: list[str] = []
    counts = {"a": 0, "b": 0, "c": 0}

    pm = build_cnot_fig1a(code, "pm")
    names = pm.layout.names
    pm_faults = enumerate_fault_points(pm, "Z")
    table = build_recovery_table(pm, code, pm_faults, seed)
    for i, fault in enumerate(pm_faults):
        payload = random_payload(pm, code, _rng(seed, 600 + i))
        reference = run_circuit(pm, payload.copy())
        state, _ = run_with_fault(pm, code, payload, fault)
        key, state = measure_block_syndromes(pm, code, state)
        syn = dict(zip(names, key))
        block = "C" if fault.qubit in pm.layout.block("C").qubits else "T"
        local = pm.layout.block(block).qubits.index(fault.qubit)
        idle = _idle_syndrome(code, local, "Z")
        if fault.position == 0 and block == "T":
            counts["a"] += 1
            if syn["T"] != idle or syn["C"] != code.trivial_syndrome:
                failures.append(f"(a) {fault}: syndromes {syn}, idle {idle}")
        if fault.position == 0 and block == "C":
            counts["b"] += 1
            if not (syn["C"] == syn["T"] == idle != code.trivial_syndrome):
                failures.append(f"(b) {fault}: syndromes {syn}")
        _, outcome = recover_joint(table, state, i, reference)
        if not outcome.recovered:
            failures.append(f"{fault}: fidelity {outcome.fidelity}")

    plain = build_cnot_fig1a(code, "01")
    for i, fault in enumerate(enumerate_fault_points(plain, "Z", blocks=["C"])):
        counts["c"] += 1
        payload = random_payload(plain, code, _rng(seed, 700 + i))
        reference = run_circuit(plain, payload.copy())
        state, _ = run_with_fault(plain, code, payload, fault)
        key, state = measure_block_syndromes(plain, code, state)
        if key[1] != code.trivial_syndrome:
            failures.append(f"(c) {fault}: target syndrome {key[1]}")
        for blk in plain.layout.blocks:
            _, _, state = memory_correction(code, state, i, blk.qubits)
        if fidelity(state, reference) < 1 - FIDELITY_TOL:
            failures.append(f"(c) {fault}: memory correction leaves fidelity {fidelity(state, reference)}")
    return CriterionResult(6, "error propagation through the CNOT", not failures,
                           {"checked": counts, "pm_faults_recovered": len(pm_faults),
                            "failures": failures}, 10.0)


def criterion_7(seed: int) -> CriterionResult:
    code = code_registry("three_bit")
    circuit = build_toffoli_fig3a(code)
    faults = enumerate_fault_points(circuit, "Z", blocks=["CI", "CII"])
    details: dict = {"control_mode": "ancilla", "faults": len(faults)}
    try:
        table = build_recovery_table(circuit, code, faults, seed)
    except AmbiguousSyndromeError as exc:
        details["ambiguity"] = str(exc)
        return CriterionResult(7, "Toffoli control-byte fault sweep", False, details, 30.0)
    outcomes = sweep(circuit, code, "Z", seed, table, faults)
    bad = [str(o.fault) for o in outcomes if not o.recovered]
    details.update(ambiguities=0, not_recovered=bad, unrecoverable=len(table.unrecoverable),
                   conditional_entries=len(table.conditional_entries()))

    # the same sweep with the parity folded into the byte's own first qubit
    folded = build_toffoli_fig3a(code, control_mode="fold")
    try:
        build_recovery_table(folded, code, enumerate_fault_points(folded, "Z", blocks=["CI", "CII"]), seed)
        details["fold_mode"] = "no ambiguity"
    except AmbiguousSyndromeError as exc:
        details["fold_mode"] = str(exc)
    ok = not bad and not table.unrecoverable and not table.nondeterministic
    return CriterionResult(7, "Toffoli control-byte fault sweep", ok, details, 30.0)


def criterion_8(seed: int) -> CriterionResult:
    details = {}
    ok = True
    for mode in ("fold", "ancilla"):
        rep = cmd_verify_gate(RunConfig("verify-gate", gate="toffoli7", control_mode=mode).validate())
        details[mode] = {"qubits": rep.results["qubits"], "ops": rep.results["ops"],
                         "max_deviation": rep.results["max_deviation"],
                         "max_leakage": max(rep.results["leakage"]), "pass": rep.passed}
        ok &= rep.passed
    ok &= details["fold"]["qubits"] == 21
    return CriterionResult(8, "7-bit Toffoli", ok, details, 120.0)


def ancilla_purity(state: StateVector, qubit: int) -> tuple[float, float]:
    """(probability of |0>, purity) of one qubit's reduced state."""
    t = state.amplitudes.reshape(-1, 2, 1 << qubit)
    a0, a1 = t[:, 0, :], t[:, 1, :]
    p0 = float(np.vdot(a0, a0).real)
    p1 = float(np.vdot(a1, a1).real)
    c = complex(np.vdot(a1, a0))
    return p0, p0 ** 2 + p1 ** 2 + 2 * abs(c) ** 2


def criterion_9(seed: int) -> CriterionResult:
    code = code_registry("three_bit")
    circuit = build_cnot_fig1c(code)
    layout = circuit.layout
    ancilla = layout.ancillas[0]
    rng = _rng(seed, 9)
    worst_p0 = worst_purity = 1.0
    for _ in range(20):
        # a random, generally entangled logical state of both bytes
        w = rng.normal(size=4) + 1j * rng.normal(size=4)
        w /= np.linalg.norm(w)
        amps = sum(w[j] * encode_layout(layout, code, [j >> 1, j & 1]).amplitudes for j in range(4))
        out = run_circuit(circuit, StateVector(layout.total_qubits, amps))
        p0, purity = ancilla_purity(out, ancilla)
        worst_p0, worst_purity = min(worst_p0, p0), min(worst_purity, purity)
    ok = worst_p0 >= 1 - PURITY_TOL and worst_purity >= 1 - PURITY_TOL
    return CriterionResult(9, "ancilla hygiene", ok,
                           {"inputs": 20, "min_p0": worst_p0, "min_purity": worst_purity})


CRITERIA: dict[int, Callable[[int], CriterionResult]] = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
    6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9,
}


def _serialize(results: list[CriterionResult]) -> str:
    return json.dumps(jsonable([r.__dict__ for r in results]), sort_keys=True)


def run_criteria(seed: int, ids=None) -> tuple[list[CriterionResult], dict[int, float]]:
    results, times = [], {}
    for cid in ids or CRITERIA:
        started = time.perf_counter()
        results.append(CRITERIA[cid](seed))
        times[cid] = time.perf_counter() - started
    return results, times


def criterion_10(seed: int, first: list[CriterionResult]) -> CriterionResult:
    """Re-run criteria 1-9 and compare the serialized results byte for byte."""
    second, _ = run_criteria(seed)
    a, b = _serialize(first), _serialize(second)
    return CriterionResult(10, "determinism", a == b, {"bytes": len(a), "identical": a == b})


def run_all(seed: int = 0) -> Report:
    results, times = run_criteria(seed)
    started = time.perf_counter()
    results.append(criterion_10(seed, results))
    times[10] = time.perf_counter() - started
    diagnostics = []
    for r in results:
        if not r.passed:
            diagnostics.append(f"criterion {r.id} failed: {r.title}")
        if r.limit_s is not None and times[r.id] > r.limit_s:
            diagnostics.append(f"criterion {r.id} took {times[r.id]:.2f}s (limit {r.limit_s:g}s)")
    payload = {"seed": seed, "criteria": [r.__dict__ for r in results]}
    return Report("all", {}, payload, all(r.passed for r in results), diagnostics,
                  criterion_times=times)
