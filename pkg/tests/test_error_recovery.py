import numpy as np
import pytest

from encoded_gates.codes import extract_syndrome, encode
from encoded_gates.error_recovery import (
    CSV_COLUMNS, AmbiguousSyndromeError, PauliError, build_recovery_table, enumerate_fault_points,
    inject, measure_block_syndromes, outcomes_to_csv, random_payload, recover_joint,
    run_with_fault, sweep,
)
from encoded_gates.logical_gates import (
    build_cnot_fig1a, build_cnot_fig1b, build_cnot_fig1c, build_cnot_fig2, build_toffoli_fig3a,
    empty_circuit, run_circuit,
)
from encoded_gates.statevec import H, apply_pauli, apply_unitary, basis_state, fidelity


def _syndromes(circuit, code, fault, seed=0):
    payload = random_payload(circuit, code, np.random.default_rng(seed))
    state, _ = run_with_fault(circuit, code, payload, fault)
    return measure_block_syndromes(circuit, code, state)[0]


def _local(n, pos, kind="Z"):
    return "I" * pos + kind + "I" * (n - pos - 1)


class TestInject:
    def test_z_flips_plus(self):
        plus = apply_unitary(basis_state(1, 0), H, [0])
        out = inject(plus.copy(), PauliError(0, "Z", 0))
        assert np.allclose(out.amplitudes, [2 ** -0.5, -(2 ** -0.5)])

    def test_x_on_qubit_zero(self):
        out = inject(basis_state(3, "000"), PauliError(0, "X", 0))
        assert np.flatnonzero(out.amplitudes).tolist() == [1]

    def test_y(self):
        assert inject(basis_state(1, 0), PauliError(0, "Y", 0)).amplitudes[1] == 1j

    def test_validation(self):
        with pytest.raises(ValueError):
            PauliError(0, "W", 0)
        with pytest.raises(ValueError):
            inject(basis_state(2, 0), PauliError(5, "X", 0))


class TestEnumerate:
    def test_before_gate_six_qubits(self, three):
        assert len(enumerate_fault_points(build_cnot_fig1a(three), {"Z"}, "before")) == 6

    def test_empty_circuit_single_boundary(self, three):
        faults = enumerate_fault_points(empty_circuit(three), "XYZ")
        assert {f.position for f in faults} == {0} and len(faults) == 18

    def test_fig2_count(self, seven):
        assert len(enumerate_fault_points(build_cnot_fig2(seven), "X,Y,Z")) == 14 * 3 * 8

    def test_order_and_filters(self, three):
        c = build_toffoli_fig3a(three)
        faults = enumerate_fault_points(c, "ZX", blocks=["CI"])
        assert faults[0] == PauliError(c.layout.block("CI").qubits[0], "X", 0)
        assert faults[1].kind == "Z" and faults[2].qubit == c.layout.block("CI").qubits[1]
        assert {f.qubit for f in faults} == set(c.layout.block("CI").qubits)
        assert enumerate_fault_points(c, "") == []
        with pytest.raises(ValueError):
            enumerate_fault_points(c, "Q")


class TestTable:
    def test_target_fault_copies_onto_control(self, three):
        c = build_cnot_fig1a(three)
        faults = enumerate_fault_points(c, "Z", "before")
        table = build_recovery_table(c, three, faults)
        for j, q in enumerate(c.layout.block("T").qubits):
            corr = table.lookup(_syndromes(c, three, PauliError(q, "Z", 0)))
            assert corr.paulis == (("C", _local(3, j)), ("T", _local(3, j))) and not corr.phase

    def test_control_fault_stays_on_control(self, three):
        c = build_cnot_fig1a(three)
        table = build_recovery_table(c, three, enumerate_fault_points(c, "Z", "before"))
        for j, q in enumerate(c.layout.block("C").qubits):
            corr = table.lookup(_syndromes(c, three, PauliError(q, "Z", 0)))
            assert corr.paulis == (("C", _local(3, j)),)

    def test_trivial_syndrome_is_identity(self, three):
        c = build_cnot_fig1a(three)
        table = build_recovery_table(c, three, enumerate_fault_points(c, "Z"))
        assert table.lookup(((1, 1), (1, 1))).describe() == "I"

    def test_conditional_sign_flip_before_fig1b(self, three):
        # Z on the target's top qubit before fig1b needs a sign flip conditioned on the control byte
        c = build_cnot_fig1b(three)
        table = build_recovery_table(c, three, enumerate_fault_points(c, "Z", "before"))
        flagged = table.conditional_entries()
        assert [corr.describe() for corr in flagged.values()] == ["T:ZII Z_L(C)"]

    def test_ambiguity_is_loud(self, three):
        c = build_cnot_fig1b(three)
        with pytest.raises(AmbiguousSyndromeError) as err:
            build_recovery_table(c, three, enumerate_fault_points(c, "Z"))
        first, second = err.value.faults
        assert first.qubit == second.qubit == c.layout.block("T").qubits[0]
        assert "T:-+" in str(err.value)

    def test_not_strict_records_instead(self, three):
        c = build_cnot_fig1b(three)
        table = build_recovery_table(c, three, enumerate_fault_points(c, "Z"), strict=False)
        assert table.unrecoverable

    def test_syndrome_independent_of_payload(self, seven):
        c = build_cnot_fig2(seven)
        for fault in enumerate_fault_points(c, "XYZ")[::7]:
            assert len({_syndromes(c, seven, fault, seed) for seed in range(8)}) == 1


class TestSweeps:
    def test_fig1a_all_positions(self, three):
        for basis in ("01", "pm"):
            outcomes = sweep(build_cnot_fig1a(three, basis), three, "Z", payload_seed=4)
            assert len(outcomes) == 24 and all(o.recovered for o in outcomes)

    def test_fig2_all_single_faults(self, seven):
        outcomes = sweep(build_cnot_fig2(seven), seven, "XYZ", payload_seed=1)
        assert len(outcomes) == 336 and all(o.recovered for o in outcomes)

    def test_fig1b_complete_with_intermediate_correction(self, three):
        outcomes = sweep(build_cnot_fig1b(three), three, "Z", intermediate=True)
        assert all(o.recovered for o in outcomes)

    @pytest.mark.parametrize("positions", ["before", "after"])
    def test_fig1c_before_and_after(self, three, positions):
        c = build_cnot_fig1c(three)
        outcomes = sweep(c, three, "Z", faults=enumerate_fault_points(c, "Z", positions))
        assert all(o.recovered for o in outcomes)

    def test_fig1c_mid_gate_bad_locations(self, three):
        # Z on the ancilla while it carries a partial parity, or on the flipped
        # target qubit while the ancilla controls it, kicks back onto two or
        # more control qubits: a logical error no single-fault table can undo
        c = build_cnot_fig1c(three)
        faults = enumerate_fault_points(c, "Z")
        table = build_recovery_table(c, three, faults, intermediate=True, strict=False)
        bad = {(o.fault.qubit, o.fault.position) for o in sweep(c, three, "Z", table=table, faults=faults)
               if not o.recovered}
        anc, top = c.layout.ancillas[0], c.layout.block("T").qubits[0]
        assert bad == {(anc, 2), (anc, 3), (anc, 4), (anc, 5), (top, 3)}

    def test_fig3a_control_flip_before_gate(self, three):
        c = build_toffoli_fig3a(three)
        faults = enumerate_fault_points(c, "Z", "before", blocks=["CI", "CII"])
        assert all(o.recovered for o in sweep(c, three, "Z", faults=faults))

    def test_fig3a_literal_x_on_control_is_a_logical_flip(self, three):
        c = build_toffoli_fig3a(three)
        fault = PauliError(c.layout.block("CI").qubits[1], "X", 0)
        assert _syndromes(c, three, fault) == ((1, 1),) * 3

    def test_fold_mode_carrier_fault_is_ambiguous(self, three):
        c = build_toffoli_fig3a(three, control_mode="fold")
        with pytest.raises(AmbiguousSyndromeError) as err:
            build_recovery_table(c, three, enumerate_fault_points(c, "Z", blocks=["CI", "CII"]))
        carriers = {c.layout.block("CI").qubits[0], c.layout.block("CII").qubits[0]}
        assert err.value.faults[1].qubit in carriers

    def test_two_faults_same_byte_fail(self, three):
        c = build_cnot_fig1a(three)
        table = build_recovery_table(c, three, enumerate_fault_points(c, "Z"))
        tq = c.layout.block("T").qubits
        fails = 0
        for seed in range(4):
            payload = random_payload(c, three, np.random.default_rng(seed))
            ref = run_circuit(c, payload.copy())
            state, _ = run_with_fault(c, three, payload, PauliError(tq[0], "Z", 0))
            inject(state, PauliError(tq[1], "Z", 3))
            _, outcome = recover_joint(table, state, seed, ref)
            fails += not outcome.recovered
        assert fails >= 1

    def test_reproducible(self, three):
        c = build_toffoli_fig3a(three)
        faults = enumerate_fault_points(c, "Z", blocks=["CII"])[:20]
        rows = [[o.row(c, three) for o in sweep(c, three, "Z", 9, faults=faults)] for _ in range(2)]
        assert rows[0] == rows[1]


class TestRecoverJoint:
    def test_clean_run_passthrough(self, three):
        c = build_toffoli_fig3a(three)
        table = build_recovery_table(c, three, [])
        payload = random_payload(c, three, np.random.default_rng(0))
        out = run_circuit(c, payload)
        before = out.amplitudes.copy()
        state, outcome = recover_joint(table, out, 0, out.copy())
        assert np.abs(state.amplitudes - before).max() <= 1e-12
        assert set(outcome.syndromes.values()) == {(1, 1)} and outcome.correction_applied == []
        assert outcome.recovered

    def test_pm_target_fault_matches_idle_syndrome(self, three):
        c = build_cnot_fig1a(three, "pm")
        table = build_recovery_table(c, three, enumerate_fault_points(c, "Z"))
        for j, q in enumerate(c.layout.block("T").qubits):
            idle = apply_pauli(encode(three, 0.6, 0.8), _local(3, j))
            payload = random_payload(c, three, np.random.default_rng(j))
            ref = run_circuit(c, payload.copy())
            state, _ = run_with_fault(c, three, payload, PauliError(q, "Z", 0))
            _, outcome = recover_joint(table, state, 0, ref)
            assert outcome.syndromes["T"] == extract_syndrome(three, idle)[0]
            assert outcome.syndromes["C"] == (1, 1) and outcome.recovered

    def test_pm_control_fault_shows_on_both(self, three):
        c = build_cnot_fig1a(three, "pm")
        for q in c.layout.block("C").qubits:
            syn = _syndromes(c, three, PauliError(q, "Z", 0))
            assert syn[0] == syn[1] != (1, 1)

    def test_unknown_syndrome_left_alone(self, three):
        c = build_cnot_fig1a(three)
        table = build_recovery_table(c, three, [])
        payload = random_payload(c, three, np.random.default_rng(0))
        ref = run_circuit(c, payload.copy())
        state = run_circuit(c, payload)
        inject(state, PauliError(0, "Z", 2))
        inject(state, PauliError(5, "Z", 2))
        out, outcome = recover_joint(table, state, 0, ref)
        assert outcome.note == "syndrome not in recovery table" and not outcome.recovered


def test_csv_schema(three):
    c = build_cnot_fig1a(three)
    rows = [o.row(c, three) for o in sweep(c, three, "Z", 0)]
    text = outcomes_to_csv(rows)
    assert text.splitlines()[0] == ",".join(CSV_COLUMNS)
    assert len(text.splitlines()) == 25
