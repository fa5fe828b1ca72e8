"""Command-line front end.

    encoded-gates verify-gate --gate fig3a --v paper
    encoded-gates sweep-errors --gate fig2 --faults X,Y,Z --format csv --out sweep.csv
    encoded-gates --all --seed 7

Exit status: 0 when every check passes, 1 when a check fails, 2 for a bad
configuration. The report goes to stdout (or ``--out``), diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from . import __version__, kernels
from .codes import CODE_NAMES, CodeSpec, code_registry
from .error_recovery import (
    RECOVERY_TOL, AmbiguousSyndromeError, build_recovery_table, describe_fault,
    enumerate_fault_points, format_syndrome, outcomes_to_csv, outcomes_to_json, sweep,
)
from .logical_gates import (
    CONTROL_MODES, LOGICAL_TOL, Circuit, build_cnot_fig1a, build_cnot_fig1b, build_cnot_fig1c,
    build_cnot_fig2, build_toffoli_7bit, build_toffoli_fig3a, build_toffoli_fig3b, cnot_matrix,
    compare_up_to_phase, control_block_phases, dump_circuit, encode_layout, logical_action_matrix,
    logical_readout, run_circuit, toffoli_matrix, v_gate,
)
from .statevec import fidelity

COMMANDS = ("verify-gate", "truth-table", "sweep-errors", "dump-code", "dump-circuit")
GATES = ("fig1a", "fig1b", "fig1c", "fig2", "fig3a", "fig3b", "toffoli7")
GATE_CODE = {"fig1b": "three_bit", "fig1c": "three_bit", "fig3a": "three_bit",
             "fig3b": "three_bit", "fig2": "seven_bit", "toffoli7": "seven_bit"}
TOFFOLI_GATES = ("fig3a", "fig3b", "toffoli7")
FORMATS = ("json", "csv", "text")
TOLERANCES = {"logical": LOGICAL_TOL, "recovery": RECOVERY_TOL}

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str | None = None
    gate: str = "fig1a"
    code: str | None = None
    v_variant: str = "exact"
    fault_kinds: tuple[str, ...] | None = None
    seed: int = 0
    output_path: str | None = None
    format: str = "json"
    basis: str = "01"
    control_mode: str = "ancilla"
    intermediate: bool = False
    positions: str = "all"
    blocks: tuple[str, ...] | None = None
    timing: bool = True

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS and self.command != "all":
            raise ConfigError(f"unknown command {self.command!r}; expected one of {COMMANDS}")
        if self.command == "dump-code":
            if self.code is None:
                raise ConfigError("dump-code needs --code")
            if self.code not in CODE_NAMES:
                raise ConfigError(f"unknown code {self.code!r}; expected one of {CODE_NAMES}")
            return self
        if self.gate not in GATES:
            raise ConfigError(f"unknown gate {self.gate!r}; expected one of {GATES}")
        if self.code is None:
            self.code = GATE_CODE.get(self.gate, "three_bit")
        if self.code not in CODE_NAMES:
            raise ConfigError(f"unknown code {self.code!r}; expected one of {CODE_NAMES}")
        need = GATE_CODE.get(self.gate)
        if need and need != self.code:
            raise ConfigError(f"gate {self.gate} requires code {need}, got {self.code}")
        if self.v_variant not in ("paper", "exact"):
            raise ConfigError(f"--v must be paper or exact, got {self.v_variant!r}")
        if self.format not in FORMATS:
            raise ConfigError(f"--format must be one of {FORMATS}")
        if self.basis not in ("01", "pm"):
            raise ConfigError(f"--basis must be 01 or pm, got {self.basis!r}")
        if self.basis == "pm" and self.gate != "fig1a":
            raise ConfigError("--basis pm applies to fig1a only (fig3b is always in the +/- labeling)")
        if self.control_mode not in CONTROL_MODES:
            raise ConfigError(f"--control-mode must be one of {CONTROL_MODES}")
        if self.positions not in ("all", "before", "after"):
            raise ConfigError("--positions must be all, before or after")
        if self.fault_kinds is not None and set(self.fault_kinds) - set("XYZ"):
            raise ConfigError(f"fault kinds must be drawn from X,Y,Z, got {self.fault_kinds}")
        if self.command == "truth-table" and self.gate not in TOFFOLI_GATES:
            raise ConfigError(f"truth-table needs one of {TOFFOLI_GATES}")
        if self.format == "csv" and self.command not in ("sweep-errors", "truth-table"):
            raise ConfigError("csv output is only available for sweep-errors and truth-table")
        if self.blocks is not None:
            known = circuit_for(self).layout.names
            unknown = set(self.blocks) - set(known)
            if unknown:
                raise ConfigError(f"unknown blocks {sorted(unknown)}; {self.gate} has {list(known)}")
        return self

    def echo(self) -> dict:
        out = asdict(self)
        out.pop("timing")
        out.pop("output_path")
        return out


# -- config file -------------------------------------------------------------------

_KEYS = {
    "command": "command", "gate": "gate", "code": "code", "v": "v_variant",
    "v_variant": "v_variant", "faults": "fault_kinds", "fault_kinds": "fault_kinds",
    "seed": "seed", "out": "output_path", "output_path": "output_path", "format": "format",
    "basis": "basis", "control_mode": "control_mode", "intermediate": "intermediate",
    "positions": "positions", "blocks": "blocks",
}


def _split(text: str) -> tuple[str, ...]:
    return tuple(p.strip() for p in text.split(",") if p.strip())


def _coerce(key: str, value: str) -> Any:
    if key == "seed":
        try:
            return int(value)
        except ValueError:
            raise ConfigError(f"seed must be an integer, got {value!r}") from None
    if key == "intermediate":
        lowered = value.lower()
        if lowered not in ("true", "false", "1", "0", "yes", "no"):
            raise ConfigError(f"intermediate must be a boolean, got {value!r}")
        return lowered in ("true", "1", "yes")
    if key == "fault_kinds":
        return tuple(k.upper() for k in _split(value))
    if key == "blocks":
        return _split(value)
    return value


def load_config_file(path: str | Path) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        out[_KEYS[key]] = _coerce(_KEYS[key], value)
    return out


# -- serialization -------------------------------------------------------------------

def _real(x: float) -> float:
    x = float(f"{float(x):.12g}")
    return 0.0 if x == 0 else x


def matrix_pairs(m: np.ndarray) -> list:
    """Nested [re, im] pairs, rounded to 12 decimals with -0 folded to 0."""
    r = np.round(m.real, 12) + 0.0
    i = np.round(m.imag, 12) + 0.0
    return [[[float(a), float(b)] for a, b in zip(ra, ia)] for ra, ia in zip(r, i)]


def jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _real(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [_real(obj.real), _real(obj.imag)]
    return obj


def phase_label(z: complex, tol: float = 1e-9) -> str:
    for label, ref in (("1", 1), ("i", 1j), ("-1", -1), ("-i", -1j)):
        if abs(z - ref) < tol:
            return label
    return f"{z.real:.6f}{z.imag:+.6f}i"


@dataclass
class Report:
    command: str
    config: dict
    results: Any
    passed: bool
    diagnostics: list[str] = field(default_factory=list)
    wall_time: float | None = None
    criterion_times: dict[int, float] | None = None

    def to_dict(self, timing: bool = True) -> dict:
        out = {
            "command": self.command,
            "config": self.config,
            "results": self.results,
            "pass": self.passed,
            "diagnostics": self.diagnostics,
            "tolerances": TOLERANCES,
            "tool_version": __version__,
        }
        if timing:
            out["timing"] = {"wall_time": self.wall_time, "backend": kernels.BACKEND}
            if self.criterion_times:
                out["timing"]["criteria"] = self.criterion_times
        return out

    def to_json(self, timing: bool = True) -> str:
        data = jsonable(self.to_dict(timing))
        if timing:
            # timing keeps its full precision
            data["timing"]["wall_time"] = self.wall_time
            if self.criterion_times:
                data["timing"]["criteria"] = {str(k): v for k, v in self.criterion_times.items()}
        return json.dumps(data, indent=2, sort_keys=True) + "\n"


# -- commands --------------------------------------------------------------------------

def circuit_for(cfg: RunConfig) -> Circuit:
    code = code_registry(cfg.code)
    v = v_gate(cfg.v_variant)
    gate = cfg.gate
    if gate == "fig1a":
        return build_cnot_fig1a(code, cfg.basis)
    if gate == "fig2":
        return build_cnot_fig2(code)
    if gate == "fig1b":
        return build_cnot_fig1b(code)
    if gate == "fig1c":
        return build_cnot_fig1c(code)
    if gate == "fig3a":
        return build_toffoli_fig3a(code, v, cfg.control_mode)
    if gate == "fig3b":
        return build_toffoli_fig3b(code, v, cfg.control_mode)
    return build_toffoli_7bit(code, v, cfg.control_mode)


def _block_label(g: int, bits: int) -> str:
    return "(" + ",".join(str((g >> (bits - 1 - k)) & 1) for k in range(bits)) + ")"


def cmd_verify_gate(cfg: RunConfig) -> Report:
    code = code_registry(cfg.code)
    circuit = circuit_for(cfg)
    action = logical_action_matrix(circuit, code, check=False)
    toffoli = cfg.gate in TOFFOLI_GATES
    ideal = toffoli_matrix() if toffoli else cnot_matrix()
    deviation, phase = compare_up_to_phase(action.matrix, ideal)
    blocks = control_block_phases(action.matrix, ideal)
    relative = [b / blocks[0] for b in blocks]
    n_ctrl = 2 if toffoli else 1
    diagnostics = []
    leak = float(action.leakage.max())
    if leak > LOGICAL_TOL:
        diagnostics.append(f"leakage {leak:.3e} exceeds {LOGICAL_TOL:g}")
    for g, rel in enumerate(relative):
        if abs(rel - 1) > LOGICAL_TOL:
            diagnostics.append(f"phase deviation {phase_label(rel)} on {_block_label(g, n_ctrl)} control block")
    if deviation > LOGICAL_TOL and not diagnostics:
        diagnostics.append(f"matrix deviates from {'Toffoli' if toffoli else 'CNOT'} by {deviation:.3e}")
    results = {
        "circuit": circuit.name,
        "qubits": circuit.layout.total_qubits,
        "ops": len(circuit.ops),
        "basis": circuit.basis,
        "ideal": "toffoli" if toffoli else "cnot",
        "matrix": matrix_pairs(action.matrix),
        "leakage": [float(x) for x in action.leakage],
        "max_deviation": deviation,
        "global_phase": phase,
        "control_block_phases": {_block_label(g, n_ctrl): phase_label(r) for g, r in enumerate(relative)},
    }
    return Report("verify-gate", cfg.echo(), results, deviation <= LOGICAL_TOL and leak <= LOGICAL_TOL,
                  diagnostics)


TRUTH_ROWS = ((0, 0, "I", "I"), (1, 0, "VVdag", "I"), (0, 1, "VdagV", "I"), (1, 1, "VV", "U"))


def truth_table_rows(circuit: Circuit, code: CodeSpec, tol: float = LOGICAL_TOL) -> list[dict]:
    """Simulate each (CI, CII) row on both target labels and classify the target action."""
    layout = circuit.layout
    start, stop = circuit.step("step1")
    rows = []
    reference_phase = None
    for ci, cii, op_name, expected in TRUTH_ROWS:
        phases, flips, changed = [], [], False
        for t in (0, 1):
            state = encode_layout(layout, code, [ci, cii, t], circuit.basis)
            run_circuit(circuit, state, 0, start)
            before = state.copy()
            run_circuit(circuit, state, start, stop)
            changed |= fidelity(before, state) < 1 - tol
            run_circuit(circuit, state, stop)
            coeffs, leak = logical_readout(layout, code, state, circuit.basis)
            j = int(np.argmax(np.abs(coeffs)))
            out_t = j & 1
            clean = leak <= tol and abs(abs(coeffs[j]) - 1) <= tol and (j >> 1) == (ci << 1 | cii)
            flips.append(out_t != t if clean else None)
            phases.append(complex(coeffs[j]))
        if None in flips or flips[0] != flips[1] or abs(phases[0] - phases[1]) > tol:
            action = "other"
        else:
            action = "U" if flips[0] else "I"
        if reference_phase is None:
            reference_phase = phases[0]
        rel = phases[0] / reference_phase
        rows.append({
            "CI": ci, "CII": cii, "operation": op_name, "expected": expected,
            "target_action": action, "phase": phase_label(rel),
            "step1_changed": changed,
            "match": action == expected and abs(rel - 1) <= tol,
        })
    return rows


def cmd_truth_table(cfg: RunConfig) -> Report:
    code = code_registry(cfg.code)
    circuit = circuit_for(cfg)
    rows = truth_table_rows(circuit, code)
    diagnostics = []
    for r in rows:
        if r["target_action"] != r["expected"]:
            diagnostics.append(f"row ({r['CI']},{r['CII']}): target action {r['target_action']}, "
                               f"expected {r['expected']}")
        elif r["phase"] != "1":
            diagnostics.append(f"phase deviation {r['phase']} on ({r['CI']},{r['CII']}) control block")
    return Report("truth-table", cfg.echo(), {"circuit": circuit.name, "rows": rows},
                  all(r["match"] for r in rows), diagnostics)


def _faults(cfg: RunConfig, circuit: Circuit, code: CodeSpec):
    kinds = code.correctable_errors if cfg.fault_kinds is None else cfg.fault_kinds
    return kinds, enumerate_fault_points(circuit, kinds, cfg.positions, cfg.blocks)


def cmd_sweep_errors(cfg: RunConfig) -> Report:
    code = code_registry(cfg.code)
    circuit = circuit_for(cfg)
    kinds, faults = _faults(cfg, circuit, code)
    try:
        table = build_recovery_table(circuit, code, faults, cfg.seed, intermediate=cfg.intermediate)
    except AmbiguousSyndromeError as exc:
        first, second = exc.faults
        results = {"circuit": circuit.name, "ambiguity": {
            "syndrome": format_syndrome(exc.syndrome, circuit.layout.names),
            "faults": [describe_fault(first), describe_fault(second)]}, "rows": []}
        return Report("sweep-errors", cfg.echo(), results, False, [str(exc)])
    outcomes = sweep(circuit, code, kinds, cfg.seed, table, faults, cfg.intermediate)
    rows = [o.row(circuit, code) for o in outcomes]
    diagnostics = [f"not recovered: {describe_fault(o.fault)} (fidelity {o.fidelity:.6f})"
                   for o in outcomes if not o.recovered]
    diagnostics += [f"syndrome depends on payload for {describe_fault(f)}" for f in table.nondeterministic]
    diagnostics += [f"no correction in the search group for {describe_fault(f)}" for f in table.unrecoverable]
    conditional = {format_syndrome(k, circuit.layout.names): c.describe()
                   for k, c in table.conditional_entries().items()}
    results = {"circuit": circuit.name, "faults": len(faults), "table": table.to_json(),
               "conditional_phase_entries": conditional, "rows": rows}
    passed = all(o.recovered for o in outcomes) and not table.nondeterministic and not table.unrecoverable
    return Report("sweep-errors", cfg.echo(), results, passed, diagnostics)


def cmd_dump_code(cfg: RunConfig) -> Report:
    return Report("dump-code", cfg.echo(), code_registry(cfg.code).to_json(), True)


def cmd_dump_circuit(cfg: RunConfig) -> Report:
    return Report("dump-circuit", cfg.echo(), dump_circuit(circuit_for(cfg)), True)


HANDLERS: dict[str, Callable[[RunConfig], Report]] = {
    "verify-gate": cmd_verify_gate,
    "truth-table": cmd_truth_table,
    "sweep-errors": cmd_sweep_errors,
    "dump-code": cmd_dump_code,
    "dump-circuit": cmd_dump_circuit,
}


def run(cfg: RunConfig) -> Report:
    started = time.perf_counter()
    if cfg.command == "all":
        from .acceptance import run_all
        report = run_all(cfg.seed)
        report.config = cfg.echo()
    else:
        report = HANDLERS[cfg.command](cfg)
    report.wall_time = time.perf_counter() - started
    return report


# -- rendering ---------------------------------------------------------------------------

def render(report: Report, cfg: RunConfig) -> str:
    if report.command == "dump-code":
        return json.dumps(report.results, indent=2) + "\n"
    if report.command == "dump-circuit":
        return report.results
    if cfg.format == "json":
        return report.to_json(cfg.timing)
    if cfg.format == "csv":
        if report.command == "sweep-errors":
            return outcomes_to_csv(report.results["rows"])
        header = "CI,CII,operation,expected,target_action,phase,step1_changed,match"
        lines = [header] + [",".join(str(r[k]).lower() if isinstance(r[k], bool) else str(r[k])
                                     for k in header.split(",")) for r in report.results["rows"]]
        return "\n".join(lines) + "\n"
    return render_text(report)


def render_text(report: Report) -> str:
    lines = [f"{report.command}: {'PASS' if report.passed else 'FAIL'}"]
    res = report.results
    if report.command == "all":
        for c in res["criteria"]:
            lines.append(f"  [{'PASS' if c['passed'] else 'FAIL'}] {c['id']:>2}  {c['title']}")
    elif report.command == "verify-gate":
        lines.append(f"  circuit {res['circuit']}: {res['qubits']} qubits, {res['ops']} ops, "
                     f"max deviation {res['max_deviation']:.3e}, max leakage {max(res['leakage']):.3e}")
        for label, ph in res["control_block_phases"].items():
            lines.append(f"  control block {label}: phase {ph}")
    elif report.command == "truth-table":
        lines.append("  CI CII operation  action phase step1_changed")
        for r in res["rows"]:
            lines.append(f"  {r['CI']:>2} {r['CII']:>3} {r['operation']:<9} {r['target_action']:>6} "
                         f"{r['phase']:>5} {str(r['step1_changed']).lower()}")
    elif report.command == "sweep-errors":
        rows = res["rows"]
        ok = sum(1 for r in rows if r["recovered"])
        lines.append(f"  {ok}/{len(rows)} faults recovered")
        for syn, corr in res.get("conditional_phase_entries", {}).items():
            lines.append(f"  conditional phase: {syn} -> {corr}")
    lines += [f"  ! {d}" for d in report.diagnostics]
    return "\n".join(lines) + "\n"


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


# -- entry point -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="encoded-gates",
                                description="Verify encoded CNOT/Toffoli gates and their error recovery.")
    p.add_argument("command", nargs="?", choices=COMMANDS)
    p.add_argument("--all", action="store_true", help="run every acceptance criterion")
    p.add_argument("--config", help="flat key=value file; flags override it")
    p.add_argument("--gate", choices=GATES)
    p.add_argument("--code", help=f"one of {', '.join(CODE_NAMES)}")
    p.add_argument("--v", dest="v_variant", choices=("paper", "exact"))
    p.add_argument("--faults", help="comma-separated Pauli kinds, e.g. X,Y,Z (empty for none)")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", dest="output_path")
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--basis", choices=("01", "pm"), help="logical labeling for fig1a")
    p.add_argument("--control-mode", choices=CONTROL_MODES,
                   help="where a byte-controlled gate takes its parity from")
    p.add_argument("--intermediate", action="store_true", default=None,
                   help="memory-correct blocks at every mid-circuit checkpoint")
    p.add_argument("--positions", choices=("all", "before", "after"))
    p.add_argument("--blocks", help="restrict faults to these blocks, e.g. CI,CII")
    p.add_argument("--no-timing", dest="timing", action="store_false", default=None,
                   help="omit the timing field from JSON reports")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values: dict[str, Any] = {}
    if args.config:
        values.update(load_config_file(args.config))
    flags = {k: v for k, v in vars(args).items()
             if v is not None and k not in ("config", "all", "command", "faults", "blocks")}
    if args.faults is not None:
        flags["fault_kinds"] = _coerce("fault_kinds", args.faults)
    if args.blocks is not None:
        flags["blocks"] = _coerce("blocks", args.blocks)
    values.update(flags)
    if args.all:
        values["command"] = "all"
    elif args.command:
        values["command"] = args.command
    if values.get("command") is None:
        raise ConfigError("give a command or --all")
    return RunConfig(**values).validate()


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(args)
    except (ConfigError, TypeError) as exc:
        print(f"encoded-gates: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    report = run(cfg)
    text = render(report, cfg)
    if cfg.command == "all":
        sys.stderr.write(render_text(report))
    if cfg.format != "text" or cfg.output_path:
        for d in report.diagnostics:
            print(f"encoded-gates: {d}", file=sys.stderr)
    try:
        _write(text, cfg.output_path)
        if cfg.command == "sweep-errors" and cfg.format == "csv" and cfg.output_path:
            _write(outcomes_to_json(report.results["rows"]), str(Path(cfg.output_path).with_suffix(".json")))
    except OSError as exc:
        print(f"encoded-gates: cannot write output: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
