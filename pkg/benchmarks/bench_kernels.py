"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py --qubits 16 20 22 --repeat 5
    python3 benchmarks/bench_kernels.py --circuit      # adds the 7-bit Toffoli end to end
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from encoded_gates import kernels
from encoded_gates.statevec import (
    GateMatrix, H, StateVector, X, apply_controlled, apply_parity_phase, apply_pauli,
)


def cases() -> dict:
    q, _ = np.linalg.qr(np.random.default_rng(1).normal(size=(4, 4)) + 0j)
    r = GateMatrix("R", q)
    return {
        "1q H": lambda s, n: apply_controlled(s, H, (), (n // 2,)),
        "cnot": lambda s, n: apply_controlled(s, X, (n - 1,), (0,)),
        "ctrl-2q": lambda s, n: apply_controlled(s, r, (n - 1,), (n // 2, 1)),
        "pauli": lambda s, n: apply_pauli(s, "XYZ" * (n // 3) + "I" * (n % 3)),
        "parity": lambda s, n: apply_parity_phase(s, 0b111, 0b111 << 3),
    }


def _state(n: int, seed: int = 0) -> StateVector:
    rng = np.random.default_rng(seed)
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return StateVector(n, v / np.linalg.norm(v))


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def bench_kernels(qubits, repeat, backends):
    print(f"{'case':<10}{'n':>4}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for n in qubits:
        for name, case in cases().items():
            row = []
            for b in backends:
                kernels.set_backend(b)
                s = _state(n)
                row.append(best_of(lambda: case(s, n), repeat))
            speed = f"{row[-1] / row[0]:>9.1f}x" if len(row) == 2 else ""
            print(f"{name:<10}{n:>4}" + "".join(f"{t * 1e3:>10.2f}ms" for t in row) + speed)


def bench_circuit(backends):
    from encoded_gates.codes import code_registry
    from encoded_gates.logical_gates import build_toffoli_7bit, logical_action_matrix
    code = code_registry("seven_bit")
    for mode in ("fold", "ancilla"):
        circuit = build_toffoli_7bit(code, control_mode=mode)
        for b in backends:
            kernels.set_backend(b)
            t = time.perf_counter()
            logical_action_matrix(circuit, code)
            print(f"toffoli7 {mode:<8}{circuit.layout.total_qubits:>3} qubits {b:>7}: "
                  f"{time.perf_counter() - t:.2f}s")


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--qubits", type=int, nargs="+", default=[16, 20, 22])
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--circuit", action="store_true")
    args = p.parse_args()
    backends = [b for b in ("cython", "python") if b in kernels.available()]
    bench_kernels(args.qubits, args.repeat, backends)
    if args.circuit:
        bench_circuit(backends)


if __name__ == "__main__":
    main()
