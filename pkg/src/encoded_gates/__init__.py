"""Dense state-vector verification of logical CNOT and Toffoli gates on
3-qubit and 7-qubit block codes, with exhaustive single-fault recovery."""

__version__ = "0.1.0"

from .codes import CodeSpec, code_registry, decode_logical, encode, extract_syndrome  # noqa: E402
from .logical_gates import (  # noqa: E402
    Circuit, build_cnot_fig1a, build_cnot_fig1b, build_cnot_fig1c, build_cnot_fig2,
    build_toffoli_7bit, build_toffoli_fig3a, build_toffoli_fig3b, logical_action_matrix, v_gate,
)
from .statevec import GateMatrix, StateVector, apply_controlled, apply_pauli, basis_state  # noqa: E402

__all__ = [
    "__version__", "CodeSpec", "code_registry", "decode_logical", "encode", "extract_syndrome",
    "Circuit", "build_cnot_fig1a", "build_cnot_fig1b", "build_cnot_fig1c", "build_cnot_fig2",
    "build_toffoli_7bit", "build_toffoli_fig3a", "build_toffoli_fig3b", "logical_action_matrix",
    "v_gate", "GateMatrix", "StateVector", "apply_controlled", "apply_pauli", "basis_state",
]
