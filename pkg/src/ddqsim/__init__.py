"""Distributed decision-diagram quantum circuit simulator.

States and gates live in canonical QMDD form; the statevector is cut into
2**M equal slices across simulated ranks, gates apply through a
block-decomposed multiply under ring or broadcast schedules, and
automatic SWAP insertion keeps busy qubits in the communication-free
local area.
"""

from .circuit import Circuit, Gate, cx
from .dd import DDContext, Edge, amplitude, squared_norm
from .engine import (
    RunConfig,
    RunResult,
    merged_dense,
    query_amplitude,
    run_circuit,
    sample,
)
from .generators import gen_qcbm, gen_shor
from .oracle import dense_oracle, fidelity
from .partition import PartitionPlan
from .qasm import parse_qasm, print_qasm

__version__ = "0.1.0"

__all__ = [
    "Circuit",
    "Gate",
    "cx",
    "DDContext",
    "Edge",
    "amplitude",
    "squared_norm",
    "RunConfig",
    "RunResult",
    "run_circuit",
    "merged_dense",
    "query_amplitude",
    "sample",
    "gen_qcbm",
    "gen_shor",
    "dense_oracle",
    "fidelity",
    "PartitionPlan",
    "parse_qasm",
    "print_qasm",
    "__version__",
]
