"""Quality-diversity search over gate-grid quantum circuits."""
from .gates import (
    GATE_SETS,
    CircuitGrid,
    GateKind,
    GateSetSpec,
    PlacedGate,
    decode_gate,
    decode_genome,
    get_gate_set,
)
from .pipeline import CircuitEvaluator
from .problems import (
    DiagonalHamiltonian,
    GraphInstance,
    ProblemKind,
    brute_force_optimum,
    build_hamiltonian,
    combinatorial_check,
    generate_graph,
    objective,
)
from .statevector import StateVector, expectation, measure_distribution, simulate

__version__ = "0.1.0"

__all__ = [
    "GATE_SETS",
    "CircuitGrid",
    "GateKind",
    "GateSetSpec",
    "PlacedGate",
    "decode_gate",
    "decode_genome",
    "get_gate_set",
    "CircuitEvaluator",
    "DiagonalHamiltonian",
    "GraphInstance",
    "ProblemKind",
    "brute_force_optimum",
    "build_hamiltonian",
    "combinatorial_check",
    "generate_graph",
    "objective",
    "StateVector",
    "expectation",
    "measure_distribution",
    "simulate",
]
