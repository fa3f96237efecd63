from __future__ import annotations

from typing import NamedTuple

from ..gates import CircuitGrid, GateKind, GateSetSpec


class Measures(NamedTuple):
    """Integer behaviour descriptors of a decoded circuit.

    ``sparsity`` counts non-identity gates (0 is the empty circuit).
    ``diversity`` sums, over layers, the number of distinct non-identity
    kinds in the layer; the CNOT fallback X counts as its own kind.
    """

    sparsity: int
    diversity: int


def compute_measures(circuit: CircuitGrid, gs: GateSetSpec | None = None) -> Measures:
    sparsity = 0
    diversity = 0
    for layer in circuit.gates:
        kinds = {g.kind for g in layer if g.kind is not GateKind.IDENTITY}
        if gs is not None and not kinds <= gs.decodable_kinds:
            raise ValueError(f"layer uses kinds outside gate set {gs.name}: {kinds}")
        sparsity += sum(1 for g in layer if g.kind is not GateKind.IDENTITY)
        diversity += len(kinds)
    return Measures(sparsity, diversity)


def grid_shape(n: int, L: int, gs: GateSetSpec) -> tuple[int, int]:
    """Archive dimensions: one cell per integer (sparsity, diversity) pair."""
    return n * L + 1, len(gs) * L + 1
