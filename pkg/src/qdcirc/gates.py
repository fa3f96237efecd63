"""Gate sets and the scalar genome encoding of gate-grid circuits.

Each genome entry ``e`` encodes one gate.  ``floor(e)`` indexes the ordered
gate set; the fractional part completes the gate:

* CNOT: the fraction selects the target wire in ``n`` equal segments.  If the
  selected target is the gate's own wire, the gate degrades to an
  uncontrolled X.
* rotations: the fraction is remapped to an angle in ``[0, 2*pi)``.
* fixed gates (H, S, T, identity): the fraction is discarded.

Values below zero, at or above ``len(gate_set)`` and non-finite values decode
to the identity, so decoding is total over unbounded Gaussian samples.

The genome is flattened column-wise: entry ``l * n + i`` is wire ``i`` in
layer ``l``.
"""
from __future__ import annotations

import enum
import hashlib
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

TWO_PI = 2.0 * math.pi
_MAX_ANGLE = math.nextafter(TWO_PI, 0.0)


class GateKind(enum.Enum):
    RX = "RX"
    RY = "RY"
    RZ = "RZ"
    H = "H"
    S = "S"
    T = "T"
    CNOT = "CNOT"
    X = "X"
    IDENTITY = "I"

    @property
    def is_rotation(self) -> bool:
        return self in (GateKind.RX, GateKind.RY, GateKind.RZ)


@dataclass(frozen=True)
class GateSetSpec:
    """An ordered gate set.  The order defines the integer -> gate mapping."""

    name: str
    kinds: tuple[GateKind, ...]

    def __post_init__(self) -> None:
        if len(self.kinds) < 2:
            raise ValueError(f"gate set {self.name!r} needs at least two kinds")
        if self.kinds.count(GateKind.IDENTITY) != 1:
            raise ValueError(f"gate set {self.name!r} must contain IDENTITY exactly once")
        if GateKind.X in self.kinds:
            raise ValueError("X is only produced by the CNOT fallback")

    def __len__(self) -> int:
        return len(self.kinds)

    @property
    def decodable_kinds(self) -> frozenset[GateKind]:
        """Non-identity kinds a decoded grid can contain (X included via CNOT)."""
        kinds = set(self.kinds) - {GateKind.IDENTITY}
        if GateKind.CNOT in kinds:
            kinds.add(GateKind.X)
        return frozenset(kinds)

    def max_layer_diversity(self, n: int) -> int:
        return min(len(self.decodable_kinds), n)


# Order is part of the encoding; changing it changes the meaning of every genome.
GATE_SETS: dict[str, GateSetSpec] = {
    "cliffordt": GateSetSpec(
        "cliffordt",
        (GateKind.CNOT, GateKind.H, GateKind.S, GateKind.T, GateKind.IDENTITY),
    ),
    "rotcnot": GateSetSpec(
        "rotcnot",
        (GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.CNOT, GateKind.IDENTITY),
    ),
    "tinyh": GateSetSpec(
        "tinyh", (GateKind.RX, GateKind.H, GateKind.CNOT, GateKind.IDENTITY)
    ),
    "tiny": GateSetSpec("tiny", (GateKind.RX, GateKind.CNOT, GateKind.IDENTITY)),
}


def get_gate_set(name: str) -> GateSetSpec:
    try:
        return GATE_SETS[name.lower()]
    except KeyError:
        raise ValueError(
            f"unknown gate set {name!r}; choose from {', '.join(GATE_SETS)}"
        ) from None


def gate_table_hash() -> str:
    """Git blob hash of the canonical gate-set table.

    Embedded in output files so that artifacts record which integer -> gate
    mapping produced them.
    """
    lines = [
        f"{name}: {' '.join(k.value for k in gs.kinds)}" for name, gs in GATE_SETS.items()
    ]
    payload = ("\n".join(lines) + "\n").encode()
    return hashlib.sha1(b"blob %d\0" % len(payload) + payload).hexdigest()


@dataclass(frozen=True)
class PlacedGate:
    kind: GateKind
    wire: int
    target: int | None = None
    angle: float | None = None

    def __post_init__(self) -> None:
        if self.kind is GateKind.CNOT:
            if self.target is None or self.target == self.wire:
                raise ValueError("CNOT needs a target distinct from its wire")
            if self.angle is not None:
                raise ValueError("CNOT carries no angle")
        elif self.kind.is_rotation:
            if self.angle is None or self.target is not None:
                raise ValueError(f"{self.kind.value} needs an angle and no target")
        elif self.target is not None or self.angle is not None:
            raise ValueError(f"{self.kind.value} carries neither target nor angle")


@dataclass(frozen=True)
class CircuitGrid:
    """``n`` wires by ``L`` layers; ``gates[l][i]`` sits on wire ``i``."""

    n: int
    L: int
    gates: tuple[tuple[PlacedGate, ...], ...]

    def __post_init__(self) -> None:
        if len(self.gates) != self.L:
            raise ValueError(f"expected {self.L} layers, got {len(self.gates)}")
        for layer in self.gates:
            if len(layer) != self.n:
                raise ValueError(f"expected {self.n} gates per layer, got {len(layer)}")
            for i, gate in enumerate(layer):
                if gate.wire != i:
                    raise ValueError(f"gate {gate} placed on wire {i}")

    def __iter__(self):
        for layer in self.gates:
            yield from layer

    @classmethod
    def identity(cls, n: int, L: int) -> CircuitGrid:
        return cls(
            n, L, tuple(tuple(PlacedGate(GateKind.IDENTITY, i) for i in range(n)) for _ in range(L))
        )


def decode_gate(e: float, wire: int, n: int, gs: GateSetSpec) -> PlacedGate:
    """Decode one genome scalar into the gate placed on ``wire``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    e = float(e)
    if not math.isfinite(e) or e < 0.0:
        return PlacedGate(GateKind.IDENTITY, wire)
    k = math.floor(e)
    if k >= len(gs.kinds):
        return PlacedGate(GateKind.IDENTITY, wire)
    kind = gs.kinds[k]
    frac = e - k
    if kind is GateKind.CNOT:
        target = min(math.floor(frac * n), n - 1)
        if target == wire:
            return PlacedGate(GateKind.X, wire)
        return PlacedGate(GateKind.CNOT, wire, target=target)
    if kind.is_rotation:
        return PlacedGate(kind, wire, angle=min(frac * TWO_PI, _MAX_ANGLE))
    return PlacedGate(kind, wire)


def decode_genome(
    genome: Sequence[float] | np.ndarray, gs: GateSetSpec, n: int, L: int
) -> CircuitGrid:
    values = np.asarray(genome, dtype=float).ravel()
    if values.size != n * L:
        raise ValueError(f"genome length {values.size} != n*L = {n * L}")
    flat = values.tolist()
    gates = tuple(
        tuple(decode_gate(flat[l * n + i], i, n, gs) for i in range(n)) for l in range(L)
    )
    return CircuitGrid(n, L, gates)
