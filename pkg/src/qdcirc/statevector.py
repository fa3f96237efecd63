"""Dense statevector simulation of gate grids.

Bit-order convention: qubit ``i`` is bit ``i`` of the basis-state index, so
qubit 0 is the least significant bit.  Global phase is not tracked.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .gates import CircuitGrid, GateKind, PlacedGate

MAX_QUBITS = 20

_SQRT1_2 = 1.0 / math.sqrt(2.0)

FIXED_GATES: dict[GateKind, np.ndarray] = {
    GateKind.IDENTITY: np.eye(2, dtype=complex),
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.H: np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT1_2,
    GateKind.S: np.array([[1, 0], [0, 1j]], dtype=complex),
    GateKind.T: np.array([[1, 0], [0, np.exp(1j * math.pi / 4)]], dtype=complex),
}


def rx(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def ry(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz(theta: float) -> np.ndarray:
    return np.array(
        [[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]], dtype=complex
    )


_ROTATIONS = {GateKind.RX: rx, GateKind.RY: ry, GateKind.RZ: rz}


def gate_matrix(gate: PlacedGate) -> np.ndarray:
    """2x2 unitary of a single-qubit gate, or the 4x4 CNOT (control is the high bit)."""
    if gate.kind is GateKind.CNOT:
        return np.array(
            [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
        )
    if gate.kind.is_rotation:
        return _ROTATIONS[gate.kind](gate.angle)
    return FIXED_GATES[gate.kind]


@numba.njit(cache=True)
def _apply_1q(state, qubit, u00, u01, u10, u11):
    step = 1 << qubit
    dim = state.shape[0]
    for base in range(0, dim, 2 * step):
        for k in range(base, base + step):
            a = state[k]
            b = state[k + step]
            state[k] = u00 * a + u01 * b
            state[k + step] = u10 * a + u11 * b


@numba.njit(cache=True)
def _apply_cnot(state, control, target):
    cmask = 1 << control
    tmask = 1 << target
    for k in range(state.shape[0]):
        if (k & cmask) and not (k & tmask):
            j = k | tmask
            tmp = state[k]
            state[k] = state[j]
            state[j] = tmp


def apply_gate(state: np.ndarray, gate: PlacedGate) -> None:
    """Apply ``gate`` to ``state`` in place."""
    kind = gate.kind
    if kind is GateKind.IDENTITY:
        return
    if kind is GateKind.CNOT:
        _apply_cnot(state, gate.wire, gate.target)
        return
    u = gate_matrix(gate)
    _apply_1q(state, gate.wire, u[0, 0], u[0, 1], u[1, 0], u[1, 1])


@dataclass
class StateVector:
    n: int
    amplitudes: np.ndarray

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))


def zero_state(n: int) -> StateVector:
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(n, amps)


def simulate(circuit: CircuitGrid, max_qubits: int = MAX_QUBITS) -> StateVector:
    """Run ``circuit`` from ``|0...0>``.

    Layers are applied in order; within a layer gates are applied in
    ascending wire order.
    """
    if circuit.n > max_qubits:
        raise ValueError(f"{circuit.n} qubits exceeds the simulator maximum of {max_qubits}")
    state = zero_state(circuit.n)
    for layer in circuit.gates:
        for gate in layer:
            apply_gate(state.amplitudes, gate)
    return state


def measure_distribution(state: StateVector) -> np.ndarray:
    """Probability of each basis state; bit ``i`` of the index is qubit ``i``."""
    amps = state.amplitudes
    return amps.real**2 + amps.imag**2


def expectation(state: StateVector, hamiltonian) -> float:
    """Expectation of a diagonal Hamiltonian, i.e. ``sum_z p(z) cost(z)``."""
    if hamiltonian.n != state.n:
        raise ValueError(f"Hamiltonian on {hamiltonian.n} qubits, state on {state.n}")
    return float(measure_distribution(state) @ hamiltonian.diagonal())
