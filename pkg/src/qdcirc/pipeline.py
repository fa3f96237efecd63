from __future__ import annotations

import numpy as np

from .gates import GateSetSpec, decode_genome
from .problems import DiagonalHamiltonian
from .qd.measures import compute_measures
from .statevector import measure_distribution, simulate


class CircuitEvaluator:
    """Genome batch -> (objectives, measures): decode, simulate, score, describe.

    The objective of a circuit is the expectation of ``-H`` over its output
    distribution.
    """

    def __init__(self, hamiltonian: DiagonalHamiltonian, gs: GateSetSpec, layers: int) -> None:
        self.hamiltonian = hamiltonian
        self.gs = gs
        self.n = hamiltonian.n
        self.layers = layers
        self._f = hamiltonian.objective_vector()

    @property
    def dim(self) -> int:
        return self.n * self.layers

    def evaluate_one(self, genome: np.ndarray) -> tuple[float, tuple[int, int]]:
        circuit = decode_genome(genome, self.gs, self.n, self.layers)
        probs = measure_distribution(simulate(circuit))
        return float(probs @ self._f), compute_measures(circuit)

    def __call__(self, genomes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        genomes = np.atleast_2d(genomes)
        objectives = np.empty(len(genomes))
        measures = np.empty((len(genomes), 2), dtype=int)
        for k, genome in enumerate(genomes):
            objectives[k], measures[k] = self.evaluate_one(genome)
        return objectives, measures
