from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .archive import Archive
from .emitter import CMAEmitter
from .measures import Measures

# genomes (k, d) -> objectives (k,), measures (k, 2)
BatchEvaluator = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]


@dataclass(frozen=True)
class StepReport:
    step: int
    evaluations: int
    best_objective: float
    best_genome: np.ndarray
    qd_score: float
    num_elites: int
    restarts: int


class Scheduler:
    """Drives a set of emitters against one archive.

    One step asks every emitter once, evaluates the whole batch, inserts the
    results into the archive in (emitter, sample) order and tells each
    emitter its improvements.  An emitter restarts when none of its samples
    improved on a threshold or when its covariance degenerates.
    """

    def __init__(
        self,
        emitters: Sequence[CMAEmitter],
        archive: Archive,
        evaluate: BatchEvaluator,
    ) -> None:
        self.emitters = list(emitters)
        self.archive = archive
        self.evaluate = evaluate
        self.step_count = 0
        self.evaluations = 0
        self.best_objective = -np.inf
        self.best_genome: np.ndarray | None = None

    def step(self) -> StepReport:
        batches = [em.ask() for em in self.emitters]
        genomes = np.concatenate(batches, axis=0)
        objectives, measures = self.evaluate(genomes)
        objectives = np.asarray(objectives, dtype=float)
        measures = np.asarray(measures, dtype=int)
        self.evaluations += len(genomes)

        offset = 0
        for em, batch in zip(self.emitters, batches):
            k = len(batch)
            f = objectives[offset : offset + k]
            improvements = np.empty(k)
            for j in range(k):
                result = self.archive.add(batch[j], f[j], Measures(*measures[offset + j]))
                improvements[j] = result.improvement
            offset += k

            best = int(np.argmax(f))
            if f[best] > self.best_objective:
                self.best_objective = float(f[best])
                self.best_genome = batch[best].copy()

            if not np.any(improvements > 0):
                em.restart(self.archive)
                continue
            em.tell(batch, improvements, f)
            if em.needs_restart:
                em.restart(self.archive)

        self.step_count += 1
        return StepReport(
            step=self.step_count,
            evaluations=self.evaluations,
            best_objective=self.best_objective,
            best_genome=self.best_genome,
            qd_score=self.archive.qd_score,
            num_elites=len(self.archive),
            restarts=sum(em.restarts for em in self.emitters),
        )

    def run(self, steps: int) -> list[StepReport]:
        return [self.step() for _ in range(steps)]


def make_emitters(
    num_emitters: int,
    dim: int,
    batch_size: int,
    sigma0: float,
    bounds: tuple[float, float],
    seed: int | np.random.SeedSequence,
) -> list[CMAEmitter]:
    """Emitters with independent streams spawned from one seed.

    Each emitter draws its initial mean uniformly from ``bounds``.
    """
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    emitters = []
    for child in ss.spawn(num_emitters):
        rng = np.random.default_rng(child)
        x0 = rng.uniform(*bounds, size=dim)
        emitters.append(CMAEmitter(x0, sigma0, batch_size, rng, bounds))
    return emitters
