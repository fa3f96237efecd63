"""Grid archive with CMA-MAE threshold annealing.

Two archives share one grid.  The optimization archive holds a threshold
``t_e`` per cell; a solution is accepted iff ``f > t_e``, after which the
threshold moves to ``(1 - alpha) * t_e + alpha * f``.  The result archive
keeps the best solution ever seen per cell and is what gets reported.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from .measures import Measures

DEFAULT_THRESHOLD_MIN = -1e6


class UpdateResult(NamedTuple):
    accepted: bool
    improvement: float
    new_cell: bool


@dataclass(frozen=True)
class Elite:
    genome: np.ndarray
    objective: float
    measures: Measures


class Archive:
    def __init__(
        self,
        shape: tuple[int, int],
        alpha: float,
        threshold_min: float = DEFAULT_THRESHOLD_MIN,
        qd_offset: float = 0.0,
    ) -> None:
        if not 0.0 <= alpha <= 1.0:
            raise ValueError(f"learning rate must lie in [0, 1], got {alpha}")
        self.shape = tuple(int(s) for s in shape)
        self.alpha = float(alpha)
        self.threshold_min = float(threshold_min)
        # QD-score counts (objective - qd_offset); pick an offset at or below the
        # objective's lower bound to keep the score monotone.
        self.qd_offset = float(qd_offset)
        self.thresholds = np.full(self.shape, self.threshold_min)
        self.objectives = np.full(self.shape, -np.inf)
        self._elites: dict[tuple[int, int], Elite] = {}

    def __len__(self) -> int:
        return len(self._elites)

    def __iter__(self) -> Iterator[Elite]:
        for cell in sorted(self._elites):
            yield self._elites[cell]

    def cell(self, measures: Measures) -> tuple[int, int]:
        s, d = int(measures[0]), int(measures[1])
        if not (0 <= s < self.shape[0] and 0 <= d < self.shape[1]):
            raise IndexError(f"measures {tuple(measures)} outside grid {self.shape}")
        return s, d

    def elite(self, measures: Measures) -> Elite | None:
        return self._elites.get(self.cell(measures))

    def add(self, genome: np.ndarray, objective: float, measures: Measures) -> UpdateResult:
        cell = self.cell(measures)
        t = self.thresholds[cell]
        improvement = float(objective - t)
        accepted = objective > t
        new_cell = bool(accepted) and cell not in self._elites
        if accepted:
            self.thresholds[cell] = (1.0 - self.alpha) * t + self.alpha * objective
            if objective > self.objectives[cell]:
                self.objectives[cell] = objective
                self._elites[cell] = Elite(
                    np.array(genome, dtype=float, copy=True), float(objective), Measures(*cell)
                )
        return UpdateResult(bool(accepted), improvement, new_cell)

    @property
    def cells(self) -> list[tuple[int, int]]:
        return sorted(self._elites)

    @property
    def qd_score(self) -> float:
        return float(sum(e.objective - self.qd_offset for e in self._elites.values()))

    @property
    def coverage(self) -> float:
        return len(self._elites) / (self.shape[0] * self.shape[1])

    def best(self) -> Elite | None:
        if not self._elites:
            return None
        return max(self, key=lambda e: e.objective)

    def sample_elite(self, rng: np.random.Generator) -> Elite | None:
        if not self._elites:
            return None
        cells = self.cells
        return self._elites[cells[int(rng.integers(len(cells)))]]

    def snapshot(self) -> list[dict]:
        """One row per occupied cell, ordered by (sparsity, diversity)."""
        return [
            {
                "sparsity": s,
                "diversity": d,
                "objective": self._elites[(s, d)].objective,
                "threshold": float(self.thresholds[s, d]),
            }
            for s, d in self.cells
        ]
