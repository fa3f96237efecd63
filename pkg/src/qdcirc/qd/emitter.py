"""CMA-ES emitter with an ask/tell interface.

Candidates are ranked by archive improvement rather than raw objective; the
distribution update itself is plain CMA-ES with the usual default
hyperparameters (weighted recombination, cumulative step-size adaptation,
rank-one plus active rank-mu covariance update).
"""
from __future__ import annotations

import math

import numpy as np

from .archive import Archive


class CMAEmitter:
    """One CMA-ES instance feeding an archive.

    Args:
        x0: Initial mean.
        sigma0: Initial step size, reused on every restart.
        batch_size: Samples per ``ask`` (lambda).
        rng: Random stream owned by this emitter.
        bounds: ``(low, high)`` range for a uniform restart mean when the
            archive is empty.
    """

    def __init__(
        self,
        x0: np.ndarray,
        sigma0: float,
        batch_size: int,
        rng: np.random.Generator,
        bounds: tuple[float, float] = (0.0, 1.0),
    ) -> None:
        x0 = np.asarray(x0, dtype=float)
        if x0.ndim != 1 or x0.size == 0:
            raise ValueError("x0 must be a non-empty vector")
        if batch_size < 2:
            raise ValueError("batch_size must be >= 2")
        if sigma0 <= 0:
            raise ValueError("sigma0 must be positive")
        self.dim = x0.size
        self.batch_size = int(batch_size)
        self.sigma0 = float(sigma0)
        self.rng = rng
        self.bounds = bounds
        self.restarts = 0
        self._set_hyperparameters()
        self.reset(x0)

    def _set_hyperparameters(self) -> None:
        n, lam = self.dim, self.batch_size
        self.mu = lam // 2
        raw = math.log((lam + 1) / 2) - np.log(np.arange(1, lam + 1))
        pos, neg = raw[: self.mu], raw[self.mu :]
        self.mueff = pos.sum() ** 2 / np.sum(pos**2)
        mueff = self.mueff

        self.cc = (4 + mueff / n) / (n + 4 + 2 * mueff / n)
        self.cs = (mueff + 2) / (n + mueff + 5)
        self.c1 = 2 / ((n + 1.3) ** 2 + mueff)
        self.cmu = min(1 - self.c1, 2 * (mueff - 2 + 1 / mueff) / ((n + 2) ** 2 + mueff))
        self.damps = 1 + 2 * max(0.0, math.sqrt((mueff - 1) / (n + 1)) - 1) + self.cs
        self.chi_n = math.sqrt(n) * (1 - 1 / (4 * n) + 1 / (21 * n**2))

        # Active CMA: the worse half gets negative weights in the covariance update.
        weights = np.zeros(lam)
        weights[: self.mu] = pos / pos.sum()
        neg_sum = -neg[neg < 0].sum()
        if neg_sum > 0:
            mueff_neg = neg.sum() ** 2 / np.sum(neg**2)
            scale = min(
                1 + self.c1 / self.cmu if self.cmu > 0 else np.inf,
                1 + 2 * mueff_neg / (mueff + 2),
                (1 - self.c1 - self.cmu) / (n * self.cmu) if self.cmu > 0 else np.inf,
            )
            weights[self.mu :] = np.minimum(neg, 0.0) * scale / neg_sum
        self.weights = weights

    def reset(self, mean: np.ndarray) -> None:
        self.mean = np.array(mean, dtype=float, copy=True)
        self.sigma = self.sigma0
        self.C = np.eye(self.dim)
        self.B = np.eye(self.dim)
        self.D = np.ones(self.dim)
        self.ps = np.zeros(self.dim)
        self.pc = np.zeros(self.dim)
        self.generation = 0
        self.needs_restart = False

    def ask(self) -> np.ndarray:
        """``batch_size`` samples of ``N(mean, sigma^2 C)``, one per row."""
        z = self.rng.standard_normal((self.batch_size, self.dim))
        y = (z * self.D) @ self.B.T
        return self.mean + self.sigma * y

    def tell(
        self,
        solutions: np.ndarray,
        improvements: np.ndarray,
        objectives: np.ndarray | None = None,
    ) -> None:
        """Update the distribution from one batch.

        Candidates are ranked by improvement (descending), ties by objective
        (descending), then by batch index.
        """
        solutions = np.asarray(solutions, dtype=float)
        improvements = np.asarray(improvements, dtype=float)
        if solutions.shape != (self.batch_size, self.dim):
            raise ValueError(f"expected {(self.batch_size, self.dim)} solutions, got {solutions.shape}")
        if objectives is None:
            objectives = np.zeros(self.batch_size)
        order = np.lexsort((np.arange(self.batch_size), -np.asarray(objectives), -improvements))
        self._update(solutions[order])

    def _c_inv_sqrt(self, y: np.ndarray) -> np.ndarray:
        return ((y @ self.B) / self.D) @ self.B.T

    def _update(self, ranked: np.ndarray) -> None:
        n = self.dim
        self.generation += 1
        old_mean = self.mean
        y = (ranked - old_mean) / self.sigma
        y_w = self.weights[: self.mu] @ y[: self.mu]
        self.mean = old_mean + self.sigma * y_w

        c_inv_sqrt_yw = self._c_inv_sqrt(y_w)
        self.ps = (1 - self.cs) * self.ps + math.sqrt(self.cs * (2 - self.cs) * self.mueff) * c_inv_sqrt_yw
        ps_norm = float(np.linalg.norm(self.ps))
        hsig = ps_norm / math.sqrt(1 - (1 - self.cs) ** (2 * self.generation)) < (
            1.4 + 2 / (n + 1)
        ) * self.chi_n
        self.pc = (1 - self.cc) * self.pc + hsig * math.sqrt(self.cc * (2 - self.cc) * self.mueff) * y_w

        w = self.weights.copy()
        worse = w < 0
        if worse.any():
            w[worse] *= n / np.sum(self._c_inv_sqrt(y[worse]) ** 2, axis=1)
        rank_mu = (y.T * w) @ y
        delta_h = (1 - hsig) * self.cc * (2 - self.cc)
        self.C = (
            (1 - self.c1 - self.cmu * self.weights.sum() + self.c1 * delta_h) * self.C
            + self.c1 * np.outer(self.pc, self.pc)
            + self.cmu * rank_mu
        )
        self.C = (self.C + self.C.T) / 2

        self.sigma *= math.exp((self.cs / self.damps) * (ps_norm / self.chi_n - 1))
        self._decompose()

    def _decompose(self) -> None:
        if not (np.all(np.isfinite(self.C)) and math.isfinite(self.sigma) and self.sigma > 0):
            self.needs_restart = True
            return
        try:
            eigvals, eigvecs = np.linalg.eigh(self.C)
        except np.linalg.LinAlgError:
            self.needs_restart = True
            return
        if eigvals.min() <= 1e-12 or eigvals.max() > 1e14 * eigvals.min():
            self.needs_restart = True
            return
        self.D = np.sqrt(eigvals)
        self.B = eigvecs

    def restart(self, archive: Archive | None = None) -> None:
        """Reset the distribution around a random elite, or uniformly if none exist."""
        elite = archive.sample_elite(self.rng) if archive is not None else None
        if elite is None:
            mean = self.rng.uniform(*self.bounds, size=self.dim)
        else:
            mean = elite.genome
        self.restarts += 1
        self.reset(mean)
