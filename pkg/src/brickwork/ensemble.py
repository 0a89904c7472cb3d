"""Monte Carlo estimates and the trial runner."""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import InvalidArgument


@dataclass(frozen=True)
class EnsembleEstimate:
    """Sample mean with standard error ``std(ddof=1) / sqrt(trials)``."""

    mean: float
    stderr: float
    trials: int
    seed: Optional[int] = None

    @classmethod
    def from_samples(cls, values: Sequence[float], seed: Optional[int] = None) -> "EnsembleEstimate":
        v = np.asarray(values, dtype=float)
        n = v.size
        if n == 0:
            raise InvalidArgument("cannot estimate from zero trials")
        mean = float(np.mean(v))
        stderr = float(np.std(v, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        return cls(mean, stderr, n, seed)

    @property
    def variance(self) -> float:
        return self.stderr**2 * self.trials

    def merge(self, other: "EnsembleEstimate") -> "EnsembleEstimate":
        """Pool two disjoint sets of trials (Chan et al. update; associative)."""
        n1, n2 = self.trials, other.trials
        n = n1 + n2
        delta = other.mean - self.mean
        m2 = self.variance * (n1 - 1) + other.variance * (n2 - 1) + delta**2 * n1 * n2 / n
        mean = self.mean + delta * n2 / n
        stderr = math.sqrt(m2 / (n - 1) / n) if n > 1 else 0.0
        return EnsembleEstimate(mean, stderr, n, self.seed)

    def within(self, target: float, nsigma: float = 4.0, slack: float = 0.0) -> bool:
        return abs(self.mean - target) <= nsigma * self.stderr + slack

    def as_dict(self) -> dict:
        return {"mean": self.mean, "stderr": self.stderr, "trials": self.trials, "seed": self.seed}


def joint_stderr(a: EnsembleEstimate, b: EnsembleEstimate) -> float:
    return math.hypot(a.stderr, b.stderr)


def default_workers() -> int:
    return os.cpu_count() or 1


def run_trials(fn: Callable[[int], object], trials: int, workers: int = 1, chunksize: int = 0) -> list:
    """Evaluate ``fn(i)`` for ``i in range(trials)`` and return results in trial order.

    ``fn`` must derive its randomness from ``i`` alone; with ``workers > 1`` it
    must also be picklable (a module-level function or ``functools.partial``).
    """
    if trials < 1:
        raise InvalidArgument("trials must be positive")
    if workers <= 1 or trials == 1:
        return [fn(i) for i in range(trials)]
    chunksize = chunksize or max(1, trials // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(trials), chunksize=chunksize))
