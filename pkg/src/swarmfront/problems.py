"""Abstract interface for bound-constrained multi-objective problems."""

from __future__ import annotations

from abc import ABC, abstractmethod

import numpy as np

from .errors import ConfigurationError
from .pareto import Evaluation

__all__ = ["Problem", "check_problem"]


class Problem(ABC):
    """A box-bounded multi-objective minimization problem.

    Implementations expose the search-space geometry, a deterministic
    objective evaluation, and a way to draw uniform starting points.
    Evaluations must be pure: the same position always yields the same
    objectives and violation count.
    """

    @property
    @abstractmethod
    def dimension(self) -> int:
        """Number of decision variables."""

    @property
    @abstractmethod
    def objective_count(self) -> int:
        """Number of objectives, all minimized."""

    @property
    @abstractmethod
    def bounds(self) -> np.ndarray:
        """Per-dimension (lower, upper) pairs, shape (dimension, 2)."""

    @property
    def discrete_mask(self) -> np.ndarray | None:
        """Boolean mask of integer-valued dimensions, or None when all are continuous."""
        return None

    @property
    def lower_bounds(self) -> np.ndarray:
        return self.bounds[:, 0]

    @property
    def upper_bounds(self) -> np.ndarray:
        return self.bounds[:, 1]

    @abstractmethod
    def evaluate(self, position: np.ndarray) -> Evaluation:
        """Evaluate one position inside the bounds."""

    @abstractmethod
    def sample(self, rng: np.random.Generator) -> np.ndarray:
        """Draw one uniform position inside the bounds."""


def check_problem(problem: Problem) -> None:
    """Validate a problem's declared geometry before running an optimizer.

    Raises:
        ConfigurationError: If the dimension or bounds are malformed.
    """
    if problem.dimension < 1:
        raise ConfigurationError(f"problem dimension must be positive, got {problem.dimension}")
    if problem.objective_count < 1:
        raise ConfigurationError(
            f"problem must declare at least one objective, got {problem.objective_count}"
        )
    bounds = np.asarray(problem.bounds, dtype=float)
    if bounds.shape != (problem.dimension, 2):
        raise ConfigurationError(
            f"bounds must have shape ({problem.dimension}, 2), got {bounds.shape}"
        )
    if not np.all(np.isfinite(bounds)):
        raise ConfigurationError("bounds must be finite")
    if not np.all(bounds[:, 0] < bounds[:, 1]):
        raise ConfigurationError("every lower bound must be strictly below its upper bound")
