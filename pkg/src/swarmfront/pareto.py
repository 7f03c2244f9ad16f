"""Pareto dominance, non-dominated sorting, crowding, and merit scoring.

These are the shared ranking primitives used by both optimizers in this
package. Everything here is a pure function of its inputs and safe to call
concurrently.

Two conventions differ from the textbook treatment and are load-bearing:

* Crowding is the product of the normalized neighbor gaps per objective,
  not their sum, so every value lies in [0, 1]. Boundary members of a
  front receive the supremum value 1.0 rather than infinity.
* Sorting is constraint-aware: feasible candidates occupy the leading
  ranks, and infeasible candidates are ranked afterwards, grouped by
  ascending violation count and dominance-peeled within each group.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .validation import as_float_vector

__all__ = [
    "Evaluation",
    "RankedEvaluation",
    "dominates",
    "non_dominated_sort",
    "crowding_distance",
    "merit",
    "rank_cohort",
]


@dataclass(frozen=True, eq=False)
class Evaluation:
    """Objective vector plus constraint-violation count for one candidate.

    Attributes:
        objectives: Finite objective values, minimization convention.
        violations: Number of violated constraints; 0 means feasible.
    """

    objectives: np.ndarray
    violations: int = 0

    def __post_init__(self) -> None:
        objectives = as_float_vector(self.objectives, name="objectives")
        if objectives.size == 0:
            raise ValueError("objectives must contain at least one value")
        objectives = objectives.copy()
        objectives.setflags(write=False)
        object.__setattr__(self, "objectives", objectives)
        if isinstance(self.violations, bool) or not isinstance(
            self.violations, (int, np.integer)
        ):
            raise ValueError(f"violations must be an integer, got {self.violations!r}")
        if self.violations < 0:
            raise ValueError(f"violations must be non-negative, got {self.violations}")
        object.__setattr__(self, "violations", int(self.violations))

    @property
    def feasible(self) -> bool:
        return self.violations == 0

    def objective_tuple(self) -> tuple[float, ...]:
        return tuple(float(v) for v in self.objectives)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Evaluation):
            return NotImplemented
        return (
            self.violations == other.violations
            and np.array_equal(self.objectives, other.objectives)
        )


@dataclass(frozen=True)
class RankedEvaluation:
    """An evaluation annotated with front rank, crowding, and merit."""

    evaluation: Evaluation
    rank: int
    crowding: float
    merit: float

    def __post_init__(self) -> None:
        if self.rank < 1:
            raise ValueError(f"rank must be at least 1, got {self.rank}")
        if not 0.0 <= self.crowding <= 1.0:
            raise ValueError(f"crowding must lie in [0, 1], got {self.crowding}")


def dominates(a, b) -> bool:
    """Return True when ``a`` Pareto-dominates ``b`` under minimization.

    ``a`` dominates ``b`` when it is no worse in every objective and
    strictly better in at least one. The relation is irreflexive and
    antisymmetric; equal vectors do not dominate each other.

    Raises:
        ValueError: If the vectors have different lengths.
    """
    a = as_float_vector(a, name="a")
    b = as_float_vector(b, dim=a.shape[0], name="b")
    return bool(np.all(a <= b) and np.any(a < b))


def _dominance_matrix(objectives: np.ndarray) -> np.ndarray:
    """Boolean matrix where entry (i, j) says row i dominates row j."""
    count = objectives.shape[0]
    no_worse = np.ones((count, count), dtype=bool)
    better = np.zeros((count, count), dtype=bool)
    for column in objectives.T:
        no_worse &= column[:, None] <= column[None, :]
        better |= column[:, None] < column[None, :]
    return no_worse & better


def _peel(dominance: np.ndarray) -> np.ndarray:
    """Assign 1-based front ranks by repeatedly removing non-dominated rows."""
    n = dominance.shape[0]
    counts = dominance.sum(axis=0).astype(np.int64)
    ranks = np.zeros(n, dtype=np.int64)
    remaining = np.ones(n, dtype=bool)
    rank = 0
    while remaining.any():
        rank += 1
        front = remaining & (counts == 0)
        ranks[front] = rank
        remaining &= ~front
        counts -= dominance[front].sum(axis=0)
    return ranks


def _stack_objectives(evaluations: Sequence[Evaluation]) -> np.ndarray:
    lengths = {e.objectives.shape[0] for e in evaluations}
    if len(lengths) > 1:
        raise ValueError("all objective vectors in a cohort must share one length")
    return np.stack([e.objectives for e in evaluations])


def non_dominated_sort(cohort: Sequence[Evaluation], constrained: bool = True) -> list[int]:
    """Assign a 1-based front rank to every member of ``cohort``.

    Rank 1 is the non-dominated front of the cohort; removing it and
    peeling again yields rank 2, and so on. With ``constrained`` set,
    feasible members are peeled first and infeasible members are ranked
    after all feasible fronts, grouped by ascending violation count and
    peeled within each group.

    Args:
        cohort: Evaluations to rank; order is preserved in the output.
        constrained: Rank feasible members ahead of infeasible ones.

    Returns:
        One rank per cohort member, in input order.

    Raises:
        ValueError: If the cohort is empty or objective lengths differ.
    """
    evaluations = list(cohort)
    if not evaluations:
        raise ValueError("cohort must not be empty")
    objectives = _stack_objectives(evaluations)
    if not constrained:
        return [int(r) for r in _peel(_dominance_matrix(objectives))]

    violations = np.array([e.violations for e in evaluations], dtype=np.int64)
    ranks = np.zeros(len(evaluations), dtype=np.int64)
    offset = 0
    feasible = violations == 0
    if feasible.any():
        sub = _peel(_dominance_matrix(objectives[feasible]))
        ranks[feasible] = sub
        offset = int(sub.max())
    for count in np.unique(violations[violations > 0]):
        group = violations == count
        sub = _peel(_dominance_matrix(objectives[group]))
        ranks[group] = sub + offset
        offset += int(sub.max())
    return [int(r) for r in ranks]


def crowding_distance(front) -> np.ndarray:
    """Product-form crowding for the members of one front.

    For each objective the members are sorted (stable, ties kept in input
    order) and each interior member contributes the gap between its two
    neighbors, normalized by the objective's spread. The per-objective
    factors are multiplied, so results lie in [0, 1]. Members that sit
    first or last in any objective's order are boundary members and
    receive 1.0, as do all members of fronts with one or two points.
    Objectives with zero spread are skipped entirely: they contribute
    neither a factor nor boundary status, which keeps the result
    independent of input order for degenerate fronts.

    Args:
        front: Sequence of objective vectors of equal length.

    Returns:
        One crowding value per member, in input order.

    Raises:
        ValueError: If the front is empty or vectors have unequal lengths.
    """
    try:
        objectives = np.asarray(front, dtype=float)
    except ValueError:
        raise ValueError("front members must be vectors of equal length") from None
    if objectives.ndim != 2 or objectives.dtype == object:
        raise ValueError("front must be a sequence of equal-length objective vectors")
    count = objectives.shape[0]
    if count == 0:
        raise ValueError("front must not be empty")
    if count <= 2:
        return np.ones(count)

    factors = np.ones(count)
    boundary = np.zeros(count, dtype=bool)
    for m in range(objectives.shape[1]):
        values = objectives[:, m]
        spread = values.max() - values.min()
        if spread == 0.0:
            continue
        order = np.argsort(values, kind="stable")
        positions = np.empty(count, dtype=np.int64)
        positions[order] = np.arange(count)
        boundary |= (positions == 0) | (positions == count - 1)
        sorted_values = values[order]
        gaps = np.ones(count)
        gaps[1:-1] = (sorted_values[2:] - sorted_values[:-2]) / spread
        factors *= gaps[positions]
    return np.where(boundary, 1.0, factors)


def merit(rank: int, crowding: float, violations: int, max_rank: int) -> float:
    """Scalar quality score combining rank, crowding, and violations.

    Computed as ``max_rank - rank + crowding - violations``. Under the
    constrained sort this makes every feasible member strictly outrank
    every infeasible member of the same cohort, and within equal crowding
    a lower rank always wins.

    Raises:
        ValueError: If ``rank`` is outside ``[1, max_rank]``, crowding is
            outside ``[0, 1]``, or ``violations`` is negative.
    """
    if max_rank < 1:
        raise ValueError(f"max_rank must be at least 1, got {max_rank}")
    if not 1 <= rank <= max_rank:
        raise ValueError(f"rank must lie in [1, {max_rank}], got {rank}")
    if not 0.0 <= crowding <= 1.0:
        raise ValueError(f"crowding must lie in [0, 1], got {crowding}")
    if violations < 0:
        raise ValueError(f"violations must be non-negative, got {violations}")
    return float(max_rank - rank + crowding - violations)


def rank_cohort(cohort: Sequence[Evaluation]) -> list[RankedEvaluation]:
    """Rank a cohort and annotate each member with crowding and merit.

    Runs the constrained non-dominated sort, computes crowding within each
    front, and derives the merit scalar using the cohort's maximum rank.

    Returns:
        One RankedEvaluation per member, in input order.
    """
    evaluations = list(cohort)
    ranks = np.array(non_dominated_sort(evaluations, constrained=True), dtype=np.int64)
    max_rank = int(ranks.max())
    objectives = _stack_objectives(evaluations)
    crowding = np.empty(len(evaluations))
    for rank_value in np.unique(ranks):
        members = np.flatnonzero(ranks == rank_value)
        crowding[members] = crowding_distance(objectives[members])
    return [
        RankedEvaluation(
            evaluation=evaluation,
            rank=int(ranks[i]),
            crowding=float(crowding[i]),
            merit=merit(int(ranks[i]), float(crowding[i]), evaluation.violations, max_rank),
        )
        for i, evaluation in enumerate(evaluations)
    ]
