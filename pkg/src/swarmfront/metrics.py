"""Campaign evaluation data and metrics.

Holds the shared record types emitted by the optimizers (front snapshots
and per-iteration reports) plus the study metrics: log-scale objective
normalization, two-objective hypervolume over the normalized unit square,
and the convergence score that tracks how recently the front last changed.

Normalization maps raw positive objective values into goodness scores in
[0, 1] where 1 is best: ``(log MAX - log z) / (log MAX - log MIN)`` with
MIN and MAX taken over a whole campaign. Hypervolume is then the area
dominated by a front's normalized points, measured from the origin, so it
also lies in [0, 1] and larger is better.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .pareto import dominates
from .validation import as_float_vector

__all__ = [
    "FrontSnapshot",
    "IterationReport",
    "NormalizationBounds",
    "CampaignResult",
    "normalize_point",
    "hypervolume_2d",
    "averaged_hv",
    "convergence_score",
    "averaged_cs",
    "campaign_bounds",
]


@dataclass(frozen=True)
class FrontSnapshot:
    """The set of objective vectors on a front at one iteration.

    Points are stored deduplicated and sorted lexicographically, so two
    snapshots hold the same front exactly when their ``points`` compare
    equal.
    """

    points: tuple[tuple[float, ...], ...]
    iteration: int

    @classmethod
    def from_points(cls, points: Iterable, iteration: int) -> "FrontSnapshot":
        canonical = sorted({tuple(float(v) for v in point) for point in points})
        return cls(points=tuple(canonical), iteration=iteration)

    def __len__(self) -> int:
        return len(self.points)

    def is_mutually_non_dominated(self) -> bool:
        for i, a in enumerate(self.points):
            for b in self.points[i + 1:]:
                if dominates(a, b) or dominates(b, a):
                    return False
        return True


@dataclass(frozen=True)
class IterationReport:
    """What an optimizer reports at the end of one iteration.

    ``gbest_objectives`` is the objective vector of the single best
    archive entry for optimizers that track one, or None otherwise.
    ``evaluations_used`` counts all objective evaluations spent so far.
    """

    iteration: int
    front: FrontSnapshot
    front_changed: bool
    gbest_objectives: tuple[float, ...] | None
    evaluations_used: int


@dataclass(frozen=True)
class NormalizationBounds:
    """Per-objective positive (MIN, MAX) ranges shared by a whole campaign."""

    minimum: np.ndarray
    maximum: np.ndarray

    def __post_init__(self) -> None:
        minimum = as_float_vector(self.minimum, name="minimum")
        maximum = as_float_vector(self.maximum, dim=minimum.shape[0], name="maximum")
        if minimum.size == 0:
            raise ValueError("bounds must cover at least one objective")
        if not np.all(minimum > 0.0):
            raise ValueError("minimum bounds must be strictly positive for the log scale")
        if not np.all(minimum < maximum):
            raise ValueError("each minimum bound must lie strictly below its maximum")
        minimum = minimum.copy()
        maximum = maximum.copy()
        minimum.setflags(write=False)
        maximum.setflags(write=False)
        object.__setattr__(self, "minimum", minimum)
        object.__setattr__(self, "maximum", maximum)

    @property
    def objective_count(self) -> int:
        return int(self.minimum.shape[0])


@dataclass(frozen=True)
class CampaignResult:
    """Per-iteration fronts and change flags for every run of one algorithm."""

    fronts: tuple[tuple[FrontSnapshot, ...], ...]
    front_changed: tuple[tuple[bool, ...], ...]
    seeds: tuple[int, ...]

    def __post_init__(self) -> None:
        if not (len(self.fronts) == len(self.front_changed) == len(self.seeds)):
            raise ValueError("fronts, front_changed, and seeds must have one entry per run")
        lengths = {len(run) for run in self.fronts} | {len(run) for run in self.front_changed}
        if len(lengths) > 1:
            raise ValueError("every run must report the same number of iterations")

    @classmethod
    def from_reports(
        cls,
        per_run_reports: Sequence[Sequence[IterationReport]],
        seeds: Sequence[int],
    ) -> "CampaignResult":
        return cls(
            fronts=tuple(tuple(r.front for r in run) for run in per_run_reports),
            front_changed=tuple(tuple(r.front_changed for r in run) for run in per_run_reports),
            seeds=tuple(int(s) for s in seeds),
        )

    @property
    def run_count(self) -> int:
        return len(self.seeds)

    @property
    def iteration_count(self) -> int:
        return len(self.fronts[0]) if self.fronts else 0

    def all_fronts(self) -> Iterator[FrontSnapshot]:
        for run in self.fronts:
            yield from run


def normalize_point(objectives, bounds: NormalizationBounds) -> np.ndarray:
    """Map raw objective values to log-scale goodness scores in [0, 1].

    A value equal to MAX maps to 0, a value equal to MIN maps to 1, and
    intermediate values interpolate linearly in log space. Values at or
    below MIN clamp to 1.0, which also covers nonpositive values that a
    positive campaign-wide MIN has already excluded from the scale.

    Raises:
        ValueError: If a value exceeds its MAX bound or the vector length
            does not match the bounds.
    """
    z = as_float_vector(objectives, dim=bounds.objective_count, name="objectives")
    if np.any(z > bounds.maximum):
        raise ValueError("objective value exceeds the normalization maximum")
    clamped = np.maximum(z, bounds.minimum)
    log_min = np.log(bounds.minimum)
    log_max = np.log(bounds.maximum)
    return (log_max - np.log(clamped)) / (log_max - log_min)


def hypervolume_2d(front: FrontSnapshot, bounds: NormalizationBounds) -> float:
    """Area of the normalized region dominated by a two-objective front.

    Each front point is normalized to the unit square with 1 meaning
    best, and the returned value is the area of the union of rectangles
    spanned from the origin to each point: a staircase sweep over points
    ordered by descending first coordinate.

    Raises:
        ValueError: If the front is empty or the bounds do not describe
            exactly two objectives.
    """
    if bounds.objective_count != 2:
        raise ValueError(
            f"hypervolume supports exactly two objectives, got {bounds.objective_count}"
        )
    if len(front) == 0:
        raise ValueError("front must contain at least one point")
    normalized = np.stack([normalize_point(p, bounds) for p in front.points])
    order = np.lexsort((-normalized[:, 1], -normalized[:, 0]))
    area = 0.0
    best_second = 0.0
    for index in order:
        first, second = normalized[index]
        if second > best_second:
            area += float(first) * (float(second) - best_second)
            best_second = float(second)
    return float(area)


def averaged_hv(campaign: CampaignResult, bounds: NormalizationBounds) -> np.ndarray:
    """Mean hypervolume per iteration across all runs of a campaign.

    An iteration whose front is empty (no feasible point yet) contributes
    zero area for that run.

    Raises:
        ValueError: If the campaign holds no runs.
    """
    if campaign.run_count == 0:
        raise ValueError("campaign must contain at least one run")
    series = np.zeros((campaign.run_count, campaign.iteration_count))
    for r, run in enumerate(campaign.fronts):
        for t, snapshot in enumerate(run):
            series[r, t] = 0.0 if len(snapshot) == 0 else hypervolume_2d(snapshot, bounds)
    return series.mean(axis=0)


def convergence_score(front_changed: Sequence[bool]) -> np.ndarray:
    """Score how recently the front last changed, per iteration.

    The score is 1 at the first iteration and after any iteration whose
    front differs from the previous one; each stagnant iteration subtracts
    0.01, and the score never drops below 0. Internally the level is kept
    as an integer count of hundredths so the decimals are exact.

    Raises:
        ValueError: If the flag sequence is empty.
    """
    flags = list(front_changed)
    if not flags:
        raise ValueError("front_changed must contain at least one iteration")
    scores = np.empty(len(flags))
    level = 100
    for t, changed in enumerate(flags):
        if t == 0 or changed:
            level = 100
        else:
            level = max(0, level - 1)
        scores[t] = level / 100.0
    return scores


def averaged_cs(campaign: CampaignResult) -> np.ndarray:
    """Mean convergence score per iteration across all runs of a campaign.

    Raises:
        ValueError: If the campaign holds no runs.
    """
    if campaign.run_count == 0:
        raise ValueError("campaign must contain at least one run")
    series = np.stack([convergence_score(run) for run in campaign.front_changed])
    return series.mean(axis=0)


def campaign_bounds(fronts: Iterable[FrontSnapshot]) -> NormalizationBounds:
    """Derive shared normalization bounds from every front of a campaign.

    MAX is the largest observed value per objective. MIN is the smallest
    strictly positive observed value, since the log scale cannot represent
    zero; observed zeros therefore clamp to MIN during normalization.

    Raises:
        ValueError: If no points are supplied, any value is negative, an
            objective has no positive values, or an objective's range is
            degenerate (MIN equals MAX).
    """
    points = [point for snapshot in fronts for point in snapshot.points]
    if not points:
        raise ValueError("no front points supplied")
    values = np.asarray(points, dtype=float)
    if np.any(values < 0.0):
        raise ValueError("negative objective values cannot be normalized on a log scale")
    maximum = values.max(axis=0)
    minimum = np.empty_like(maximum)
    for m in range(values.shape[1]):
        positive = values[:, m][values[:, m] > 0.0]
        if positive.size == 0:
            raise ValueError(f"objective {m} has no positive values to anchor the log scale")
        minimum[m] = positive.min()
    if np.any(minimum >= maximum):
        raise ValueError("degenerate objective range: MIN equals MAX")
    return NormalizationBounds(minimum=minimum, maximum=maximum)
