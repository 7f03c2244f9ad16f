"""Self-contained NSGA-II baseline for head-to-head comparisons.

A mu+lambda generational loop with two-point crossover, bounded Gaussian
mutation, and survivor selection by the shared constrained non-dominated
sort. Truncation inside the straddling front uses the canonical sum-form
crowding distance with infinite boundary sentinels, deliberately distinct
from the product-form crowding the swarm optimizer uses, so the baseline
matches the classical algorithm. An unbounded hall of fame archives every
feasible non-dominated solution seen.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .errors import ConfigurationError
from .metrics import FrontSnapshot, IterationReport
from .pareto import Evaluation, non_dominated_sort
from .problems import Problem, check_problem
from .validation import as_float_vector, check_positive_int, check_probability

__all__ = [
    "Individual",
    "two_point_crossover",
    "gaussian_mutation",
    "sum_crowding_distance",
    "nsga2_select",
    "HallOfFame",
    "Nsga2",
]


@dataclass(frozen=True, eq=False)
class Individual:
    """A genome with its cached evaluation."""

    genome: np.ndarray
    evaluation: Evaluation

    def __post_init__(self) -> None:
        genome = as_float_vector(self.genome, name="genome").copy()
        genome.setflags(write=False)
        object.__setattr__(self, "genome", genome)


def two_point_crossover(a, b, rng) -> tuple[np.ndarray, np.ndarray]:
    """Exchange one uniformly chosen slice between two equal-length genomes.

    Two cut indices ``0 <= i < j <= length`` are drawn uniformly over all
    index pairs and the slice ``[i, j)`` is swapped between copies of the
    parents.

    Raises:
        ValueError: If the genomes differ in length or are shorter than 2.
    """
    first = as_float_vector(a, name="a")
    length = first.shape[0]
    second = as_float_vector(b, dim=length, name="b")
    if length < 2:
        raise ValueError(f"genomes must have at least 2 genes, got {length}")
    cuts = np.sort(np.asarray(rng.choice(length + 1, size=2, replace=False)))
    i, j = int(cuts[0]), int(cuts[1])
    child_a = first.copy()
    child_b = second.copy()
    child_a[i:j] = second[i:j]
    child_b[i:j] = first[i:j]
    return child_a, child_b


def gaussian_mutation(genome, mut_mean: float, mut_sigma: float, indpb: float,
                      *, lower, upper, rng) -> np.ndarray:
    """Perturb each gene with probability ``indpb`` and clamp to the bounds.

    Perturbations are Normal(mut_mean, mut_sigma) draws added to the gene.
    Untouched genes pass through bit-exactly.

    Raises:
        ValueError: If ``mut_sigma`` is negative or lengths disagree.
    """
    genes = as_float_vector(genome, name="genome")
    length = genes.shape[0]
    lo = as_float_vector(lower, dim=length, name="lower")
    hi = as_float_vector(upper, dim=length, name="upper")
    if mut_sigma < 0:
        raise ValueError(f"mut_sigma must be non-negative, got {mut_sigma}")
    mask = np.asarray(rng.random(length)) < indpb
    noise = np.asarray(rng.normal(mut_mean, mut_sigma, length))
    mutated = np.clip(genes + noise, lo, hi)
    return np.where(mask, mutated, genes)


def sum_crowding_distance(objectives: np.ndarray) -> np.ndarray:
    """Canonical sum-form crowding with infinite boundary sentinels.

    Used only to order members inside a straddling front during
    truncation; the values are never mixed into merit scores. Fronts of
    one or two members are all boundary and get infinity. Objectives with
    zero spread contribute nothing.
    """
    objectives = np.asarray(objectives, dtype=float)
    if objectives.ndim != 2 or objectives.shape[0] == 0:
        raise ValueError("objectives must be a nonempty 2-D array")
    count = objectives.shape[0]
    if count <= 2:
        return np.full(count, np.inf)
    distances = np.zeros(count)
    for m in range(objectives.shape[1]):
        values = objectives[:, m]
        spread = values.max() - values.min()
        if spread == 0.0:
            continue
        order = np.argsort(values, kind="stable")
        sorted_values = values[order]
        distances[order[0]] = np.inf
        distances[order[-1]] = np.inf
        interior = order[1:-1]
        distances[interior] += (sorted_values[2:] - sorted_values[:-2]) / spread
    return distances


def nsga2_select(pool, k: int) -> list:
    """Select ``k`` survivors by rank, truncating one front by crowding.

    Whole fronts are admitted in rank order (the shared constrained sort,
    so feasible fronts come first). The front that straddles the cutoff is
    truncated by descending sum-form crowding, ties broken by pool order,
    which keeps extreme points ahead of crowded interior ones.

    Raises:
        ValueError: If ``k`` is not in ``[1, len(pool)]``.
    """
    individuals = list(pool)
    if not 1 <= k <= len(individuals):
        raise ValueError(f"k must lie in [1, {len(individuals)}], got {k}")
    ranks = np.array(
        non_dominated_sort([ind.evaluation for ind in individuals], constrained=True)
    )
    selected: list[int] = []
    for rank_value in np.unique(ranks):
        members = np.flatnonzero(ranks == rank_value)
        if len(selected) + len(members) <= k:
            selected.extend(int(i) for i in members)
            if len(selected) == k:
                break
            continue
        remaining = k - len(selected)
        objectives = np.stack([individuals[i].evaluation.objectives for i in members])
        crowding = sum_crowding_distance(objectives)
        by_crowding = sorted(range(len(members)), key=lambda i: (-crowding[i], i))
        selected.extend(int(members[i]) for i in by_crowding[:remaining])
        break
    return [individuals[i] for i in selected]


class HallOfFame:
    """Unbounded archive of the feasible non-dominated individuals seen.

    Infeasible candidates, dominated candidates, and exact objective
    duplicates are ignored; an accepted candidate evicts every member it
    dominates.
    """

    def __init__(self):
        self._members: list[Individual] = []
        self._objectives: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self._members)

    @property
    def members(self) -> tuple[Individual, ...]:
        return tuple(self._members)

    def update(self, candidate: Individual) -> None:
        if not candidate.evaluation.feasible:
            return
        incoming = candidate.evaluation.objectives
        if self._objectives is None:
            self._members = [candidate]
            self._objectives = incoming[None, :].copy()
            return
        table = self._objectives
        if bool(np.any(np.all(table == incoming, axis=1))):
            return
        dominated_by_member = np.all(table <= incoming, axis=1) & np.any(
            table < incoming, axis=1
        )
        if bool(dominated_by_member.any()):
            return
        evicted = np.all(incoming <= table, axis=1) & np.any(incoming < table, axis=1)
        keep = ~evicted
        self._members = [m for m, retain in zip(self._members, keep) if retain]
        self._members.append(candidate)
        self._objectives = np.vstack((table[keep], incoming[None, :]))

    def front_points(self) -> list[tuple[float, ...]]:
        return sorted(m.evaluation.objective_tuple() for m in self._members)


class Nsga2(BaseEstimator):
    """NSGA-II baseline as an estimator over the shared problem interface.

    Parameters:
        mu: Parent population size.
        lambda_: Offspring produced per generation.
        cxpb: Per-offspring probability of crossover (keeps the first child).
        mutpb: Per-offspring probability of mutation; the variation choice
            is exclusive, so ``cxpb + mutpb`` must not exceed 1 and the
            remainder clones a parent.
        mut_mean: Mean of the Gaussian perturbation.
        mut_sigma: Standard deviation of the Gaussian perturbation.
        indpb: Per-gene probability of applying the perturbation.
        max_iterations: Number of generations.
        seed: Seed for the single random generator driving the run.

    Attributes (after fit):
        front_: Final hall-of-fame front as a FrontSnapshot.
        front_members_: List of (objectives, genome) pairs backing ``front_``.
        reports_: One IterationReport per generation.
        hall_of_fame_: The final archive.
        population_: The final mu survivors.
        evaluations_: Total objective evaluations spent.
    """

    def __init__(self, mu: int = 20, lambda_: int = 80, cxpb: float = 0.7,
                 mutpb: float = 0.2, mut_mean: float = 0.0, mut_sigma: float = 1.0,
                 indpb: float = 0.1, max_iterations: int = 100, seed: int = 0):
        self.mu = mu
        self.lambda_ = lambda_
        self.cxpb = cxpb
        self.mutpb = mutpb
        self.mut_mean = mut_mean
        self.mut_sigma = mut_sigma
        self.indpb = indpb
        self.max_iterations = max_iterations
        self.seed = seed

    @property
    def evaluations_per_iteration(self) -> int:
        return int(self.mu) + int(self.lambda_)

    def _validate_params(self, problem: Problem) -> None:
        check_positive_int(self.mu, "mu")
        check_positive_int(self.lambda_, "lambda_")
        check_positive_int(self.max_iterations, "max_iterations")
        cxpb = check_probability(self.cxpb, "cxpb")
        mutpb = check_probability(self.mutpb, "mutpb")
        check_probability(self.indpb, "indpb")
        if cxpb + mutpb > 1.0:
            raise ConfigurationError(
                f"cxpb + mutpb must not exceed 1, got {cxpb} + {mutpb}"
            )
        if not np.isfinite(self.mut_mean):
            raise ConfigurationError(f"mut_mean must be finite, got {self.mut_mean!r}")
        if not np.isfinite(self.mut_sigma) or self.mut_sigma < 0:
            raise ConfigurationError(
                f"mut_sigma must be a non-negative real, got {self.mut_sigma!r}"
            )
        if isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer)) or self.seed < 0:
            raise ConfigurationError(f"seed must be a non-negative integer, got {self.seed!r}")
        if cxpb > 0 and self.mu < 2:
            raise ConfigurationError("crossover needs mu >= 2 distinct parents")
        if cxpb > 0 and problem.dimension < 2:
            raise ConfigurationError("crossover needs a problem dimension of at least 2")

    @staticmethod
    def _evaluate(problem: Problem, genome: np.ndarray, generation: int) -> Evaluation:
        try:
            evaluation = problem.evaluate(genome)
        except Exception as exc:
            raise RuntimeError(
                f"objective evaluation failed at generation {generation}: {exc}"
            ) from exc
        if not isinstance(evaluation, Evaluation):
            raise RuntimeError(
                f"problem.evaluate must return an Evaluation, got {type(evaluation).__name__}"
            )
        return evaluation

    def fit(self, problem: Problem) -> "Nsga2":
        """Run the generational loop on ``problem`` and store the results.

        Returns:
            self, with trailing-underscore result attributes populated.
        """
        check_problem(problem)
        self._validate_params(problem)
        rng = np.random.default_rng(self.seed)
        dim = problem.dimension
        lower = np.asarray(problem.lower_bounds, dtype=float)
        upper = np.asarray(problem.upper_bounds, dtype=float)

        population = []
        for _ in range(self.mu):
            genome = as_float_vector(problem.sample(rng), dim=dim, name="sample")
            population.append(Individual(genome=genome, evaluation=self._evaluate(problem, genome, 0)))
        evaluations = self.mu
        hall_of_fame = HallOfFame()
        for individual in population:
            hall_of_fame.update(individual)

        previous_points: tuple | None = None
        reports: list[IterationReport] = []
        for generation in range(1, self.max_iterations + 1):
            offspring = []
            for _ in range(self.lambda_):
                draw = rng.random()
                if draw < self.cxpb:
                    parents = rng.choice(self.mu, size=2, replace=False)
                    child, _ = two_point_crossover(
                        population[parents[0]].genome, population[parents[1]].genome, rng
                    )
                elif draw < self.cxpb + self.mutpb:
                    parent = population[int(rng.integers(self.mu))]
                    child = gaussian_mutation(
                        parent.genome, self.mut_mean, self.mut_sigma, self.indpb,
                        lower=lower, upper=upper, rng=rng,
                    )
                else:
                    parent = population[int(rng.integers(self.mu))]
                    child = parent.genome.copy()
                offspring.append(
                    Individual(genome=child, evaluation=self._evaluate(problem, child, generation))
                )
            evaluations += self.lambda_
            for individual in offspring:
                hall_of_fame.update(individual)
            population = nsga2_select(population + offspring, self.mu)

            front = FrontSnapshot.from_points(hall_of_fame.front_points(), generation)
            changed = previous_points is None or front.points != previous_points
            previous_points = front.points
            reports.append(
                IterationReport(
                    iteration=generation,
                    front=front,
                    front_changed=changed,
                    gbest_objectives=None,
                    evaluations_used=evaluations,
                )
            )

        self.reports_ = reports
        self.front_ = reports[-1].front
        self.front_members_ = [
            (m.evaluation.objective_tuple(), m.genome.copy())
            for m in sorted(
                hall_of_fame.members, key=lambda m: m.evaluation.objective_tuple()
            )
        ]
        self.hall_of_fame_ = hall_of_fame
        self.population_ = population
        self.evaluations_ = evaluations
        return self
