"""Elitist multi-objective particle swarm optimizer with an archive memory.

The engine keeps every evaluated particle in a swarm memory, re-ranks the
whole memory each iteration with the constrained non-dominated sort, and
rebuilds the next swarm from the top-merit entries (elitist selection).
Personal bests are rows into the memory rather than copies; entries a
pbest row points at are exempt from capacity truncation so the references
never dangle. Velocities follow the constriction-factor update, positions
clamp to the box, and a stagnation counter re-randomizes a few elite
particles when the front has stopped changing.

A single run is sequential. Separate runs with distinct seeds share no
state and may execute concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from .errors import ConfigurationError
from .metrics import FrontSnapshot, IterationReport
from .pareto import Evaluation, RankedEvaluation, rank_cohort
from .problems import Problem, check_problem
from .validation import as_float_vector, check_positive_int

__all__ = [
    "constriction_factor",
    "update_velocity",
    "update_position",
    "ParticleState",
    "MemoryEntry",
    "SwarmMemory",
    "PbestTable",
    "stagnation_step",
    "MoEtpso",
]


def constriction_factor(c1: float, c2: float) -> float:
    """Velocity constriction coefficient for acceleration weights c1 and c2.

    With ``phi = c1 + c2`` the factor is ``2 / |2 - phi - sqrt(phi^2 - 4 phi)|``,
    which keeps the swarm dynamics contracting when ``phi`` exceeds 4.

    Raises:
        ConfigurationError: If ``c1 + c2`` is not strictly greater than 4.
    """
    phi = float(c1) + float(c2)
    if not phi > 4.0:
        raise ConfigurationError(f"c1 + c2 must exceed 4 for constriction, got {phi}")
    return 2.0 / abs(2.0 - phi - math.sqrt(phi * phi - 4.0 * phi))


def update_velocity(position, velocity, pbest_position, gbest_position, *,
                    w: float, c1: float, c2: float, rng) -> np.ndarray:
    """One constriction-factor velocity update.

    Draws one uniform [0, 1) multiplier per dimension for each of the two
    attraction terms, then scales the damped previous velocity plus the
    pulls toward the personal and global bests by the constriction factor.

    Args:
        position: Current particle position.
        velocity: Current particle velocity.
        pbest_position: Personal best position for this particle.
        gbest_position: Global best position of the memory.
        w: Inertia weight applied to the previous velocity.
        c1: Acceleration weight toward the personal best.
        c2: Acceleration weight toward the global best.
        rng: Source of uniform draws; ``rng.random(dim)`` is called twice.

    Returns:
        The new velocity vector.

    Raises:
        ValueError: If the vectors disagree in length or c1 + c2 <= 4.
    """
    x = as_float_vector(position, name="position")
    dim = x.shape[0]
    v = as_float_vector(velocity, dim=dim, name="velocity")
    p = as_float_vector(pbest_position, dim=dim, name="pbest_position")
    g = as_float_vector(gbest_position, dim=dim, name="gbest_position")
    k = constriction_factor(c1, c2)
    r1 = np.asarray(rng.random(dim), dtype=float)
    r2 = np.asarray(rng.random(dim), dtype=float)
    return k * (w * v + c1 * r1 * (p - x) + c2 * r2 * (g - x))


def update_position(position, velocity, lower, upper, discrete_mask=None) -> np.ndarray:
    """Move a particle and clamp the result into the box bounds.

    Dimensions flagged in ``discrete_mask`` are rounded to the nearest
    integer after clamping (and re-clamped, so the result stays in the
    box when a bound is not integral).
    """
    x = as_float_vector(position, name="position")
    dim = x.shape[0]
    v = as_float_vector(velocity, dim=dim, name="velocity")
    lo = as_float_vector(lower, dim=dim, name="lower")
    hi = as_float_vector(upper, dim=dim, name="upper")
    moved = np.clip(x + v, lo, hi)
    if discrete_mask is not None:
        mask = np.asarray(discrete_mask, dtype=bool)
        if mask.shape != (dim,):
            raise ValueError(f"discrete_mask must have length {dim}, got shape {mask.shape}")
        moved = moved.copy()
        moved[mask] = np.clip(np.rint(moved[mask]), lo[mask], hi[mask])
    return moved


@dataclass
class ParticleState:
    """Mutable per-particle position and velocity between iterations."""

    particle_id: int
    position: np.ndarray
    velocity: np.ndarray


@dataclass
class MemoryEntry:
    """One archived particle evaluation inside the swarm memory.

    ``ranked`` is populated by the memory's rank refresh and rewritten
    every iteration; merits from different refreshes are not comparable.
    """

    entry_id: int
    particle_id: int
    position: np.ndarray
    velocity: np.ndarray
    evaluation: Evaluation
    iteration_found: int
    ranked: RankedEvaluation | None = field(default=None, compare=False)


class SwarmMemory:
    """Merit-sorted archive of every particle evaluation seen so far.

    Capacity truncation keeps the top entries by merit, except that
    entries referenced by a pbest table are retained beyond capacity so
    the table's references stay valid.
    """

    def __init__(self, capacity: int):
        if isinstance(capacity, bool) or not isinstance(capacity, (int, np.integer)) or capacity < 1:
            raise ValueError(f"capacity must be a positive integer, got {capacity!r}")
        self.capacity = int(capacity)
        self._entries: list[MemoryEntry] = []
        self._by_id: dict[int, MemoryEntry] = {}
        self._next_id = 0
        self._sorted = False

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, entry_id: int) -> bool:
        return entry_id in self._by_id

    @property
    def entries(self) -> tuple[MemoryEntry, ...]:
        return tuple(self._entries)

    def entry(self, entry_id: int) -> MemoryEntry:
        try:
            return self._by_id[entry_id]
        except KeyError:
            raise ValueError(f"no memory entry with id {entry_id}") from None

    def insert(self, particle_id: int, position, velocity, evaluation: Evaluation,
               iteration: int) -> MemoryEntry:
        """Append one evaluation with a fresh entry id and return the entry."""
        if particle_id < 0:
            raise ValueError(f"particle_id must be non-negative, got {particle_id}")
        pos = as_float_vector(position, name="position").copy()
        vel = as_float_vector(velocity, dim=pos.shape[0], name="velocity").copy()
        pos.setflags(write=False)
        vel.setflags(write=False)
        entry = MemoryEntry(
            entry_id=self._next_id,
            particle_id=int(particle_id),
            position=pos,
            velocity=vel,
            evaluation=evaluation,
            iteration_found=int(iteration),
        )
        self._entries.append(entry)
        self._by_id[entry.entry_id] = entry
        self._next_id += 1
        self._sorted = False
        return entry

    def refresh_ranks(self) -> None:
        """Re-rank every entry jointly; invalidates the sorted order."""
        if not self._entries:
            raise ValueError("memory is empty")
        ranked = rank_cohort([e.evaluation for e in self._entries])
        for entry, annotation in zip(self._entries, ranked):
            entry.ranked = annotation
        self._sorted = False

    def _require_ranked(self) -> None:
        if any(e.ranked is None for e in self._entries):
            raise RuntimeError("refresh ranks before using merit-ordered views")

    def sort_and_truncate(self, protected: frozenset[int] = frozenset()) -> None:
        """Sort by descending merit (ties by ascending entry id) and truncate.

        Entries beyond capacity are dropped unless their id appears in
        ``protected``; survivors keep their sorted relative order.
        """
        if not self._entries:
            raise ValueError("memory is empty")
        self._require_ranked()
        self._entries.sort(key=lambda e: (-e.ranked.merit, e.entry_id))
        if len(self._entries) > self.capacity:
            tail = self._entries[self.capacity:]
            survivors = self._entries[: self.capacity]
            for entry in tail:
                if entry.entry_id in protected:
                    survivors.append(entry)
                else:
                    del self._by_id[entry.entry_id]
            self._entries = survivors
        self._sorted = True

    def _require_sorted(self) -> None:
        if not self._sorted:
            raise RuntimeError("sort the memory before selecting from it")

    def gbest(self) -> MemoryEntry:
        """The single top-merit entry of the sorted memory."""
        if not self._entries:
            raise ValueError("memory is empty")
        self._require_sorted()
        return self._entries[0]

    def select_elite(self, count: int) -> list[MemoryEntry]:
        """The ``count`` top-merit entries (all entries when fewer exist).

        The same particle id may appear multiple times; selection is by
        merit alone.
        """
        if count < 1:
            raise ValueError(f"count must be positive, got {count}")
        if not self._entries:
            raise ValueError("memory is empty")
        self._require_sorted()
        return list(self._entries[:count])

    def front_entries(self) -> list[MemoryEntry]:
        """Feasible rank-1 entries, deduplicated by objective vector.

        Sorted by objective values; among entries with identical
        objectives the lowest entry id is kept.
        """
        self._require_ranked()
        members = [
            e for e in self._entries
            if e.ranked.rank == 1 and e.evaluation.feasible
        ]
        members.sort(key=lambda e: (e.evaluation.objective_tuple(), e.entry_id))
        deduped: list[MemoryEntry] = []
        seen: set[tuple[float, ...]] = set()
        for entry in members:
            key = entry.evaluation.objective_tuple()
            if key not in seen:
                seen.add(key)
                deduped.append(entry)
        return deduped


class PbestTable:
    """Per-particle references to each particle's best memory entry.

    Rows store entry ids, not copies, so the referenced entries must stay
    in memory (the memory's truncation honors that via its protected set).
    """

    def __init__(self, n_particles: int):
        if n_particles < 1:
            raise ValueError(f"n_particles must be positive, got {n_particles}")
        self._n_particles = int(n_particles)
        self._rows: dict[int, int] = {}

    def __len__(self) -> int:
        return len(self._rows)

    def _check_particle(self, particle_id: int) -> None:
        if not 0 <= particle_id < self._n_particles:
            raise ValueError(
                f"particle_id must lie in [0, {self._n_particles}), got {particle_id}"
            )

    def update(self, new_entries, memory: SwarmMemory) -> None:
        """Install any new entry whose merit strictly beats the stored pbest.

        A particle seen for the first time adopts its entry outright.
        Entries are processed in order, so when one iteration carries two
        entries for the same particle the higher-merit one ends up stored.
        """
        for entry in new_entries:
            self._check_particle(entry.particle_id)
            if entry.ranked is None:
                raise RuntimeError("entries must be ranked before pbest updates")
            incumbent_id = self._rows.get(entry.particle_id)
            if incumbent_id is None:
                self._rows[entry.particle_id] = entry.entry_id
                continue
            incumbent = memory.entry(incumbent_id)
            if entry.ranked.merit > incumbent.ranked.merit:
                self._rows[entry.particle_id] = entry.entry_id

    def entry_for(self, particle_id: int, memory: SwarmMemory) -> MemoryEntry:
        self._check_particle(particle_id)
        if particle_id not in self._rows:
            raise ValueError(f"no personal best recorded for particle {particle_id}")
        return memory.entry(self._rows[particle_id])

    def referenced_ids(self) -> frozenset[int]:
        return frozenset(self._rows.values())


def stagnation_step(counter: int, front_changed: bool, particles, problem: Problem, *,
                    threshold: int, n_randomized: int, rng) -> int:
    """Advance the stagnation counter, re-randomizing particles on overflow.

    The counter resets to zero whenever the front changed. Otherwise it
    increments, and once it exceeds ``threshold`` a set of ``n_randomized``
    distinct particles is moved to fresh uniform positions with zero
    velocity (mutating ``particles`` in place) and the counter resets.

    Returns:
        The updated counter value.
    """
    if threshold < 1:
        raise ValueError(f"threshold must be positive, got {threshold}")
    if n_randomized < 1:
        raise ValueError(f"n_randomized must be positive, got {n_randomized}")
    if front_changed:
        return 0
    counter += 1
    if counter <= threshold:
        return counter
    lower = problem.lower_bounds
    upper = problem.upper_bounds
    count = min(n_randomized, len(particles))
    chosen = rng.choice(len(particles), size=count, replace=False)
    for index in chosen:
        particle = particles[index]
        particle.position = lower + rng.random(problem.dimension) * (upper - lower)
        particle.velocity = np.zeros(problem.dimension)
    return 0


class MoEtpso(BaseEstimator):
    """Elitist multi-objective PSO with an archive memory, as an estimator.

    Every hyperparameter is a constructor argument and validation happens
    in :meth:`fit`, which runs the full optimization on a
    :class:`~swarmfront.problems.Problem` and stores the results on
    trailing-underscore attributes.

    Parameters:
        n_particles: Swarm size; also the per-iteration evaluation budget.
        w: Inertia weight on the previous velocity.
        c1: Acceleration weight toward the personal best.
        c2: Acceleration weight toward the global best; c1 + c2 must
            exceed 4 for the constriction factor to exist.
        memory_capacity: Archive size limit; must be at least
            ``n_particles`` so first-iteration personal bests survive.
        stagnation_threshold: Stagnant iterations tolerated before
            particles are re-randomized.
        n_randomized: Particles re-randomized on stagnation; at most
            ``n_particles``.
        max_iterations: Number of swarm iterations to run.
        seed: Seed for the single random generator driving the run.

    Attributes (after fit):
        front_: Final feasible non-dominated front as a FrontSnapshot.
        front_members_: List of (objectives, position) pairs backing ``front_``.
        reports_: One IterationReport per iteration.
        memory_: The final swarm memory.
        pbest_table_: The final personal-best table.
        gbest_: The final top-merit memory entry.
        evaluations_: Total objective evaluations spent.
    """

    def __init__(self, n_particles: int = 100, w: float = 0.7, c1: float = 2.05,
                 c2: float = 2.05, memory_capacity: int = 2000,
                 stagnation_threshold: int = 5, n_randomized: int = 1,
                 max_iterations: int = 100, seed: int = 0):
        self.n_particles = n_particles
        self.w = w
        self.c1 = c1
        self.c2 = c2
        self.memory_capacity = memory_capacity
        self.stagnation_threshold = stagnation_threshold
        self.n_randomized = n_randomized
        self.max_iterations = max_iterations
        self.seed = seed

    @property
    def evaluations_per_iteration(self) -> int:
        return int(self.n_particles)

    def _validate_params(self) -> None:
        check_positive_int(self.n_particles, "n_particles")
        check_positive_int(self.memory_capacity, "memory_capacity")
        check_positive_int(self.stagnation_threshold, "stagnation_threshold")
        check_positive_int(self.n_randomized, "n_randomized")
        check_positive_int(self.max_iterations, "max_iterations")
        if isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer)) or self.seed < 0:
            raise ConfigurationError(f"seed must be a non-negative integer, got {self.seed!r}")
        if self.n_randomized > self.n_particles:
            raise ConfigurationError(
                f"n_randomized ({self.n_randomized}) cannot exceed n_particles ({self.n_particles})"
            )
        if self.memory_capacity < self.n_particles:
            raise ConfigurationError(
                f"memory_capacity ({self.memory_capacity}) must be at least "
                f"n_particles ({self.n_particles})"
            )
        if not np.isfinite(self.w):
            raise ConfigurationError(f"w must be finite, got {self.w!r}")
        try:
            constriction_factor(self.c1, self.c2)
        except ConfigurationError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigurationError(str(exc)) from None

    @staticmethod
    def _evaluate(problem: Problem, position: np.ndarray, iteration: int,
                  particle_id: int) -> Evaluation:
        try:
            evaluation = problem.evaluate(position)
        except Exception as exc:
            raise RuntimeError(
                f"objective evaluation failed at iteration {iteration} "
                f"for particle {particle_id}: {exc}"
            ) from exc
        if not isinstance(evaluation, Evaluation):
            raise RuntimeError(
                f"problem.evaluate must return an Evaluation, got {type(evaluation).__name__}"
            )
        return evaluation

    def fit(self, problem: Problem) -> "MoEtpso":
        """Run the optimizer on ``problem`` and store the results.

        Returns:
            self, with trailing-underscore result attributes populated.
        """
        self._validate_params()
        check_problem(problem)
        rng = np.random.default_rng(self.seed)
        dim = problem.dimension
        lower = np.asarray(problem.lower_bounds, dtype=float)
        upper = np.asarray(problem.upper_bounds, dtype=float)

        particles = [
            ParticleState(
                particle_id=i,
                position=as_float_vector(problem.sample(rng), dim=dim, name="sample"),
                velocity=np.zeros(dim),
            )
            for i in range(self.n_particles)
        ]
        memory = SwarmMemory(self.memory_capacity)
        pbest = PbestTable(self.n_particles)
        counter = 0
        previous_points: tuple | None = None
        reports: list[IterationReport] = []
        evaluations = 0
        gbest_entry: MemoryEntry | None = None

        for iteration in range(1, self.max_iterations + 1):
            new_entries = []
            for particle in particles:
                evaluation = self._evaluate(
                    problem, particle.position, iteration, particle.particle_id
                )
                new_entries.append(
                    memory.insert(
                        particle.particle_id, particle.position, particle.velocity,
                        evaluation, iteration,
                    )
                )
            evaluations += len(particles)

            memory.refresh_ranks()
            memory.sort_and_truncate(protected=pbest.referenced_ids())
            surviving_new = [e for e in new_entries if e.entry_id in memory]
            pbest.update(surviving_new, memory)
            gbest_entry = memory.gbest()

            front = FrontSnapshot.from_points(
                (e.evaluation.objective_tuple() for e in memory.front_entries()), iteration
            )
            changed = previous_points is None or front.points != previous_points
            previous_points = front.points
            reports.append(
                IterationReport(
                    iteration=iteration,
                    front=front,
                    front_changed=changed,
                    gbest_objectives=gbest_entry.evaluation.objective_tuple(),
                    evaluations_used=evaluations,
                )
            )
            if iteration == self.max_iterations:
                break

            elite = memory.select_elite(self.n_particles)
            next_particles = []
            for entry in elite:
                pbest_entry = pbest.entry_for(entry.particle_id, memory)
                velocity = update_velocity(
                    entry.position, entry.velocity, pbest_entry.position,
                    gbest_entry.position,
                    w=self.w, c1=self.c1, c2=self.c2, rng=rng,
                )
                position = update_position(
                    entry.position, velocity, lower, upper, problem.discrete_mask
                )
                next_particles.append(ParticleState(entry.particle_id, position, velocity))
            counter = stagnation_step(
                counter, changed, next_particles, problem,
                threshold=self.stagnation_threshold,
                n_randomized=self.n_randomized, rng=rng,
            )
            particles = next_particles

        self.reports_ = reports
        self.front_ = reports[-1].front
        self.front_members_ = [
            (e.evaluation.objective_tuple(), e.position.copy())
            for e in memory.front_entries()
        ]
        self.memory_ = memory
        self.pbest_table_ = pbest
        self.gbest_ = gbest_entry
        self.evaluations_ = evaluations
        return self
