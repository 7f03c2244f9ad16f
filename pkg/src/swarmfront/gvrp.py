"""Green vehicle routing benchmark on a single chain of nodes.

The road is a line of ``D+1`` nodes (0 through D) with a known distance for
each consecutive segment. A plan chooses ``N`` intermediate stop indices and
``N+1`` leg speeds. Stops pick up or drop off load, and the two objectives
trade travel time (z1, faster legs win) against emissions (z2, which grow
with both speed and the load carried on each leg). A single constraint flags
plans whose load ever leaves ``[0, capacity]``.

Stop indices are not optimized directly. The genome carries ``N`` positive
increments bounded inside ``(0, D/N)``; their cumulative sums are rescaled
so the last stop lands exactly on node ``D-1`` and each partial sum is
rounded up to an integer node. The box bounds on the increments therefore
enforce the stop-ordering constraint structurally, and any optimizer that
clamps to the box produces decodable plans.

All functions here are pure; instances are immutable after construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, InstanceFormatError
from .pareto import Evaluation
from .problems import Problem
from .validation import as_float_vector

__all__ = [
    "GvrpInstance",
    "GvrpGenome",
    "Route",
    "box_epsilon",
    "genome_bounds",
    "vector_to_genome",
    "genome_to_vector",
    "decode",
    "load_profile",
    "travel_time",
    "emissions",
    "capacity_constraint",
    "evaluate",
    "sample_genome",
    "generate_instance",
    "write_instance",
    "read_instance",
    "GvrpProblem",
]

EMISSION_SCALE = 1e-10

_INSTANCE_KEYS = (
    "d_total",
    "n_stops",
    "capacity",
    "v_min",
    "v_max",
    "initial_load",
    "segment_distances",
    "load_increments",
)


@dataclass(frozen=True, eq=False)
class GvrpInstance:
    """One benchmark instance: road geometry, loads, capacity, speed range.

    Attributes:
        d_total: Index D of the final node; nodes run 0..D.
        n_stops: Number N of intermediate stops a plan must place.
        capacity: Maximum load Q the vehicle may carry.
        v_min: Lowest allowed leg speed, strictly positive.
        v_max: Highest allowed leg speed.
        initial_load: Load carried when leaving node 0.
        segment_distances: Distance of each consecutive segment, length D.
        load_increments: Load change applied on arrival at each node,
            length D+1; only visited stops apply their increment.
    """

    d_total: int
    n_stops: int
    capacity: float
    v_min: float
    v_max: float
    initial_load: float
    segment_distances: np.ndarray
    load_increments: np.ndarray

    def __post_init__(self) -> None:
        if isinstance(self.d_total, bool) or not isinstance(self.d_total, (int, np.integer)):
            raise ValueError(f"d_total must be an integer, got {self.d_total!r}")
        if isinstance(self.n_stops, bool) or not isinstance(self.n_stops, (int, np.integer)):
            raise ValueError(f"n_stops must be an integer, got {self.n_stops!r}")
        object.__setattr__(self, "d_total", int(self.d_total))
        object.__setattr__(self, "n_stops", int(self.n_stops))
        if self.d_total < 1:
            raise ValueError(f"d_total must be positive, got {self.d_total}")
        if self.n_stops < 1:
            raise ValueError(f"n_stops must be positive, got {self.n_stops}")
        for name in ("capacity", "v_min", "v_max", "initial_load"):
            value = getattr(self, name)
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise ValueError(f"{name} must be a real number, got {value!r}") from None
            if not np.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if self.capacity <= 0:
            raise ValueError(f"capacity must be positive, got {self.capacity}")
        if self.v_min <= 0:
            raise ValueError(f"v_min must be positive, got {self.v_min}")
        if not self.v_min < self.v_max:
            raise ValueError(
                f"v_min must be strictly below v_max, got {self.v_min} and {self.v_max}"
            )
        if not 0 <= self.initial_load <= self.capacity:
            raise ValueError(
                f"initial_load must lie in [0, capacity], got {self.initial_load}"
            )
        distances = as_float_vector(
            self.segment_distances, dim=self.d_total, name="segment_distances"
        ).copy()
        if not np.all(distances > 0):
            raise ValueError("segment_distances must all be positive")
        increments = as_float_vector(
            self.load_increments, dim=self.d_total + 1, name="load_increments"
        ).copy()
        distances.setflags(write=False)
        increments.setflags(write=False)
        object.__setattr__(self, "segment_distances", distances)
        object.__setattr__(self, "load_increments", increments)
        prefix = np.concatenate(([0.0], np.cumsum(distances)))
        prefix.setflags(write=False)
        object.__setattr__(self, "_distance_prefix", prefix)

    @property
    def distance_prefix(self) -> np.ndarray:
        """Cumulative distance from node 0 to each node, length D+1."""
        return self._distance_prefix

    def __eq__(self, other) -> bool:
        if not isinstance(other, GvrpInstance):
            return NotImplemented
        return (
            self.d_total == other.d_total
            and self.n_stops == other.n_stops
            and self.capacity == other.capacity
            and self.v_min == other.v_min
            and self.v_max == other.v_max
            and self.initial_load == other.initial_load
            and np.array_equal(self.segment_distances, other.segment_distances)
            and np.array_equal(self.load_increments, other.load_increments)
        )


@dataclass(frozen=True, eq=False)
class GvrpGenome:
    """Decision variables of one plan: stop increments plus leg speeds."""

    increments: np.ndarray
    velocities: np.ndarray

    def __post_init__(self) -> None:
        increments = as_float_vector(self.increments, name="increments").copy()
        velocities = as_float_vector(
            self.velocities, dim=increments.shape[0] + 1, name="velocities"
        ).copy()
        if not np.all(increments > 0):
            raise ValueError("increments must all be strictly positive")
        increments.setflags(write=False)
        velocities.setflags(write=False)
        object.__setattr__(self, "increments", increments)
        object.__setattr__(self, "velocities", velocities)

    @property
    def n_stops(self) -> int:
        return int(self.increments.shape[0])

    def __eq__(self, other) -> bool:
        if not isinstance(other, GvrpGenome):
            return NotImplemented
        return np.array_equal(self.increments, other.increments) and np.array_equal(
            self.velocities, other.velocities
        )


@dataclass(frozen=True)
class Route:
    """A decoded plan: visited node indices and the speed of every leg."""

    stops: tuple[int, ...]
    velocities: np.ndarray

    def __post_init__(self) -> None:
        stops = tuple(int(s) for s in self.stops)
        if len(stops) < 2:
            raise ValueError("a route needs at least a start and an end stop")
        if any(b < a for a, b in zip(stops, stops[1:])):
            raise ValueError("stop indices must be non-decreasing")
        velocities = as_float_vector(
            self.velocities, dim=len(stops) - 1, name="velocities"
        ).copy()
        velocities.setflags(write=False)
        object.__setattr__(self, "stops", stops)
        object.__setattr__(self, "velocities", velocities)


def box_epsilon(instance: GvrpInstance) -> float:
    """Margin keeping the increment interval (0, D/N) numerically open."""
    return 1e-6 * (instance.d_total / instance.n_stops)


def genome_bounds(instance: GvrpInstance) -> tuple[np.ndarray, np.ndarray]:
    """Box bounds for the flat genome vector, as (lower, upper) arrays.

    The first N dimensions are the stop increments in
    ``[eps, D/N - eps]``; the remaining N+1 are leg speeds in
    ``[v_min, v_max]``.
    """
    n = instance.n_stops
    eps = box_epsilon(instance)
    step = instance.d_total / n
    lower = np.concatenate((np.full(n, eps), np.full(n + 1, instance.v_min)))
    upper = np.concatenate((np.full(n, step - eps), np.full(n + 1, instance.v_max)))
    return lower, upper


def vector_to_genome(vector, n_stops: int) -> GvrpGenome:
    """Split a flat decision vector of length 2N+1 into a genome."""
    vec = as_float_vector(vector, dim=2 * n_stops + 1, name="decision vector")
    return GvrpGenome(increments=vec[:n_stops], velocities=vec[n_stops:])


def genome_to_vector(genome: GvrpGenome) -> np.ndarray:
    """Flatten a genome back into one decision vector."""
    return np.concatenate((genome.increments, genome.velocities))


def decode(genome: GvrpGenome, instance: GvrpInstance) -> Route:
    """Turn increment sums into integer stop indices.

    The cumulative sums of the increments are rescaled by
    ``(D - 1) / last_sum`` and rounded up, so the final intermediate stop
    is exactly node ``D - 1`` (the rescaling makes its product an integer
    already). The route always starts at node 0 and ends at node D.

    Raises:
        ValueError: If the genome's stop count does not match the
            instance, or the increments sum to zero.
    """
    if genome.n_stops != instance.n_stops:
        raise ValueError(
            f"genome has {genome.n_stops} stops but instance expects {instance.n_stops}"
        )
    sums = np.cumsum(genome.increments)
    if sums[-1] <= 0:
        raise ValueError("increment sums must be positive to place stops")
    scale = (instance.d_total - 1) / sums[-1]
    indices = np.ceil(sums * scale).astype(np.int64)
    # The last index equals D-1 by construction; assign it directly so float
    # noise in ceil can never push it to D.
    indices[-1] = instance.d_total - 1
    return Route(
        stops=(0, *indices.tolist(), instance.d_total),
        velocities=genome.velocities,
    )


def _check_route(route: Route, instance: GvrpInstance) -> None:
    if route.stops[0] != 0 or route.stops[-1] != instance.d_total:
        raise ValueError(
            f"route must start at node 0 and end at node {instance.d_total}, "
            f"got {route.stops[0]}..{route.stops[-1]}"
        )
    if route.stops[-2] > instance.d_total:
        raise ValueError("route visits a node beyond the instance")


def load_profile(route: Route, instance: GvrpInstance) -> np.ndarray:
    """Load carried when departing each stop of the route.

    The vehicle leaves node 0 with ``initial_load``; every later listed
    stop (the destination included) applies that node's load increment.
    Nodes the route passes without stopping contribute nothing. A node
    listed twice applies its increment twice.
    """
    _check_route(route, instance)
    loads = np.empty(len(route.stops))
    loads[0] = instance.initial_load
    for i, stop in enumerate(route.stops[1:], start=1):
        loads[i] = loads[i - 1] + instance.load_increments[stop]
    return loads


def travel_time(route: Route, instance: GvrpInstance) -> float:
    """Total time z1: each leg's distance divided by its speed.

    Raises:
        ValueError: If any leg speed is zero or negative.
    """
    _check_route(route, instance)
    if not np.all(route.velocities > 0):
        raise ValueError("leg velocities must be strictly positive")
    prefix = instance.distance_prefix
    stops = np.asarray(route.stops, dtype=np.int64)
    leg_distances = prefix[stops[1:]] - prefix[stops[:-1]]
    return float(np.sum(leg_distances / route.velocities))


def emissions(route: Route, instance: GvrpInstance) -> float:
    """Emission proxy z2: distance times departing load times a speed factor.

    Each leg contributes ``d * L * (0.05 v + 1)`` where L is the load when
    leaving the leg's departure stop; the total is scaled by 1e-10.
    """
    profile = load_profile(route, instance)
    prefix = instance.distance_prefix
    stops = np.asarray(route.stops, dtype=np.int64)
    leg_distances = prefix[stops[1:]] - prefix[stops[:-1]]
    departures = profile[:-1]
    return float(
        np.sum(leg_distances * departures * (0.05 * route.velocities + 1.0)) * EMISSION_SCALE
    )


def capacity_constraint(route: Route, instance: GvrpInstance) -> int:
    """1 when the load profile ever exceeds capacity or drops below zero."""
    profile = load_profile(route, instance)
    over = bool(np.any(profile > instance.capacity) or np.any(profile < 0))
    return int(over)


def evaluate(genome: GvrpGenome, instance: GvrpInstance) -> Evaluation:
    """Decode a genome and score it: objectives (z1, z2), violations c."""
    route = decode(genome, instance)
    z1 = travel_time(route, instance)
    z2 = emissions(route, instance)
    return Evaluation(
        objectives=np.array([z1, z2]),
        violations=capacity_constraint(route, instance),
    )


def sample_genome(instance: GvrpInstance, rng) -> GvrpGenome:
    """Draw one genome uniformly inside the box bounds."""
    lower, upper = genome_bounds(instance)
    return vector_to_genome(rng.uniform(lower, upper), instance.n_stops)


def generate_instance(seed: int, d_total: int, n_stops: int, capacity: float,
                      v_min: float, v_max: float) -> GvrpInstance:
    """Build a reproducible instance from a seed and shape parameters.

    Segment distances are uniform in [1, 10], load increments are integers
    uniform in [-10, 10], and the initial load is half the capacity so
    both pick-ups and drop-offs have room before hitting the constraint.

    Raises:
        ConfigurationError: If the shape parameters are invalid.
    """
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or seed < 0:
        raise ConfigurationError(f"seed must be a non-negative integer, got {seed!r}")
    for name, value in (("d_total", d_total), ("n_stops", n_stops)):
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
            raise ConfigurationError(f"{name} must be a positive integer, got {value!r}")
    if d_total < n_stops:
        raise ConfigurationError(
            f"d_total ({d_total}) must be at least n_stops ({n_stops})"
        )
    try:
        capacity, v_min, v_max = float(capacity), float(v_min), float(v_max)
    except (TypeError, ValueError):
        raise ConfigurationError("capacity, v_min, and v_max must be real numbers") from None
    if capacity <= 0:
        raise ConfigurationError(f"capacity must be positive, got {capacity}")
    if not 0 < v_min < v_max:
        raise ConfigurationError(
            f"velocities must satisfy 0 < v_min < v_max, got {v_min} and {v_max}"
        )
    rng = np.random.default_rng(int(seed))
    return GvrpInstance(
        d_total=int(d_total),
        n_stops=int(n_stops),
        capacity=capacity,
        v_min=v_min,
        v_max=v_max,
        initial_load=capacity / 2.0,
        segment_distances=rng.uniform(1.0, 10.0, int(d_total)),
        load_increments=rng.integers(-10, 11, int(d_total) + 1).astype(float),
    )


def write_instance(instance: GvrpInstance, path) -> None:
    """Serialize an instance to a JSON file with full float precision."""
    payload = {
        "d_total": instance.d_total,
        "n_stops": instance.n_stops,
        "capacity": instance.capacity,
        "v_min": instance.v_min,
        "v_max": instance.v_max,
        "initial_load": instance.initial_load,
        "segment_distances": [float(d) for d in instance.segment_distances],
        "load_increments": [float(l) for l in instance.load_increments],
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2)
        handle.write("\n")


def read_instance(path) -> GvrpInstance:
    """Parse and validate an instance file.

    Raises:
        InstanceFormatError: On malformed JSON (naming line and column)
            or any field that fails validation (naming the field).
    """
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(
            f"invalid instance file {path}: line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    if not isinstance(payload, dict):
        raise InstanceFormatError(f"instance file {path} must contain a JSON object")
    missing = [key for key in _INSTANCE_KEYS if key not in payload]
    if missing:
        raise InstanceFormatError(f"instance file {path} is missing fields: {', '.join(missing)}")
    unknown = [key for key in payload if key not in _INSTANCE_KEYS]
    if unknown:
        raise InstanceFormatError(f"instance file {path} has unknown fields: {', '.join(unknown)}")
    try:
        return GvrpInstance(**{key: payload[key] for key in _INSTANCE_KEYS})
    except ValueError as exc:
        raise InstanceFormatError(f"invalid instance file {path}: {exc}") from None


class GvrpProblem(Problem):
    """Adapter exposing one instance through the optimizer interface."""

    def __init__(self, instance: GvrpInstance):
        self.instance = instance
        self._lower, self._upper = genome_bounds(instance)
        self._bounds = np.column_stack((self._lower, self._upper))
        self._bounds.setflags(write=False)

    @property
    def dimension(self) -> int:
        return 2 * self.instance.n_stops + 1

    @property
    def objective_count(self) -> int:
        return 2

    @property
    def bounds(self) -> np.ndarray:
        return self._bounds

    def evaluate(self, position) -> Evaluation:
        genome = vector_to_genome(position, self.instance.n_stops)
        return evaluate(genome, self.instance)

    def sample(self, rng) -> np.ndarray:
        return genome_to_vector(sample_genome(self.instance, rng))
