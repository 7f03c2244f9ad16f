"""Brute-force reference implementations used to cross-check the library.

Everything here is deliberately written as plain loops over plain tuples
so the logic can be checked by eye, independent of the vectorized code
under test. Only the Monte-Carlo area estimate uses numpy, for sample
throughput, and it still takes a different algorithmic route (point
counting) than the implementation it checks (staircase sweep).
"""

import math

import numpy as np


def oracle_dominates(a, b) -> bool:
    no_worse = all(x <= y for x, y in zip(a, b))
    strictly_better = any(x < y for x, y in zip(a, b))
    return no_worse and strictly_better


def _pairwise_dominance(vectors):
    n = len(vectors)
    beats = [[False] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i != j and oracle_dominates(vectors[i], vectors[j]):
                beats[i][j] = True
    return beats


def _peel(vectors, start_rank=1):
    """Repeatedly extract the members nobody in the pool dominates."""
    beats = _pairwise_dominance(vectors)
    remaining = list(range(len(vectors)))
    ranks = [0] * len(vectors)
    rank = start_rank
    while remaining:
        front = [
            i for i in remaining
            if not any(beats[j][i] for j in remaining if j != i)
        ]
        for i in front:
            ranks[i] = rank
        remaining = [i for i in remaining if i not in front]
        rank += 1
    return ranks


def oracle_peel_ranks(vectors):
    """Unconstrained non-dominated sorting by repeated peeling."""
    return _peel([tuple(v) for v in vectors])


def oracle_constrained_ranks(vectors, violations):
    """Feasible members peel first; infeasible groups follow by violation count."""
    vectors = [tuple(v) for v in vectors]
    ranks = [0] * len(vectors)
    offset = 0
    feasible = [i for i, v in enumerate(violations) if v == 0]
    if feasible:
        sub = _peel([vectors[i] for i in feasible])
        for index, rank in zip(feasible, sub):
            ranks[index] = rank
        offset = max(sub)
    for count in sorted({v for v in violations if v > 0}):
        group = [i for i, v in enumerate(violations) if v == count]
        sub = _peel([vectors[i] for i in group])
        for index, rank in zip(group, sub):
            ranks[index] = offset + rank
        offset += max(sub)
    return ranks


def oracle_log_normalize(value, minimum, maximum) -> float:
    clamped = max(value, minimum)
    return (math.log(maximum) - math.log(clamped)) / (
        math.log(maximum) - math.log(minimum)
    )


def oracle_dominated_area(points, minimum, maximum, samples, rng) -> float:
    """Monte-Carlo estimate of the normalized area a 2-D front dominates.

    A uniform sample of the unit square counts as covered when some front
    point, normalized by the hand-written log formula above, is at least
    as good in both coordinates.
    """
    normalized = [
        (
            oracle_log_normalize(p[0], minimum[0], maximum[0]),
            oracle_log_normalize(p[1], minimum[1], maximum[1]),
        )
        for p in points
    ]
    draws = rng.random((samples, 2))
    covered = np.zeros(samples, dtype=bool)
    for first, second in normalized:
        covered |= (draws[:, 0] <= first) & (draws[:, 1] <= second)
    return float(covered.mean())
