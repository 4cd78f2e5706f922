"""
Exact offline optimum by dynamic programming over (request index × candidate point).

An optimal trajectory only ever stands on the start point or on points admissible for
the current request, so the candidates of step i are the admissible points of ρ[i].
"""
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..requests.request_set import InfeasibleRequestError, Polarity, admissible, members
from ..requests.sequence import RequestSeq


class BudgetExceededError(RuntimeError):
    """The DP would evaluate more transitions than the configured budget."""


@dataclass
class OfflineResult:
    cost: Fraction
    trajectory: list = field(default_factory=list)
    method: str = "dp"
    transitions: int = 0


# OUT-polarity sequences on spaces up to this size use the vectorized DP
MATRIX_LIMIT = 4096


def _requests(seq):
    return seq.requests if isinstance(seq, RequestSeq) else list(seq)


def opt_cost_dp(space, seq, start=None, budget=50_000_000):
    """Exact c_opt(ρ) from `start` (default s) with a replayable witness trajectory."""
    requests = _requests(seq)
    start = space.s if start is None else start
    if not requests:
        return OfflineResult(Fraction(0), [])

    if all(r.polarity is Polarity.OUT for r in requests) and space.point_count <= MATRIX_LIMIT:
        matrix = integral_distance_matrix(space)
        if matrix is not None:
            return _matrix_dp(space, requests, start, matrix, budget)
    return _loop_dp(space, requests, start, budget)


def _loop_dp(space, requests, start, budget):
    frontier = {start: Fraction(0)}
    pointers = []
    spent = 0

    for i, request in enumerate(requests):
        candidates = admissible(space, request)
        if not candidates:
            raise InfeasibleRequestError(f"Request {i} admits no point")
        spent += len(frontier) * len(candidates)
        if spent > budget:
            raise BudgetExceededError(f"DP needs more than {budget} transitions (at request {i})")

        previous = sorted(frontier)
        step, back = {}, {}
        for q in candidates:
            best, arg = None, None
            for p in previous:
                value = frontier[p] + space.distance(p, q)
                if best is None or value < best:
                    best, arg = value, p
            step[q] = best
            back[q] = arg
        pointers.append(back)
        frontier = step

    end = min(frontier, key=lambda q: (frontier[q], q))
    return OfflineResult(frontier[end], _backtrack(pointers, end), "dp", spent)


def _backtrack(pointers, end):
    trajectory = [end]
    for back in reversed(pointers[1:]):
        trajectory.append(back[trajectory[-1]])
    trajectory.reverse()
    return trajectory


def integral_distance_matrix(space):
    """All-pairs distances as an int64 matrix, or None when some distance is fractional."""
    pts = space.points()
    n = len(pts)
    matrix = np.zeros((n, n), dtype=np.int64)
    for a in range(n):
        for b in range(a + 1, n):
            d = space.distance(pts[a], pts[b])
            if Fraction(d).denominator != 1:
                return None
            matrix[a, b] = matrix[b, a] = int(d)
    return matrix


def _matrix_dp(space, requests, start, matrix, budget):
    pts = space.points()
    index = {p: k for k, p in enumerate(pts)}
    n = len(pts)
    unreachable = np.iinfo(np.int64).max // 4
    frontier = np.full(n, unreachable, dtype=np.int64)
    frontier[index[start]] = 0
    pointers = []
    spent = 0
    columns = np.arange(n)

    for i, request in enumerate(requests):
        spent += n * n
        if spent > budget:
            raise BudgetExceededError(f"DP needs more than {budget} transitions (at request {i})")
        blocked = np.zeros(n, dtype=bool)
        blocked[[index[p] for p in members(space, request)]] = True
        if blocked.all():
            raise InfeasibleRequestError(f"Request {i} forbids every point")

        totals = frontier[:, None] + matrix
        back = totals.argmin(axis=0)
        frontier = totals[back, columns]
        frontier[blocked] = unreachable
        pointers.append(back)

    end = int(frontier.argmin())
    path = [end]
    for back in reversed(pointers[1:]):
        path.append(int(back[path[-1]]))
    path.reverse()
    return OfflineResult(Fraction(int(frontier[end])), [pts[k] for k in path], "dp-matrix", spent)


def opt_cost_mts(space, costs, start=None, budget=50_000_000):
    """Exact MTS optimum: movement plus service, ∞ entries forbidding occupancy."""
    start = space.s if start is None else start
    pts = space.points()
    frontier = {start: Fraction(0)}
    pointers = []
    spent = 0

    for i, vector in enumerate(costs):
        spent += len(frontier) * len(pts)
        if spent > budget:
            raise BudgetExceededError(f"MTS DP needs more than {budget} transitions (at step {i})")
        previous = sorted(frontier)
        step, back = {}, {}
        for q in pts:
            service = vector.get(q, 0)
            if service == math.inf:
                continue
            best, arg = None, None
            for p in previous:
                value = frontier[p] + space.distance(p, q)
                if best is None or value < best:
                    best, arg = value, p
            step[q] = best + Fraction(service)
            back[q] = arg
        if not step:
            raise InfeasibleRequestError(f"Task {i} has infinite cost everywhere")
        pointers.append(back)
        frontier = step

    if not pointers:
        return OfflineResult(Fraction(0), [])
    end = min(frontier, key=lambda q: (frontier[q], q))
    return OfflineResult(frontier[end], _backtrack(pointers, end), "mts-dp", spent)
