"""
Phase-based offline heuristics for sampled universal sequences.

Draws are cut into phases of μ draws. In the balanced case the offline server spends
each phase in the U_i that receives the fewest chunks; in the binary case it lives in
U_1 and moves to U_2 only for phases where U_2 gets at most (1−δ₂)·2μ chunks. Inside
the resident subspace it serves the collected subchunks recursively, resuming where
it left off. The result is an upper bound on OPT.
"""
import math
from fractions import Fraction

from .universal import Case


def phase_length(plan):
    """μ for a balanced or binary plan (base-2 logs)."""
    alpha = float(plan.alpha)
    if plan.case is Case.BALANCED:
        n_ell = plan.sizes[plan.ell - 1]
        return max(1, math.ceil(alpha * math.log2(n_ell) ** 2 / math.log2(plan.ell)))
    if plan.case is Case.BINARY:
        delta_1, _ = binary_deltas(plan)
        n1 = plan.sizes[0]
        return max(1, math.ceil(8 * alpha * math.log2(n1) / delta_1))
    raise ValueError(f"No phase length for the {plan.case.value} case")


def binary_deltas(plan):
    n1, n2 = plan.sizes[0], plan.sizes[1]
    if n1 <= 1:
        return 1.0, 1.0
    log_n1 = math.log2(n1)
    delta_1 = min(1.0, max(1 / math.sqrt(float(plan.alpha)), math.log2(n1 / n2)) / log_n1)
    delta_2 = 1 - (1 - delta_1) * math.log2(n2) / log_n1
    return delta_1, delta_2


def _phase_residents(plan, draws, mu):
    """Subspace index occupied during each phase and the per-phase chunk counts."""
    residents, counts = [], []
    _, delta_2 = binary_deltas(plan) if plan.case is Case.BINARY else (None, None)
    for lo in range(0, len(draws), mu):
        phase = draws[lo:lo + mu]
        tally = [0] * plan.ell
        occupied = [0] * plan.ell
        for draw in phase:
            for chunk in draw.chunks:
                tally[chunk.index] += 1
                if chunk.forbidden():
                    occupied[chunk.index] += 1
        counts.append(tally)

        if plan.case is Case.BALANCED:
            residents.append(min(range(plan.ell), key=lambda i: (tally[i], i)))
            continue
        small = plan.children[1]
        if small.is_singleton:
            go = occupied[1] == 0
        else:
            go = tally[1] <= (1 - delta_2) * 2 * mu
        residents.append(1 if go else 0)
    return residents, counts


def _all_singletons(plan):
    """Children are single leaves, so U is a uniform metric."""
    return all(child.is_singleton for child in plan.children)


def _serve(plan, draws, start, stats):
    """Positions, one per forbidden point of `draws`, for a server confined to U."""
    if not draws:
        return []
    if plan.case is Case.UNIFORM or _all_singletons(plan):
        return _belady(plan, draws, start)
    if plan.case in (Case.BALANCED, Case.BINARY):
        mu = phase_length(plan)
        if len(draws) >= mu:
            return _phases(plan, draws, start, mu, stats)
    return _greedy(plan, draws, start)


def _phases(plan, draws, start, mu, stats):
    residents, counts = _phase_residents(plan, draws, mu)
    if stats is not None:
        stats.update(mu=mu, phases=len(residents), phase_counts=counts, residents=residents)

    # collect the subchunks each subspace serves, with their global request offsets
    queued = [[] for _ in range(plan.ell)]
    slots = [[] for _ in range(plan.ell)]
    offset = 0
    for k, draw in enumerate(draws):
        resident = residents[k // mu]
        for chunk in draw.chunks:
            size = len(chunk.forbidden())
            if chunk.index == resident and size:
                if not chunk.sub_draws:
                    raise ValueError("Resident singleton subspace received a request")
                queued[resident].extend(chunk.sub_draws)
                slots[resident].extend(range(offset, offset + size))
            offset += size

    assigned = {}
    entry = [child.start for child in plan.children]
    home = plan.child_of(start)
    if home is not None:
        entry[home] = start
    for i, child in enumerate(plan.children):
        if queued[i]:
            for slot, p in zip(slots[i], _serve(child, queued[i], entry[i], None)):
                assigned[slot] = p

    positions = []
    last = list(entry)
    current = start
    offset = 0
    for k, draw in enumerate(draws):
        resident = residents[k // mu]
        if k % mu == 0 and plan.child_of(current) != resident:
            current = last[resident]
        for chunk in draw.chunks:
            for _ in chunk.forbidden():
                current = assigned.get(offset, current)
                last[resident] = current
                positions.append(current)
                offset += 1
    return positions


def _belady(plan, draws, start):
    forbidden = [p for draw in draws for p in draw.forbidden()]
    allowed = set(plan.leaves)
    current = start
    positions = []
    for j, p in enumerate(forbidden):
        if p == current:
            next_hit = {}
            for q in forbidden[j + 1:]:
                if q in allowed and q not in next_hit and q != p:
                    next_hit[q] = len(next_hit)
                if len(next_hit) == len(allowed) - 1:
                    break
            choices = [q for q in plan.leaves if q != p]
            current = min(choices, key=lambda q: (-next_hit.get(q, math.inf), q))
        positions.append(current)
    return positions


def _greedy(plan, draws, start):
    space = plan.space
    outside = set(plan.outside().points)
    current = start
    positions = []
    for p in (q for draw in draws for q in draw.forbidden()):
        if p == current:
            current, _ = space.nearest_allowed(current, outside | {p})
        positions.append(current)
    return positions


def offline_phase_heuristic(plan, draws, start=None):
    """
    Heuristic offline cost (an OPT upper bound) on draws ρ_1…ρ_h from D together
    with the trajectory, one point per request of the flattened draws.
    """
    if plan.case not in (Case.BALANCED, Case.BINARY):
        raise ValueError(f"Phase heuristic applies to balanced or binary plans, got {plan.case.value}")
    mu = phase_length(plan)
    if len(draws) < mu:
        raise ValueError(f"Need h ≥ μ = {mu} draws, got {len(draws)}")

    start = plan.start if start is None else start
    stats = {}
    if _all_singletons(plan):
        trajectory = _belady(plan, list(draws), start)
        stats.update(mu=mu, phases=0, phase_counts=[], residents=[])
    else:
        trajectory = _phases(plan, list(draws), start, mu, stats)

    space = plan.space
    switching = local = Fraction(0)
    previous = start
    for p in trajectory:
        step = space.distance(previous, p)
        if plan.child_of(previous) != plan.child_of(p):
            switching += step
        else:
            local += step
        previous = p

    result = {
        "cost": switching + local,
        "switching": switching,
        "local": local,
        "trajectory": trajectory,
        "case": plan.case.value,
        "method": "heuristic",
        **stats,
    }
    print(f"📊 Phase heuristic ({plan.case.value}): μ={mu}, phases={stats['phases']}, cost={result['cost']}")
    return result
