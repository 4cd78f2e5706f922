"""
Combining subchunks into chunks.

With C the expected total subchunk size, chunk i ends at the first subchunk index h
after which the expected remaining size drops to C − i·c_avg, and its size is the
expected size of its subchunks given everything before it. Two ways to evaluate the
expectation: `rollout` takes an estimator of the expected remaining size after h
subchunks (and, optionally, of the expected remaining size at the next boundary);
`greedy` just accumulates realized sizes until c_avg is reached.
"""
from enum import Enum
from fractions import Fraction
from math import floor

from ..requests.sequence import ChunkedSeq


class Mode(str, Enum):
    GREEDY = "greedy"
    ROLLOUT = "rollout"


def _exact(value):
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    return Fraction(value).limit_denominator(10 ** 6)


def realized_remaining(sub):
    """Exact suffix sums of realized sizes (the expectation of a deterministic sequence)."""
    sizes = [c.size for c in sub.chunks]
    suffix = [Fraction(0)] * (len(sizes) + 1)
    for h in range(len(sizes) - 1, -1, -1):
        suffix[h] = suffix[h + 1] + sizes[h]
    return lambda h: suffix[h]


def _emit(sub, groups, sizes, mode):
    out = ChunkedSeq(
        requests=list(sub.requests),
        witness=list(sub.witness) if sub.witness is not None else None,
        meta=dict(sub.meta),
        level=sub.level,
        unit=sub.unit,
        mode=mode,
    )
    for (lo, hi), size in zip(groups, sizes):
        tags = []
        for k in range(lo, hi):
            if sub.chunks[k].tag not in tags:
                tags.append(sub.chunks[k].tag)
        start = sub.chunks[lo].start
        stop = sub.chunks[hi - 1].stop
        out.chunks.append(type(sub.chunks[lo])(start, stop, size, "+".join(tags)))
    return out


def _greedy_groups(sub, c_avg, c_max):
    groups, sizes = [], []
    lo, total = 0, Fraction(0)
    for k, chunk in enumerate(sub.chunks):
        total += chunk.size
        if total >= c_avg:
            groups.append((lo, k + 1))
            sizes.append(total)
            lo, total = k + 1, Fraction(0)
    if lo < len(sub.chunks):
        if groups and total < c_avg - c_max and sizes[-1] + total <= c_avg + c_max:
            prev_lo, _ = groups.pop()
            sizes[-1] += total
            groups.append((prev_lo, len(sub.chunks)))
        else:
            groups.append((lo, len(sub.chunks)))
            sizes.append(total)
    return groups, sizes


def _rollout_groups(sub, c_avg, remaining, boundary=None):
    m_sub = len(sub.chunks)
    estimates = {}

    def at(h):
        if h >= m_sub:
            return Fraction(0)
        if h not in estimates:
            estimates[h] = _exact(remaining(h))
        return estimates[h]

    C = at(0)
    m = floor(C / c_avg)
    if m == 0:
        return [(0, m_sub)], [C]

    bounds = [0]
    sizes = []
    for i in range(1, m + 1):
        target = C - i * c_avg
        h = bounds[-1] + 1
        while h < m_sub and at(h) > target:
            h += 1
        start = bounds[-1]
        reached = _exact(boundary(start, target)) if boundary is not None else at(h)
        sizes.append(at(start) - reached)
        bounds.append(min(h, m_sub))
        if bounds[-1] == m_sub:
            break
    bounds[-1] = m_sub
    groups = [(bounds[k], bounds[k + 1]) for k in range(len(bounds) - 1) if bounds[k] < bounds[k + 1]]
    return groups, sizes[:len(groups)]


def combine_subchunks(sub, c_avg, c_max, mode=Mode.ROLLOUT, remaining=None, rollouts=256, boundary=None):
    """
    Regroup subchunks into chunks. The concatenated requests are unchanged; only the
    boundaries and sizes are new. `remaining(h)` estimates the expected size of the
    subchunks after the first h (rollout mode). `boundary(h, target)` estimates, given
    the first h subchunks, the expected remaining size once it first drops to `target`;
    without it the estimate at the boundary actually reached is used.
    """
    mode = Mode(mode)
    c_avg, c_max = _exact(c_avg), _exact(c_max)
    if c_max > c_avg:
        raise ValueError(f"c̃_max = {c_max} must not exceed c_avg = {c_avg}")
    for chunk in sub.chunks:
        if chunk.size is None or not 0 <= chunk.size <= c_max:
            raise ValueError(f"Subchunk size {chunk.size} outside [0, {c_max}]")
    if not sub.chunks:
        return _emit(sub, [], [], mode.value)

    if mode is Mode.GREEDY:
        groups, sizes = _greedy_groups(sub, c_avg, c_max)
    else:
        if rollouts <= 0:
            raise ValueError("Rollout mode needs a positive rollout budget")
        if remaining is None:
            raise ValueError("Rollout mode needs an estimator of the expected remaining size")
        groups, sizes = _rollout_groups(sub, c_avg, remaining, boundary)
    return _emit(sub, groups, sizes, mode.value)
