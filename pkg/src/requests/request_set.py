"""
Symbolic request sets.

A set is an immutable DAG of nodes (explicit points, copy-prefixed lifts, unions)
plus a polarity. Membership and nearest-point queries follow the recursive
structure of the space, so exponentially large sets are never enumerated.
"""
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from ..metrics.diamond import CycleSpace
from ..metrics.hst import HstSpace


class Polarity(Enum):
    IN = "IN"      # the server must be inside the set
    OUT = "OUT"    # the server must be outside the set


class InfeasibleRequestError(ValueError):
    """Request leaves no admissible point in the space."""


# --- nodes -------------------------------------------------------------------------

@dataclass(frozen=True)
class Points:
    points: frozenset = frozenset()


@dataclass(frozen=True)
class Lift:
    selector: tuple
    inner: object


@dataclass(frozen=True)
class Union:
    parts: tuple


EMPTY = Points(frozenset())


@dataclass(frozen=True)
class RequestSet:
    node: object = EMPTY
    polarity: Polarity = Polarity.IN

    @property
    def is_out(self):
        return self.polarity is Polarity.OUT

    def with_polarity(self, polarity):
        return RequestSet(self.node, polarity)


def points(*addrs, polarity=Polarity.IN):
    return RequestSet(Points(frozenset(addrs)), polarity)


def singleton(addr, polarity=Polarity.IN):
    return points(addr, polarity=polarity)


def empty(polarity=Polarity.IN):
    return RequestSet(EMPTY, polarity)


def lift(sel, request):
    """Place `request` (child-level set) inside copy `sel`."""
    inner = request.node if isinstance(request, RequestSet) else request
    polarity = request.polarity if isinstance(request, RequestSet) else Polarity.IN
    return RequestSet(Lift(tuple(sel), inner), polarity)


def union(*requests):
    parts = []
    for request in requests:
        node = request.node if isinstance(request, RequestSet) else request
        if node == EMPTY:
            continue
        if isinstance(node, Union):
            parts.extend(node.parts)
        else:
            parts.append(node)
    polarity = requests[0].polarity if requests and isinstance(requests[0], RequestSet) else Polarity.IN
    if not parts:
        return RequestSet(EMPTY, polarity)
    if len(parts) == 1:
        return RequestSet(parts[0], polarity)
    return RequestSet(Union(tuple(parts)), polarity)


# --- membership --------------------------------------------------------------------

def _node(request):
    return request.node if isinstance(request, RequestSet) else request


def contains(space, request, p):
    """Polarity-free membership of canonical point p."""
    return _contains(space, _node(request), p)


def _contains(space, node, p):
    if isinstance(node, Points):
        return p in node.points
    if isinstance(node, Union):
        return any(_contains(space, part, p) for part in node.parts)
    if isinstance(node, Lift):
        if not isinstance(space, CycleSpace):
            raise ValueError(f"Copy-prefixed atom on a {space.kind} space")
        inner = space.localize(p, node.selector)
        if inner is None:
            return False
        return _contains(space.segment(node.selector).space, node.inner, inner)
    raise TypeError(f"Unknown request node {node!r}")


def compliant(space, request, p):
    """Whether standing at p satisfies the request under its polarity."""
    inside = contains(space, request, p)
    return not inside if request.polarity is Polarity.OUT else inside


def members(space, request):
    """Canonical points of the node (polarity-free), sorted."""
    return sorted(_members(space, _node(request)))


def _members(space, node):
    if isinstance(node, Points):
        return {space.canonical(p) for p in node.points}
    if isinstance(node, Union):
        found = set()
        for part in node.parts:
            found |= _members(space, part)
        return found
    if isinstance(node, Lift):
        child = space.segment(node.selector).space
        return {space.lift_point(node.selector, q) for q in _members(child, node.inner)}
    raise TypeError(f"Unknown request node {node!r}")


def admissible(space, request):
    """Sorted points satisfying the request under its polarity."""
    inside = _members(space, request.node)
    if request.polarity is Polarity.IN:
        return sorted(inside)
    return [p for p in space.points() if p not in inside]


# --- nearest point -----------------------------------------------------------------

def nearest_in(space, request, start):
    """
    Admissible point nearest to `start` and its distance; ties go to the smallest
    canonical address.
    """
    if request.polarity is Polarity.OUT:
        return _nearest_outside(space, request, start)
    found = _nearest(space, request.node, start, {})
    if found is None:
        raise InfeasibleRequestError("Request set is empty")
    dist, point = found
    return point, dist


def _better(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return a if a <= b else b


def _nearest(space, node, start, memo):
    """(distance, point) minimizing over the node's members, or None when empty."""
    key = (id(space), id(node), start)
    if key in memo:
        return memo[key]

    best = None
    if isinstance(node, Points):
        for q in node.points:
            q = space.canonical(q)
            best = _better(best, (space.distance(start, q), q))
    elif isinstance(node, Union):
        for part in node.parts:
            best = _better(best, _nearest(space, part, start, memo))
    elif isinstance(node, Lift):
        best = _nearest_in_copy(space, node, start, memo)
    else:
        raise TypeError(f"Unknown request node {node!r}")

    memo[key] = best
    return best


def _nearest_in_copy(space, node, start, memo):
    sel = node.selector
    seg = space.segment(sel)
    child = seg.space
    best = None

    def lifted(found, offset):
        if found is None:
            return None
        dist, q = found
        return offset + seg.scale * dist, space.lift_point(sel, q)

    inner = space.localize(start, sel)
    if inner is not None:
        best = _better(best, lifted(_nearest(child, node.inner, inner, memo), Fraction(0)))

    for which, terminal in (("s", child.s), ("t", child.t)):
        entry = space.terminal(sel, which)
        offset = space.distance(start, entry)
        best = _better(best, lifted(_nearest(child, node.inner, terminal, memo), offset))
        # terminals re-canonicalize to smaller parent addresses; compare them directly
        if _contains(child, node.inner, terminal):
            best = _better(best, (offset, entry))
    return best


def _nearest_outside(space, request, start):
    forbidden = _members(space, request.node)
    if isinstance(space, HstSpace):
        found = space.nearest_allowed(start, forbidden)
    else:
        found = None
        for q in space.points():
            if q in forbidden:
                continue
            candidate = (space.distance(start, q), q)
            if found is None or candidate < found:
                found = candidate
        if found is not None:
            found = (found[1], found[0])
    if found is None:
        raise InfeasibleRequestError("Forbidden set covers the whole space")
    return found
