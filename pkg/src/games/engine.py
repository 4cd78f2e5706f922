"""
Game engines: metrical service systems (with escape prices), metrical task systems
and the (n−1)-server problem in its anti-server view.
"""
import math
from dataclasses import dataclass, field
from fractions import Fraction

from ..requests.request_set import compliant
from ..requests.sequence import RequestSeq
from .ledger import CostLedger


class IllegalMoveError(RuntimeError):
    """An algorithm answered with a point that violates the request (or an ∞ state)."""


class _Escape:
    def __repr__(self):
        return "ESCAPE"


ESCAPE = _Escape()


@dataclass(frozen=True)
class EscapeOption:
    """Price p payable once, inside the request window [start, stop)."""

    price: Fraction
    start: int = 0
    stop: int = None

    def available(self, index):
        return self.start <= index and (self.stop is None or index < self.stop)


@dataclass
class GameState:
    space: object
    position: object
    ledger: CostLedger = field(default_factory=CostLedger)
    step: int = 0
    escape: EscapeOption = None
    escaped: bool = False
    pending_group: tuple = ()

    @property
    def escape_available(self):
        return self.escape is not None and not self.escaped and self.escape.available(self.step)


def _requests_of(seq):
    return seq.requests if isinstance(seq, RequestSeq) else list(seq)


def _start_point(space, start):
    start = space.s if start is None else start
    if space.canonical(start) != start:
        raise ValueError(f"Start {start} is not canonical in {space.kind}")
    return start


def run_mss(space, seq, algorithm, start=None, escape=None, classify=None):
    """
    Play `algorithm` on `seq` from `start`. Each response must be a canonical
    admissible point or ESCAPE (only inside the escape window).

    `classify(prev, new)` may tag movements as "switch" or "local" for split reports.
    """
    state = GameState(space, _start_point(space, start), escape=escape)
    if hasattr(algorithm, "reset"):
        algorithm.reset(space, state.position)

    for i, request in enumerate(_requests_of(seq)):
        state.step = i
        if state.escaped:
            state.ledger.record_idle(i)
            continue

        decision = algorithm.serve(state, request)
        if decision is ESCAPE:
            if not state.escape_available:
                raise IllegalMoveError(f"Escape requested at step {i} outside the escape window")
            state.ledger.record_escape(i, escape.price)
            state.escaped = True
            continue

        try:
            canonical = space.canonical(decision)
        except (ValueError, AttributeError) as e:
            raise IllegalMoveError(f"Step {i}: response {decision!r} is not a point of the space ({e})")
        if canonical != decision:
            raise IllegalMoveError(f"Step {i}: response {decision} is not canonical (use {canonical})")
        if not compliant(space, request, decision):
            raise IllegalMoveError(f"Step {i}: response {decision} violates the {request.polarity.value} request")

        cost = space.distance(state.position, decision)
        kind = classify(state.position, decision) if classify and cost else "local"
        state.ledger.record(i, decision, cost, kind)
        state.position = decision

    return state.ledger


def run_mts(space, costs, algorithm, start=None):
    """Each step adds d(prev, next) + vector[next]; ∞ entries forbid occupancy."""
    state = GameState(space, _start_point(space, start))
    if hasattr(algorithm, "reset"):
        algorithm.reset(space, state.position)
    points = set(space.points())

    for i, vector in enumerate(costs):
        state.step = i
        decision = algorithm.serve(state, vector)
        if decision not in points:
            raise IllegalMoveError(f"Step {i}: {decision!r} is not a state of the space")
        service = vector.get(decision, 0)
        if service == math.inf:
            raise IllegalMoveError(f"Step {i}: state {decision} has infinite cost")
        cost = space.distance(state.position, decision) + Fraction(service)
        state.ledger.record(i, decision, cost)
        state.position = decision

    return state.ledger


def run_kserver(space, groups, algorithm, start_hole=None):
    """
    (n−1)-server engine tracked through its single uncovered point (the hole).
    Each group lists points that are requested repeatedly until a full pass leaves
    the hole untouched. A request on the hole moves the server standing on the
    answered point onto it; the hole jumps there.
    """
    state = GameState(space, _start_point(space, start_hole))
    if hasattr(algorithm, "reset"):
        algorithm.reset(space, state.position)
    points = space.points()
    max_passes = len(points) + 1

    for i, group in enumerate(groups):
        state.step = i
        state.pending_group = tuple(group)
        if hasattr(algorithm, "observe_group"):
            algorithm.observe_group(state, state.pending_group)

        spent = Fraction(0)
        for _ in range(max_passes):
            moved = False
            for p in group:
                if p != state.position:
                    continue
                source = algorithm.serve(state, p)
                if source == p or space.canonical(source) != source:
                    raise IllegalMoveError(f"Step {i}: no server can come from {source!r}")
                spent += space.distance(source, p)
                state.position = source
                moved = True
            if not moved:
                break
        else:
            raise IllegalMoveError(f"Step {i}: hole keeps landing on requested points")

        state.ledger.record(i, state.position, spent)

    return state.ledger
