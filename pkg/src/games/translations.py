"""MSS → MTS and MSS → (n−1)-server translations, plus the mirrored agents."""
import math
from fractions import Fraction

from ..requests.request_set import Polarity, admissible, points
from ..requests.sequence import RequestSeq


def _requests(seq):
    return seq.requests if isinstance(seq, RequestSeq) else list(seq)


def mss_to_mts(space, seq):
    """One task vector per request: 0 on admissible points, ∞ everywhere else."""
    vectors = []
    for request in _requests(seq):
        allowed = set(admissible(space, request))
        vectors.append({p: (Fraction(0) if p in allowed else math.inf) for p in space.points()})
    return vectors


def mss_to_kserver(space, seq):
    """One request group per MSS request: the points of M∖S, in canonical order."""
    groups = []
    for request in _requests(seq):
        allowed = set(admissible(space, request))
        groups.append(tuple(p for p in space.points() if p not in allowed))
    return groups


def vector_to_request(vector):
    finite = [p for p, cost in vector.items() if cost != math.inf]
    return points(*finite, polarity=Polarity.IN)


class MirroredMts:
    """Runs an MSS algorithm on ∞/0 task vectors."""

    def __init__(self, algorithm):
        self.algorithm = algorithm
        self.name = f"mts[{getattr(algorithm, 'name', type(algorithm).__name__)}]"

    def reset(self, space, start):
        if hasattr(self.algorithm, "reset"):
            self.algorithm.reset(space, start)

    def serve(self, state, vector):
        return self.algorithm.serve(state, vector_to_request(vector))


class MirroredKServer:
    """
    Runs an MSS algorithm as an (n−1)-server algorithm: the MSS server is the hole,
    so the server that covers a requested hole comes from where the MSS server goes.
    """

    def __init__(self, algorithm):
        self.algorithm = algorithm
        self.name = f"kserver[{getattr(algorithm, 'name', type(algorithm).__name__)}]"
        self._target = None

    def reset(self, space, start):
        if hasattr(self.algorithm, "reset"):
            self.algorithm.reset(space, start)

    def observe_group(self, state, group):
        blocked = set(group)
        allowed = [p for p in state.space.points() if p not in blocked]
        self._target = self.algorithm.serve(state, points(*allowed, polarity=Polarity.IN))

    def serve(self, state, requested):
        return self._target
