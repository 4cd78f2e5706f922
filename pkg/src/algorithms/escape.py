import math

from ..games.engine import ESCAPE
from .base import OnlineAlgorithm


class EscapeAwareWrapper(OnlineAlgorithm):
    """
    Plays `base` but bails out once the cost already paid plus the cost of the
    base's next move reaches `threshold` times the escape price.
    """

    def __init__(self, base, threshold=1.0):
        if threshold < 0:
            raise ValueError(f"Escape threshold must be ≥ 0, got {threshold}")
        self.base = base
        self.threshold = threshold
        self.name = f"escape[{base.name},{threshold}]"

    def reset(self, space, start):
        super().reset(space, start)
        self.base.reset(space, start)

    def serve(self, state, request):
        decision = self.base.serve(state, request)
        if not state.escape_available or self.threshold == math.inf:
            return decision
        projected = state.space.distance(state.position, decision)
        if state.ledger.total + projected >= self.threshold * state.escape.price:
            return ESCAPE
        return decision


def escape_aware_wrapper(base, threshold=1.0):
    return EscapeAwareWrapper(base, threshold)
