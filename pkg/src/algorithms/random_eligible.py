import numpy as np

from ..requests.request_set import InfeasibleRequestError, admissible, compliant
from .base import OnlineAlgorithm


class RandomEligible(OnlineAlgorithm):
    """Stays while compliant, otherwise jumps to a uniformly random admissible point."""

    name = "random_eligible"

    def __init__(self, rng=None):
        self.rng = rng if rng is not None else np.random.default_rng()

    def serve(self, state, request):
        if compliant(state.space, request, state.position):
            return state.position
        choices = admissible(state.space, request)
        if not choices:
            raise InfeasibleRequestError("Request admits no point")
        return choices[int(self.rng.integers(len(choices)))]


def random_eligible(state, request, rng):
    return RandomEligible(rng).serve(state, request)
