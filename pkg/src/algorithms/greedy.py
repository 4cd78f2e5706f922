from ..requests.request_set import nearest_in
from .base import OnlineAlgorithm


class Greedy(OnlineAlgorithm):
    """Moves to the nearest admissible point; stays when already compliant."""

    name = "greedy"

    def serve(self, state, request):
        point, _ = nearest_in(state.space, request, state.position)
        return point


def greedy(state, request):
    return Greedy().serve(state, request)
