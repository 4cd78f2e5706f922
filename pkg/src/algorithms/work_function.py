from fractions import Fraction

from ..games.offline import BudgetExceededError
from ..requests.request_set import InfeasibleRequestError, admissible
from .base import OnlineAlgorithm


class WorkFunction(OnlineAlgorithm):
    """
    Work function algorithm restricted to the admissible points of each request.

    w_t(x) is the cheapest cost of serving ρ_{≤t} from the start and ending at x. After
    updating it the server moves to argmin_x w_t(x) + d(current, x), ties to the
    smallest address.
    """

    name = "work_function"

    def __init__(self, budget=50_000_000):
        self.budget = budget
        self.values = {}
        self.spent = 0

    def reset(self, space, start):
        super().reset(space, start)
        self.values = {start: Fraction(0)}
        self.spent = 0

    def update(self, space, request):
        candidates = admissible(space, request)
        if not candidates:
            raise InfeasibleRequestError("Request admits no point")
        self.spent += len(self.values) * len(candidates)
        if self.spent > self.budget:
            raise BudgetExceededError(f"Work function exceeded {self.budget} transitions")

        previous = sorted(self.values)
        self.values = {
            q: min(self.values[p] + space.distance(p, q) for p in previous)
            for q in candidates
        }
        return self.values

    def serve(self, state, request):
        space = state.space
        values = self.update(space, request)
        return min(values, key=lambda x: (values[x] + space.distance(state.position, x), x))


def work_function(state, request, algorithm=None):
    """Single step of a work function player; pass `algorithm` to keep its history."""
    if algorithm is None:
        algorithm = WorkFunction()
        algorithm.reset(state.space, state.position)
    return algorithm.serve(state, request)
