from ..requests.request_set import members, nearest_in
from .base import OnlineAlgorithm


class StayInside(OnlineAlgorithm):
    """
    Online player for universal plans: while the current U_i has two or more points
    it stays in U_i and plays recursively; a singleton U_i is left only when it is
    requested, for the first other U_j that still has an allowed point.
    """

    name = "stay_inside"

    def __init__(self, plan):
        if plan is None:
            raise ValueError("stay_inside needs a universal plan")
        self.plan = plan

    def serve(self, state, request):
        forbidden = set(members(state.space, request))
        if state.position not in forbidden:
            return state.position
        target = _relocate(self.plan, state.position, forbidden)
        if target is None:
            target, _ = nearest_in(state.space, request, state.position)
        return target


def _first_allowed(plan, forbidden):
    return next((p for p in plan.leaves if p not in forbidden), None)


def _relocate(plan, position, forbidden):
    if plan.is_singleton:
        return None
    here = plan.child_of(position)
    if here is None:
        return _first_allowed(plan, forbidden)
    inside = _relocate(plan.children[here], position, forbidden)
    if inside is not None:
        return inside
    for j in list(range(here + 1, plan.ell)) + list(range(here)):
        found = _first_allowed(plan.children[j], forbidden)
        if found is not None:
            return found
    return None
