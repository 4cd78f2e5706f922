"""Agents that replay a trajectory fixed in advance (witnesses, DP and heuristic paths)."""
from .base import OnlineAlgorithm


class TrajectoryAgent(OnlineAlgorithm):
    name = "trajectory"

    def __init__(self, points):
        self.points = list(points)

    def serve(self, state, request):
        if state.step >= len(self.points):
            raise ValueError(f"Trajectory has {len(self.points)} points, request {state.step} has none")
        return self.points[state.step]


class PathFollower(TrajectoryAgent):
    """Replays the witness of a generated sequence, certifying OPT = d(s, t)."""

    name = "path_follower"

    def __init__(self, witness):
        witness = getattr(witness, "witness", witness)
        if witness is None:
            raise ValueError("Sequence carries no witness path")
        super().__init__(witness)
