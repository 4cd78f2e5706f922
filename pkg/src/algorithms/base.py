class OnlineAlgorithm:
    """
    An online player. The engine calls `reset(space, start)` once per run and then
    `serve(state, request)` for every request; the answer is a canonical point or
    ESCAPE. Instances keep per-run state and must not be shared between runs.
    """

    name = "abstract"

    def reset(self, space, start):
        self.space = space

    def serve(self, state, request):
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}(name={self.name!r})"
