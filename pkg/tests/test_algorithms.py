"""
Tests for the online players and the algorithm registry.

Oracle Checklist:
- Work function: after the last request, min_x w(x) is the offline optimum.
"""
import math

import numpy as np
import pytest

from src.adversary.universal import uniform_plan
from src.algorithms import (
    EscapeAwareWrapper,
    Greedy,
    PathFollower,
    RandomEligible,
    StayInside,
    WorkFunction,
    available_algorithms,
    make_algorithm,
    parse_algorithms,
    register_algorithm,
)
from src.games import opt_cost_dp, run_mss
from src.metrics import diamond_basic, line_metric, parse_addr
from src.requests import Polarity, admissible, compliant, points


@pytest.fixture(scope="module")
def seeded_rng():
    return np.random.default_rng(seed=3)


@pytest.fixture(scope="module")
def space():
    return diamond_basic(1, (1,))


def _random_requests(space, rng, length):
    pts = space.points()
    return [
        points(*(pts[int(k)] for k in rng.choice(len(pts), size=int(rng.integers(1, 4)), replace=False)))
        for _ in range(length)
    ]


def test_greedy_moves_to_nearest():
    line = line_metric(4)
    requests = [points(parse_addr("@0"), parse_addr("@4")), points(parse_addr("@1"), parse_addr("@4"))]
    ledger = run_mss(line, requests, Greedy())
    assert ledger.trajectory == [parse_addr("@0"), parse_addr("@1")]
    assert ledger.total == 1


def test_work_function_tracks_offline_optimum(space, seeded_rng):
    """Oracle: the work function minimum after the last request equals the DP optimum."""
    for _ in range(10):
        requests = _random_requests(space, seeded_rng, 8)
        algorithm = WorkFunction()
        ledger = run_mss(space, requests, algorithm)
        opt = opt_cost_dp(space, requests).cost
        assert min(algorithm.values.values()) == opt
        assert ledger.total >= opt


def test_random_eligible_stays_when_compliant(space, seeded_rng):
    requests = _random_requests(space, seeded_rng, 30)
    ledger = run_mss(space, requests, RandomEligible(np.random.default_rng(seed=5)))
    previous = space.s
    for request, p in zip(requests, ledger.trajectory):
        if compliant(space, request, previous):
            assert p == previous
        assert p in admissible(space, request)
        previous = p


def test_escape_wrapper_threshold():
    with pytest.raises(ValueError):
        EscapeAwareWrapper(Greedy(), threshold=-1)
    wrapper = EscapeAwareWrapper(Greedy(), threshold=math.inf)
    line = line_metric(10)
    ledger = run_mss(line, [points(line.t)], wrapper)
    assert not ledger.escaped and ledger.total == 10


def test_stay_inside_moves_to_next_subspace():
    plan = uniform_plan(4)
    hst = plan.space
    forbid = [points(p, polarity=Polarity.OUT) for p in (parse_addr("@0"), parse_addr("@1"), parse_addr("@3"))]
    ledger = run_mss(hst, forbid, StayInside(plan), start=plan.start)
    assert ledger.trajectory == [parse_addr("@1"), parse_addr("@2"), parse_addr("@2")]
    with pytest.raises(ValueError):
        StayInside(None)


def test_registry():
    names = available_algorithms()
    assert {"greedy", "work_function", "random_eligible", "stay_inside", "path_follower", "trajectory"} <= set(names)
    assert isinstance(make_algorithm("escape:greedy", threshold=2), EscapeAwareWrapper)
    assert parse_algorithms("greedy, escape:work_function") == ["greedy", "escape:work_function"]
    with pytest.raises(ValueError):
        make_algorithm("oracle")
    with pytest.raises(ValueError):
        parse_algorithms("greedy,escape:nope")
    with pytest.raises(ValueError):
        register_algorithm("greedy")(lambda **_: Greedy())


def test_path_follower_needs_witness():
    with pytest.raises(ValueError):
        PathFollower(None)
    follower = make_algorithm("path_follower", witness=[parse_addr("@1")])
    assert run_mss(line_metric(2), [points(parse_addr("@1"))], follower).total == 1
