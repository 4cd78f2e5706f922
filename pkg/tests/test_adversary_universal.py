"""
Tests for subspace selection, the universal distribution and the phase heuristic.

Oracle Checklist:
- Phase heuristic: its trajectory replays legally at the reported cost, which is
  never below the exact DP optimum.
- Coupon collector: online cost dominates OPT trial by trial; random eligible on ℓ = 8
  points lands within 10% of H_7 = 363/140.
- Per draw: every algorithm pays at least diam(U) in expectation and stay inside pays
  exactly diam(U).
"""
from fractions import Fraction

import numpy as np
import pytest

from src.adversary import (
    Case,
    binary_deltas,
    case_dichotomy,
    coupon_collector_ratio,
    draw_universal,
    draws_to_sequence,
    harmonic,
    lift_to,
    offline_phase_heuristic,
    phase_length,
    sample_universal,
    select_subspace,
    uniform_plan,
)
from src.algorithms import TrajectoryAgent, make_algorithm
from src.games import opt_cost_dp, run_mss
from src.metrics import uniform_hst
from src.metrics.hst import leaf, node
from src.requests import Polarity, members


@pytest.fixture(scope="module")
def seeded_rng():
    return np.random.default_rng(seed=16)


@pytest.fixture(scope="module")
def balanced_plan():
    """Nine stars of four leaves under one root: ℓ = 3 balanced at α = 1."""
    root = node(8, *[node(4, *[leaf(f"a{i}{j}") for j in range(4)]) for i in range(9)])
    return select_subspace(root, alpha=1)


def test_harmonic():
    assert harmonic(0) == 0
    assert harmonic(7) == Fraction(363, 140)


def test_case_dichotomy():
    assert case_dichotomy([4, 4]) == {"binary": True, "ell": None}
    assert case_dichotomy([1] * 9) == {"binary": False, "ell": 3}
    assert case_dichotomy([9, 1, 1, 1]) == {"binary": True, "ell": 4}


def test_select_subspace_cases(balanced_plan):
    uniform = select_subspace(uniform_hst(16), alpha=Fraction(1, 16))
    assert uniform.case is Case.UNIFORM and uniform.ell == 4 and len(uniform.leaves) == 4

    assert balanced_plan.case is Case.BALANCED
    assert balanced_plan.ell == 3 and balanced_plan.sizes == (4,) * 9
    assert all(child.case is Case.BINARY for child in balanced_plan.children)
    assert len(balanced_plan.leaves) == 6
    assert balanced_plan.describe()["diam"] == 8
    assert phase_length(balanced_plan) == 3


def test_binary_deltas():
    plan = select_subspace(node(16, node(4, *[leaf(f"x{j}") for j in range(8)]), node(2, leaf("y0"), leaf("y1"))), alpha=Fraction(1, 16))
    assert plan.case is Case.BINARY
    delta_1, delta_2 = binary_deltas(plan)
    assert 0 < delta_1 <= 1 and delta_1 <= delta_2 <= 1


def test_sample_universal_uniform(seeded_rng):
    plan = uniform_plan(4)
    seq = sample_universal(plan, seeded_rng, draws=3)
    assert len(seq.chunks) == 3 * 2 * 4
    assert set(seq.sizes) == {Fraction(1, 8)}
    assert {c.tag for c in seq.chunks} <= {"U1", "U2", "U3", "U4"}
    assert all(r.polarity is Polarity.OUT and len(members(plan.space, r)) == 1 for r in seq.requests)
    assert lift_to(seq, plan) is seq


def test_draw_counts(balanced_plan, seeded_rng):
    draw = draw_universal(balanced_plan, seeded_rng)
    assert sum(draw.counts()) == 2 * balanced_plan.ell
    assert all(balanced_plan.child_of(p) is not None for p in draw.forbidden())


def test_lift_adds_the_outside(balanced_plan, seeded_rng):
    seq = sample_universal(balanced_plan, seeded_rng, draws=2, lift=True)
    outside = set(balanced_plan.outside().points)
    assert len(outside) == 30
    for request in seq.requests:
        assert outside <= set(members(balanced_plan.space, request))


def _check_heuristic(plan, draws):
    seq = lift_to(draws_to_sequence(plan, draws), plan)
    result = offline_phase_heuristic(plan, draws)
    assert len(result["trajectory"]) == len(seq)
    replay = run_mss(plan.space, seq, TrajectoryAgent(result["trajectory"]), start=plan.start)
    assert replay.total == result["cost"] == result["switching"] + result["local"]
    assert result["cost"] >= opt_cost_dp(plan.space, seq, start=plan.start).cost
    return result


def test_phase_heuristic_bounds_opt(balanced_plan, seeded_rng):
    """Oracle: the heuristic is a legal trajectory, so its cost is at least OPT."""
    for _ in range(3):
        draws = [draw_universal(balanced_plan, seeded_rng) for _ in range(6)]
        result = _check_heuristic(balanced_plan, draws)
        assert result["mu"] == 3 and result["phases"] == 2


def test_phase_heuristic_two_leaves(seeded_rng):
    plan = select_subspace(node(2, leaf("a"), leaf("b")))
    assert plan.case is Case.BINARY
    _check_heuristic(plan, [draw_universal(plan, seeded_rng) for _ in range(5)])


def test_phase_heuristic_rejects_uniform_plans(seeded_rng):
    plan = uniform_plan(4)
    with pytest.raises(ValueError):
        offline_phase_heuristic(plan, [draw_universal(plan, seeded_rng)])


def test_coupon_collector_ratio(seeded_rng):
    result = coupon_collector_ratio(4, 20, 5, seeded_rng, ("random_eligible", "greedy"))
    assert result["target"] == pytest.approx(11 / 6)
    assert result["mean_opt"] > 0
    for name in ("random_eligible", "greedy"):
        assert result["ratio"][name] >= 1 - 1e-12


def _per_draw_costs(plan, name, draws, seed):
    rng = np.random.default_rng(seed=seed)
    seq = sample_universal(plan, rng, draws=draws, lift=True)
    ledger = run_mss(plan.space, seq, make_algorithm(name, rng=rng, plan=plan), start=plan.start)
    per_chunk = np.array([float(c) for c in ledger.chunk_costs(seq.chunks)])
    return per_chunk.reshape(draws, 2 * plan.ell).sum(axis=1)


@pytest.mark.slow
@pytest.mark.parametrize("plan_name", ["uniform", "balanced"])
def test_every_draw_costs_at_least_the_diameter(plan_name, balanced_plan):
    plan = uniform_plan(4) if plan_name == "uniform" else balanced_plan
    diam = float(plan.diam)
    for name in ("greedy", "random_eligible", "work_function", "stay_inside"):
        costs = _per_draw_costs(plan, name, draws=400, seed=len(name))
        se = costs.std(ddof=1) / np.sqrt(len(costs))
        assert costs.mean() >= diam - 3 * se, name
        if name == "stay_inside":
            assert costs.mean() <= diam + 3 * se


@pytest.mark.slow
def test_coupon_collector_reaches_the_harmonic_number():
    result = coupon_collector_ratio(8, 3000, 2, np.random.default_rng(seed=8), ("random_eligible",))
    assert result["target"] == pytest.approx(363 / 140)
    assert result["ratio"]["random_eligible"] == pytest.approx(363 / 140, rel=0.1)
