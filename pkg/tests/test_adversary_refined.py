"""
Tests for the refined chunked sequences, the subchunk combiner and the stage-2a
drift statistics.

Oracle Checklist:
- Combiner: with the realized sizes as estimator, boundaries land at h_i = 3i and
  every chunk has size c_avg.
- Rollouts: at β = 4, α = 1, w = 3 the expected subchunk total is
  13.5 − E[min(a, 3 − a)] = 12.75 child units with a ~ Bin(3, 1/2), whatever the draw.
- Certificates: the witness replays at d(s, t) and the exact DP agrees.
- Drift: E[S_j] = 0 and E|S_κ| against Φ(−1)·√(αβ)·w/2 at αβ = 1.
"""
from fractions import Fraction

import numpy as np
import pytest

from src.adversary import (
    GeneratorExhaustedError,
    Mode,
    RefinedGenerator,
    RefinedParams,
    RolloutEstimator,
    Snapshot,
    check_chunked_seq,
    combine_subchunks,
    gen_refined_chunks,
    gen_subchunks,
    martingale_stats,
    realized_remaining,
)
from src.algorithms import Greedy
from src.config import LabSettings, default_refined_alpha
from src.games import run_mss
from src.metrics import parse_addr
from src.requests import ChunkedSeq, points


@pytest.fixture(scope="module")
def desk():
    return RefinedParams(w=2, beta=4, alpha=1, mode="greedy")


def _subchunks(sizes):
    sub = ChunkedSeq(witness=[], level=2, unit=Fraction(1), mode="subchunks")
    for k, size in enumerate(sizes):
        sub.append_chunk([points(parse_addr(f"@{k}"))], size=Fraction(size), tag=f"s{k}", witness=[parse_addr(f"@{k}")])
    return sub


def test_params_defaults():
    params = RefinedParams(w=3)
    assert params.beta == 64
    assert params.alpha == default_refined_alpha(64)
    assert RefinedParams(w=2, beta=4, alpha=1).threshold(1) == 1
    assert RefinedParams(w=2, beta=4, alpha=1).base_level == 1
    settings = LabSettings(desk_beta=8, desk_alpha=Fraction(1, 4))
    from_desk = RefinedParams.from_settings(settings, 3, desk=True, mode="greedy")
    assert (from_desk.beta, from_desk.alpha, from_desk.mode) == (8, Fraction(1, 4), "greedy")
    with pytest.raises(ValueError):
        RefinedParams(w=1, beta=1)
    with pytest.raises(ValueError):
        RefinedParams(w=1, mode="average")


def test_combine_degenerate_example():
    """Oracle: realized sizes as the estimator give h_i = 3i and c_i = c_avg."""
    sub = _subchunks([1] * 12)
    for mode in (Mode.ROLLOUT, Mode.GREEDY):
        seq = combine_subchunks(sub, 3, Fraction(3, 2), mode, realized_remaining(sub))
        assert [(c.start, c.stop) for c in seq.chunks] == [(0, 3), (3, 6), (6, 9), (9, 12)]
        assert seq.sizes == [3, 3, 3, 3]
        assert seq.chunks[0].tag == "s0+s1+s2"
        assert seq.requests == sub.requests and seq.witness == sub.witness


def test_combine_rollout_uses_the_estimate():
    sub = _subchunks([1] * 6)
    seq = combine_subchunks(sub, 3, Fraction(3, 2), Mode.ROLLOUT, lambda h: Fraction(7) - h)
    # C = 7: first boundary where 7 − h ≤ 4, then where 7 − h ≤ 1 (never, so the end)
    assert [(c.start, c.stop) for c in seq.chunks] == [(0, 3), (3, 6)]
    assert seq.sizes == [3, 4]
    # the second size subtracts the expected remainder at the boundary, not the target
    at_target = combine_subchunks(sub, 3, Fraction(3, 2), Mode.ROLLOUT, lambda h: Fraction(7) - h, boundary=lambda h, target: target)
    assert at_target.sizes == [3, 3]


def test_combine_greedy_remainder():
    merged = combine_subchunks(_subchunks([Fraction(3, 2), Fraction(3, 2), Fraction(1, 2)]), 3, Fraction(3, 2), Mode.GREEDY)
    assert merged.sizes == [Fraction(7, 2)]
    kept = combine_subchunks(_subchunks([1, 1, Fraction(1, 2), Fraction(3, 2), 1]), 3, Fraction(3, 2), Mode.GREEDY)
    assert kept.sizes == [4, 1]


def test_combine_validation():
    sub = _subchunks([1, 2])
    with pytest.raises(ValueError):
        combine_subchunks(sub, 3, 4, Mode.GREEDY)
    with pytest.raises(ValueError):
        combine_subchunks(sub, 3, Fraction(3, 2), Mode.GREEDY)
    with pytest.raises(ValueError):
        combine_subchunks(_subchunks([1]), 3, Fraction(3, 2), Mode.ROLLOUT)


def test_base_level_chunks():
    seq = gen_refined_chunks(RefinedParams(w=1, beta=4, alpha=1))
    assert seq.normalized_sizes() == [1, 1, 1, 1]
    assert seq.witness == [parse_addr(f"@{i}") for i in range(1, 5)]


def test_level_two_subchunks(desk):
    sub = gen_subchunks(desk, np.random.default_rng(seed=0))
    assert [c.tag for c in sub.chunks] == ["stage1"] * 4 + ["stage2b"] * 4 + ["stage3"] * 4
    assert sub.sizes == [1] * 12
    assert sub.meta["kappa"] == 0 and sub.meta["survivor"] == "L"
    assert sub.unit == 3
    with pytest.raises(ValueError):
        gen_subchunks(RefinedParams(w=1, beta=4, alpha=1))


def test_level_two_chunks_and_certificate(desk):
    seq = gen_refined_chunks(desk, np.random.default_rng(seed=0))
    assert seq.m == 4 and seq.normalized_sizes() == [1, 1, 1, 1]
    report = check_chunked_seq(seq, desk, dp=True)
    assert report["certificate_ok"] and report["witness_cost"] == 12 and report["opt_dp"] == 12
    assert report["ends_at_t"]
    assert report["size_violations"] == []
    # desk scale falls short of αβw² = 16 chunks
    assert not report["m_ok"] and report["warnings"]
    assert run_mss(desk.space(), seq, Greedy()).total == 12


def test_rollout_agrees_with_greedy_when_deterministic(desk):
    greedy = gen_refined_chunks(desk, np.random.default_rng(seed=1))
    rollout = gen_refined_chunks(RefinedParams(w=2, beta=4, alpha=1, mode="rollout", rollouts=16, pool_size=4), np.random.default_rng(seed=1))
    assert rollout.sizes == greedy.sizes
    assert rollout.mode == "rollout"


def test_level_three_draws():
    params = RefinedParams(w=3, beta=4, alpha=1, mode="greedy")
    for seed in range(3):
        generator = RefinedGenerator(params, np.random.default_rng(seed=seed))
        seq = generator.generate()
        assert seq.meta["kappa"] == 3
        assert seq.meta["child_chunks"] == (4, 4)
        report = check_chunked_seq(seq, params)
        assert report["certificate_ok"] and report["witness_cost"] == 36
        assert all(Fraction(1, 2) <= x <= Fraction(3, 2) for x in seq.normalized_sizes())


def test_strict_exhaustion():
    # at α = 8 stage 2a needs eight steps but each side has only four child chunks
    params = RefinedParams(w=2, beta=4, alpha=8, mode="greedy", strict=True)
    with pytest.raises(GeneratorExhaustedError):
        gen_refined_chunks(params, np.random.default_rng(seed=0))
    relaxed = RefinedParams(w=2, beta=4, alpha=8, mode="greedy")
    seq = gen_refined_chunks(relaxed, np.random.default_rng(seed=0))
    assert seq.meta["exhausted"]
    assert check_chunked_seq(seq, relaxed)["certificate_ok"]


@pytest.mark.slow
def test_drift_is_a_martingale():
    """
    Oracle: at αβ = 1 the stopped drift clears Φ(−1)·√(αβ)·w/2, the running mean
    stays within a few standard errors of 0 and n_L·n_R stays in [1/4, 9/4].
    """
    params = RefinedParams(w=20, beta=64, alpha=Fraction(1, 64))
    stats = martingale_stats(params, trials=4000, rng=np.random.default_rng(seed=2021))
    assert stats["bound_ok"]
    assert stats["max_z"] < 5
    assert stats["variance_in_range"]
    assert stats["second_moment_gap"] < 0.2
    with pytest.raises(ValueError):
        martingale_stats(RefinedParams(w=2, beta=64, alpha=Fraction(1, 64)), trials=10)


@pytest.fixture(scope="module")
def rollout_desk():
    return RefinedParams(w=3, beta=4, alpha=1, mode="rollout", rollouts=512, pool_size=8)


def test_estimate_depends_on_the_revealed_prefix_only():
    """Oracle: pool rows (1, 1, 1, 1) and (1, 3/2, 1/2); after a revealed 1 the rest averages 5/2."""
    estimator = RolloutEstimator([[1, 1, 1, 1], [1, 1.5, 0.5]], threshold=4, rollouts=4000)
    assert estimator(Snapshot("3", last=(1.0,))) == pytest.approx(2.5, abs=0.1)
    assert estimator(Snapshot("3", last=(1.0, 1.5))) == pytest.approx(0.5)
    assert estimator(Snapshot("3", last=(1.0,))) == estimator(Snapshot("3", last=(1.0,)))
    # 2b: the survivor's rest plus a fresh stage 3 (mean 7/2)
    assert estimator(Snapshot("2b", survivor=(1.0,))) == pytest.approx(6.0, abs=0.15)
    # a prefix no pool row has keeps its revealed length
    assert estimator(Snapshot("3", last=(2.0, 2.0, 2.0, 2.0))) == 0
    with pytest.raises(ValueError):
        RolloutEstimator([[1]], threshold=1, rollouts=0)


def test_rollout_estimate_ignores_the_hidden_future(rollout_desk):
    """Oracle: equal revealed prefixes give equal estimates; C ≈ 12.75 for every draw."""
    draws = []
    for seed in range(4):
        generator = RefinedGenerator(rollout_desk, np.random.default_rng(seed=seed))
        sub, states = generator.subchunk_states()
        estimator = generator.estimator()
        draws.append([estimator(state) for state in states])
        assert states[0] == Snapshot()
        assert [c.tag for c in sub.chunks][-4:] == ["stage3"] * 4
    for estimates in draws:
        assert estimates[:4] == draws[0][:4]
        assert estimates[0] == pytest.approx(12.75, abs=0.3)
        # stage-3 child sizes are all 1 at this scale, so the estimate is exact there
        assert estimates[-3:] == pytest.approx([3.0, 2.0, 1.0])
    assert {gen_refined_chunks(rollout_desk, np.random.default_rng(seed=s)).m for s in range(4)} == {4}


@pytest.mark.slow
def test_rollout_sizes_add_up_to_the_subchunks(rollout_desk):
    """Oracle: E[Σ c_i] ∈ [E[Σ c̃_j] − c_avg, E[Σ c̃_j]], with c_avg = 1 in level units."""
    chunk_totals, sub_totals = [], []
    for seed in range(30):
        seq = gen_refined_chunks(rollout_desk, np.random.default_rng(seed=seed))
        sub = gen_subchunks(rollout_desk, np.random.default_rng(seed=seed))
        assert seq.requests == sub.requests
        chunk_totals.append(float(sum(seq.normalized_sizes())))
        sub_totals.append(float(sub.total_size / seq.unit))
    assert np.mean(sub_totals) == pytest.approx(4.25, abs=0.1)
    assert np.mean(sub_totals) - 1.1 <= np.mean(chunk_totals) <= np.mean(sub_totals) + 0.1


def test_every_clamp_is_reported(capsys):
    generator = RefinedGenerator(RefinedParams(w=1, beta=4, alpha=1, mode="rollout"))
    seq = ChunkedSeq(witness=[], level=2, unit=Fraction(1), mode="rollout")
    seq.append_chunk([points(parse_addr("@1"))], size=Fraction(151, 100), tag="s0")
    assert generator._clamp(seq) == [(0, 1.51)]
    assert seq.sizes == [Fraction(3, 2)]
    assert "rollout size estimate(s) left [1/2, 3/2] by up to 0.010" in capsys.readouterr().out
    assert any("rollout size estimate" in w for w in generator.warnings)
