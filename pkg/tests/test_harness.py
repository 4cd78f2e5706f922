"""
Tests for the ratio experiments, the chunk-contract check, the statistics helpers
and the probability oracles.

Oracle Checklist:
- Ratios: the witness replay has ratio exactly 1; greedy has ratio 1 wherever the
  construction is deterministic and pays extra once stage 2a is random.
- Oracles: closed forms for two bins and for the δ = 1 binomial tail; at c = 0.1 the
  mean minimum load stays below m/n − c·√(m·ln n / n), and at λ = 0.3 the tail
  Pr[X ≤ (1−δ)μ] stays above λ·e^(−δ²μ/λ) for every δ.
- Escape: at threshold 0 the wrapper escapes on the first step and pays 2β·unit.
- Drift: at β = 64, α = 1/9 level 4 is the first random level (threshold 16) and
  E|S_κ| clears Φ(−1)·√(αβ)·3/2 ≈ 0.635.
"""
import math
from fractions import Fraction

import numpy as np
import pandas as pd
import pytest

from src.adversary import RefinedParams, martingale_stats
from src.config import LabSettings
from src.harness import (
    CSV_COLUMNS,
    exact_min_two_bins,
    experiment_ratio,
    mean_ci,
    oracle_balls_bins,
    oracle_binom_tail,
    ratio_ci,
    repeat_mirrored,
    run_trial,
    save_table,
    sweep_case_analysis,
    trial_rng,
    verify_chunk_contract,
    z_value,
)
from src.harness.experiments import Cell
from src.metrics.hst import random_hst


@pytest.fixture(scope="module")
def desk_settings():
    return LabSettings(seed=0, desk_beta=4, desk_alpha=Fraction(1), workers=1)


@pytest.fixture(scope="module")
def refined_table(desk_settings):
    return experiment_ratio("refined", [2, 3], ["greedy", "path_follower"], 20, desk_settings)


def test_confidence_helpers():
    assert z_value(0.95) == pytest.approx(1.959964, abs=1e-6)
    assert mean_ci([1, 2, 3])[0] == 2
    assert mean_ci([5]) == (5.0, 5.0, 5.0)
    ratio, low, high = ratio_ci([2, 4], [1, 2])
    assert ratio == 2 and low == pytest.approx(2) and high == pytest.approx(2)
    with pytest.raises(ValueError):
        ratio_ci([1, 2], [0, 0])
    with pytest.raises(ValueError):
        z_value(1.5)


def test_trial_rng_is_order_independent():
    assert trial_rng(1, 2, 3).random() == trial_rng(1, 2, 3).random()
    assert trial_rng(1, 2, 3).random() != trial_rng(1, 2, 4).random()


def test_ratio_table(refined_table):
    """Oracle: witness ratio = 1 everywhere; greedy = 1 at w = 2 and > 1 at w = 3."""
    ratios = refined_table.set_index(["w", "algorithm"])["ratio"]
    assert ratios[(2, "path_follower")] == pytest.approx(1)
    assert ratios[(3, "path_follower")] == pytest.approx(1)
    assert ratios[(2, "greedy")] == pytest.approx(1)
    assert ratios[(3, "greedy")] > 1
    assert set(refined_table["opt_method"]) == {"dp"}
    assert (refined_table["mean_opt"].unique() == [12.0, 36.0]).all()


def test_save_table(refined_table, tmp_path):
    path = save_table(refined_table, tmp_path / "ratios.csv")
    assert path.read_text().splitlines()[0] == ",".join(CSV_COLUMNS)
    assert len(pd.read_csv(path)) == 4
    save_table(refined_table, tmp_path / "ratios.json", "json")
    assert "ratio_minus_kappa" in pd.read_json(tmp_path / "ratios.json").columns
    with pytest.raises(ValueError):
        save_table(refined_table, tmp_path / "ratios.xml", "xml")


def test_certificate_opt_and_mirrored_round():
    cell = Cell(kind="basic", w=1, algorithms=("path_follower",), seed=3, opt_mode="certificate", mirrored=True)
    outcome = run_trial(cell, 0)
    assert outcome["method"] == "certificate" and outcome["opt"] == 6
    assert outcome["costs"]["path_follower"] == 6
    dp = run_trial(Cell(kind="basic", w=1, algorithms=("greedy",), seed=3, mirrored=True), 0)
    assert dp["opt"] == 6 and dp["method"] == "dp"


def test_repeat_mirrored_ends_at_s():
    from src.adversary import BasicGenConfig, gen_basic_sequence
    from src.requests import members

    cfg = BasicGenConfig(w=1, m=(1,))
    space = cfg.space()
    seq = gen_basic_sequence(cfg, np.random.default_rng(seed=0))
    joined = repeat_mirrored(space, seq)
    assert len(joined) == 2 * len(seq)
    assert members(space, joined.requests[-1]) == [space.s]
    assert joined.witness[-1] == space.s


def test_experiment_validation(desk_settings):
    with pytest.raises(ValueError):
        experiment_ratio("torus", [1], ["greedy"], 2, desk_settings)
    with pytest.raises(ValueError):
        experiment_ratio("refined", [1], ["greedy"], 2, desk_settings, opt_mode="guess")


def test_chunk_contract_at_desk_scale():
    params = RefinedParams(w=2, beta=4, alpha=1, mode="greedy")
    report = verify_chunk_contract(params, ["greedy", "path_follower", "escape:greedy"], seeds=[0, 1, 2])
    assert report["mean_size_sum"] == 12
    assert report["opt_certificate"] == 12
    for name in ("greedy", "path_follower"):
        stats = report["algorithms"][name]
        assert stats["chunks_checked"] == 4
        assert stats["violations"] == []
        assert stats["mean_total"] == 12


def test_two_bins_closed_form():
    """Oracle: E[min(X, m − X)] summed term by term."""
    for m in (2, 16):
        brute = sum(math.comb(m, k) * min(k, m - k) for k in range(m + 1)) / 2 ** m
        assert exact_min_two_bins(m) == pytest.approx(brute)
    result = oracle_balls_bins(2, 16, 4000, rng=np.random.default_rng(seed=5))
    assert abs(result["mean_min"] - result["exact_mean_min"]) < 5 * result["se"]
    with pytest.raises(ValueError):
        oracle_balls_bins(8, 10, 5)


def test_binomial_tail_closed_form():
    """Oracle: at δ = 1 the tail is Pr[X = 0] = (1 − p)^(μ/p)."""
    result = oracle_binom_tail(0.5, 4, 1.0, trials=20_000, rng=np.random.default_rng(seed=9))
    assert result["n"] == 8
    assert result["exact"] == pytest.approx(0.5 ** 8)
    assert result["empirical"] == pytest.approx(0.5 ** 8, abs=0.003)
    assert oracle_binom_tail(0.25, 16, 0.5)["exact"] > 0
    with pytest.raises(ValueError):
        oracle_binom_tail(0.3, 4, 0.5)


def test_case_analysis_sweep():
    rng = np.random.default_rng(seed=1)
    corpus = [random_hst(rng, max_leaves=32) for _ in range(25)]
    result = sweep_case_analysis(corpus, Fraction(1, 16))
    assert result["failures"] == []
    assert result["nodes"] >= 25
    assert sum(result["census"].values()) == 25


def test_escape_threshold_reaches_the_wrapper():
    """Oracle: threshold 0 escapes at once (24 + fake charges); threshold ∞ never escapes (12)."""
    params = RefinedParams(w=2, beta=4, alpha=1, mode="greedy")
    eager = verify_chunk_contract(params, ["escape:greedy"], seeds=[0], escape_threshold=0.0)
    assert eager["algorithms"]["escape:greedy"]["mean_total"] >= 24
    never = verify_chunk_contract(params, ["escape:greedy"], seeds=[0], escape_threshold=math.inf)
    assert never["algorithms"]["escape:greedy"]["mean_total"] == 12


@pytest.mark.slow
def test_rollout_chunk_contract_at_level_three():
    params = RefinedParams(w=3, beta=4, alpha=1, mode="rollout", rollouts=512, pool_size=8)
    report = verify_chunk_contract(params, ["greedy", "work_function"], seeds=list(range(30)))
    assert 29 <= report["mean_size_sum"] <= 38.5
    assert report["opt_certificate"] == 36
    for name in ("greedy", "work_function"):
        assert report["algorithms"][name]["violations"] == []


@pytest.mark.slow
def test_ratio_grows_with_the_level(desk_settings):
    """Oracle: d(s, t) = 12, 36, 108; greedy stays at 1 on the deterministic level and grows after."""
    table = experiment_ratio("refined", [2, 3, 4], ["greedy"], 30, desk_settings, opt_mode="certificate")
    ratios = table.set_index("w")["ratio"]
    assert list(table["mean_opt"]) == [12.0, 36.0, 108.0]
    assert ratios[2] == pytest.approx(1)
    assert ratios[2] < ratios[3] < ratios[4]


def test_binomial_tail_sweep():
    for delta in np.round(np.arange(0.1, 1.0, 0.1), 1):
        result = oracle_binom_tail(0.5, 16, float(delta), lam=0.3)
        assert result["holds"], delta


@pytest.mark.slow
def test_balls_bins_sweep():
    rng = np.random.default_rng(seed=17)
    for n in (2, 4, 8):
        base = math.ceil(n * math.log(n))
        for factor in (1, 4, 16):
            result = oracle_balls_bins(n, base * factor, 5000, c=0.1, rng=rng)
            assert result["holds"], (n, base * factor, result["mean_min"], result["bound"])


@pytest.mark.slow
def test_drift_at_the_first_random_level():
    params = RefinedParams(w=4, beta=64, alpha=Fraction(1, 9))
    assert params.base_level == 3
    stats = martingale_stats(params, trials=10_000, rng=np.random.default_rng(seed=64))
    assert stats["threshold"] == pytest.approx(16)
    assert stats["bound"] == pytest.approx(0.635, abs=0.001)
    assert stats["bound_ok"]
    assert stats["max_z"] < 5
    assert stats["variance_in_range"]
    with pytest.raises(ValueError):
        martingale_stats(RefinedParams(w=4, beta=64), trials=10)
