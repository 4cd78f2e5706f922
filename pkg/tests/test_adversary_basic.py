"""
Tests for the basic and width-bounded hard sequences.

Oracle Checklist:
- Witness: replaying it is legal and costs exactly d(s, t).
- Offline optimum: the exact DP agrees with the d(s, t) certificate.
- Stage 2: left(m) = m + Bin(m, 1/2), so E[left(m)] = 3m/2, and stage 3 replays
  3m − min(left, right) copies, which exceeds 3m/2 by E|B − m/2| ≈ 0.4·√m.
- Width-bounded variant: a level-w request holds at most w + 1 points.
"""
import numpy as np
import pytest

from src.adversary import BasicGenConfig, gen_basic_sequence, gen_lgt_sequence, opt_certificate
from src.algorithms import PathFollower
from src.games import opt_cost_dp, run_mss
from src.requests import members


@pytest.fixture(scope="module")
def seeded_rng():
    return np.random.default_rng(seed=2021)


@pytest.mark.parametrize(
    "cfg",
    [
        BasicGenConfig(w=1, m=(1,)),
        BasicGenConfig(w=2, m=(1, 1)),
        BasicGenConfig(w=1, m=(2,)),
        BasicGenConfig(w=1, m=(1,), width_bounded=True),
        BasicGenConfig(w=2, m=(1, 1), width_bounded=True),
    ],
    ids=["basic-1", "basic-1-1", "basic-2", "lgt-1", "lgt-1-1"],
)
def test_witness_certifies_opt(cfg, seeded_rng):
    """Oracle: witness cost = exact DP = d(s, t), and the last request is {t}."""
    space = cfg.space()
    for _ in range(3):
        seq = gen_lgt_sequence(cfg, seeded_rng) if cfg.width_bounded else gen_basic_sequence(cfg, seeded_rng)
        certificate = opt_certificate(space)
        assert run_mss(space, seq, PathFollower(seq)).total == certificate
        assert opt_cost_dp(space, seq).cost == certificate
        assert members(space, seq.requests[-1]) == [space.t]
        assert len(seq.witness) == len(seq)


def test_level_one_shape(seeded_rng):
    seq = gen_basic_sequence(BasicGenConfig(w=1, m=(1,)), seeded_rng)
    assert len(seq) == 8
    assert [c.tag for c in seq.chunks] == ["stage1", "stage2", "stage3", "stage3"]
    assert seq.meta["left"] + seq.meta["right"] == 3
    assert seq.meta["killed"] in ("L", "R")


def test_padding_and_validation(seeded_rng):
    seq = gen_basic_sequence(BasicGenConfig(w=1, m=(1,), pad_to=12), seeded_rng)
    assert len(seq) == 12 and seq.chunks[-1].tag == "pad"
    with pytest.raises(ValueError):
        BasicGenConfig(w=2, m=(2, 1))
    with pytest.raises(ValueError):
        gen_basic_sequence(BasicGenConfig(w=1, m=(1,), width_bounded=True))
    with pytest.raises(ValueError):
        gen_lgt_sequence(BasicGenConfig(w=1, m=(1,)))


@pytest.mark.parametrize(
    "cfg",
    [
        BasicGenConfig(w=1, m=(2,), width_bounded=True),
        BasicGenConfig(w=2, m=(1, 1), width_bounded=True),
        BasicGenConfig(w=2, m=(2, 2), width_bounded=True),
    ],
    ids=["lgt-2", "lgt-1-1", "lgt-2-2"],
)
def test_lgt_request_width(cfg):
    space = cfg.space()
    for seed in range(3):
        seq = gen_lgt_sequence(cfg, np.random.default_rng(seed=seed))
        assert seq.max_cardinality(space) <= cfg.w + 1


@pytest.mark.slow
def test_stage_two_counters_and_stage_three_growth():
    gaps = []
    for m in (4, 16, 64):
        rng = np.random.default_rng(seed=m)
        cfg = BasicGenConfig(w=1, m=(m,))
        lefts, lengths = [], []
        for _ in range(2000):
            meta = gen_basic_sequence(cfg, rng).meta
            lefts.append(meta["left"])
            lengths.append(3 * m - min(meta["left"], meta["right"]))
        lefts = np.array(lefts, dtype=float)
        se = lefts.std(ddof=1) / np.sqrt(len(lefts))
        assert abs(lefts.mean() - 1.5 * m) <= 3 * se
        gap = float(np.mean(lengths)) - 1.5 * m
        assert gap / np.sqrt(m) > 0.3
        gaps.append(gap)
    assert gaps[0] < gaps[1] < gaps[2]
