"""
Hard random sequences for the basic diamond spaces and their width-bounded variant.

Level w+1 is built from fresh level-w sequences played inside single copies:

  stage 1  the same child sequence in (L, i) and (R, i), i = 1..m
  stage 2  m fair coin flips; the winning side plays a child sequence in its next copy
           while every request also holds the frozen side's frontier point
  stage 3  the side with the larger counter is dropped (a tie drops the left side);
           the survivor is driven to t through its remaining copies

The survivor's s→t path serves every request and is returned as the witness.
"""
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..metrics.address import Side, base_point, selector
from ..metrics.diamond import CycleSpace, diamond_basic, lgt_variant
from ..requests.request_set import lift, points, union
from ..requests.sequence import RequestSeq


@dataclass
class BasicGenConfig:
    w: int
    m: tuple = (1,)
    seed: int = 0
    width_bounded: bool = False
    C: tuple = None
    pad_to: int = None

    def __post_init__(self):
        if self.w < 0:
            raise ValueError(f"Level must be ≥ 0, got {self.w}")
        self.m = tuple(int(x) for x in self.m)
        if len(self.m) < self.w:
            raise ValueError(f"m sequence has {len(self.m)} entries, level {self.w} needs {self.w}")
        if any(a > b for a, b in zip(self.m, self.m[1:])):
            raise ValueError(f"m sequence must be non-decreasing, got {self.m}")

    def space(self):
        if self.width_bounded:
            return lgt_variant(self.w, self.m, self.C)
        return diamond_basic(self.w, self.m)


class _Sides:
    """Per-side witness candidates; the survivor's list becomes the witness."""

    def __init__(self):
        self.paths = {Side.L: [], Side.R: []}

    def add(self, left, right):
        self.paths[Side.L].append(left)
        self.paths[Side.R].append(right)

    def extend(self, side, points_, other):
        self.paths[side].extend(points_)
        self.paths[side.other()].extend([other] * len(points_))


def _base_sequence():
    """ρ⁰ on a single edge: {s} then {t}."""
    seq = RequestSeq()
    seq.append_chunk([points(base_point(0)), points(base_point(1))], tag="base", witness=[base_point(0), base_point(1)])
    return seq


def _lift_child(space, sel, child_seq):
    requests = [lift(sel, r) for r in child_seq.requests]
    witness = [space.lift_point(sel, p) for p in child_seq.witness]
    return requests, witness


class BasicSequenceGenerator:
    """Draws level-w sequences for `cfg`; each call to `generate` is an independent draw."""

    def __init__(self, cfg, rng=None):
        self.cfg = cfg
        self.space = cfg.space()
        self.rng = rng if rng is not None else np.random.default_rng(cfg.seed)

    def generate(self):
        seq = self._level(self.space)
        if self.cfg.pad_to is not None and len(seq) < self.cfg.pad_to:
            extra = self.cfg.pad_to - len(seq)
            seq.append_chunk([points(self.space.t)] * extra, tag="pad", witness=[self.space.t] * extra)
        seq.meta.update({"kind": "lgt" if self.cfg.width_bounded else "basic", "w": self.cfg.w})
        return seq

    def _level(self, space):
        if not isinstance(space, CycleSpace):
            return _base_sequence()
        if self.cfg.width_bounded:
            return self._lgt_level(space)
        return self._basic_level(space)

    # --- basic construction ----------------------------------------------------
    def _basic_level(self, space):
        m = space.params["m"][-1]
        seq = RequestSeq(witness=[])
        sides = _Sides()

        for i in range(1, m + 1):
            child = self._level(space.segment(selector(Side.L, i)).space)
            left, left_w = _lift_child(space, selector(Side.L, i), child)
            right, right_w = _lift_child(space, selector(Side.R, i), child)
            seq.append_chunk([union(a, b) for a, b in zip(left, right)], tag="stage1")
            for a, b in zip(left_w, right_w):
                sides.add(a, b)

        counters = {Side.L: m, Side.R: m}
        flips = []
        for _ in range(m):
            eps = int(self.rng.integers(2))
            flips.append(eps)
            self._advance(space, seq, sides, counters, Side.L if eps == 1 else Side.R, "stage2")

        survivor = self._finish(space, seq, sides, counters, 3 * m)
        seq.witness = sides.paths[survivor]
        seq.meta.update({"left": counters[Side.L], "right": counters[Side.R], "flips": flips})
        return seq

    def _advance(self, space, seq, sides, counters, side, tag, offset=0, base_count=0):
        """Play one child sequence in the next copy of `side`, holding the other side's frontier."""
        other = side.other()
        copy = offset + counters[side] + 1 - base_count
        frozen = space.terminal(selector(other, offset + counters[other] - base_count), "t")
        sel = selector(side, copy)
        child = self._level(space.segment(sel).space)
        requests, witness = _lift_child(space, sel, child)
        hold = points(frozen)
        seq.append_chunk([union(r, hold) for r in requests], tag=tag)
        sides.extend(side, witness, frozen)
        counters[side] += 1

    def _finish(self, space, seq, sides, counters, total, offset=0, base_count=0):
        """Stage 3: drop the side with the larger counter, drive the other to t."""
        survivor = Side.R if counters[Side.L] >= counters[Side.R] else Side.L
        first = counters[survivor] + 1
        for count in range(first, total + 1):
            sel = selector(survivor, offset + count - base_count)
            child = self._level(space.segment(sel).space)
            requests, witness = _lift_child(space, sel, child)
            seq.append_chunk(requests, tag="stage3")
            sides.paths[survivor].extend(witness)
        seq.meta.update({"killed": survivor.other().name, "stage3_first": first, "stage3_last": total})
        return survivor

    # --- width-bounded variant -------------------------------------------------
    def _lgt_level(self, space):
        m = space.params["m"][-1]
        seq = RequestSeq(witness=[])
        sides = _Sides()

        s = space.s
        seq.append_chunk([points(s)], tag="edge")
        sides.add(s, s)
        ends = {side: space.terminal(selector(side, 1), "t") for side in (Side.L, Side.R)}
        seq.append_chunk([points(ends[Side.L], ends[Side.R])], tag="edge")
        sides.add(ends[Side.L], ends[Side.R])

        # scaled copies sit at path indices 2..m²+1; full copy k (k > m) at m²+1+(k−m)
        scaled = {Side.L: 0, Side.R: 0}
        for _ in range(m * m):
            for side in (Side.L, Side.R):
                other = side.other()
                frozen = space.terminal(selector(other, 1 + scaled[other]), "t")
                sel = selector(side, 2 + scaled[side])
                child = self._level(space.segment(sel).space)
                requests, witness = _lift_child(space, sel, child)
                hold = points(frozen)
                seq.append_chunk([union(r, hold) for r in requests], tag="stage1")
                sides.extend(side, witness, frozen)
                scaled[side] += 1

        counters = {Side.L: m, Side.R: m}
        offset = m * m + 1
        flips = []
        for _ in range(m):
            eps = int(self.rng.integers(2))
            flips.append(eps)
            self._advance(space, seq, sides, counters, Side.L if eps == 1 else Side.R, "stage2", offset, m)

        survivor = self._finish(space, seq, sides, counters, 3 * m, offset, m)
        seq.witness = sides.paths[survivor]
        seq.meta.update({"left": counters[Side.L], "right": counters[Side.R], "flips": flips})
        return seq


def gen_basic_sequence(cfg, rng=None):
    """One draw of the basic hard sequence on diamond_basic(cfg.w, cfg.m)."""
    if cfg.width_bounded:
        raise ValueError("Width-bounded configs are generated by gen_lgt_sequence")
    return BasicSequenceGenerator(cfg, rng).generate()


def gen_lgt_sequence(cfg, rng=None):
    """One draw of the width-bounded sequence on lgt_variant(cfg.w, cfg.m, cfg.C)."""
    if not cfg.width_bounded:
        raise ValueError("gen_lgt_sequence needs width_bounded=True")
    return BasicSequenceGenerator(cfg, rng).generate()


def opt_certificate(space):
    """d(s, t): the cost of the witness path of every generated sequence."""
    return Fraction(space.distance(space.s, space.t))
