"""
Universal lower-bound distribution on HSTs.

`select_subspace` picks, at every internal node, ℓ subtrees by the size dichotomy
(binary when √n₁ + √n₂ ≥ √n, otherwise the smallest ℓ ≥ 3 with ℓ·√n_ℓ ≥ √n) and
recurses into them; in the uniform sub-case it keeps one leaf per subtree instead.
A draw from D is 2ℓ chunks, each in a uniformly random U_i. Requests forbid points
(OUT polarity) and are restricted to U; `lift_to` adds U′∖U for play on the full tree.
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np

from ..metrics.address import base_point
from ..metrics.hst import HstSpace, uniform_hst
from ..requests.request_set import Points, Polarity, RequestSet, union
from ..requests.sequence import RequestSeq


class Case(str, Enum):
    LEAF = "leaf"
    UNIFORM = "uniform"
    BALANCED = "balanced"
    BINARY = "binary"


@dataclass(eq=False)
class UniversalPlan:
    case: Case
    node: object
    leaves: tuple
    children: list = field(default_factory=list)
    ell: int = 1
    alpha: Fraction = Fraction(1, 16)
    sizes: tuple = ()
    space: HstSpace = None

    def __post_init__(self):
        self._owner = {}
        for i, child in enumerate(self.children):
            for p in child.leaves:
                self._owner[p] = i
        self._outside = None

    @property
    def is_singleton(self):
        return len(self.leaves) == 1

    @property
    def diam(self):
        return Fraction(0) if self.is_singleton else self.node.weight

    @property
    def start(self):
        return self.children[0].start if self.children else self.leaves[0]

    def child_of(self, p):
        """Index of the U_i holding p, or None when p is outside U."""
        return self._owner.get(p)

    def outside(self):
        """U′∖U as a request node, shared by every lifted request."""
        if self._outside is None:
            inside = set(self.leaves)
            self._outside = Points(frozenset(p for p in self.space.points() if p not in inside))
        return self._outside

    def describe(self):
        out = {"case": self.case.value, "ell": self.ell, "points": len(self.leaves), "diam": self.diam, "alpha": self.alpha}
        if self.sizes:
            out["sizes"] = list(self.sizes)
        return out


# --- subspace selection ------------------------------------------------------------

def binary_holds(n1, n2, n):
    """√n₁ + √n₂ ≥ √n, decided exactly."""
    gap = n - n1 - n2
    return gap <= 0 or 4 * n1 * n2 >= gap * gap


def balanced_ell(sizes):
    """Smallest ℓ ≥ 3 with ℓ·√n_ℓ ≥ √n (sizes sorted non-increasing), or None."""
    n = sum(sizes)
    for ell in range(3, len(sizes) + 1):
        if ell * ell * sizes[ell - 1] >= n:
            return ell
    return None


def case_dichotomy(sizes):
    """Which alternatives of the size dichotomy hold for a sorted size sequence."""
    sizes = sorted(sizes, reverse=True)
    n = sum(sizes)
    padded = list(sizes) + [0, 0]
    return {
        "binary": binary_holds(padded[0], padded[1], n),
        "ell": balanced_ell(sizes),
    }


def uniform_condition(ell, n_ell, alpha):
    return math.log2(ell) >= 2 * float(alpha) * math.log2(n_ell)


def select_subspace(root, alpha=Fraction(1, 16), space=None):
    if root is None:
        raise ValueError("Empty tree")
    space = space if space is not None else HstSpace(root)
    return _select(space, root, Fraction(alpha))


def _leaf_plan(space, leaf_node, alpha):
    lo, _ = space.leaf_range(leaf_node)
    return UniversalPlan(Case.LEAF, leaf_node, (base_point(lo),), alpha=alpha, sizes=(1,), space=space)


def _select(space, current, alpha):
    if current.is_leaf:
        return _leaf_plan(space, current, alpha)
    if len(current.children) == 1:
        return _select(space, current.children[0], alpha)

    ordered = sorted(current.children, key=lambda c: -c.leaf_count())
    sizes = tuple(c.leaf_count() for c in ordered)
    n = sum(sizes)

    if binary_holds(sizes[0], sizes[1], n):
        case, ell = Case.BINARY, 2
    else:
        ell = balanced_ell(sizes)
        if ell is None:
            raise ValueError(f"Size dichotomy fails for child sizes {sizes}")
        case = Case.UNIFORM if uniform_condition(ell, sizes[ell - 1], alpha) else Case.BALANCED

    if case is Case.UNIFORM:
        children = [_leaf_plan(space, space.leaf_nodes[space.leaf_range(sub)[0]], alpha) for sub in ordered[:ell]]
    else:
        children = [_select(space, sub, alpha) for sub in ordered[:ell]]
    leaves = tuple(sorted(p for child in children for p in child.leaves))
    return UniversalPlan(case, current, leaves, children, ell, alpha, sizes, space)


def uniform_plan(ell, diam=Fraction(1), alpha=Fraction(1, 16)):
    """Uniform-case plan over all ℓ leaves of a star (the size test alone says binary for ℓ ≤ 4)."""
    root = uniform_hst(ell, diam)
    space = HstSpace(root)
    children = [_leaf_plan(space, lf, Fraction(alpha)) for lf in space.leaf_nodes]
    return UniversalPlan(Case.UNIFORM, root, space.points(), children, ell, Fraction(alpha), (1,) * ell, space)


# --- sampling ----------------------------------------------------------------------

@dataclass
class UniversalChunk:
    index: int
    requests: list = field(default_factory=list)
    sub_draws: list = field(default_factory=list)

    def forbidden(self):
        if self.sub_draws:
            return [p for draw in self.sub_draws for p in draw.forbidden()]
        return list(self.requests)


@dataclass
class UniversalDraw:
    plan: UniversalPlan
    chunks: list = field(default_factory=list)

    def forbidden(self):
        return [p for chunk in self.chunks for p in chunk.forbidden()]

    def counts(self):
        found = [0] * self.plan.ell
        for chunk in self.chunks:
            found[chunk.index] += 1
        return found


def subchunk_count(plan, child):
    ratio = plan.diam / (2 * child.diam)
    if ratio < 1 or ratio.denominator != 1:
        raise ValueError(f"diam(U)/2diam(U_i) = {ratio} is not a positive integer; preprocess the HST first")
    return int(ratio)


def draw_universal(plan, rng):
    """One draw from D as a chunk tree."""
    if plan.is_singleton:
        raise ValueError("The distribution needs a subspace with at least two points")
    chunks = []
    for _ in range(2 * plan.ell):
        i = int(rng.integers(plan.ell))
        child = plan.children[i]
        if child.is_singleton:
            chunks.append(UniversalChunk(i, [child.leaves[0]] if rng.random() < 0.5 else []))
        else:
            k = subchunk_count(plan, child)
            chunks.append(UniversalChunk(i, sub_draws=[draw_universal(child, rng) for _ in range(k)]))
    return UniversalDraw(plan, chunks)


def _request(p, polarity=Polarity.OUT):
    return RequestSet(Points(frozenset([p])), polarity)


def draws_to_sequence(plan, draws):
    seq = RequestSeq(meta={"kind": "universal", **plan.describe(), "h": len(draws), "draws": list(draws)})
    size = plan.diam / (2 * plan.ell)
    for draw in draws:
        for chunk in draw.chunks:
            seq.append_chunk([_request(p) for p in chunk.forbidden()], size=size, tag=f"U{chunk.index + 1}")
    return seq


def sample_universal(plan, rng, draws=1, lift=False):
    """`draws` independent draws from D, concatenated; chunks are tagged U1..Uℓ."""
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(rng)
    seq = draws_to_sequence(plan, [draw_universal(plan, rng) for _ in range(draws)])
    return lift_to(seq, plan) if lift else seq


def lift_to(seq, plan):
    """Add U′∖U to every request so the sequence can be played on the whole tree."""
    outside = plan.outside()
    if not outside.points:
        return seq
    lifted = [union(r, RequestSet(outside, r.polarity)) for r in seq.requests]
    return RequestSeq(lifted, list(seq.chunks), seq.witness, {**seq.meta, "lifted": True})


def harmonic(j):
    """H_j = 1 + 1/2 + … + 1/j (H_0 = 0)."""
    return sum((Fraction(1, k) for k in range(1, j + 1)), Fraction(0))


def coupon_collector_ratio(ell, h, trials, rng=None, algorithms=("random_eligible",), diam=Fraction(1), budget=50_000_000):
    """
    Race online algorithms against h draws of the uniform-case distribution on ℓ
    points; OPT is the exact DP. Returns per-algorithm means and E[online]/E[OPT].
    """
    from ..algorithms.registry import make_algorithm
    from ..games.engine import run_mss
    from ..games.offline import opt_cost_dp

    if ell < 2:
        raise ValueError(f"Coupon collector needs ℓ ≥ 2, got {ell}")
    rng = rng if rng is not None else np.random.default_rng()
    plan = uniform_plan(ell, diam)
    space = plan.space
    print(f"🚀 Coupon collector: ℓ={ell}, h={h}, trials={trials}")

    online = {name: [] for name in algorithms}
    opts = []
    for _ in range(trials):
        seq = sample_universal(plan, rng, draws=h)
        opts.append(float(opt_cost_dp(space, seq, plan.start, budget).cost))
        for name in algorithms:
            algorithm = make_algorithm(name, rng=rng)
            online[name].append(float(run_mss(space, seq, algorithm, plan.start).total))

    mean_opt = float(np.mean(opts))
    target = harmonic(ell - 1)
    result = {
        "ell": ell,
        "h": h,
        "trials": trials,
        "mean_opt": mean_opt,
        "target": float(target),
        "online": {name: float(np.mean(v)) for name, v in online.items()},
        "ratio": {name: (float(np.mean(v)) / mean_opt if mean_opt else math.inf) for name, v in online.items()},
    }
    for name, ratio in result["ratio"].items():
        print(f"📊 {name}: ratio {ratio:.4f} (target H_{ell - 1} = {float(target):.4f})")
    return result
