"""
Refined chunked sequences on diamond_refined spaces.

Levels with α·w² ≤ 1 are lines: β singleton chunks {1}, …, {β} of size 1. Above that,
level w+1 is played on six copies of level w in three stages:

  stage 1   one child sequence in (L,1) and (R,1) at once
  stage 2a  two child sequences in (L,2) and (R,2); each step advances one of them,
            the left with probability n_R/(n_L+n_R), while every request also holds
            the other side's last set. Stops before Σ n_L·n_R reaches αβw²/4.
  stage 2b  the side with the smaller consumed total (the left on a tie) finishes
  stage 3   a fresh child sequence in copy 3 of that side

The resulting subchunks are regrouped into chunks of size about 3 child units by
`combine_subchunks`; in rollout mode the expected remaining size after each subchunk
is estimated by simulating the rest of the construction from the sizes revealed so far.
"""
from dataclasses import dataclass, replace
from fractions import Fraction
from math import log

import numpy as np

from ..config import default_refined_alpha
from ..metrics.address import Side, base_point, selector
from ..metrics.diamond import CycleSpace, diamond_refined, refined_base_level
from ..requests.request_set import lift, members, points, union
from ..requests.sequence import ChunkedSeq
from .combine import Mode, combine_subchunks

POOL_SEED = 4_2021

# normalized chunk sizes are kept in [c_avg − c̃_max, c_avg + c̃_max] / 3
SIZE_LOW = Fraction(1, 2)
SIZE_HIGH = Fraction(3, 2)

_POOLS = {}
_WARNED_BETA = set()


class GeneratorExhaustedError(RuntimeError):
    """A child sequence ran out of chunks before the stage-2a stopping rule fired."""


@dataclass
class RefinedParams:
    w: int
    beta: int = 64
    alpha: Fraction = None
    seed: int = 0
    mode: str = Mode.ROLLOUT.value
    rollouts: int = 256
    pool_size: int = 32
    strict: bool = False

    def __post_init__(self):
        if int(self.beta) != self.beta or self.beta < 2:
            raise ValueError(f"β must be an integer ≥ 2, got {self.beta}")
        if self.w < 0:
            raise ValueError(f"Level must be ≥ 0, got {self.w}")
        self.beta = int(self.beta)
        self.alpha = Fraction(self.alpha) if self.alpha is not None else default_refined_alpha(self.beta)
        if self.alpha <= 0:
            raise ValueError(f"α must be positive, got {self.alpha}")
        self.mode = Mode(self.mode).value
        if self.pool_size < 1:
            raise ValueError(f"Rollout pool needs at least one sequence, got {self.pool_size}")

    @classmethod
    def from_settings(cls, settings, w, desk=False, **overrides):
        values = {
            "beta": settings.desk_beta if desk else settings.refined_beta,
            "alpha": settings.desk_alpha if desk else settings.refined_alpha,
            "seed": settings.seed,
            "rollouts": settings.rollouts,
            "pool_size": settings.pool_size,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(w=w, **values)

    @property
    def base_level(self):
        return refined_base_level(self.alpha)

    def space(self):
        return diamond_refined(self.w, self.beta, self.alpha)

    def threshold(self, child_level):
        """Stage-2a stopping threshold αβw²/4 for a level-(w+1) sequence."""
        return self.alpha * self.beta * child_level * child_level / 4


# --- rollout estimation ---------------------------------------------------------

@dataclass(frozen=True)
class Snapshot:
    """
    What the sequence has revealed after some number of subchunks: the normalized
    sizes of the child chunks issued so far and the stage-2a product. `stage` is the
    stage of the last issued subchunk ("1" before anything is issued).
    """

    stage: str = "1"
    first: tuple = ()
    left: tuple = ()
    right: tuple = ()
    product: float = 0.0
    survivor: tuple = ()
    last: tuple = ()


def _widen(matrix, width):
    if matrix.shape[1] >= width:
        return matrix
    return np.pad(matrix, ((0, 0), (0, width - matrix.shape[1])))


class RolloutEstimator:
    """
    Expected normalized size of everything after a snapshot. Each child sequence the
    snapshot has only partly revealed is completed by a pool row with the same prefix
    (any pool row when none matches); unrevealed ones are pool rows. All rollouts
    advance together as numpy vectors, and every snapshot is simulated from the same
    seed, so an estimate depends on nothing but the revealed prefix.
    """

    def __init__(self, pool, threshold, rollouts, seed=POOL_SEED):
        if rollouts <= 0:
            raise ValueError("Rollout mode needs a positive rollout budget")
        if not len(pool):
            raise ValueError("Rollout pool is empty")
        self.lengths = np.array([len(p) for p in pool])
        self.width = int(self.lengths.max())
        self.table = np.zeros((len(pool), self.width))
        for k, row in enumerate(pool):
            self.table[k, :len(row)] = np.asarray(row, dtype=float)
        self.threshold = float(threshold)
        self.rollouts = int(rollouts)
        self.seed = seed
        self._paths = {}

    def __call__(self, snap):
        sizes, _ = self.paths(snap)
        return float(sizes.sum(axis=1).mean())

    def remaining_at_boundary(self, snap, target):
        """
        Expected remaining size at the first later subchunk after which the remaining
        size is at most `target`, along the same rollouts that produced the estimate.
        """
        sizes, valid = self.paths(snap)
        after = sizes.sum(axis=1, keepdims=True) - np.cumsum(sizes, axis=1)
        hit = valid & (after <= target + 1e-9)
        first = hit.argmax(axis=1)
        reached = np.where(hit.any(axis=1), after[np.arange(len(after)), first], 0.0)
        return float(reached.mean())

    def paths(self, snap):
        """Future subchunk sizes per rollout (rows) and which entries are real subchunks."""
        if snap not in self._paths:
            self._paths[snap] = self._rollout(snap)
        return self._paths[snap]

    def _rollout(self, snap):
        rng = np.random.default_rng(self.seed)
        parts = []
        if snap.stage == "1":
            parts.append(self._tail(*self._draw(snap.first, rng), len(snap.first)))
        if snap.stage in ("1", "2a"):
            parts.extend(self._stage2(snap, rng))
        elif snap.stage == "2b":
            parts.append(self._tail(*self._draw(snap.survivor, rng), len(snap.survivor)))
        if snap.stage == "3":
            parts.append(self._tail(*self._draw(snap.last, rng), len(snap.last)))
        else:
            parts.append(self._tail(*self._draw((), rng), 0))
        return np.hstack([s for s, _ in parts]), np.hstack([v for _, v in parts])

    def _draw(self, prefix, rng):
        """Pool rows agreeing with `prefix`, with the prefix written over their start."""
        k = len(prefix)
        fits = self.lengths >= k
        if 0 < k <= self.width:
            fits &= np.isclose(self.table[:, :k], prefix).all(axis=1)
        candidates = np.flatnonzero(fits)
        if not candidates.size:
            candidates = np.arange(len(self.table))
        pick = candidates[rng.integers(candidates.size, size=self.rollouts)]
        drawn = _widen(self.table[pick], k)
        if k:
            drawn[:, :k] = prefix
        return drawn, np.maximum(self.lengths[pick], k)

    @staticmethod
    def _tail(drawn, lengths, start):
        columns = np.arange(drawn.shape[1])
        valid = (columns >= np.reshape(start, (-1, 1))) & (columns < lengths[:, None])
        return np.where(valid, drawn, 0.0), valid

    def _stage2(self, snap, rng):
        left, len_l = self._draw(snap.left, rng)
        right, len_r = self._draw(snap.right, rng)
        width = max(left.shape[1], right.shape[1])
        left, right = _widen(left, width), _widen(right, width)
        # one column of ones past the end keeps lookups in range
        pad_l = np.hstack([left, np.ones((self.rollouts, 1))])
        pad_r = np.hstack([right, np.ones((self.rollouts, 1))])

        rows = np.arange(self.rollouts)
        i_l = np.full(self.rollouts, len(snap.left))
        i_r = np.full(self.rollouts, len(snap.right))
        product = np.full(self.rollouts, snap.product)
        l_sum = np.full(self.rollouts, float(sum(snap.left)))
        r_sum = np.full(self.rollouts, float(sum(snap.right)))
        active = np.ones(self.rollouts, dtype=bool)
        steps, flags = [], []
        while True:
            n_l = pad_l[rows, np.minimum(i_l, width)]
            n_r = pad_r[rows, np.minimum(i_r, width)]
            prod = n_l * n_r
            active &= (i_l < len_l) & (i_r < len_r) & (product + prod < self.threshold)
            if not active.any():
                break
            go_left = rng.random(self.rollouts) < n_r / (n_l + n_r)
            moved_l, moved_r = active & go_left, active & ~go_left
            steps.append(np.where(active, prod / (n_l + n_r), 0.0))
            flags.append(active.copy())
            product += np.where(active, prod, 0.0)
            l_sum += np.where(moved_l, n_l, 0.0)
            r_sum += np.where(moved_r, n_r, 0.0)
            i_l += moved_l
            i_r += moved_r

        if steps:
            walk = (np.column_stack(steps), np.column_stack(flags))
        else:
            walk = (np.zeros((self.rollouts, 0)), np.zeros((self.rollouts, 0), dtype=bool))
        keep_left = l_sum <= r_sum
        survivor = np.where(keep_left[:, None], left, right)
        lengths = np.where(keep_left, len_l, len_r)
        return [walk, self._tail(survivor, lengths, np.where(keep_left, i_l, i_r))]


# --- generator -------------------------------------------------------------------

def _base_chunks(line, level):
    seq = ChunkedSeq(witness=[], level=level, unit=line.diameter / line.beta, mode="base")
    for i in range(1, line.beta + 1):
        seq.append_chunk([points(base_point(i))], size=line.unit, tag="base", witness=[base_point(i)])
    return seq


def _warn_small_beta(beta):
    message = f"β={beta} is far below the regime where the chunk properties are guaranteed; they are reported, not enforced"
    if beta < 64 and beta not in _WARNED_BETA:
        _WARNED_BETA.add(beta)
        print(f"⚠️  {message}")
    return message if beta < 64 else None


class RefinedGenerator:
    """Draws level-w refined chunked sequences; each `generate` call is a fresh draw."""

    def __init__(self, params, rng=None):
        self.params = params
        self.space = params.space()
        self.rng = rng if rng is not None else np.random.default_rng(params.seed)
        self.warnings = []
        small = _warn_small_beta(params.beta)
        if small:
            self.warnings.append(small)

    def generate(self):
        seq = self._chunks(self.space)
        seq.meta.update({
            "kind": "refined",
            "w": self.params.w,
            "beta": self.params.beta,
            "alpha": str(self.params.alpha),
            "mode": self.params.mode,
            "warnings": list(self.warnings),
        })
        return seq

    def subchunks(self):
        sub, _ = self.subchunk_states()
        return sub

    def subchunk_states(self):
        """One draw of the subchunks together with the revealed state before each of them."""
        if not isinstance(self.space, CycleSpace):
            raise ValueError(
                f"Level {self.params.w} is a base level (α·w² ≤ 1); subchunks exist only above level {self.params.base_level}"
            )
        sub, snapshots, record = self._subchunks(self.space)
        sub.meta.update(record)
        return sub, snapshots

    def estimator(self, space=None):
        """Rollout estimator for the subchunks of `space` (the generator's own space by default)."""
        space = space if space is not None else self.space
        return RolloutEstimator(
            self._pool(space.child),
            self.params.threshold(space.level - 1),
            self.params.rollouts,
        )

    def _warn(self, message):
        print(f"⚠️  {message}")
        self.warnings.append(message)

    # --- one level -------------------------------------------------------------
    def _chunks(self, space):
        if not isinstance(space, CycleSpace):
            return _base_chunks(space, self.params.base_level)

        sub, snapshots, record = self._subchunks(space)
        u = space.child.diameter / self.params.beta
        remaining = boundary = None
        if self.params.mode == Mode.ROLLOUT.value:
            estimator = self.estimator(space)
            scale = float(u)
            remaining = lambda h: estimator(snapshots[h]) * scale
            boundary = lambda h, target: estimator.remaining_at_boundary(snapshots[h], float(target) / scale) * scale
        seq = combine_subchunks(
            sub, 3 * u, Fraction(3, 2) * u, self.params.mode, remaining, self.params.rollouts, boundary=boundary
        )
        record["size_violations"] = self._clamp(seq)
        seq.meta = record
        return seq

    def _clamp(self, seq):
        """Pull rollout estimates back into the size interval; realized sizes are left alone."""
        outside = []
        for index, chunk in enumerate(seq.chunks):
            normalized = chunk.size / seq.unit
            if SIZE_LOW <= normalized <= SIZE_HIGH:
                continue
            outside.append((index, float(normalized)))
            if self.params.mode == Mode.ROLLOUT.value:
                chunk.size = min(max(normalized, SIZE_LOW), SIZE_HIGH) * seq.unit
        if outside and self.params.mode == Mode.ROLLOUT.value:
            worst = max(abs(x - 1) - 0.5 for _, x in outside)
            self._warn(f"Level {seq.level}: {len(outside)} rollout size estimate(s) left [1/2, 3/2] by up to {float(worst):.3f}")
        return outside

    def _pool(self, child):
        """Normalized size sequences of independent child draws, shared across generators."""
        level = getattr(child, "level", self.params.base_level)
        p = self.params
        key = (p.beta, p.alpha, p.mode, p.rollouts, p.pool_size, level)
        if key not in _POOLS:
            maker = RefinedGenerator(
                replace(p, w=level, strict=False),
                rng=np.random.default_rng([POOL_SEED, level]),
            )
            _POOLS[key] = [
                np.array([float(x) for x in maker._chunks(child).normalized_sizes()])
                for _ in range(p.pool_size)
            ]
        return _POOLS[key]

    def _subchunks(self, space):
        beta = self.params.beta
        child = space.child
        u = child.diameter / beta
        threshold = self.params.threshold(space.level - 1)
        sub = ChunkedSeq(witness=[], level=space.level, unit=space.diameter / beta, mode="subchunks")
        snapshots = []
        state = Snapshot()
        paths = {Side.L: [], Side.R: []}

        first = self._chunks(child)
        sizes = [float(x) for x in first.normalized_sizes()]
        l1, r1 = selector(Side.L, 1), selector(Side.R, 1)
        for k, chunk in enumerate(first.chunks):
            snapshots.append(state)
            requests = first.chunk_requests(k)
            sub.append_chunk([union(lift(l1, r), lift(r1, r)) for r in requests], size=chunk.size, tag="stage1")
            for p in first.witness[chunk.start:chunk.stop]:
                paths[Side.L].append(space.lift_point(l1, p))
                paths[Side.R].append(space.lift_point(r1, p))
            state = Snapshot("1", first=tuple(sizes[:k + 1]))

        seqs = {side: self._chunks(child) for side in (Side.L, Side.R)}
        n = {side: seqs[side].normalized_sizes() for side in seqs}
        arrays = {side: np.array([float(x) for x in n[side]]) for side in seqs}
        frontier = {side: lift(selector(side, 1), first.requests[-1]) for side in seqs}
        held = {side: paths[side][-1] for side in seqs}
        index = {Side.L: 0, Side.R: 0}
        used = {Side.L: Fraction(0), Side.R: Fraction(0)}
        product = Fraction(0)
        increments, variances = [], []
        exhausted = False

        while True:
            if index[Side.L] >= len(n[Side.L]) or index[Side.R] >= len(n[Side.R]):
                exhausted = True
                message = (
                    f"Stage 2a at level {space.level} ran out of child chunks after "
                    f"{len(increments)} subchunks (Σ n_L·n_R = {float(product):.3f} < {float(threshold):.3f})"
                )
                if self.params.strict:
                    raise GeneratorExhaustedError(message)
                self._warn(message)
                break
            n_l, n_r = n[Side.L][index[Side.L]], n[Side.R][index[Side.R]]
            if product + n_l * n_r >= threshold:
                break
            snapshots.append(state)
            side = Side.L if self.rng.random() < float(n_r / (n_l + n_r)) else Side.R
            other = side.other()
            sel = selector(side, 2)
            chunk = seqs[side].chunks[index[side]]
            requests = seqs[side].chunk_requests(index[side])
            sub.append_chunk(
                [union(lift(sel, r), frontier[other]) for r in requests],
                size=n_l * n_r / (n_l + n_r) * u,
                tag="stage2a",
            )
            lifted = [space.lift_point(sel, p) for p in seqs[side].witness[chunk.start:chunk.stop]]
            paths[side].extend(lifted)
            paths[other].extend([held[other]] * len(lifted))
            held[side] = lifted[-1]
            frontier[side] = lift(sel, requests[-1])

            step = n_l if side is Side.L else n_r
            used[side] += step
            increments.append(step if side is Side.L else -step)
            variances.append(n_l * n_r)
            product += n_l * n_r
            index[side] += 1
            state = Snapshot(
                "2a",
                left=tuple(arrays[Side.L][:index[Side.L]]),
                right=tuple(arrays[Side.R][:index[Side.R]]),
                product=float(product),
            )

        survivor = Side.L if used[Side.L] <= used[Side.R] else Side.R
        sel = selector(survivor, 2)
        rest = seqs[survivor]
        for k in range(index[survivor], rest.m):
            snapshots.append(state)
            chunk = rest.chunks[k]
            sub.append_chunk([lift(sel, r) for r in rest.chunk_requests(k)], size=chunk.size, tag="stage2b")
            paths[survivor].extend(space.lift_point(sel, p) for p in rest.witness[chunk.start:chunk.stop])
            state = Snapshot("2b", survivor=tuple(arrays[survivor][:k + 1]))

        last = self._chunks(child)
        sizes = [float(x) for x in last.normalized_sizes()]
        sel = selector(survivor, 3)
        for k, chunk in enumerate(last.chunks):
            snapshots.append(state)
            sub.append_chunk([lift(sel, r) for r in last.chunk_requests(k)], size=chunk.size, tag="stage3")
            paths[survivor].extend(space.lift_point(sel, p) for p in last.witness[chunk.start:chunk.stop])
            state = Snapshot("3", last=tuple(sizes[:k + 1]))

        sub.witness = paths[survivor]
        record = {
            "level": space.level,
            "kappa": len(increments),
            "exhausted": exhausted,
            "survivor": survivor.name,
            "left_used": used[Side.L],
            "right_used": used[Side.R],
            "increments": increments,
            "variances": variances,
            "child_chunks": (seqs[Side.L].m, seqs[Side.R].m),
        }
        return sub, snapshots, record


def gen_refined_chunks(params, rng=None):
    """One draw of the level-w refined chunked sequence."""
    return RefinedGenerator(params, rng).generate()


def gen_subchunks(params, rng=None):
    """One draw of the level-w subchunks before combining (inductive levels only)."""
    return RefinedGenerator(params, rng).subchunks()


# --- reporting ---------------------------------------------------------------------

def check_chunked_seq(seq, params, space=None, dp=False, budget=50_000_000):
    """
    Report the chunk properties of one generated sequence. Properties that only hold
    for large β are reported with a warning instead of raised.
    """
    from ..algorithms.offline_agents import PathFollower
    from ..games.engine import run_mss

    space = space if space is not None else params.space()
    tolerance = Fraction(1, 20) if seq.mode == Mode.ROLLOUT.value else Fraction(0)
    normalized = seq.normalized_sizes()
    violations = [
        (i, float(x)) for i, x in enumerate(normalized)
        if x < SIZE_LOW - tolerance or x > SIZE_HIGH + tolerance
    ]
    raw = [(i, x) for i, x in seq.meta.get("size_violations", []) if abs(x - 1) - 0.5 > float(tolerance)]

    certificate = Fraction(space.distance(space.s, space.t))
    replay = run_mss(space, seq, PathFollower(seq)).total
    n_points = space.point_count
    cardinality = seq.max_cardinality(space)
    growth = n_points ** (log(2) / log(6))
    required = params.alpha * params.beta * seq.level ** 2

    report = {
        "level": seq.level,
        "mode": seq.mode,
        "m": seq.m,
        "required_m": float(required),
        "m_ok": seq.m >= required,
        "size_violations": violations + raw,
        "opt_certificate": certificate,
        "witness_cost": replay,
        "certificate_ok": replay == certificate,
        "ends_at_t": members(space, seq.requests[-1]) == [space.t],
        "max_cardinality": cardinality,
        "points": n_points,
        "cardinality_ratio": cardinality / growth,
        "kappa": seq.meta.get("kappa"),
        "exhausted": seq.meta.get("exhausted", False),
        "warnings": list(seq.meta.get("warnings", [])),
    }
    if dp:
        from ..games.offline import opt_cost_dp
        report["opt_dp"] = opt_cost_dp(space, seq, budget=budget).cost
        report["certificate_ok"] = report["certificate_ok"] and report["opt_dp"] == certificate

    for ok, message in (
        (report["m_ok"], f"m = {seq.m} < αβw² = {float(required):.2f}"),
        (not report["size_violations"], f"{len(report['size_violations'])} chunk size(s) outside [1/2, 3/2]·unit"),
        (report["certificate_ok"], f"witness cost {replay} ≠ d(s,t) = {certificate}"),
    ):
        if not ok:
            print(f"⚠️  {message}")
            report["warnings"].append(message)
    return report
