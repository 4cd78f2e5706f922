"""
Recursive diamond spaces.

Every recursive level is a cycle made of two s→t paths (Left and Right) whose
segments are copies of a child space, possibly scaled, glued terminal to terminal.
Distances are evaluated lazily from the child metric: inside one copy the answer is
the cheaper of the within-copy distance and the two detours around the cycle;
across copies it is the cheapest (exit terminal, cycle arc, entry terminal) route.
"""
from dataclasses import dataclass
from fractions import Fraction

from ..config import default_refined_alpha
from .address import PointAddr, Side, selector
from .base import MetricSpace
from .line import LineSpace


@dataclass(frozen=True)
class Segment:
    space: MetricSpace
    scale: Fraction = Fraction(1)

    @property
    def span(self):
        return self.scale * self.space.distance(self.space.s, self.space.t)


class CycleSpace(MetricSpace):
    """Two symmetric s→t paths of segments closing into a cycle."""

    def __init__(self, path, kind, level, params):
        super().__init__()
        if not path:
            raise ValueError("A cycle level needs at least one segment per side")
        self.kind = kind
        self.level = level
        self.params = dict(params)
        self.path = tuple(path)
        self.n = len(self.path)

        self.prefix = [Fraction(0)]
        for seg in self.path:
            self.prefix.append(self.prefix[-1] + seg.span)
        self.half = self.prefix[-1]
        self._s = self.path[0].space.s.lift(selector(Side.L, 1))
        self._t = self.path[-1].space.t.lift(selector(Side.L, self.n))
        self._palindromic = all(
            self.path[k].space is self.path[self.n - 1 - k].space
            and self.path[k].scale == self.path[self.n - 1 - k].scale
            for k in range(self.n)
        )

    # --- terminals -------------------------------------------------------------
    @property
    def s(self):
        return self._s

    @property
    def t(self):
        return self._t

    @property
    def diameter(self):
        # every point lies on an s–t geodesic
        return self.half

    @property
    def child(self):
        return self.path[0].space if len({id(seg.space) for seg in self.path}) == 1 else None

    def segment(self, sel):
        side, index = sel
        if side not in (Side.L, Side.R) or not 1 <= index <= self.n:
            raise ValueError(f"Copy selector {sel} out of range for {self.kind} level {self.level}")
        return self.path[index - 1]

    # --- addressing ------------------------------------------------------------
    def canonical(self, addr):
        if not addr.levels:
            raise ValueError(f"Address {addr} lacks a copy selector at {self.kind} level {self.level}")
        side, index = addr.levels[0]
        seg = self.segment((Side(side), index))
        inner = seg.space.canonical(addr.child())

        if inner == seg.space.s:
            if index == 1:
                return inner.lift(selector(Side.L, 1))
            prev = self.path[index - 2].space
            return prev.t.lift(selector(side, index - 1))
        if inner == seg.space.t and index == self.n:
            return inner.lift(selector(Side.L, self.n))
        return inner.lift(selector(side, index))

    def equivalents(self, p):
        """All (selector, child address) pairs denoting canonical point p."""
        sel = p.head
        inner = p.child()
        side, index = sel
        seg = self.path[index - 1]
        found = [(sel, inner)]
        if inner == seg.space.s:
            found.append((selector(side.other(), 1), inner))
        elif inner == seg.space.t:
            if index < self.n:
                found.append((selector(side, index + 1), self.path[index].space.s))
            else:
                found.append((selector(side.other(), self.n), inner))
        return found

    def localize(self, p, sel):
        for candidate, inner in self.equivalents(p):
            if candidate == sel:
                return inner
        return None

    def lift_point(self, sel, inner):
        return self.canonical(inner.lift(sel))

    def terminal(self, sel, which):
        """Canonical address of terminal `which` ('s' or 't') of copy sel."""
        seg = self.segment(sel)
        return self.lift_point(sel, seg.space.s if which == "s" else seg.space.t)

    def reflect(self, addr):
        if not self._palindromic:
            raise ValueError(f"{self.kind} level {self.level} is not symmetric under s↔t")
        addr = self.canonical(addr)
        side, index = addr.head
        seg = self.path[index - 1]
        mirrored = seg.space.reflect(addr.child())
        return self.lift_point(selector(side, self.n + 1 - index), mirrored)

    def _count(self):
        # segments meet only at their terminals: 2n junctions shared along the cycle
        return 2 * sum(seg.space.point_count for seg in self.path) - 2 * self.n

    def _enumerate(self):
        points = set()
        for side in (Side.L, Side.R):
            for index, seg in enumerate(self.path, start=1):
                sel = selector(side, index)
                for inner in seg.space.points():
                    points.add(self.lift_point(sel, inner))
        return points

    # --- distance --------------------------------------------------------------
    def _position(self, sel, which):
        side, index = sel
        along = self.prefix[index - 1] if which == "s" else self.prefix[index]
        return along if side is Side.L else 2 * self.half - along

    def _arc(self, u, v):
        gap = abs(u - v)
        return min(gap, 2 * self.half - gap)

    def _terminal_offsets(self, p):
        sel = p.head
        seg = self.path[sel[1] - 1]
        inner = p.child()
        child = seg.space
        return (
            sel,
            seg,
            inner,
            seg.scale * child.distance(inner, child.s),
            seg.scale * child.distance(inner, child.t),
        )

    def _distance(self, x, y):
        sel_x, seg_x, inner_x, ax, bx = self._terminal_offsets(x)
        sel_y, seg_y, inner_y, ay, by = self._terminal_offsets(y)

        if sel_x == sel_y:
            around = 2 * self.half - seg_x.span
            return min(
                seg_x.scale * seg_x.space.distance(inner_x, inner_y),
                ax + around + by,
                bx + around + ay,
            )

        best = None
        for exit_x, off_x in (("s", ax), ("t", bx)):
            for entry_y, off_y in (("s", ay), ("t", by)):
                route = off_x + self._arc(self._position(sel_x, exit_x), self._position(sel_y, entry_y)) + off_y
                if best is None or route < best:
                    best = route
        return best

    def descriptor(self):
        return {"kind": self.kind, "w": self.level, **self.params}


# --- constructors --------------------------------------------------------------

def _check_m_sequence(w, m):
    m = tuple(int(x) for x in m)
    if w >= 1 and not m:
        raise ValueError("An empty m sequence cannot build a level w ≥ 1 space")
    if len(m) < w:
        raise ValueError(f"m sequence has {len(m)} entries, level {w} needs {w}")
    if any(x < 1 for x in m):
        raise ValueError(f"m entries must be positive, got {m}")
    if any(a > b for a, b in zip(m, m[1:])):
        raise ValueError(f"m sequence must be non-decreasing, got {m}")
    return m


def diamond_basic(w, m):
    """M_0 is a unit edge; M_{i+1} is a cycle of 6·m_i copies of M_i."""
    if w < 0:
        raise ValueError(f"Level must be ≥ 0, got {w}")
    m = _check_m_sequence(w, m)
    space = LineSpace(1)
    for level in range(1, w + 1):
        copies = 3 * m[level - 1]
        space = CycleSpace(
            [Segment(space)] * copies,
            kind="diamond_basic",
            level=level,
            params={"m": m[:level]},
        )
    return space


def refined_base_level(alpha):
    """Largest w with α·w² ≤ 1 (levels up to it are plain lines)."""
    alpha = Fraction(alpha)
    if alpha <= 0:
        raise ValueError(f"α must be positive, got {alpha}")
    w = 0
    while alpha * (w + 1) ** 2 <= 1:
        w += 1
    return w


def diamond_refined(w, beta, alpha=None):
    """line(β) while α·w² ≤ 1, otherwise six copies of the level below (three per side)."""
    if int(beta) != beta or beta < 2:
        raise ValueError(f"Refined spaces need integer β ≥ 2, got {beta}")
    if w < 0:
        raise ValueError(f"Level must be ≥ 0, got {w}")
    alpha = Fraction(alpha) if alpha is not None else default_refined_alpha(beta)
    base = refined_base_level(alpha)

    space = LineSpace(beta)
    for level in range(base + 1, w + 1):
        space = CycleSpace(
            [Segment(space)] * 3,
            kind="diamond_refined",
            level=level,
            params={"beta": int(beta), "alpha": alpha},
        )
    return space


def lgt_variant(w, m, C=None):
    """
    Width-bounded variant: each side starts with an extra edge of length
    (C_i/m_i)·diam(M_i), then m_i² copies of M_i scaled by 1/m_i, then 2·m_i full copies.
    """
    if w < 0:
        raise ValueError(f"Level must be ≥ 0, got {w}")
    m = _check_m_sequence(w, m)
    C = tuple(Fraction(c) for c in (C if C is not None else [1] * max(w, len(m))))
    if len(C) < w:
        raise ValueError(f"C sequence has {len(C)} entries, level {w} needs {w}")

    space = LineSpace(1)
    edge = LineSpace(1)
    for level in range(1, w + 1):
        mw, cw = m[level - 1], C[level - 1]
        if not 0 < cw <= mw:
            raise ValueError(f"Extra edge C_w/m_w must lie in (0, 1], got {cw}/{mw}")
        diam = space.diameter
        path = (
            [Segment(edge, cw * diam / mw)]
            + [Segment(space, Fraction(1, mw))] * (mw * mw)
            + [Segment(space)] * (2 * mw)
        )
        space = CycleSpace(
            path,
            kind="lgt_variant",
            level=level,
            params={"m": m[:level], "C": C[:level]},
        )
    return space


def is_diamond(space):
    return isinstance(space, CycleSpace)


__all__ = [
    "CycleSpace",
    "Segment",
    "PointAddr",
    "diamond_basic",
    "diamond_refined",
    "lgt_variant",
    "refined_base_level",
    "is_diamond",
]
