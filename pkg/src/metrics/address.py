from dataclasses import dataclass
from enum import IntEnum


class Side(IntEnum):
    L = 0
    R = 1

    def other(self):
        return Side.R if self is Side.L else Side.L


@dataclass(frozen=True, order=True)
class PointAddr:
    """
    Hierarchical point address: one (side, index) copy selector per recursive
    level, outermost first, ending in a base coordinate.

    Ordering is lexicographic (L < R, smaller index first, shorter first), which is
    the canonical tie-break everywhere in the lab.
    """

    levels: tuple = ()
    base: int = 0

    def child(self):
        """Address with the outermost selector removed"""
        return PointAddr(self.levels[1:], self.base)

    def lift(self, selector):
        return PointAddr((selector,) + self.levels, self.base)

    @property
    def head(self):
        return self.levels[0] if self.levels else None

    def __str__(self):
        return format_addr(self)


def selector(side, index):
    return (Side(side), int(index))


def format_addr(addr):
    """`L1/R2/@3` style token"""
    parts = [f"{Side(side).name}{index}" for side, index in addr.levels]
    parts.append(f"@{addr.base}")
    return "/".join(parts)


def parse_addr(token):
    parts = token.strip().split("/")
    if not parts or not parts[-1].startswith("@"):
        raise ValueError(f"Malformed address token: {token!r}")
    levels = []
    for part in parts[:-1]:
        if len(part) < 2 or part[0] not in "LR":
            raise ValueError(f"Malformed copy selector {part!r} in {token!r}")
        levels.append(selector(Side[part[0]], int(part[1:])))
    return PointAddr(tuple(levels), int(parts[-1][1:]))


def base_point(coordinate):
    return PointAddr((), int(coordinate))
