from fractions import Fraction
from functools import lru_cache

from .address import PointAddr


class MetricSpace:
    """
    Common surface of every metric space in the lab.

    Spaces are immutable after construction. Distances are exact Fractions and are
    memoized per instance, so a space can be shared by any number of runs.
    """

    kind = "abstract"

    def __init__(self):
        self._distance_cached = lru_cache(maxsize=1 << 18)(self._checked_distance)
        self._points = None
        self._point_count = None

    # --- terminals -------------------------------------------------------------
    @property
    def s(self):
        raise NotImplementedError

    @property
    def t(self):
        raise NotImplementedError

    @property
    def diameter(self):
        raise NotImplementedError

    # --- addressing ------------------------------------------------------------
    def canonical(self, addr):
        """Canonical form of an address; raises ValueError when out of range."""
        raise NotImplementedError

    def is_canonical(self, addr):
        try:
            return self.canonical(addr) == addr
        except ValueError:
            return False

    def localize(self, p, sel):
        """Address of p inside copy `sel`, or None when p is not in that copy."""
        return None

    def reflect(self, addr):
        """Image of addr under the symmetry exchanging s and t."""
        raise ValueError(f"{self.kind} space has no s/t reflection")

    # --- enumeration -----------------------------------------------------------
    def _enumerate(self):
        raise NotImplementedError

    def points(self):
        if self._points is None:
            self._points = tuple(sorted(self._enumerate()))
        return self._points

    def _count(self):
        return len(self.points())

    @property
    def point_count(self):
        """Number of points; spaces that know their size never enumerate for it."""
        if self._point_count is None:
            self._point_count = self._count()
        return self._point_count

    # --- distance --------------------------------------------------------------
    def distance(self, x, y):
        if x == y:
            return self._zero()
        if y < x:
            x, y = y, x
        return self._distance_cached(x, y)

    def _checked_distance(self, x, y):
        for p in (x, y):
            require_point(p)
            if self.canonical(p) != p:
                raise ValueError(f"Non-canonical address {p} (canonical: {self.canonical(p)})")
        return self._distance(x, y)

    def _distance(self, x, y):
        raise NotImplementedError

    def _zero(self):
        return Fraction(0)

    def descriptor(self):
        """Human-readable key-value description (see metrics.descriptor)."""
        raise NotImplementedError

    def __repr__(self):
        fields = ", ".join(f"{k}={v}" for k, v in self.descriptor().items() if k != "kind")
        return f"{type(self).__name__}({fields})"


def require_point(addr):
    if not isinstance(addr, PointAddr):
        raise ValueError(f"Expected a PointAddr, got {addr!r}")
    return addr
