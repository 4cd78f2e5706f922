from fractions import Fraction

from .address import PointAddr, base_point
from .base import MetricSpace


class LineSpace(MetricSpace):
    """β+1 equally spaced points 0..β; s = 0, t = β."""

    kind = "line"

    def __init__(self, beta, unit=Fraction(1)):
        super().__init__()
        if int(beta) != beta or beta < 1:
            raise ValueError(f"Line needs β ≥ 1 (β = 0 collapses s and t), got {beta}")
        self.beta = int(beta)
        self.unit = Fraction(unit)
        if self.unit <= 0:
            raise ValueError(f"Unit length must be positive, got {unit}")

    @property
    def s(self):
        return base_point(0)

    @property
    def t(self):
        return base_point(self.beta)

    @property
    def diameter(self):
        return self.beta * self.unit

    def canonical(self, addr):
        if addr.levels or not 0 <= addr.base <= self.beta:
            raise ValueError(f"Address {addr} is outside line(β={self.beta})")
        return addr

    def reflect(self, addr):
        return base_point(self.beta - self.canonical(addr).base)

    def _count(self):
        return self.beta + 1

    def _enumerate(self):
        return [base_point(i) for i in range(self.beta + 1)]

    def _distance(self, x, y):
        return abs(x.base - y.base) * self.unit

    def descriptor(self):
        return {"kind": self.kind, "beta": self.beta, "unit": self.unit}


class UniformSpace(MetricSpace):
    """ℓ points at pairwise distance `diam`."""

    kind = "uniform"

    def __init__(self, ell, diam=Fraction(1)):
        super().__init__()
        if ell < 2:
            raise ValueError(f"Uniform metric needs ℓ ≥ 2, got {ell}")
        self.ell = int(ell)
        self.diam = Fraction(diam)

    @property
    def s(self):
        return base_point(0)

    @property
    def t(self):
        return base_point(self.ell - 1)

    @property
    def diameter(self):
        return self.diam

    def canonical(self, addr):
        if addr.levels or not 0 <= addr.base < self.ell:
            raise ValueError(f"Address {addr} is outside uniform(ℓ={self.ell})")
        return addr

    def _count(self):
        return self.ell

    def _enumerate(self):
        return [base_point(i) for i in range(self.ell)]

    def _distance(self, x, y):
        return self.diam

    def descriptor(self):
        return {"kind": self.kind, "ell": self.ell, "diam": self.diam}


def line_metric(beta, unit=Fraction(1)):
    return LineSpace(beta, unit)


def uniform_metric(ell, diam=Fraction(1)):
    return UniformSpace(ell, diam)


__all__ = ["LineSpace", "UniformSpace", "line_metric", "uniform_metric", "PointAddr"]
