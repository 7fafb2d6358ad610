"""Truncated univariate power series.

Coefficients may be floats or :class:`fractions.Fraction`; arithmetic keeps
whatever type it is given so the recurrences can be run exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

RADIUS_FLOOR = 1e-3


def ratio_radius(coeffs: Sequence, tail: int = 4) -> float:
    """Ratio-test radius from the trailing ``tail`` coefficients, floored."""
    c = [abs(float(v)) for v in coeffs[-tail:]]
    ratios = [c[i] / c[i + 1] for i in range(len(c) - 1) if c[i] > 0 and c[i + 1] > 0]
    if not ratios:
        return math.inf
    return max(float(np.mean(ratios)), RADIUS_FLOOR)


@dataclass(frozen=True)
class TruncatedSeries:
    """sum_{j<=order} coeffs[j] t**j, valid for |t| <= radius_estimate."""

    coeffs: tuple
    order: int = field(default=-1)
    radius_estimate: float = field(default=math.nan)

    def __post_init__(self):
        coeffs = tuple(self.coeffs)
        if not coeffs:
            raise ValueError("series needs at least one coefficient")
        object.__setattr__(self, "coeffs", coeffs)
        if self.order < 0:
            object.__setattr__(self, "order", len(coeffs) - 1)
        if len(coeffs) != self.order + 1:
            raise ValueError(f"order {self.order} needs {self.order + 1} coefficients, got {len(coeffs)}")
        if math.isnan(self.radius_estimate):
            object.__setattr__(self, "radius_estimate", ratio_radius(coeffs))
        if not self.radius_estimate > 0:
            raise ValueError("radius_estimate must be positive")

    @property
    def exact(self) -> bool:
        return all(isinstance(c, (Fraction, int)) for c in self.coeffs)

    def __getitem__(self, j):
        return self.coeffs[j]

    def as_float(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs])

    def _check(self, t):
        tmax = np.max(np.abs(np.asarray(t, dtype=float)))
        if tmax > self.radius_estimate * (1 + 1e-12):
            raise ValueError(f"|t|={tmax:g} outside radius estimate {self.radius_estimate:g}")

    def eval(self, t):
        self._check(t)
        if isinstance(t, Fraction) and self.exact:
            acc = Fraction(0)
            for c in reversed(self.coeffs):
                acc = acc * t + c
            return acc
        return np.polynomial.polynomial.polyval(t, self.as_float())

    __call__ = eval

    def deriv(self) -> "TruncatedSeries":
        if self.order == 0:
            return TruncatedSeries((self.coeffs[0] * 0,), radius_estimate=self.radius_estimate)
        d = tuple(j * self.coeffs[j] for j in range(1, self.order + 1))
        return TruncatedSeries(d, radius_estimate=self.radius_estimate)

    def eval_deriv(self, t):
        return self.deriv().eval(t)

    # arithmetic truncated at the smaller order, radius is the smaller one
    def _combine(self, other, op):
        if isinstance(other, TruncatedSeries):
            n = min(self.order, other.order)
            c = tuple(op(self.coeffs[j], other.coeffs[j]) for j in range(n + 1))
            rad = min(self.radius_estimate, other.radius_estimate)
        else:
            c = (op(self.coeffs[0], other),) + tuple(op(v, 0 * v) for v in self.coeffs[1:])
            rad = self.radius_estimate
        return TruncatedSeries(c, radius_estimate=rad)

    def __add__(self, other):
        return self._combine(other, lambda u, v: u + v)

    def __sub__(self, other):
        return self._combine(other, lambda u, v: u - v)

    def scale(self, s) -> "TruncatedSeries":
        return TruncatedSeries(tuple(s * c for c in self.coeffs), radius_estimate=self.radius_estimate)

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            n = min(self.order, other.order)
            c = tuple(cauchy(self.coeffs, other.coeffs, j) for j in range(n + 1))
            return TruncatedSeries(c, radius_estimate=min(self.radius_estimate, other.radius_estimate))
        return self.scale(other)

    __rmul__ = __mul__

    def reciprocal(self) -> "TruncatedSeries":
        """1/s to the same order; requires a nonzero constant term."""
        c0 = self.coeffs[0]
        if c0 == 0:
            raise ZeroDivisionError("reciprocal of a series with zero constant term")
        one = Fraction(1) if self.exact else 1.0
        inv = [one / c0]
        for j in range(1, self.order + 1):
            acc = sum(self.coeffs[i] * inv[j - i] for i in range(1, j + 1))
            inv.append(-acc / c0)
        return TruncatedSeries(tuple(inv), radius_estimate=self.radius_estimate)

    def truncate(self, order: int) -> "TruncatedSeries":
        order = min(order, self.order)
        return TruncatedSeries(self.coeffs[: order + 1], radius_estimate=self.radius_estimate)

    def to_float(self) -> "TruncatedSeries":
        return TruncatedSeries(tuple(float(c) for c in self.coeffs), radius_estimate=self.radius_estimate)

    # JSON: {"coeffs": [...], "order": N, "radius": r}
    def to_dict(self) -> dict:
        coeffs = [str(c) if isinstance(c, Fraction) else float(c) for c in self.coeffs]
        return {"coeffs": coeffs, "order": self.order, "radius": self.radius_estimate}

    def dumps(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "TruncatedSeries":
        coeffs = tuple(Fraction(c) if isinstance(c, str) else float(c) for c in d["coeffs"])
        return cls(coeffs, order=int(d["order"]), radius_estimate=float(d["radius"]))

    @classmethod
    def loads(cls, s: str) -> "TruncatedSeries":
        return cls.from_dict(json.loads(s))


def cauchy(a: Sequence, b: Sequence, j: int):
    """Coefficient of t**j in the product of two coefficient sequences."""
    return sum(a[i] * b[j - i] for i in range(j + 1) if i < len(a) and j - i < len(b))
