"""The explicit constant formulas of the filling bound, in log2 space.

The headline quantities involve towers like N^(4 N^(2N)) that overflow any
fixed-width type already at N = 3, so every value is computed as a base-2
logarithm; for N <= 3 an exact big-rational shadow computation cross-checks
the log-space column.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional


def log2_bigint(n: int) -> float:
    """log2 of a positive integer of arbitrary size."""
    if n <= 0:
        raise ValueError("log2 of a nonpositive integer")
    bl = n.bit_length()
    if bl <= 53:
        return math.log2(n)
    shift = bl - 53
    return math.log2(n >> shift) + shift


def log2_fraction(q: Fraction) -> float:
    if q <= 0:
        raise ValueError("log2 of a nonpositive value")
    return log2_bigint(q.numerator) - log2_bigint(q.denominator)


def log2_add(a: float, b: float) -> float:
    """log2(2^a + 2^b), safe for astronomically large exponents."""
    if a == -math.inf:
        return b
    if b == -math.inf:
        return a
    hi, lo = (a, b) if a >= b else (b, a)
    if hi - lo > 60:
        return hi
    return hi + math.log2(1.0 + 2.0 ** (lo - hi))


def log2_value(x: float) -> float:
    if x < 0:
        raise ValueError("log2 of a negative value")
    return -math.inf if x == 0 else math.log2(x)


def log_le(lhs_log2: float, rhs_log2: float, rel_slack: float = 1e-9) -> bool:
    """Log-safe comparison  lhs <= rhs  with a tiny relative slack."""
    if lhs_log2 == -math.inf:
        return True
    return lhs_log2 <= rhs_log2 + rel_slack * max(1.0, abs(rhs_log2))


@dataclass
class BoundParams:
    """Instance parameters feeding the constant formulas.

    n_balls is the total ball count of the covering, diameter an upper
    bound for the complex diameter, neck_distortion the neck constant B,
    depth/width the tree bounds, h1_max the largest neck group order and
    epsilon the neck regularity budget.
    """

    n_balls: int
    diameter: float
    neck_distortion: float
    depth: int
    width: int
    h1_max: int
    epsilon: float = 1e-2

    def validate(self):
        if self.n_balls < 1:
            raise ValueError("need at least one ball")
        for name in ("diameter", "neck_distortion", "depth", "width",
                     "h1_max"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")

    def to_json_dict(self) -> dict:
        return {"n_balls": self.n_balls, "diameter": self.diameter,
                "neck_distortion": self.neck_distortion, "depth": self.depth,
                "width": self.width, "h1_max": self.h1_max,
                "epsilon": self.epsilon}

    @classmethod
    def from_json_dict(cls, d: dict) -> "BoundParams":
        p = cls(n_balls=int(d["n_balls"]), diameter=float(d["diameter"]),
                neck_distortion=float(d["neck_distortion"]),
                depth=int(d["depth"]), width=int(d["width"]),
                h1_max=int(d["h1_max"]), epsilon=float(d.get("epsilon", 1e-2)))
        p.validate()
        return p


def neck_distortion_constant(epsilon: float) -> float:
    """The printed neck constant B = (20/3) sqrt(1-eps) sqrt(1+2 eps).

    Implemented exactly as printed; the first factor arguably should divide
    instead, which validation surfaces rather than silently correcting.
    """
    return (20.0 / 3.0) * math.sqrt(1.0 - epsilon) * math.sqrt(1.0 + 2.0 * epsilon)


def h_constant_log2(h1_max: int) -> float:
    """log2 of h = 2 * h1^h1, the short-representative budget."""
    return 1.0 + h1_max * math.log2(h1_max) if h1_max > 1 else 1.0


@dataclass
class BoundTable:
    """All derived constants in log2 space, plus the exact shadow column."""

    g1_log2: float
    g2_log2: float
    f1_log2: float
    f2_log2: float
    F_log2: float
    area_log2: float
    h_log2: float
    exact: Optional[Dict[str, Fraction]]

    def to_json_dict(self) -> dict:
        d = {"g1_log2": self.g1_log2, "g2_log2": self.g2_log2,
             "f1_log2": self.f1_log2, "f2_log2": self.f2_log2,
             "F_log2": self.F_log2, "area_log2": self.area_log2,
             "h_log2": self.h_log2}
        if self.exact is not None:
            d["exact"] = {k: str(v) for k, v in self.exact.items()}
        return d


def bound_calculator(params: BoundParams) -> BoundTable:
    """Evaluate g1, g2, f1, f2, F and the varifold area bound.

    g1 = (240 N^(4 N^(2N)) + 40 N^2 + 60) D
    g2 = 3 N^(4 N^(N+1)) N^3 D^2 + g1 * 2 D N^3
    f1 = g1 (2B + 1)^depth,   f2 = g2 * h * width * depth
    F  = 120 f1 D + 60 f2,    area = 60 (2 D f1 + f2)  [identical to F]
    """
    params.validate()
    N = params.n_balls
    D = params.diameter
    B = params.neck_distortion
    logN = math.log2(N) if N > 1 else 0.0
    logD = log2_value(D)

    tower1 = 4 * N ** (2 * N)        # exponent of N in g1
    tower2 = 4 * N ** (N + 1)        # exponent of N in g2's leading term
    g1_log2 = log2_add(math.log2(240.0) + tower1 * logN,
                       math.log2(40.0 * N * N + 60.0)) + logD
    g2_log2 = log2_add(
        math.log2(3.0) + tower2 * logN + 3 * logN + 2.0 * logD,
        g1_log2 + 1.0 + logD + 3 * logN)
    h_log2 = h_constant_log2(params.h1_max)
    f1_log2 = g1_log2 + params.depth * math.log2(2.0 * B + 1.0)
    f2_log2 = (g2_log2 + h_log2 + math.log2(params.width)
               + math.log2(params.depth))
    F_log2 = log2_add(math.log2(120.0) + f1_log2 + logD,
                      math.log2(60.0) + f2_log2)
    area_log2 = math.log2(60.0) + log2_add(1.0 + logD + f1_log2, f2_log2)

    exact = None
    if N <= 3:
        Df = Fraction(D)
        Bf = Fraction(B)
        g1 = (240 * Fraction(N) ** tower1 + 40 * N * N + 60) * Df
        g2 = (3 * Fraction(N) ** tower2 * N ** 3 * Df ** 2
              + g1 * 2 * Df * N ** 3)
        h = 2 * Fraction(params.h1_max) ** params.h1_max
        f1 = g1 * (2 * Bf + 1) ** params.depth
        f2 = g2 * h * params.width * params.depth
        F = 120 * f1 * Df + 60 * f2
        area = 60 * (2 * Df * f1 + f2)
        if F != area:
            raise AssertionError("area-bound identity F == 60(2Df1+f2) broke")
        exact = {"g1": g1, "g2": g2, "h": h, "f1": f1, "f2": f2,
                 "F": F, "area": area}
    return BoundTable(g1_log2, g2_log2, f1_log2, f2_log2, F_log2,
                      area_log2, h_log2, exact)
