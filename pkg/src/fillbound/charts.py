"""Near-Euclidean chart models: distortion-certified lengths and cone
fillings of loops inside a chart ball.

A chart carries coordinates in R^4 for a subset of complex vertices and a
sampled metric tensor field.  The field is evaluated by nearest sample;
validation checks the C0 deviation plus the radius-scaled finite-difference
derivative against the 1e-3 budget, which in turn certifies the length
ratio bounds used everywhere else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

DEVIATION_BOUND = 1e-3
LENGTH_RATIO_LO = math.sqrt(1.0 - 1e-3)
LENGTH_RATIO_HI = math.sqrt(1.0 + 2e-3)
# net slack of the cone construction; strictly below 1, so the cone bound
# mass <= length * r_h always has room
CONE_SLACK = math.sqrt(1.0 + 2e-3) / (2.0 * (1.0 - 1e-3))


class DistortionError(AssertionError):
    """Measured lengths violate the certified distortion bounds."""


class HarmonicChart:
    """Chart ball of radius r_h around an anchor vertex.

    ``coords`` maps complex vertex ids to points of R^4 (anchor at the
    origin); ``samples`` is a list of (point, g) pairs sampling the metric
    tensor.  A chart with a single flat sample models exact Euclidean data.
    """

    dimension = 4

    def __init__(self, anchor: int, radius: float,
                 coords: Dict[int, Sequence[float]],
                 samples: Sequence[Tuple[Sequence[float], np.ndarray]]):
        if radius <= 0:
            raise ValueError("chart radius must be positive")
        self.anchor = anchor
        self.radius = float(radius)
        self.coords = {v: np.asarray(p, dtype=float) for v, p in coords.items()}
        for v, p in self.coords.items():
            if p.shape != (4,):
                raise ValueError(f"vertex {v} coordinate is not 4-dimensional")
            if np.linalg.norm(p) >= self.radius:
                raise ValueError(
                    f"vertex {v} lies outside the open chart ball")
        if not samples:
            samples = [(np.zeros(4), np.eye(4))]
        self.sample_points = np.array([np.asarray(p, dtype=float)
                                       for p, _ in samples])
        self.sample_g = np.array([np.asarray(g, dtype=float)
                                  for _, g in samples])
        if self.sample_g.shape[1:] != (4, 4):
            raise ValueError("metric samples must be 4x4 tensors")

    def metric_at(self, x: np.ndarray) -> np.ndarray:
        """Nearest-sample metric tensor."""
        d = np.linalg.norm(self.sample_points - x, axis=1)
        return self.sample_g[int(np.argmin(d))]

    def has_coords(self, v: int) -> bool:
        return v in self.coords

    def point(self, v: int) -> np.ndarray:
        return self.coords[v]


@dataclass
class ChartPolyline:
    """Ordered chart points; consecutive points must differ."""

    points: List[np.ndarray]
    closed: bool = False

    def __post_init__(self):
        self.points = [np.asarray(p, dtype=float) for p in self.points]
        for a, b in zip(self.points, self.points[1:]):
            if np.array_equal(a, b):
                raise ValueError("consecutive polyline points coincide")
        if self.closed and len(self.points) >= 2 and np.array_equal(
                self.points[0], self.points[-1]):
            self.points = self.points[:-1]

    def segments(self) -> List[Tuple[np.ndarray, np.ndarray]]:
        segs = list(zip(self.points, self.points[1:]))
        if self.closed and len(self.points) >= 2:
            segs.append((self.points[-1], self.points[0]))
        return segs


@dataclass
class ChartValidation:
    valid: bool
    c0_deviation: float
    scaled_derivative: float
    worst_sample: int
    message: str


def _opnorm(m: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvalsh(0.5 * (m + m.T)))))


def validate_chart(ch: HarmonicChart,
                   neighbors: int = 6) -> ChartValidation:
    """Check the C0 + scaled-derivative deviation budget at all samples.

    The derivative is estimated by finite differences toward each sample's
    nearest neighbors.  Returns the worst offender either way.
    """
    eye = np.eye(4)
    devs = [_opnorm(g - eye) for g in ch.sample_g]
    worst = int(np.argmax(devs)) if devs else 0
    c0 = max(devs) if devs else 0.0
    fd = 0.0
    n = len(ch.sample_points)
    if n > 1:
        k = min(neighbors, n - 1)
        for i in range(n):
            d = np.linalg.norm(ch.sample_points - ch.sample_points[i], axis=1)
            order = np.argsort(d)
            for j in order[1:k + 1]:
                step = d[j]
                if step <= 0:
                    continue
                fd = max(fd, _opnorm(ch.sample_g[i] - ch.sample_g[j]) / step)
    total = c0 + ch.radius * fd
    ok = total <= DEVIATION_BOUND
    msg = (f"deviation {total:.3e} (C0 {c0:.3e} + r*dg {ch.radius * fd:.3e}) "
           f"{'within' if ok else 'EXCEEDS'} {DEVIATION_BOUND}")
    return ChartValidation(ok, c0, ch.radius * fd, worst, msg)


def chart_length(p: ChartPolyline, ch: HarmonicChart) -> Tuple[float, float]:
    """(Euclidean, metric) length of a polyline inside the chart ball.

    The metric length integrates sqrt(g(v, v)) with the midpoint rule per
    segment; the certified distortion window between the two lengths is
    asserted.
    """
    for pt in p.points:
        if np.linalg.norm(pt) >= ch.radius:
            raise ValueError("polyline leaves the chart ball")
    euclid = 0.0
    metric = 0.0
    for a, b in p.segments():
        seg = b - a
        ln = float(np.linalg.norm(seg))
        if ln == 0.0:
            continue
        euclid += ln
        g = ch.metric_at(0.5 * (a + b))
        metric += ln * math.sqrt(float(seg @ g @ seg) / (ln * ln))
    if euclid > 0:
        ratio = metric / euclid
        if not (LENGTH_RATIO_LO - 1e-12 <= ratio <= LENGTH_RATIO_HI + 1e-12):
            raise DistortionError(
                f"distortion bound violated: metric/euclidean ratio {ratio}")
    return euclid, metric


FanTriangle = Tuple[Tuple[float, ...], Tuple[float, ...], int]


def _metric_area(a: np.ndarray, b: np.ndarray, g: np.ndarray) -> float:
    gaa = float(a @ g @ a)
    gbb = float(b @ g @ b)
    gab = float(a @ g @ b)
    det = max(gaa * gbb - gab * gab, 0.0)
    return 0.5 * math.sqrt(det)


def cone_fill(z: ChartPolyline, ch: HarmonicChart
              ) -> Tuple[List[FanTriangle], float]:
    """Fill a closed loop by the triangle fan to the chart origin.

    Returns the fan as ((p_i, p_{i+1}), multiplicity) spoke pairs and the
    metric mass of the fan.  Oppositely traversed duplicate segments cancel,
    so a degenerate back-and-forth loop fills to nothing.  The certified
    bound  mass <= metric_length(z) * r_h  is asserted.
    """
    if not z.closed:
        raise ValueError("cone filling needs a closed polyline")
    half = ch.radius / 2.0
    for pt in z.points:
        if np.linalg.norm(pt) >= half:
            raise ValueError("polyline escapes the half ball")
    acc: Dict[Tuple[Tuple[float, ...], Tuple[float, ...]], int] = {}
    for a, b in z.segments():
        ka, kb = tuple(map(float, a)), tuple(map(float, b))
        if ka <= kb:
            key, sgn = (ka, kb), 1
        else:
            key, sgn = (kb, ka), -1
        acc[key] = acc.get(key, 0) + sgn
    fan: List[FanTriangle] = []
    total = 0.0
    for (ka, kb), m in sorted(acc.items()):
        if m == 0:
            continue
        a = np.array(ka)
        b = np.array(kb)
        g = ch.metric_at((a + b) / 3.0)  # centroid of (0, a, b)
        total += abs(m) * _metric_area(a, b, g)
        fan.append((ka, kb, m))
    _, metric_len = chart_length(z, ch)
    if total > metric_len * ch.radius + 1e-12:
        raise DistortionError(
            f"cone mass {total} exceeds length*radius bound "
            f"{metric_len * ch.radius}")
    return fan, total


def ball_diameter_check(ch: HarmonicChart, complex, metric=None) -> float:
    """Verify chart coordinates exist out to skeleton radius r_h/2.

    Every complex vertex within skeleton distance r_h/2 of the anchor must
    have chart coordinates; returns the maximal chart norm among them.
    """
    from .covering import SkeletonMetric

    metric = metric or SkeletonMetric(complex)
    half = ch.radius / 2.0
    worst = 0.0
    tree = metric._tree(ch.anchor)[0]
    for v, d in tree.items():
        if d <= half:
            if not ch.has_coords(v):
                raise ValueError(
                    f"vertex {v} lies within r_h/2 of the anchor but has "
                    f"no chart coordinates")
            worst = max(worst, float(np.linalg.norm(ch.point(v))))
    return worst
