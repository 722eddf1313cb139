"""Curve families through two image points.

Two families are provided:

* the circles through w1 and w2 (parametrized by the signed offset s of the
  center along the perpendicular bisector; s = inf is the straight line),
* the two-branch quartic family |zeta^2 - 1 - i t| = |t| in the normalized
  coordinate zeta = (2w - w1 - w2)/(w2 - w1), parametrized by real t != 0.

Branch naming is an artifact convention: the 'plus' branch passes through
w2 (zeta = +1), the 'minus' branch through w1 (zeta = -1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePair, ZeroParameter


def _param_grid(stops, n):
    """n increasing parameter values through all stops (stops kept exact)."""
    stops = list(map(float, stops))
    total = stops[-1] - stops[0]
    nseg = len(stops) - 1
    inner = [max(0, round(n * (stops[i + 1] - stops[i]) / total) - 1)
             for i in range(nseg)]
    # n = len(stops) + sum(inner): adjust the largest segments
    want = n - len(stops)
    while sum(inner) > want:
        inner[int(np.argmax(inner))] -= 1
    while sum(inner) < want:
        inner[int(np.argmin(inner))] += 1
    vals = [stops[0]]
    for i in range(nseg):
        if inner[i] > 0:
            vals.extend(np.linspace(stops[i], stops[i + 1], inner[i] + 2)[1:-1])
        vals.append(stops[i + 1])
    return np.asarray(vals)


# ----------------------------------------------------------------------------
# circle family

@dataclass(frozen=True)
class GammaCircle:
    """Circle through w1, w2 with center offset s along the perpendicular
    bisector; s = math.inf encodes the straight line through the pair."""

    w1: complex
    w2: complex
    s: float

    def __post_init__(self):
        if complex(self.w1) == complex(self.w2):
            raise DegeneratePair("w1 and w2 must be distinct")

    @property
    def chord_direction(self) -> complex:
        d = complex(self.w2) - complex(self.w1)
        return d / abs(d)

    def center(self) -> complex:
        if math.isinf(self.s):
            raise ValueError("line member has no center")
        mid = 0.5 * (complex(self.w1) + complex(self.w2))
        return mid + 1j * self.chord_direction * self.s

    def radius(self) -> float:
        if math.isinf(self.s):
            raise ValueError("line member has no radius")
        half = 0.5 * abs(complex(self.w2) - complex(self.w1))
        return math.hypot(half, self.s)

    def residual(self, w) -> float:
        w = complex(w)
        if math.isinf(self.s):
            u = self.chord_direction
            return abs(((w - complex(self.w1)) * np.conj(u)).imag)
        return abs(abs(w - self.center()) - self.radius())


def gamma_circle_through(w1: complex, w2: complex, w: complex) -> float:
    """The unique offset s whose circle passes through w (inf if collinear)."""
    w1, w2, w = complex(w1), complex(w2), complex(w)
    if w1 == w2:
        raise DegeneratePair("w1 and w2 must be distinct")
    mid = 0.5 * (w1 + w2)
    u = (w2 - w1) / abs(w2 - w1)
    v = w - mid
    denom = 2.0 * (np.conj(1j * u) * v).real
    half = 0.5 * abs(w2 - w1)
    if abs(denom) < 1e-14 * max(1.0, abs(v)):
        return math.inf
    return float((abs(v) ** 2 - half ** 2) / denom)


@dataclass(frozen=True)
class GammaTrace:
    """Sampled circle (or line): w1 and w2 appear as exact vertices."""

    points: np.ndarray
    w1_index: int
    w2_index: int
    is_line: bool = False

    def arcs(self):
        """The two sampled arcs joining w1 and w2 (endpoints included).

        For the line member the second 'arc' is the pair of outward rays
        (the arc through infinity, within the sampled bounding segment).
        """
        i, k = self.w1_index, self.w2_index
        first = self.points[i: k + 1]
        second = np.concatenate([self.points[k:], self.points[: i + 1]])
        return first, second


def gamma_trace(circle: GammaCircle, n: int) -> GammaTrace:
    """n points on the circle ordered by parameter, with w1 and w2 as vertices.

    For the line member, a segment of length 4|w1 - w2| centered at the
    midpoint is sampled instead.
    """
    if n < 8:
        raise ValueError("n must be at least 8")
    w1, w2 = complex(circle.w1), complex(circle.w2)
    if math.isinf(circle.s):
        u = circle.chord_direction
        mid = 0.5 * (w1 + w2)
        d = abs(w2 - w1)
        ts = _param_grid([-2.0 * d, -0.5 * d, 0.5 * d, 2.0 * d], n)
        pts = mid + ts * u
        # snap the anchor vertices exactly
        i = int(np.argmin(np.abs(ts + 0.5 * d)))
        k = int(np.argmin(np.abs(ts - 0.5 * d)))
        pts[i] = w1
        pts[k] = w2
        return GammaTrace(pts, i, k, is_line=True)
    c = circle.center()
    r = circle.radius()
    a1 = math.atan2((w1 - c).imag, (w1 - c).real)
    a2 = math.atan2((w2 - c).imag, (w2 - c).real)
    if a2 <= a1:
        a2 += 2 * math.pi
    angles = _param_grid([a1, a2, a1 + 2 * math.pi], n)
    pts = c + r * np.exp(1j * angles)
    pts[0] = w1
    k = int(np.argmin(np.abs(angles - a2)))
    pts[k] = w2
    return GammaTrace(pts, 0, k)


# ----------------------------------------------------------------------------
# quartic two-branch family

@dataclass(frozen=True)
class DeltaCurve:
    w1: complex
    w2: complex
    t: float
    branch: str = "plus"

    def __post_init__(self):
        if complex(self.w1) == complex(self.w2):
            raise DegeneratePair("w1 and w2 must be distinct")
        if self.t == 0:
            raise ZeroParameter("t must be nonzero")
        if self.branch not in ("plus", "minus"):
            raise ValueError("branch must be 'plus' or 'minus'")


def delta_residual(w1: complex, w2: complex, t: float, w) -> float:
    """| |zeta^2 - 1 - i t| - |t| | at zeta = (2w - w1 - w2)/(w2 - w1)."""
    if complex(w1) == complex(w2):
        raise DegeneratePair("w1 and w2 must be distinct")
    w = np.asarray(w, dtype=np.complex128)
    zeta = (2.0 * w - w1 - w2) / (w2 - w1)
    res = np.abs(np.abs(zeta * zeta - 1.0 - 1j * t) - abs(t))
    return float(res) if res.shape == () else res


def delta_trace(curve: DeltaCurve, n: int) -> np.ndarray:
    """Closed polyline (n points, last = first) on the requested branch.

    The zeta^2-circle c(theta) = 1 + i t + |t| e^{i theta} never encircles
    the origin (|1 + i t|^2 = 1 + t^2 > t^2), so a continuous square root
    along it is single-valued and the branch closes up; continuity is
    enforced through the unwrapped argument of c.
    """
    if n < 16:
        raise ValueError("n must be at least 16")
    t = float(curve.t)
    if t == 0:
        raise ZeroParameter("t must be nonzero")
    # start where c(theta) = 1, i.e. at zeta = +1 exactly
    theta0 = -math.copysign(math.pi / 2, t)
    theta = np.linspace(theta0, theta0 + 2 * math.pi, n)
    c = 1.0 + 1j * t + abs(t) * np.exp(1j * theta)
    arg = np.unwrap(np.angle(c))
    arg -= arg[0]  # c(theta0) = 1: anchor the branch at sqrt(1) = +1
    zeta = np.sqrt(np.abs(c)) * np.exp(0.5j * arg)
    if curve.branch == "minus":
        zeta = -zeta
    w1, w2 = complex(curve.w1), complex(curve.w2)
    return 0.5 * (w1 + w2) + zeta * 0.5 * (w2 - w1)


# ----------------------------------------------------------------------------
# SVG export

def polyline_to_svg_path(points, digits: int = 12, closed: bool = False) -> str:
    """Absolute-coordinate SVG path element data for a complex polyline."""
    pts = np.asarray(points, dtype=np.complex128).ravel()
    fmt = f"%.{digits}g"
    parts = [f"M {fmt % pts[0].real} {fmt % pts[0].imag}"]
    for p in pts[1:]:
        parts.append(f"L {fmt % p.real} {fmt % p.imag}")
    if closed:
        parts.append("Z")
    return " ".join(parts)
