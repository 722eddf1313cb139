"""Two-point distortion bounds: both sides, slack, and hypothesis status.

Four report kinds are produced:

* goluzin_1      -- the derivative-product bound
                    |(1-|z1|^2) f'(z1) (1-|z2|^2) f'(z2)| tanh^2 d <= |w1-w2|^2
* lemma_2        -- the inner-radius product bound r(B1,W1) r(B2,W2) <= |W1-W2|^2
* schwarzian_5   -- the two-point Schwarzian bound (see schwarzian_report)
* rho_12_13      -- the four-point energy bound whose rho -> 0 rescaling
                    recovers the Schwarzian bound's slack

Complex squares such as (1 - z1 conj(z2))^2 are evaluated as complex numbers
inside Re{.}, never as moduli.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import covering as _covering
from .diskgeom import inner_radius, pseudo_hyperbolic
from .errors import (
    CoincidentImages,
    ContinuationFailed,
    CriticalPoint,
    DuplicatePoints,
    ParameterOutOfRange,
)
from .rational import RationalMap, jet_eval, schwarzian_of_jet

SLACK_TOL = 1e-10  # default "holds" threshold: slack >= -SLACK_TOL

HYP_ASSUMED = "assumed"
HYP_OK = "checked_ok"
HYP_VIOLATED = "checked_violated"


@dataclass(frozen=True)
class BoundReport:
    inequality_id: str
    lhs: float
    rhs: float
    slack: float
    hypothesis: str
    inputs: dict = field(default_factory=dict)

    def holds(self, tol: float = SLACK_TOL) -> bool:
        return self.slack >= -tol

    def to_json_dict(self):
        out = {
            "inequality_id": self.inequality_id,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "hypothesis": self.hypothesis,
        }
        out.update({f"input_{k}": v for k, v in sorted(self.inputs.items())})
        return out


def _point_inputs(rmap, z1, z2, extra=None):
    d = {
        "map": rmap.digest(),
        "z1": [complex(z1).real, complex(z1).imag],
        "z2": [complex(z2).real, complex(z2).imag],
    }
    if extra:
        d.update(extra)
    return d


# ----------------------------------------------------------------------------
# derivative-product bound

def goluzin_report(rmap: RationalMap, z1: complex, z2: complex,
                   check: bool = False,
                   n: int = _covering.DEFAULT_CURVE_SAMPLES,
                   m: int = _covering.DEFAULT_FAMILY_SAMPLES) -> BoundReport:
    """Both sides of the derivative-product bound at (z1, z2).

    With check=True the circle-family covering hypothesis is tested and the
    verdict recorded; otherwise the hypothesis is marked 'assumed'.
    """
    z1, z2 = complex(z1), complex(z2)
    j1 = jet_eval(rmap, z1)
    j2 = jet_eval(rmap, z2)
    w1, w2 = j1.f, j2.f
    if abs(w1 - w2) <= 1e-14 * max(1.0, abs(w1), abs(w2)):
        raise CoincidentImages("f(z1) = f(z2)")
    ratio = pseudo_hyperbolic(z1, z2)  # tanh of the hyperbolic distance
    lhs = (
        (1.0 - abs(z1) ** 2) * abs(j1.f1)
        * (1.0 - abs(z2) ** 2) * abs(j2.f1)
        * ratio * ratio
    )
    rhs = abs(w1 - w2) ** 2
    hypothesis = HYP_ASSUMED
    extra = {}
    if check:
        verdict = _covering.check_gamma_covering(rmap, z1, z2, n, m)
        hypothesis = HYP_OK if verdict.ok else HYP_VIOLATED
        extra["resolution"] = list(verdict.resolution)
    return BoundReport("goluzin_1", float(lhs), float(rhs), float(rhs - lhs),
                       hypothesis, _point_inputs(rmap, z1, z2, extra))


def goluzin_extremal_map(lam: float, w1: complex, w2: complex) -> RationalMap:
    """Extremal map for the derivative-product bound at the pair (-lam, lam).

    Affine image of k(z) = z/(1 - z^2) with k(+-lam) sent to (w2, w1): the
    image is the plane minus one or two rays on the line through the
    midpoint of [w1, w2] orthogonal to the segment.
    """
    if not 0.0 < lam < 1.0:
        raise ParameterOutOfRange("lam must lie in (0, 1)")
    w1, w2 = complex(w1), complex(w2)
    if w1 == w2:
        raise ValueError("w1 and w2 must be distinct")
    a = (w2 - w1) * (1.0 - lam * lam) / (2.0 * lam)
    b = 0.5 * (w1 + w2)
    return RationalMap([b, a, -b], [1.0, 0.0, -1.0])


# ----------------------------------------------------------------------------
# inner-radius product bound

def lemma_product_check(b1, w1: complex, b2, w2: complex,
                        budget=None) -> BoundReport:
    """r(b1, w1) r(b2, w2) versus |w1 - w2|^2 for two disjoint plane domains.

    Inner radii come from closed forms where the domain kind has one, and
    from the Monte-Carlo estimator otherwise.
    """
    w1, w2 = complex(w1), complex(w2)

    def _radius(domain, z):
        try:
            return inner_radius(domain, z)
        except Exception:
            from .capacity import WalkBudget, inner_radius_numeric

            est = inner_radius_numeric(domain, z, budget or WalkBudget())
            return est.value

    r1 = _radius(b1, w1)
    r2 = _radius(b2, w2)
    lhs = r1 * r2
    rhs = abs(w1 - w2) ** 2
    inputs = {
        "domains": [type(b1).__name__, type(b2).__name__],
        "w1": [w1.real, w1.imag],
        "w2": [w2.real, w2.imag],
        "r1": r1,
        "r2": r2,
    }
    return BoundReport("lemma_2", float(lhs), float(rhs), float(rhs - lhs),
                       HYP_ASSUMED, inputs)


# ----------------------------------------------------------------------------
# two-point Schwarzian bound

def schwarzian_report(rmap: RationalMap, z1: complex, z2: complex,
                      check: bool = False,
                      n: int = _covering.DEFAULT_CURVE_SAMPLES,
                      m: int = _covering.DEFAULT_FAMILY_SAMPLES) -> BoundReport:
    """Both sides of the two-point Schwarzian bound at (z1, z2):

        Re{ sum_k S_f(z_k)(w2-w1)^2 / (6 f'(z_k)^2)
            + 2 (w2-w1)^2 / (f'(z1) f'(z2) (z1-z2)^2)
            + 2 |w2-w1|^2 / (f'(z1) conj(f'(z2)) (1 - z1 conj(z2))^2) }
        <=  2 + |w2-w1|^2 / (|f'(z1)|^2 (1-|z1|^2)^2)
              + |w2-w1|^2 / (|f'(z2)|^2 (1-|z2|^2)^2).

    With check=True the quartic-family covering hypothesis is tested.
    """
    z1, z2 = complex(z1), complex(z2)
    if z1 == z2:
        raise ValueError("z1 and z2 must be distinct")
    j1 = jet_eval(rmap, z1)
    j2 = jet_eval(rmap, z2)
    if min(abs(j1.f1), abs(j2.f1)) <= 1e-12:
        raise CriticalPoint("z1/z2 must avoid critical points")
    w1, w2 = j1.f, j2.f
    if abs(w1 - w2) <= 1e-14 * max(1.0, abs(w1), abs(w2)):
        raise CoincidentImages("f(z1) = f(z2)")
    s1 = schwarzian_of_jet(j1)
    s2 = schwarzian_of_jet(j2)
    dw = w2 - w1
    dw2 = dw * dw
    absdw2 = abs(dw) ** 2
    lhs_c = (
        s1 * dw2 / (6.0 * j1.f1 * j1.f1)
        + s2 * dw2 / (6.0 * j2.f1 * j2.f1)
        + 2.0 * dw2 / (j1.f1 * j2.f1 * (z1 - z2) ** 2)
        + 2.0 * absdw2 / (j1.f1 * np.conj(j2.f1) * (1.0 - z1 * np.conj(z2)) ** 2)
    )
    lhs = float(np.real(lhs_c))
    rhs = float(
        2.0
        + absdw2 / (abs(j1.f1) ** 2 * (1.0 - abs(z1) ** 2) ** 2)
        + absdw2 / (abs(j2.f1) ** 2 * (1.0 - abs(z2) ** 2) ** 2)
    )
    hypothesis = HYP_ASSUMED
    extra = {}
    if check:
        verdict = _covering.check_delta_covering(rmap, z1, z2, n, m)
        hypothesis = HYP_OK if verdict.ok else HYP_VIOLATED
        extra["resolution"] = list(verdict.resolution)
    return BoundReport("schwarzian_5", lhs, rhs, rhs - lhs, hypothesis,
                       _point_inputs(rmap, z1, z2, extra))


def extremal_schwarzian_map(lam: float) -> RationalMap:
    """Equality case of the Schwarzian bound at (-lam, lam), 0 < lam < 1.

    Degree-(2,2) rational map with f(-lam) = -1, f(lam) = 1, mapping the
    disk univalently onto the plane slit along an arc of |w| = 1.
    """
    if not 0.0 < lam < 1.0:
        raise ParameterOutOfRange("lam must lie in (0, 1)")
    lam = float(lam)
    c = 1.0 + lam * lam
    return RationalMap(
        [-1j * lam, c, -1j * lam],
        [lam, -1j * c, lam],
    )


# ----------------------------------------------------------------------------
# four-point energy and its rho -> 0 limit

def reduced_energy(points, potentials, rmap: RationalMap) -> float:
    """sum_k log[(1-|p_k|^2) |f'(p_k)|]
       + sum_{k != l} d_k d_l log|(1 - conj(p_k) p_l)/(p_k - p_l)|

    with ordered pairs (each unordered pair counted twice).
    """
    pts = [complex(p) for p in points]
    pot = [float(d) for d in potentials]
    if len(pts) != len(pot):
        raise ValueError("points and potentials must have equal length")
    npts = len(pts)
    for i in range(npts):
        for k in range(i + 1, npts):
            if abs(pts[i] - pts[k]) < 1e-12:
                raise DuplicatePoints(f"points {i} and {k} coincide")
    total = 0.0
    for i, p in enumerate(pts):
        jet = jet_eval(rmap, p)
        if abs(jet.f1) <= 1e-12:
            raise CriticalPoint(f"point {i} is a critical point")
        total += math.log((1.0 - abs(p) ** 2) * abs(jet.f1))
    for i in range(npts):
        for k in range(npts):
            if i == k:
                continue
            total += pot[i] * pot[k] * math.log(
                abs((1.0 - np.conj(pts[i]) * pts[k]) / (pts[i] - pts[k]))
            )
    return total


def normalized_pair_map(rmap: RationalMap, z1: complex, z2: complex) -> RationalMap:
    """Postcompose with w -> (2w - w1 - w2)/(w2 - w1) so images become -1, 1."""
    w1 = jet_eval(rmap, complex(z1)).f
    w2 = jet_eval(rmap, complex(z2)).f
    if abs(w1 - w2) <= 1e-14 * max(1.0, abs(w1), abs(w2)):
        raise CoincidentImages("f(z1) = f(z2)")
    return rmap.postcompose_affine(2.0 / (w2 - w1), -(w1 + w2) / (w2 - w1))


def _continue_preimage(rmap: RationalMap, w: complex, anchor: complex,
                       scale: float) -> complex:
    """Newton solve f(z) = w from the anchor; the branch must stay local."""
    r = npoly.polysub(rmap.numerator, complex(w) * rmap.denominator)
    dr = npoly.polyder(r)
    z = complex(anchor)
    for _ in range(100):
        dv = complex(npoly.polyval(z, dr))
        if dv == 0:
            raise ContinuationFailed("zero derivative during continuation")
        step = complex(npoly.polyval(z, r)) / dv
        z -= step
        if abs(step) < 1e-16 * max(1.0, abs(z)):
            break
    if abs(complex(rmap(z)) - w) > 1e-11 * max(1.0, abs(w)):
        raise ContinuationFailed(f"no convergence at w = {w}")
    if abs(z - anchor) > 10.0 * scale:
        raise ContinuationFailed("continuation left the local branch")
    return z


def rho_family_report(rmap: RationalMap, z1: complex, z2: complex,
                      rho: float) -> BoundReport:
    """Four-point energy bound at offsets rho around the normalized images.

    Requires f(z1) = -1, f(z2) = 1 (normalize with normalized_pair_map).
    The four sample values -1 -+ rho, 1 -+ rho carry potentials
    (-1, 1, 1, -1); their locally continued preimages h(omega_k) enter the
    energy sum, and

        slack / rho^2  ->  slack of the Schwarzian bound   (rho -> 0).

    inputs carries the rescaled slack and its gap to schwarzian_report.
    """
    z1, z2 = complex(z1), complex(z2)
    if not 0.0 < rho < 0.5:
        raise ParameterOutOfRange("rho must lie in (0, 1/2)")
    j1 = jet_eval(rmap, z1)
    j2 = jet_eval(rmap, z2)
    if abs(j1.f + 1.0) > 1e-9 or abs(j2.f - 1.0) > 1e-9:
        raise ValueError(
            "caller must normalize: f(z1) = -1, f(z2) = 1 "
            "(see normalized_pair_map)"
        )
    omegas = (-1.0 - rho, -1.0 + rho, 1.0 - rho, 1.0 + rho)
    anchors = (z1, z1, z2, z2)
    scales = (abs(rho / j1.f1), abs(rho / j1.f1),
              abs(rho / j2.f1), abs(rho / j2.f1))
    pre = [
        _continue_preimage(rmap, w, a, s)
        for w, a, s in zip(omegas, anchors, scales)
    ]
    potentials = (-1.0, 1.0, 1.0, -1.0)
    lhs = reduced_energy(pre, potentials, rmap)
    rhs = 2.0 * math.log(4.0 * rho * rho / (1.0 - rho * rho))
    slack = rhs - lhs
    rescaled = slack / (rho * rho)
    sch = schwarzian_report(rmap, z1, z2)
    inputs = _point_inputs(rmap, z1, z2, {
        "rho": rho,
        "rescaled_slack": rescaled,
        "schwarzian_slack": sch.slack,
        "gap": abs(rescaled - sch.slack),
    })
    return BoundReport("rho_12_13", float(lhs), float(rhs), float(slack),
                       HYP_ASSUMED, inputs)
