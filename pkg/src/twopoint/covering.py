"""Sampled checks of the univalent-covering hypotheses.

Both checks are semidecisions: a clean result certifies only "no violation
at the stated resolution" (the verdict records it), while a violation comes
with a witness point that can be re-verified directly, independently of the
sampling.

Membership in the image f(U) is decided pointwise by preimage existence
with a boundary guard band: a sample whose preimages all satisfy
|z| > 1 - 1e-6 is treated as outside (boundary-touching arcs are split
rather than trusted).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .curves import DeltaCurve, GammaCircle, delta_trace, gamma_trace
from .errors import CoincidentImages
from .rational import RationalMap, jet_eval, preimage_counts, preimages_in_disk

DEFAULT_CURVE_SAMPLES = 512
DEFAULT_FAMILY_SAMPLES = 257
BOUNDARY_GUARD = 1e-6

NO_VIOLATION = "no_violation_found"
MULTIPLE_PREIMAGE = "multiple_preimage"
EXITS_IMAGE = "exits_image"


@dataclass(frozen=True)
class CoveringWitness:
    w: complex
    preimages: tuple  # ((point, multiplicity), ...)

    def to_json_dict(self):
        return {
            "w": [self.w.real, self.w.imag],
            "preimages": [
                {"z": [z.real, z.imag], "multiplicity": m} for z, m in self.preimages
            ],
        }


@dataclass(frozen=True)
class CoveringVerdict:
    status: str
    witness: Optional[CoveringWitness]
    resolution: tuple  # (curve samples n, family samples m)
    family: str

    def __post_init__(self):
        if (self.witness is not None) != (self.status != NO_VIOLATION):
            raise ValueError("witness present iff a violation was found")

    @property
    def ok(self) -> bool:
        return self.status == NO_VIOLATION

    def to_json_dict(self):
        return {
            "status": self.status,
            "family": self.family,
            "resolution": {"curve_samples": self.resolution[0],
                           "family_samples": self.resolution[1]},
            "witness": None if self.witness is None else self.witness.to_json_dict(),
        }


def _warped_offsets(m: int, scale: float) -> np.ndarray:
    """m finite family offsets, tangent-warped over the real line."""
    j = np.arange(1, m + 1, dtype=float)
    theta = -0.5 * math.pi + math.pi * j / (m + 1)
    return scale * np.tan(theta)


def _warped_nonzero(m: int) -> np.ndarray:
    """m nonzero parameters, tangent-warped over both half-lines."""
    m_pos = (m + 1) // 2
    m_neg = m - m_pos
    j = np.arange(1, m_pos + 1, dtype=float)
    pos = np.tan(0.5 * math.pi * j / (m_pos + 1))
    neg = -np.tan(0.5 * math.pi * np.arange(1, m_neg + 1) / (m_neg + 1))
    return np.concatenate([np.sort(neg), pos])


def _image_points(rmap: RationalMap, z1: complex, z2: complex):
    w1 = jet_eval(rmap, z1).f
    w2 = jet_eval(rmap, z2).f
    if abs(w1 - w2) <= 1e-14 * max(1.0, abs(w1), abs(w2)):
        raise CoincidentImages(f"f(z1) = f(z2) = {w1}")
    return w1, w2


def _verdict_from_arcs(rmap, arcs, family, n, m):
    """Scan arc sample blocks; first fully-covered arc with a multi-covered
    sample wins (deterministic family order)."""
    for arc in arcs:
        counts = preimage_counts(rmap, arc, boundary_guard=BOUNDARY_GUARD)
        if np.any(counts == 0):
            continue  # arc leaves the image (at this resolution): exempt
        bad = np.nonzero(counts >= 2)[0]
        if bad.size:
            w = complex(arc[bad[0]])
            pre = tuple(preimages_in_disk(rmap, w))
            return CoveringVerdict(
                MULTIPLE_PREIMAGE, CoveringWitness(w, pre), (n, m), family
            )
    return CoveringVerdict(NO_VIOLATION, None, (n, m), family)


def check_gamma_covering(rmap: RationalMap, z1: complex, z2: complex,
                         n: int = DEFAULT_CURVE_SAMPLES,
                         m: int = DEFAULT_FAMILY_SAMPLES) -> CoveringVerdict:
    """Scan the circle family through (f(z1), f(z2)) for covering violations.

    m family members (tangent-warped offsets, plus the line member) with n
    samples each; on every member the two arcs joining the image points are
    classified, and arcs lying in f(U) must be simply covered.
    """
    w1, w2 = _image_points(rmap, z1, z2)
    offsets = _warped_offsets(m - 1, 0.5 * abs(w2 - w1))
    arcs = []
    for s in offsets:
        tr = gamma_trace(GammaCircle(w1, w2, float(s)), n)
        arcs.extend(tr.arcs())
    tr = gamma_trace(GammaCircle(w1, w2, math.inf), n)
    arcs.extend(tr.arcs())
    return _verdict_from_arcs(rmap, arcs, "gamma", n, m)


def check_delta_covering(rmap: RationalMap, z1: complex, z2: complex,
                         n: int = DEFAULT_CURVE_SAMPLES,
                         m: int = DEFAULT_FAMILY_SAMPLES) -> CoveringVerdict:
    """Scan the quartic two-branch family for covering violations.

    m nonzero parameters t (tangent-warped over both signs), both branches
    per t; a branch entirely inside f(U) must be simply covered.
    """
    w1, w2 = _image_points(rmap, z1, z2)
    curves = []
    for t in _warped_nonzero(m):
        for branch in ("plus", "minus"):
            pts = delta_trace(DeltaCurve(w1, w2, float(t), branch), n)
            curves.append(pts[:-1])  # drop the duplicated closing vertex
    return _verdict_from_arcs(rmap, curves, "delta", n, m)


def verify_witness(rmap: RationalMap, witness: CoveringWitness) -> bool:
    """Re-check a violation witness directly (independent of any sampling)."""
    pre = preimages_in_disk(rmap, witness.w)
    return sum(mult for _, mult in pre) >= 2
