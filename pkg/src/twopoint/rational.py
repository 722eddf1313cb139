"""Rational maps on the unit disk: third-order jets, Schwarzian derivatives,
poles/critical points, and preimage sets.

Conventions
-----------
* Polynomial coefficients are stored in ascending degree, complex128.
* A map is the quotient P/Q of two polynomials with no common root.
* All derivative propagation is structural (jet arithmetic); finite
  differences appear only in tests as an independent oracle.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import (
    CriticalPoint,
    DegenerateEquation,
    PoleAtPoint,
    RootRefinementFailed,
)

POLE_TOL = 1e-12            # rejection distance for evaluation near a pole
CRITICAL_TOL = 1e-12        # |f'| threshold for the Schwarzian
CLUSTER_RADIUS = 1e-7       # root clustering radius for multiplicities
PREIMAGE_RESIDUAL = 1e-10   # required |f(z) - w| after refinement


# ----------------------------------------------------------------------------
# polynomial helpers (ascending-degree complex coefficient arrays)

def _as_coeffs(c) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(c, dtype=np.complex128)).ravel()
    if arr.size == 0:
        arr = np.zeros(1, dtype=np.complex128)
    return arr


def trim_coeffs(c) -> np.ndarray:
    """Drop trailing (highest-degree) zero coefficients."""
    arr = _as_coeffs(c)
    nz = np.nonzero(arr)[0]
    if nz.size == 0:
        return np.zeros(1, dtype=np.complex128)
    return arr[: nz[-1] + 1].copy()


def poly_roots(c) -> np.ndarray:
    """All complex roots of a polynomial.

    Companion-matrix eigenvalues followed by Newton polishing on the
    original coefficients; adequate for the degrees (<= ~50) used here.
    """
    arr = trim_coeffs(c)
    deg = arr.size - 1
    if deg == 0:
        return np.zeros(0, dtype=np.complex128)
    roots = npoly.polyroots(arr)
    dc = npoly.polyder(arr)
    for _ in range(8):
        pv = npoly.polyval(roots, arr)
        dv = npoly.polyval(roots, dc)
        ok = np.abs(dv) > 0
        step = np.zeros_like(roots)
        step[ok] = pv[ok] / dv[ok]
        # damp huge steps: keeps multiple-root clusters from scattering
        big = np.abs(step) > 0.5 * (1.0 + np.abs(roots))
        step[big] *= (0.5 * (1.0 + np.abs(roots[big]))) / np.abs(step[big])
        roots = roots - step
    return roots


def cluster_roots(roots: np.ndarray, radius: float = CLUSTER_RADIUS):
    """Group roots into clusters of diameter <= 2*radius.

    Returns a list of (center, multiplicity); centers are cluster means.
    """
    out = []
    remaining = list(roots)
    while remaining:
        seed = remaining.pop(0)
        members = [seed]
        changed = True
        while changed:
            changed = False
            center = np.mean(members)
            keep = []
            for r in remaining:
                if abs(r - center) <= radius:
                    members.append(r)
                    changed = True
                else:
                    keep.append(r)
            remaining = keep
        out.append((complex(np.mean(members)), len(members)))
    return out


# ----------------------------------------------------------------------------
# third-order jets

@dataclass(frozen=True)
class Jet3:
    """Value and first three derivatives of a map at a point."""

    f: complex
    f1: complex
    f2: complex
    f3: complex

    @staticmethod
    def variable(z: complex) -> "Jet3":
        return Jet3(complex(z), 1.0 + 0.0j, 0.0j, 0.0j)

    @staticmethod
    def constant(c: complex) -> "Jet3":
        return Jet3(complex(c), 0.0j, 0.0j, 0.0j)

    def __add__(self, other):
        other = _jetify(other)
        return Jet3(self.f + other.f, self.f1 + other.f1,
                    self.f2 + other.f2, self.f3 + other.f3)

    __radd__ = __add__

    def __neg__(self):
        return Jet3(-self.f, -self.f1, -self.f2, -self.f3)

    def __sub__(self, other):
        return self + (-_jetify(other))

    def __rsub__(self, other):
        return _jetify(other) + (-self)

    def __mul__(self, other):
        a, b = self, _jetify(other)
        return Jet3(
            a.f * b.f,
            a.f1 * b.f + a.f * b.f1,
            a.f2 * b.f + 2 * a.f1 * b.f1 + a.f * b.f2,
            a.f3 * b.f + 3 * a.f2 * b.f1 + 3 * a.f1 * b.f2 + a.f * b.f3,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        a, b = self, _jetify(other)
        if b.f == 0:
            raise ZeroDivisionError("jet division by zero value")
        h0 = a.f / b.f
        h1 = (a.f1 - h0 * b.f1) / b.f
        h2 = (a.f2 - h0 * b.f2 - 2 * h1 * b.f1) / b.f
        h3 = (a.f3 - h0 * b.f3 - 3 * h1 * b.f2 - 3 * h2 * b.f1) / b.f
        return Jet3(h0, h1, h2, h3)

    def __rtruediv__(self, other):
        return _jetify(other) / self

    def compose(self, inner: "Jet3") -> "Jet3":
        """Jet of self(inner(.)): self holds derivatives at inner.f."""
        g1, g2, g3 = self.f1, self.f2, self.f3
        h1, h2, h3 = inner.f1, inner.f2, inner.f3
        return Jet3(
            self.f,
            g1 * h1,
            g2 * h1 * h1 + g1 * h2,
            g3 * h1 ** 3 + 3 * g2 * h1 * h2 + g1 * h3,
        )


def _jetify(x) -> Jet3:
    if isinstance(x, Jet3):
        return x
    return Jet3.constant(complex(x))


def polynomial_jet(coeffs: np.ndarray, z: complex) -> Jet3:
    """Jet of a polynomial at z from its derivative coefficient arrays."""
    c = _as_coeffs(coeffs)
    d1 = npoly.polyder(c)
    d2 = npoly.polyder(d1)
    d3 = npoly.polyder(d2)
    return Jet3(
        complex(npoly.polyval(z, c)),
        complex(npoly.polyval(z, d1)),
        complex(npoly.polyval(z, d2)),
        complex(npoly.polyval(z, d3)),
    )


# ----------------------------------------------------------------------------
# rational maps

class RationalMap:
    """Quotient of two complex polynomials, kept in lowest terms.

    Coefficients ascend in degree.  Construction trims trailing zeros,
    rejects an identically-zero denominator, and rejects shared roots
    (closer than 1e-9 between numerator and denominator root sets).
    """

    def __init__(self, numerator, denominator):
        num = trim_coeffs(numerator)
        den = trim_coeffs(denominator)
        if den.size == 1 and den[0] == 0:
            raise ValueError("denominator is identically zero")
        if num.size > 1 and den.size > 1:
            rn = poly_roots(num)
            rd = poly_roots(den)
            if rn.size and rd.size:
                dist = np.abs(rn[:, None] - rd[None, :]).min()
                if dist <= 1e-9:
                    raise ValueError(
                        "numerator and denominator share a root "
                        f"(distance {dist:.3e})"
                    )
        self._num = num
        self._den = den
        self._num.setflags(write=False)
        self._den.setflags(write=False)
        self._poles_cache = None
        self._dnum = npoly.polyder(num) if num.size > 1 else np.zeros(1, complex)
        self._dden = npoly.polyder(den) if den.size > 1 else np.zeros(1, complex)

    # -- basic accessors ----------------------------------------------------

    @property
    def numerator(self) -> np.ndarray:
        return self._num

    @property
    def denominator(self) -> np.ndarray:
        return self._den

    @property
    def degree(self) -> int:
        return max(self._num.size, self._den.size) - 1

    def __repr__(self):
        return f"RationalMap(num deg {self._num.size - 1}, den deg {self._den.size - 1})"

    def digest(self) -> str:
        """Stable 12-hex-digit identifier of the coefficient data."""
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self._num).tobytes())
        h.update(b"/")
        h.update(np.ascontiguousarray(self._den).tobytes())
        return h.hexdigest()[:12]

    def to_json_dict(self) -> dict:
        return {
            "numerator": [[float(c.real), float(c.imag)] for c in self._num],
            "denominator": [[float(c.real), float(c.imag)] for c in self._den],
        }

    @staticmethod
    def from_json_dict(spec: dict) -> "RationalMap":
        num = [complex(re, im) for re, im in spec["numerator"]]
        den = [complex(re, im) for re, im in spec["denominator"]]
        return RationalMap(num, den)

    # -- evaluation ---------------------------------------------------------

    def __call__(self, z):
        z = np.asarray(z, dtype=np.complex128)
        return npoly.polyval(z, self._num) / npoly.polyval(z, self._den)

    def derivative_at(self, z):
        """f'(z) via the quotient rule; vectorized."""
        z = np.asarray(z, dtype=np.complex128)
        p = npoly.polyval(z, self._num)
        q = npoly.polyval(z, self._den)
        dp = npoly.polyval(z, self._dnum)
        dq = npoly.polyval(z, self._dden)
        return (dp * q - p * dq) / (q * q)

    def poles(self) -> np.ndarray:
        """All finite poles (denominator roots), cached."""
        if self._poles_cache is None:
            self._poles_cache = poly_roots(self._den)
        return self._poles_cache

    # -- structure ----------------------------------------------------------

    def compose(self, inner: "RationalMap") -> "RationalMap":
        """The map self(inner(z)) as a rational map."""
        a, b = inner._num, inner._den
        n = self.degree
        # powers a^k b^(n-k), accumulated against both coefficient lists
        num_acc = np.zeros(1, dtype=np.complex128)
        den_acc = np.zeros(1, dtype=np.complex128)
        ak = np.ones(1, dtype=np.complex128)
        a_pows = []
        for _ in range(n + 1):
            a_pows.append(ak)
            ak = npoly.polymul(ak, a)
        bk = np.ones(1, dtype=np.complex128)
        b_pows = []
        for _ in range(n + 1):
            b_pows.append(bk)
            bk = npoly.polymul(bk, b)
        for k in range(n + 1):
            term = npoly.polymul(a_pows[k], b_pows[n - k])
            if k < self._num.size and self._num[k] != 0:
                num_acc = npoly.polyadd(num_acc, self._num[k] * term)
            if k < self._den.size and self._den[k] != 0:
                den_acc = npoly.polyadd(den_acc, self._den[k] * term)
        return RationalMap(num_acc, den_acc)

    def postcompose_affine(self, a: complex, b: complex) -> "RationalMap":
        """The map a*f + b."""
        if a == 0:
            raise ValueError("affine factor a must be nonzero")
        num = npoly.polyadd(a * self._num, b * self._den)
        return RationalMap(num, self._den)


def identity_map() -> RationalMap:
    return RationalMap([0, 1], [1])


def monomial_map(k: int) -> RationalMap:
    c = np.zeros(k + 1, dtype=np.complex128)
    c[k] = 1
    return RationalMap(c, [1])


def mobius_map(a: complex, b: complex, c: complex, d: complex) -> RationalMap:
    """(a z + b) / (c z + d) with ad - bc != 0."""
    if a * d - b * c == 0:
        raise ValueError("singular coefficient matrix")
    return RationalMap([b, a], [d, c])


def blaschke_product(zeros, prefactor: complex = 1.0) -> RationalMap:
    """prefactor * prod (z - a)/(1 - conj(a) z) over the given zeros in U."""
    num = np.array([prefactor], dtype=np.complex128)
    den = np.ones(1, dtype=np.complex128)
    for a in zeros:
        a = complex(a)
        if abs(a) >= 1:
            raise ValueError("Blaschke zeros must lie inside the unit disk")
        num = npoly.polymul(num, np.array([-a, 1.0], dtype=np.complex128))
        den = npoly.polymul(den, np.array([1.0, -np.conj(a)], dtype=np.complex128))
    return RationalMap(num, den)


# ----------------------------------------------------------------------------
# operations

def jet_eval(rmap: RationalMap, z: complex) -> Jet3:
    """f, f', f'', f''' at z; raises PoleAtPoint within 1e-12 of a pole."""
    z = complex(z)
    poles = rmap.poles()
    if poles.size and np.abs(poles - z).min() <= POLE_TOL:
        raise PoleAtPoint(f"z = {z} lies within {POLE_TOL} of a pole")
    p = polynomial_jet(rmap.numerator, z)
    q = polynomial_jet(rmap.denominator, z)
    return p / q


def schwarzian_at(rmap: RationalMap, z: complex) -> complex:
    """Schwarzian derivative f'''/f' - (3/2)(f''/f')^2 at z."""
    jet = jet_eval(rmap, z)
    if abs(jet.f1) <= CRITICAL_TOL:
        raise CriticalPoint(f"|f'({z})| <= {CRITICAL_TOL}")
    ratio = jet.f2 / jet.f1
    return jet.f3 / jet.f1 - 1.5 * ratio * ratio


def schwarzian_of_jet(jet: Jet3) -> complex:
    if abs(jet.f1) <= CRITICAL_TOL:
        raise CriticalPoint("critical point in jet")
    ratio = jet.f2 / jet.f1
    return jet.f3 / jet.f1 - 1.5 * ratio * ratio


def preimage_polynomial(rmap: RationalMap, w: complex) -> np.ndarray:
    """Coefficients of P - w Q (trimmed)."""
    return trim_coeffs(npoly.polysub(rmap.numerator, complex(w) * rmap.denominator))


def preimages_in_disk(rmap: RationalMap, w: complex, *,
                      cluster_radius: float = CLUSTER_RADIUS,
                      residual_tol: float = PREIMAGE_RESIDUAL):
    """All solutions of f(z) = w with |z| < 1, as (point, multiplicity) pairs.

    Roots of P - w Q are found by companion matrix + Newton, clustered at
    radius `cluster_radius` for multiplicities, and each representative is
    required to satisfy |f(z) - w| < residual_tol.
    """
    w = complex(w)
    if not np.isfinite(w.real) or not np.isfinite(w.imag):
        raise ValueError("w must be finite")
    r = preimage_polynomial(rmap, w)
    if r.size == 1 and r[0] == 0:
        raise DegenerateEquation("P - w Q is identically zero")
    if r.size == 1:
        return []  # constant, nonzero: only preimage would be at infinity
    roots = poly_roots(r)
    inside = roots[np.abs(roots) < 1.0]
    out = []
    scale = max(1.0, abs(w))
    for center, mult in cluster_roots(inside, cluster_radius):
        res = abs(complex(rmap(center)) - w)
        if res >= residual_tol * scale:
            # extra polishing on the preimage equation
            z = center
            dc = npoly.polyder(r)
            for _ in range(50):
                dv = complex(npoly.polyval(z, dc))
                if dv == 0:
                    break
                z = z - complex(npoly.polyval(z, r)) / dv
                if abs(complex(rmap(z)) - w) < residual_tol * scale:
                    break
            res = abs(complex(rmap(z)) - w)
            if res >= residual_tol * scale:
                raise RootRefinementFailed(
                    f"preimage residual {res:.3e} at w = {w}"
                )
            center = z
        out.append((complex(center), int(mult)))
    return out


def singular_points(rmap: RationalMap, *, radius: float = 1.0 + 1e-9):
    """(poles, critical points) with modulus < radius.

    Critical points are the roots of P'Q - PQ'; poles the denominator roots.
    """
    poles = [complex(z) for z in rmap.poles() if abs(z) < radius]
    wrons = npoly.polysub(
        npoly.polymul(rmap._dnum, rmap.denominator),
        npoly.polymul(rmap.numerator, rmap._dden),
    )
    wrons = trim_coeffs(wrons)
    crit = [complex(z) for z in poly_roots(wrons) if abs(z) < radius]
    return poles, crit


def winding_number(rmap: RationalMap, w: complex, radius: float = 1.0 - 1e-6,
                   samples: int = 8192) -> int:
    """Winding of f along |z| = radius around w, by phase accumulation."""
    theta = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
    z = radius * np.exp(1j * theta)
    values = rmap(z) - complex(w)
    ang = np.angle(values)
    dif = np.diff(np.concatenate([ang, ang[:1]]))
    dif = (dif + np.pi) % (2 * np.pi) - np.pi
    total = dif.sum() / (2 * np.pi)
    return int(np.rint(total))


# ----------------------------------------------------------------------------
# batched preimage counting (used by the covering checks)

def preimage_counts(rmap: RationalMap, w: np.ndarray, *,
                    boundary_guard: float = 1e-6,
                    newton_steps: int = 4) -> np.ndarray:
    """Number of preimages (with multiplicity) of each w with |z| <= 1 - guard.

    Vectorized over w: closed forms for degree 1/2, batched companion
    eigenvalues above; all roots receive a short vectorized Newton polish.
    """
    w = np.asarray(w, dtype=np.complex128).ravel()
    counts = np.zeros(w.size, dtype=np.int64)
    pnum = rmap.numerator
    pden = rmap.denominator
    d = max(pnum.size, pden.size)
    num = np.zeros(d, dtype=np.complex128)
    den = np.zeros(d, dtype=np.complex128)
    num[: pnum.size] = pnum
    den[: pden.size] = pden
    coeffs = num[None, :] - w[:, None] * den[None, :]  # (N, d)
    _count_group(coeffs, counts, np.arange(w.size), boundary_guard, newton_steps)
    return counts


def _count_group(coeffs, counts, idx, guard, newton_steps):
    if idx.size == 0:
        return
    scale = np.abs(coeffs[idx]).max(axis=1)
    scale[scale == 0] = 1.0
    deg = coeffs.shape[1] - 1
    if deg == 0:
        return
    lead_ok = np.abs(coeffs[idx, deg]) > 1e-12 * scale
    # degenerate leading coefficient: retry at lower degree
    low = idx[~lead_ok]
    if low.size:
        _count_group(coeffs[:, :deg], counts, low, guard, newton_steps)
    idx = idx[lead_ok]
    if idx.size == 0:
        return
    c = coeffs[idx]
    if deg == 1:
        roots = (-c[:, 0] / c[:, 1])[:, None]
    elif deg == 2:
        a, b, cc = c[:, 2], c[:, 1], c[:, 0]
        disc = np.sqrt(b * b - 4 * a * cc + 0j)
        # stable form: avoid cancellation in the small root
        qq = -0.5 * (b + np.where(np.real(np.conj(b) * disc) >= 0, disc, -disc))
        r1 = qq / a
        with np.errstate(divide="ignore", invalid="ignore"):
            r2 = np.where(qq != 0, cc / qq, -b / a - r1)
        roots = np.stack([r1, r2], axis=1)
    else:
        monic = c / c[:, -1][:, None]
        comp = np.zeros((idx.size, deg, deg), dtype=np.complex128)
        comp[:, 1:, :-1] += np.eye(deg - 1)[None, :, :]
        comp[:, :, -1] = -monic[:, :-1]
        roots = np.linalg.eigvals(comp)
    # vectorized Newton polish against the per-row polynomial
    dc = c[:, 1:] * np.arange(1, deg + 1)[None, :]
    for _ in range(newton_steps):
        pv = _horner_rows(c, roots)
        dv = _horner_rows(dc, roots)
        ok = np.abs(dv) > 0
        step = np.where(ok, pv / np.where(ok, dv, 1.0), 0.0)
        big = np.abs(step) > 0.25
        step = np.where(big, step * 0.25 / np.where(big, np.abs(step), 1.0), step)
        roots = roots - step
    counts[idx] = (np.abs(roots) <= 1.0 - guard).sum(axis=1)


def _horner_rows(c, x):
    """Evaluate per-row ascending-coefficient polynomials at per-row points."""
    acc = np.zeros_like(x)
    for k in range(c.shape[1] - 1, -1, -1):
        acc = acc * x + c[:, k][:, None]
    return acc
