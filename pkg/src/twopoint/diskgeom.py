"""Hyperbolic geometry of the unit disk and closed-form potential theory.

Metric convention: tanh d(z1, z2) = |z1 - z2| / |1 - conj(z1) z2|, i.e. the
pseudo-hyperbolic distance is the tanh of the hyperbolic distance.  Under
this normalization the left half-disk has inner radius
2*lam*(1-lam^2)/(1+lam^2) at the point -lam.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CoincidentPoints, UnsupportedDomain


# ----------------------------------------------------------------------------
# Moebius transforms

@dataclass(frozen=True)
class MobiusTransform:
    """z -> (a z + b) / (c z + d), ad - bc != 0."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        if self.a * self.d - self.b * self.c == 0:
            raise ValueError("singular Moebius coefficients")

    def __call__(self, z):
        z = np.asarray(z, dtype=np.complex128)
        return (self.a * z + self.b) / (self.c * z + self.d)

    def inverse(self) -> "MobiusTransform":
        return MobiusTransform(self.d, -self.b, -self.c, self.a)

    def compose(self, other: "MobiusTransform") -> "MobiusTransform":
        """self after other."""
        return MobiusTransform(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def derivative(self, z):
        z = np.asarray(z, dtype=np.complex128)
        det = self.a * self.d - self.b * self.c
        return det / (self.c * z + self.d) ** 2

    def is_disk_automorphism(self, tol: float = 1e-10) -> bool:
        """Check |phi| = 1 on 8 boundary samples."""
        theta = np.linspace(0, 2 * np.pi, 8, endpoint=False)
        w = self(np.exp(1j * theta))
        return bool(np.max(np.abs(np.abs(w) - 1.0)) < tol)

    def to_rational(self):
        from .rational import mobius_map

        return mobius_map(self.a, self.b, self.c, self.d)

    @staticmethod
    def identity() -> "MobiusTransform":
        return MobiusTransform(1.0, 0.0, 0.0, 1.0)

    @staticmethod
    def disk_automorphism(center: complex, rotation: float = 0.0) -> "MobiusTransform":
        """e^{i rot} (z - center) / (1 - conj(center) z)."""
        if abs(center) >= 1:
            raise ValueError("center must lie inside the unit disk")
        rot = np.exp(1j * rotation)
        return MobiusTransform(rot, -rot * center, -np.conj(center), 1.0)


# ----------------------------------------------------------------------------
# domains

@dataclass(frozen=True)
class UnitDisk:
    def contains(self, z):
        return np.abs(np.asarray(z, dtype=np.complex128)) < 1.0

    def boundary_distance(self, z):
        return 1.0 - np.abs(np.asarray(z, dtype=np.complex128))

    def bounding_box(self):
        return (-1.0, 1.0, -1.0, 1.0)


@dataclass(frozen=True)
class HalfPlane:
    """{ z : Re(conj(normal) z) < offset } with |normal| = 1."""

    normal: complex = 1.0 + 0.0j
    offset: float = 0.0

    def __post_init__(self):
        n = complex(self.normal)
        if n == 0:
            raise ValueError("normal must be nonzero")
        object.__setattr__(self, "normal", n / abs(n))

    def contains(self, z):
        return self.boundary_distance(z) > 0

    def boundary_distance(self, z):
        z = np.asarray(z, dtype=np.complex128)
        return self.offset - (np.conj(self.normal) * z).real

    def reflect(self, z):
        """Mirror image across the boundary line."""
        z = np.asarray(z, dtype=np.complex128)
        return z + 2.0 * self.boundary_distance(z) * self.normal

    def bounding_box(self):
        raise UnsupportedDomain("half-plane has no finite bounding box")


@dataclass(frozen=True)
class HalfDisk:
    """Left or right half of the unit disk."""

    side: str = "left"

    def __post_init__(self):
        if self.side not in ("left", "right"):
            raise ValueError("side must be 'left' or 'right'")

    def _sgn(self):
        return -1.0 if self.side == "left" else 1.0

    def contains(self, z):
        z = np.asarray(z, dtype=np.complex128)
        return (np.abs(z) < 1.0) & (self._sgn() * z.real > 0)

    def boundary_distance(self, z):
        z = np.asarray(z, dtype=np.complex128)
        return np.minimum(1.0 - np.abs(z), self._sgn() * z.real)

    def to_disk(self, z):
        """Conformal map onto the unit disk, with derivative.

        Composition: rotate onto the upper half-disk, m = (1+u)/(1-u) onto
        the first quadrant, square onto the upper half-plane, Cayley onto
        the disk.  Returns (T(z), T'(z)).
        """
        z = np.asarray(z, dtype=np.complex128)
        # left half-disk: u = -i z lands on the upper half-disk; right: u = i z
        rot = -1j if self.side == "left" else 1j
        u = rot * z
        m = (1 + u) / (1 - u)
        dm = 2.0 / (1 - u) ** 2
        s = m * m
        t = (s - 1j) / (s + 1j)
        dt_ds = 2j / (s + 1j) ** 2
        return t, rot * dm * (2.0 * m) * dt_ds

    def bounding_box(self):
        if self.side == "left":
            return (-1.0, 0.0, -1.0, 1.0)
        return (0.0, 1.0, -1.0, 1.0)


@dataclass(frozen=True)
class GreenLevelSubdomain:
    """Component of {(-1)^(sign+1) (g(z, z1) - g(z, z2)) > 0} in the base domain.

    sign = +1 selects the component containing z1, sign = -1 the one
    containing z2.  Membership is decided by the closed-form Green
    difference on the base domain; no closed forms exist on the subdomain
    itself (it is handled numerically).
    """

    base: object
    z1: complex
    z2: complex
    sign: int = 1

    def __post_init__(self):
        if self.z1 == self.z2:
            raise ValueError("z1 and z2 must be distinct")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if not (bool(self.base.contains(self.z1)) and bool(self.base.contains(self.z2))):
            raise ValueError("z1, z2 must be interior to the base domain")

    def level_difference(self, z):
        """u(z) = sign * (g_base(z, z1) - g_base(z, z2)); +inf/-inf at the poles."""
        with np.errstate(divide="ignore"):
            g1 = green_function(self.base, z, self.z1)
            g2 = green_function(self.base, z, self.z2)
        return self.sign * (g1 - g2)

    def level_gradient_modulus(self, z):
        """|grad u| via the holomorphic completion of the Green difference."""
        z = np.asarray(z, dtype=np.complex128)
        with np.errstate(divide="ignore", invalid="ignore"):
            if isinstance(self.base, UnitDisk):
                f = (
                    -np.conj(self.z1) / (1 - np.conj(self.z1) * z)
                    - 1.0 / (z - self.z1)
                    + np.conj(self.z2) / (1 - np.conj(self.z2) * z)
                    + 1.0 / (z - self.z2)
                )
                return np.abs(f)
            if isinstance(self.base, HalfPlane):
                r1 = complex(self.base.reflect(self.z1))
                r2 = complex(self.base.reflect(self.z2))
                f = (
                    1.0 / (z - r1) - 1.0 / (z - self.z1)
                    - 1.0 / (z - r2) + 1.0 / (z - self.z2)
                )
                return np.abs(f)
        raise UnsupportedDomain("level gradient needs a closed-form base")

    def contains(self, z):
        z = np.asarray(z, dtype=np.complex128)
        inside = np.asarray(self.base.contains(z), dtype=bool)
        out = np.zeros_like(inside)
        if np.any(inside):
            out[inside] = self.level_difference(z[inside] if z.shape else z) > 0
        return out if z.shape else bool(out)

    def bounding_box(self):
        return self.base.bounding_box()


# ----------------------------------------------------------------------------
# hyperbolic metric

def pseudo_hyperbolic(z1: complex, z2: complex) -> float:
    """|z1 - z2| / |1 - conj(z1) z2| (equals tanh of the hyperbolic distance)."""
    z1, z2 = complex(z1), complex(z2)
    return abs(z1 - z2) / abs(1.0 - np.conj(z1) * z2)


def hyp_distance(z1: complex, z2: complex) -> float:
    """Hyperbolic distance on the unit disk (see module docstring)."""
    z1, z2 = complex(z1), complex(z2)
    if abs(z1) >= 1 or abs(z2) >= 1:
        raise ValueError("points must lie inside the unit disk")
    if z1 == z2:
        return 0.0
    return math.atanh(pseudo_hyperbolic(z1, z2))


def normalize_pair(z1: complex, z2: complex):
    """Disk automorphism phi and lam in (0,1) with phi(-lam)=z1, phi(lam)=z2.

    lam = tanh(d(z1,z2)/2); the construction moves z1 to the origin,
    rotates z2 onto the positive axis, and conjugates with z -> (z+lam)/(1+lam z).
    """
    z1, z2 = complex(z1), complex(z2)
    if z1 == z2:
        raise CoincidentPoints("normalize_pair requires distinct points")
    if abs(z1) >= 1 or abs(z2) >= 1:
        raise ValueError("points must lie inside the unit disk")
    u = (z2 - z1) / (1.0 - np.conj(z1) * z2)   # image of z2 after z1 -> 0
    t = abs(u)                                  # tanh d
    lam = t / (1.0 + math.sqrt(1.0 - t * t))    # tanh(d/2), stable form
    rot = u / t
    # phi = psi^{-1} o rotation o m_lam, psi(z) = (z - z1)/(1 - conj(z1) z)
    psi_inv = MobiusTransform(1.0, z1, np.conj(z1), 1.0)
    rotation = MobiusTransform(rot, 0.0, 0.0, 1.0)
    m_lam = MobiusTransform(1.0, lam, lam, 1.0)
    phi = psi_inv.compose(rotation).compose(m_lam)
    for target, src in ((z1, -lam), (z2, lam)):
        if abs(complex(phi(src)) - target) > 1e-12:
            raise ArithmeticError("pair normalization failed verification")
    return phi, lam


# ----------------------------------------------------------------------------
# closed-form Green functions and inner radii

def green_function(domain, z, z0):
    """Closed-form Green function g(z, z0) of the domain (vectorized in z)."""
    z = np.asarray(z, dtype=np.complex128)
    z0 = complex(z0)
    if isinstance(domain, UnitDisk):
        return np.log(np.abs(1.0 - np.conj(z0) * z)) - np.log(np.abs(z - z0))
    if isinstance(domain, HalfPlane):
        zr = complex(domain.reflect(z0))
        return np.log(np.abs(z - zr)) - np.log(np.abs(z - z0))
    if isinstance(domain, HalfDisk):
        t, _ = domain.to_disk(z)
        t0, _ = domain.to_disk(np.array(z0))
        t0 = complex(t0)
        return np.log(np.abs(1.0 - np.conj(t0) * t)) - np.log(np.abs(t - t0))
    raise UnsupportedDomain(f"no closed-form Green function for {type(domain).__name__}")


def inner_radius(domain, z) -> float:
    """Closed-form inner radius (exp of the Robin constant) at z."""
    z = complex(z)
    if isinstance(domain, UnitDisk):
        return 1.0 - abs(z) ** 2
    if isinstance(domain, HalfPlane):
        d = float(domain.boundary_distance(z))
        if d <= 0:
            raise ValueError("point not inside the half-plane")
        return 2.0 * d
    if isinstance(domain, HalfDisk):
        t, dt = domain.to_disk(np.array(z))
        return float((1.0 - abs(complex(t)) ** 2) / abs(complex(dt)))
    raise UnsupportedDomain(f"no closed-form inner radius for {type(domain).__name__}")


def closed_form_invariants(domain, z, z0=None):
    """(green, inner_radius) by closed form; green is None when z0 is None.

    Raises UnsupportedDomain for GreenLevelSubdomain (numeric-only kind).
    """
    if isinstance(domain, GreenLevelSubdomain):
        raise UnsupportedDomain("level subdomains have no closed forms")
    if not bool(domain.contains(complex(z))):
        raise ValueError("z must be interior to the domain")
    g = None
    if z0 is not None:
        z0 = complex(z0)
        if z0 == complex(z):
            raise ValueError("z0 must differ from z")
        if not bool(domain.contains(z0)):
            raise ValueError("z0 must be interior to the domain")
        g = float(green_function(domain, complex(z), z0))
    return g, inner_radius(domain, complex(z))
