"""Numerical potential theory: condenser capacity, Green functions, inner
radii, the sector-unfolding transformation, and small-radius capacity
asymptotics.

Method split
------------
* Global quantities (capacity = Dirichlet energy of the equilibrium
  potential) use 5-point finite differences on a uniform grid.  Cut edges
  get the axis-wise linear boundary interpolation: an edge leaving the free
  region at fraction theta of its length carries conductance 1/theta, which
  is simultaneously the discrete energy weight, so the assembled system is
  symmetric positive definite and the reported energy is exactly the
  minimum of the discrete functional.
* Pointwise quantities (Green values, Robin constants) use walk-on-spheres
  with singularity splitting: the harmonic remainder H (boundary data
  log|zeta - z0|) is estimated by the walk and the fundamental term
  -log|z - z0| is added analytically.  A harmonic-polynomial control
  variate fitted on a pilot batch removes most of the variance; estimates
  stay unbiased because the fitted function is itself harmonic.
* Plates far below the grid scale use a monopole charge model built from
  the closed-form Green function (equilibrium charges from a small linear
  system); its geometric model error is O((radius/separation)^2), so it
  complements the grid solver for the small-radius regime the grid cannot
  resolve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sp

from .diskgeom import (
    GreenLevelSubdomain,
    HalfDisk,
    HalfPlane,
    UnitDisk,
    green_function,
    inner_radius,
)
from .errors import (
    BudgetExhausted,
    GridTooCoarse,
    PlateOnAxis,
    PlateOutsideDomain,
    PlateOverlap,
    RadiusTooLarge,
    UnsupportedDomain,
)

RICHARDSON_ORDER = 2.0  # empirical convergence order of the cut-edge scheme


# ----------------------------------------------------------------------------
# data types

@dataclass(frozen=True)
class Plate:
    center: complex
    radius: float
    potential: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("plate radius must be positive")

    def contains(self, z):
        z = np.asarray(z, dtype=np.complex128)
        return np.abs(z - self.center) <= self.radius


@dataclass(frozen=True)
class Condenser:
    """Plane domain with closed disk plates at prescribed potentials."""

    domain: object
    plates: tuple

    def __post_init__(self):
        plates = tuple(
            p if isinstance(p, Plate) else Plate(*p) for p in self.plates
        )
        object.__setattr__(self, "plates", plates)
        for i, p in enumerate(plates):
            d = float(self.domain.boundary_distance(p.center))
            if d <= p.radius:
                raise PlateOutsideDomain(f"plate {i} is not strictly inside")
            for q in plates[i + 1:]:
                if abs(p.center - q.center) <= p.radius + q.radius:
                    raise PlateOverlap("plates intersect")

    def gap_scale(self) -> float:
        """Smallest plate-to-plate or plate-to-boundary clearance."""
        gaps = []
        for i, p in enumerate(self.plates):
            gaps.append(float(self.domain.boundary_distance(p.center)) - p.radius)
            for q in self.plates[i + 1:]:
                gaps.append(abs(p.center - q.center) - p.radius - q.radius)
        return min(gaps) if gaps else math.inf


@dataclass(frozen=True)
class CapacityEstimate:
    value: float
    method: str  # finite_difference | closed_form | charge_collocation
    discretization: dict = field(default_factory=dict)
    error_bar: Optional[float] = None

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("capacity must be nonnegative")

    def to_json_dict(self):
        return {
            "value": self.value,
            "method": self.method,
            "discretization": dict(self.discretization),
            "error_bar": self.error_bar,
        }


@dataclass(frozen=True)
class WalkBudget:
    """Walk-on-spheres budget; the seed fixes the walk stream bit-for-bit."""

    walks: int = 200_000
    seed: int = 20240809
    eps: float = 1e-6
    max_steps: int = 4000
    tolerance: Optional[float] = None  # required standard error, if any
    control_degree: int = 8
    pilot_fraction: float = 0.1


@dataclass(frozen=True)
class GreenEstimate:
    value: float
    stderr: float
    walks: int

    def to_json_dict(self):
        return {"value": self.value, "stderr": self.stderr, "walks": self.walks}


# ----------------------------------------------------------------------------
# finite-difference capacity

def _fd_box(domain, regions):
    if isinstance(domain, (UnitDisk, HalfDisk)):
        return domain.bounding_box()
    if isinstance(domain, HalfPlane):
        n = complex(domain.normal)
        if abs(n.real) > 1e-12 and abs(n.imag) > 1e-12:
            raise UnsupportedDomain("grid solver needs an axis-aligned half-plane")
        centers = [r.center for r, _ in regions]
        radii = [getattr(r, "radius", 0.1) for r, _ in regions]
        pts = np.asarray(centers, dtype=np.complex128)
        diam = max(
            (np.abs(pts[:, None] - pts[None, :]).max() if len(pts) > 1 else 0.0),
            2.0 * max(radii),
        )
        side = 8.0 * diam
        cx, cy = pts.real.mean(), pts.imag.mean()
        if abs(n.imag) < 1e-12:  # vertical boundary line
            edge = domain.offset / n.real
            if n.real > 0:  # domain to the left of the line
                return (edge - side, edge, cy - side / 2, cy + side / 2)
            return (edge, edge + side, cy - side / 2, cy + side / 2)
        edge = domain.offset / n.imag
        if n.imag > 0:
            return (cx - side / 2, cx + side / 2, edge - side, edge)
        return (cx - side / 2, cx + side / 2, edge, edge + side)
    raise UnsupportedDomain(f"grid solver does not support {type(domain).__name__}")


def _crossing_fractions(za, zb, region_contains, iters: int = 30):
    """Fraction theta in (0,1] where the segment za->zb enters the region.

    za is outside the region, zb inside; bisection on the membership test.
    """
    lo = np.zeros(za.shape)
    hi = np.ones(za.shape)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        zm = za + mid * (zb - za)
        inside = region_contains(zm)
        hi = np.where(inside, mid, hi)
        lo = np.where(inside, lo, mid)
    return np.maximum(hi, 1e-3)


def _fd_capacity(domain, regions, grid: int, *, solver_tol: float = 1e-10,
                 return_field: bool = False):
    """Capacity of (domain, regions) where regions = [(region, potential), ...].

    Regions need a vectorized contains(); circle plates are validated for
    3-cell resolvability by the caller.
    """
    x0, x1, y0, y1 = _fd_box(domain, regions)
    side = max(x1 - x0, y1 - y0)
    h = side / (grid - 1)
    nx = int(round((x1 - x0) / h)) + 1
    ny = int(round((y1 - y0) / h)) + 1
    xs = x0 + h * np.arange(nx)
    ys = y0 + h * np.arange(ny)
    zz = xs[None, :] + 1j * ys[:, None]  # (ny, nx)
    flat = zz.ravel()

    category = np.full(flat.shape, -1, dtype=np.int32)  # -1 exterior
    inside = np.asarray(domain.contains(flat), dtype=bool)
    category[inside] = 0
    values = np.zeros(len(regions))
    for k, (region, pot) in enumerate(regions):
        mask = np.asarray(region.contains(flat), dtype=bool)
        category[mask & inside] = k + 1
        values[k] = pot

    free = category == 0
    n_free = int(free.sum())
    if n_free == 0:
        raise GridTooCoarse("no free nodes on the grid")
    index = -np.ones(flat.shape, dtype=np.int64)
    index[free] = np.arange(n_free)

    rows, cols, data = [], [], []
    diag = np.zeros(n_free)
    rhs = np.zeros(n_free)
    cut_a, cut_b = [], []  # free node flat index, fixed neighbor flat index

    def add_edges(ia, ib):
        ca, cb = category[ia], category[ib]
        both_free = (ca == 0) & (cb == 0)
        fa, fb = index[ia[both_free]], index[ib[both_free]]
        rows.extend([fa, fb])
        cols.extend([fb, fa])
        data.extend([-np.ones(fa.size), -np.ones(fa.size)])
        np.add.at(diag, fa, 1.0)
        np.add.at(diag, fb, 1.0)
        cut1 = (ca == 0) & (cb != 0)
        cut_a.append(ia[cut1])
        cut_b.append(ib[cut1])
        cut2 = (cb == 0) & (ca != 0)
        cut_a.append(ib[cut2])
        cut_b.append(ia[cut2])

    ids = np.arange(flat.size).reshape(ny, nx)
    add_edges(ids[:, :-1].ravel(), ids[:, 1:].ravel())
    add_edges(ids[:-1, :].ravel(), ids[1:, :].ravel())

    cut_a = np.concatenate(cut_a)
    cut_b = np.concatenate(cut_b)
    cut_theta = np.ones(0)
    cut_val = np.zeros(0)
    if cut_a.size:
        za, zb = flat[cut_a], flat[cut_b]
        bcat = category[cut_b]
        theta = np.ones(cut_a.size)
        bval = np.zeros(cut_a.size)
        ext = bcat == -1
        if np.any(ext):
            theta[ext] = _crossing_fractions(
                za[ext], zb[ext], lambda z: ~np.asarray(domain.contains(z), bool)
            )
        for k, (region, pot) in enumerate(regions):
            sel = bcat == k + 1
            if np.any(sel):
                theta[sel] = _crossing_fractions(
                    za[sel], zb[sel],
                    lambda z, r=region: np.asarray(r.contains(z), bool),
                )
                bval[sel] = pot
        fa = index[cut_a]
        np.add.at(diag, fa, 1.0 / theta)
        np.add.at(rhs, fa, bval / theta)
        cut_theta = theta
        cut_val = bval

    rows.append(np.arange(n_free))
    cols.append(np.arange(n_free))
    data.append(diag)
    a_mat = sp.coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n_free, n_free),
    ).tocsr()

    import pyamg

    ml = pyamg.ruge_stuben_solver(a_mat)
    u = ml.solve(rhs, tol=solver_tol, accel="cg", maxiter=400)

    # discrete Dirichlet energy: the same quadratic form the solution minimizes
    ufull = np.zeros(flat.shape)
    ufull[free] = u
    for k, (_, pot) in enumerate(regions):
        ufull[category == k + 1] = pot
    grid2d = ufull.reshape(ny, nx)
    energy = 0.0
    for ia, ib in (
        (ids[:, :-1].ravel(), ids[:, 1:].ravel()),
        (ids[:-1, :].ravel(), ids[1:, :].ravel()),
    ):
        bf = (category[ia] == 0) & (category[ib] == 0)
        du = ufull[ia[bf]] - ufull[ib[bf]]
        energy += float(np.dot(du, du))
    if cut_a.size:
        du = ufull[cut_a] - cut_val
        energy += float(np.sum(du * du / cut_theta))

    meta = {"grid": [ny, nx], "h": h, "box": [x0, x1, y0, y1]}
    if return_field:
        # expose the potential with NaN outside the domain (plates keep values)
        f2d = grid2d.copy()
        f2d[(category == -1).reshape(ny, nx)] = np.nan
        return energy, meta, f2d
    return energy, meta


def _validate_resolvable(cond: Condenser, grid: int):
    x0, x1, y0, y1 = _fd_box(cond.domain, [(p, p.potential) for p in cond.plates])
    h = max(x1 - x0, y1 - y0) / (grid - 1)
    min_r = min(p.radius for p in cond.plates)
    if min_r < 3.0 * h:
        raise GridTooCoarse(
            f"plate radius {min_r:.3g} below 3 grid cells (h = {h:.3g})"
        )
    if cond.gap_scale() < 3.0 * h:
        raise GridTooCoarse("plate clearance below 3 grid cells")


def solve_condenser(cond: Condenser, grid: int, *,
                    richardson: bool = False,
                    solver_tol: float = 1e-10) -> CapacityEstimate:
    """Capacity by the grid solver; optional two-level Richardson step.

    Raises GridTooCoarse when any plate radius or clearance is below three
    grid cells at the requested resolution.
    """
    _validate_resolvable(cond, grid)
    regions = [(p, p.potential) for p in cond.plates]
    value, meta = _fd_capacity(cond.domain, regions, grid, solver_tol=solver_tol)
    if not richardson:
        return CapacityEstimate(value, "finite_difference", meta)
    coarse_grid = grid // 2 + 1
    _validate_resolvable(cond, coarse_grid)
    coarse, meta_c = _fd_capacity(cond.domain, regions, coarse_grid,
                                  solver_tol=solver_tol)
    factor = 2.0 ** RICHARDSON_ORDER - 1.0
    extrapolated = value + (value - coarse) / factor
    meta2 = {
        "grid_levels": [meta_c["grid"], meta["grid"]],
        "order": RICHARDSON_ORDER,
        "raw": value,
        "coarse": coarse,
        "box": meta["box"],
    }
    return CapacityEstimate(
        extrapolated, "finite_difference", meta2,
        error_bar=abs(value - coarse) / factor,
    )


def solve_condenser_field(cond: Condenser, grid: int, *,
                          solver_tol: float = 1e-10):
    """(CapacityEstimate, potential grid, box) for visualization dumps."""
    _validate_resolvable(cond, grid)
    regions = [(p, p.potential) for p in cond.plates]
    value, meta, f2d = _fd_capacity(
        cond.domain, regions, grid, solver_tol=solver_tol, return_field=True
    )
    return CapacityEstimate(value, "finite_difference", meta), f2d, meta["box"]


def write_field_binary(path, field2d):
    """Row-major IEEE-754 double dump with a two-uint64 dimension header."""
    arr = np.ascontiguousarray(np.asarray(field2d, dtype=np.float64))
    with open(path, "wb") as fh:
        np.asarray(arr.shape, dtype=np.uint64).tofile(fh)
        arr.tofile(fh)


# ----------------------------------------------------------------------------
# monopole charge model (small plates)

def solve_condenser_charges(cond: Condenser) -> CapacityEstimate:
    """Capacity from equilibrium monopole charges on the closed-form Green
    function; valid when plate radii are small against all separations
    (model error O((radius/separation)^2))."""
    plates = cond.plates
    k = len(plates)
    scale = cond.gap_scale() + min(p.radius for p in plates)
    if max(p.radius for p in plates) > 0.25 * scale:
        raise RadiusTooLarge("charge model needs radius << separation")
    m = np.zeros((k, k))
    for i, p in enumerate(plates):
        m[i, i] = -math.log(p.radius) + math.log(inner_radius(cond.domain, p.center))
        for j, q in enumerate(plates):
            if i != j:
                m[i, j] = float(green_function(cond.domain, p.center, q.center))
    delta = np.array([p.potential for p in plates])
    q = np.linalg.solve(m, delta)
    value = 2.0 * math.pi * float(np.dot(q, delta))
    return CapacityEstimate(value, "charge_collocation",
                            {"model": "monopole-green", "plates": k})


# ----------------------------------------------------------------------------
# walk-on-spheres

def _safe_radii(domain, z):
    """Largest known-safe sphere radius at each point (vectorized)."""
    if isinstance(domain, GreenLevelSubdomain):
        base = np.asarray(domain.base.boundary_distance(z), dtype=float)
        u = np.asarray(domain.level_difference(z), dtype=float)
        grad = np.asarray(domain.level_gradient_modulus(z), dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            lvl = 0.5 * u / np.maximum(grad, 1e-300)
        # at the Green poles u/grad is inf/inf: the level set is far there
        lvl = np.where(np.isfinite(lvl), lvl, base)
        rad = np.minimum(base, lvl)
        # verify the sphere stays on the positive side of the level set;
        # halve on any sign flip among 8 probes (the first-order estimate
        # can overshoot where the level set curves)
        dirs = np.exp(1j * (np.pi / 4.0) * np.arange(8))
        check = np.ones(z.shape, dtype=bool)
        for _ in range(6):
            if not np.any(check):
                break
            probes = z[check, None] + rad[check, None] * dirs[None, :]
            pr = probes.ravel()
            ok_base = np.asarray(domain.base.boundary_distance(pr), float) > 0
            uu = np.full(pr.shape, -1.0)
            uu[ok_base] = domain.level_difference(pr[ok_base])
            bad = (uu <= 0).reshape(-1, 8).any(axis=1)
            idx = np.nonzero(check)[0]
            rad[idx[bad]] *= 0.5
            check[:] = False
            check[idx[bad]] = True
        return rad
    return np.asarray(domain.boundary_distance(z), dtype=float)


def _walk_exits(domain, start: complex, n: int, rng, eps: float, max_steps: int):
    """Exit points of n walks from start; returns (exits, forced_count)."""
    z = np.full(n, complex(start), dtype=np.complex128)
    exits = np.empty(n, dtype=np.complex128)
    alive = np.arange(n)
    forced = 0
    for _ in range(max_steps):
        if alive.size == 0:
            break
        d = _safe_radii(domain, z[alive])
        done = d < eps
        if np.any(done):
            exits[alive[done]] = z[alive[done]]
            alive = alive[~done]
            d = d[~done]
        if alive.size == 0:
            break
        phi = rng.uniform(0.0, 2.0 * math.pi, alive.size)
        z[alive] = z[alive] + d * np.exp(1j * phi)
    if alive.size:
        exits[alive] = z[alive]
        forced = int(alive.size)
    return exits, forced


def _control_coordinate(domain, ref: complex):
    """Holomorphic map of the domain into the unit disk for the control basis."""
    if isinstance(domain, HalfPlane):
        p = complex(ref)
        pr = complex(domain.reflect(p))
        return lambda z: (np.asarray(z, np.complex128) - p) / (np.asarray(z, np.complex128) - pr)
    base = domain.base if isinstance(domain, GreenLevelSubdomain) else domain
    if isinstance(base, HalfPlane):
        p = complex(ref)
        pr = complex(base.reflect(p))
        return lambda z: (np.asarray(z, np.complex128) - p) / (np.asarray(z, np.complex128) - pr)
    return lambda z: np.asarray(z, np.complex128)


def _harmonic_basis(tau, degree):
    tau = np.asarray(tau, dtype=np.complex128)
    cols = [np.ones(tau.shape)]
    power = np.ones_like(tau)
    for _ in range(degree):
        power = power * tau
        cols.append(power.real)
        cols.append(power.imag)
    return np.stack(cols, axis=-1)


def _wos_expectation(domain, start: complex, boundary_fn, budget: WalkBudget,
                     rng) -> GreenEstimate:
    """E[boundary_fn(exit)] for walks from start, with the harmonic
    control variate fitted on a pilot batch."""
    n = int(budget.walks)
    n_pilot = min(max(int(n * budget.pilot_fraction), 500), n // 2)
    coord = _control_coordinate(domain, start)
    pilot_exits, _ = _walk_exits(domain, start, n_pilot, rng,
                                 budget.eps, budget.max_steps)
    pilot_vals = boundary_fn(pilot_exits)
    basis = _harmonic_basis(coord(pilot_exits), budget.control_degree)
    beta, *_ = np.linalg.lstsq(basis, pilot_vals, rcond=None)

    main_exits, forced = _walk_exits(domain, start, n - n_pilot, rng,
                                     budget.eps, budget.max_steps)
    vals = boundary_fn(main_exits)
    resid = vals - _harmonic_basis(coord(main_exits), budget.control_degree) @ beta
    anchor = float(_harmonic_basis(coord(np.array([start])),
                                   budget.control_degree)[0] @ beta)
    mean = anchor + float(resid.mean())
    # floor at the termination-shell bias, which the sample spread cannot see
    stderr = float(math.hypot(resid.std(ddof=1) / math.sqrt(resid.size),
                              budget.eps))
    if forced > 0.001 * n:
        raise BudgetExhausted(f"{forced} walks hit the step cap")
    return GreenEstimate(mean, stderr, n)


def green_numeric(domain, z: complex, z0: complex,
                  budget: WalkBudget = WalkBudget()) -> GreenEstimate:
    """Green function g(z, z0) by walk-on-spheres with singularity splitting.

    The walk estimates the harmonic remainder H (boundary data
    log|zeta - z0|); the fundamental term -log|z - z0| is added exactly.
    Raises BudgetExhausted if a tolerance is requested and not met.
    """
    z, z0 = complex(z), complex(z0)
    if z == z0:
        raise ValueError("z and z0 must be distinct")
    if not (bool(domain.contains(z)) and bool(domain.contains(z0))):
        raise ValueError("z and z0 must be interior to the domain")
    rng = np.random.default_rng(budget.seed)
    est = _wos_expectation(domain, z, lambda e: np.log(np.abs(e - z0)),
                           budget, rng)
    value = est.value - math.log(abs(z - z0))
    if budget.tolerance is not None and est.stderr > budget.tolerance:
        raise BudgetExhausted(
            f"stderr {est.stderr:.3e} above tolerance {budget.tolerance:.3e}"
        )
    return GreenEstimate(value, est.stderr, est.walks)


def inner_radius_numeric(domain, z: complex,
                         budget: WalkBudget = WalkBudget()) -> GreenEstimate:
    """Inner radius exp(Robin constant) at z by walk-on-spheres.

    The regular part H of the Green function (boundary data log|zeta - z|)
    is evaluated on four-point rings at offsets 1e-2 and 5e-3 (shrunk if
    the boundary is closer) and Richardson-extrapolated to the center;
    the ring averages kill the harmonic terms below fourth order.
    """
    z = complex(z)
    if not bool(domain.contains(z)):
        raise ValueError("z must be interior to the domain")
    dist = float(_safe_radii(domain, np.array([z]))[0])
    d1 = min(1e-2, 0.25 * dist)
    d2 = 0.5 * d1
    rng = np.random.default_rng(budget.seed)
    boundary_fn = lambda e: np.log(np.abs(e - z))  # noqa: E731
    per_start = max(budget.walks // 8, 2000)
    ring_means, ring_vars = [], []
    for d in (d1, d2):
        vals, var = [], 0.0
        for k in range(4):
            start = z + d * np.exp(1j * (math.pi / 2.0) * k)
            sub = WalkBudget(per_start, budget.seed, budget.eps,
                             budget.max_steps, None,
                             budget.control_degree, budget.pilot_fraction)
            est = _wos_expectation(domain, start, boundary_fn, sub, rng)
            vals.append(est.value)
            var += est.stderr ** 2 / 16.0
        ring_means.append(float(np.mean(vals)))
        ring_vars.append(var)
    h0 = (16.0 * ring_means[1] - ring_means[0]) / 15.0
    se_h = math.sqrt((16.0 / 15.0) ** 2 * ring_vars[1]
                     + (1.0 / 15.0) ** 2 * ring_vars[0])
    value = math.exp(h0)
    stderr = value * se_h
    if budget.tolerance is not None and stderr > budget.tolerance:
        raise BudgetExhausted(
            f"stderr {stderr:.3e} above tolerance {budget.tolerance:.3e}"
        )
    return GreenEstimate(value, stderr, 8 * per_start)


# ----------------------------------------------------------------------------
# small-radius asymptotics

def asymptotic_cap(points, potentials, rmap, r: float) -> float:
    """-2 pi n / log r - 2 pi E (1/log r)^2 with E the reduced energy of the
    configuration; the two-term small-radius capacity expansion."""
    from .inequalities import reduced_energy

    pts = [complex(p) for p in points]
    if len(pts) > 1:
        dmin = min(abs(a - b) for i, a in enumerate(pts) for b in pts[i + 1:])
        if r >= dmin / 4.0:
            raise RadiusTooLarge("r must be below a quarter of the minimal gap")
    if r <= 0:
        raise ValueError("r must be positive")
    lr = math.log(r)
    energy = reduced_energy(pts, potentials, rmap)
    return -2.0 * math.pi * len(pts) / lr - 2.0 * math.pi * energy / (lr * lr)


def asymptotic_cap_pair(rho: float, r: float, h1_geometry, z1: complex,
                        z2: complex,
                        budget: WalkBudget = WalkBudget()) -> float:
    """Two-term expansion for the unfolded two-plate condenser:

        -4 pi / log r - 2 pi { log[r(H,Z1)/(2(1-rho))]
                               + log[r(H,Z2)/(2(1+rho))]
                               - 2 g_H(Z1,Z2) } (1/log r)^2

    with plate radii 2 r (1 -+ rho); inner radii and the Green value come
    from the Monte-Carlo estimators on the given geometry.
    """
    if not 0.0 < rho < 0.5:
        raise ValueError("rho must lie in (0, 1/2)")
    if r <= 0:
        raise ValueError("r must be positive")
    r1 = inner_radius_numeric(h1_geometry, z1, budget).value
    r2 = inner_radius_numeric(h1_geometry, z2,
                              WalkBudget(budget.walks, budget.seed + 1,
                                         budget.eps, budget.max_steps, None,
                                         budget.control_degree,
                                         budget.pilot_fraction)).value
    g12 = green_numeric(h1_geometry, z1, z2,
                        WalkBudget(budget.walks, budget.seed + 2,
                                   budget.eps, budget.max_steps, None,
                                   budget.control_degree,
                                   budget.pilot_fraction)).value
    lr = math.log(r)
    bracket = (math.log(r1 / (2.0 * (1.0 - rho)))
               + math.log(r2 / (2.0 * (1.0 + rho)))
               - 2.0 * g12)
    return -4.0 * math.pi / lr - 2.0 * math.pi * bracket / (lr * lr)


def green_identity_residual(base, z1: complex, z2: complex,
                            budget: WalkBudget = WalkBudget()) -> float:
    """|LHS - RHS| of the splitting identity

        log[r(base,Z1) r(base,Z2)] - 2 g_base(Z1,Z2)
            = log[r(B1,Z1) r(B2,Z2)]

    where B1/B2 are the two components of the Green-difference level split.
    The left side uses closed forms on the base domain; the right side uses
    the Monte-Carlo Robin estimator on the level subdomains.
    """
    z1, z2 = complex(z1), complex(z2)
    lhs = (math.log(inner_radius(base, z1)) + math.log(inner_radius(base, z2))
           - 2.0 * float(green_function(base, z1, z2)))
    b1 = GreenLevelSubdomain(base, z1, z2, 1)
    b2 = GreenLevelSubdomain(base, z1, z2, -1)
    r1 = inner_radius_numeric(b1, z1, budget).value
    r2 = inner_radius_numeric(b2, z2,
                              WalkBudget(budget.walks, budget.seed + 1,
                                         budget.eps, budget.max_steps, None,
                                         budget.control_degree,
                                         budget.pilot_fraction)).value
    rhs = math.log(r1) + math.log(r2)
    return abs(lhs - rhs)


# ----------------------------------------------------------------------------
# sector unfolding

def separating_transform(k: int, w) -> complex:
    """zeta = (-1)^k i w^2; unfolds the k-th open quadrant onto Re > 0."""
    if k not in (1, 2, 3, 4):
        raise ValueError("k must be 1..4")
    w = np.asarray(w, dtype=np.complex128)
    out = ((-1.0) ** k) * 1j * w * w
    return complex(out) if out.shape == () else out


def sector_contains(k: int, w, closed: bool = True):
    """Membership of w in the k-th quadrant sector (arg between
    pi(k-1)/2 and pi k/2)."""
    w = np.asarray(w, dtype=np.complex128)
    lo = np.exp(1j * math.pi * (k - 1) / 2.0)
    hi = np.exp(1j * math.pi * k / 2.0)
    # inside the cone iff on the inner side of both boundary rays
    s_lo = (np.conj(lo) * w).imag
    s_hi = (np.conj(hi) * w).imag
    if closed:
        return (s_lo >= -1e-12 * np.abs(w)) & (s_hi <= 1e-12 * np.abs(w))
    return (s_lo > 0) & (s_hi < 0)


def _sector_distance(k: int, w: complex) -> float:
    if bool(sector_contains(k, w)):
        return 0.0
    best = math.inf
    for edge in (math.pi * (k - 1) / 2.0, math.pi * k / 2.0):
        u = complex(math.cos(edge), math.sin(edge))
        t = max(0.0, (np.conj(u) * w).real)
        best = min(best, abs(w - t * u))
    return best


class _UnfoldedPlate:
    """Image of (plate intersect closed quadrant k) under the unfolding map,
    together with its mirror across the imaginary axis."""

    def __init__(self, k: int, plate: Plate):
        self.k = k
        self.plate = plate

    def _one_side(self, zeta):
        # invert zeta = (-1)^k i w^2 and keep the root inside the sector
        w2 = zeta * ((-1.0) ** self.k) * (-1j)
        root = np.sqrt(w2)
        hit = np.zeros(zeta.shape, dtype=bool)
        for cand in (root, -root):
            ok = sector_contains(self.k, cand)
            hit |= ok & (np.abs(cand - self.plate.center) <= self.plate.radius)
        return hit

    def contains(self, zeta):
        zeta = np.asarray(zeta, dtype=np.complex128)
        return self._one_side(zeta) | self._one_side(-np.conj(zeta))

    @property
    def center(self):
        return complex(separating_transform(self.k, self.plate.center))

    @property
    def radius(self):
        return 2.0 * abs(self.plate.center) * self.plate.radius


def separation_inequality_check(cond: Condenser, grid: int):
    """(lhs, rhs) with lhs = cap of the condenser and rhs = half the sum of
    the capacities of its four unfolded-and-symmetrized sector condensers.

    Identity configuration on the unit disk only; every quadrant sector of
    the disk unfolds onto the disk itself, so the sector condensers live on
    the unit disk with the mapped plates.  Plates may straddle the real
    axis but must keep clear of the imaginary axis (the mirror axis of the
    symmetrization).
    """
    if not isinstance(cond.domain, UnitDisk):
        raise UnsupportedDomain("sector split implemented on the unit disk")
    for p in cond.plates:
        if abs(p.center.real) <= p.radius:
            raise PlateOnAxis("plate touches the imaginary axis")
    lhs = solve_condenser(cond, grid).value
    total = 0.0
    for k in (1, 2, 3, 4):
        regions = []
        for p in cond.plates:
            if _sector_distance(k, complex(p.center)) <= p.radius:
                regions.append((_UnfoldedPlate(k, p), p.potential))
        if not regions:
            continue
        cap_k, _ = _fd_capacity(UnitDisk(), regions, grid)
        total += cap_k
    return lhs, 0.5 * total
