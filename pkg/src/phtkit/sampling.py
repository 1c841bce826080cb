"""Sampling manifolds, checking density, and approximating their transform.

Pipeline: draw uniform points on a built-in manifold (circle / sphere /
torus), certify that the sample is dense enough, build the ball-nerve
complex at radius eps, and compare its transform against a fine reference
triangulation. The radius hypothesis 0 < eps < tau/2 is enforced; instead
of unavailable sample-size constants, density is certified empirically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .complexes import ComplexError, EmbeddedComplex
from .homology import betti_numbers
from .miniball import smallest_enclosing_ball
from .shapes import icosahedron_sphere, regular_ngon, torus_grid
from .transform import DirectionGrid, compute_pht, make_grid, pht_distance, sphere_volume

__all__ = [
    "ManifoldSpec",
    "PointCloud",
    "CechParams",
    "DensityReport",
    "sample_points",
    "density_check",
    "cech_complex",
    "reference_complex",
    "approximation_report",
]

ON_MANIFOLD_TOL = 1e-12


@dataclass(frozen=True)
class ManifoldSpec:
    """A built-in manifold: circle(r), sphere(r), or torus(R > r)."""

    kind: str
    radius: float = 1.0      # circle/sphere radius; torus minor radius
    major_radius: float = 0.0  # torus only

    def __post_init__(self):
        if self.kind not in ("circle", "sphere", "torus"):
            raise ComplexError(f"unknown manifold kind {self.kind!r}")
        if self.radius <= 0:
            raise ComplexError("radius must be positive")
        if self.kind == "torus" and self.major_radius <= self.radius:
            raise ComplexError("torus needs major radius > minor radius")

    @property
    def ambient_d(self) -> int:
        return 2 if self.kind == "circle" else 3

    @property
    def tau(self) -> float:
        """Condition number (reach): the radius for circle/sphere, minor radius for torus."""
        return self.radius

    def residual(self, points: np.ndarray) -> np.ndarray:
        """Distance of each point from the manifold's implicit surface."""
        p = np.asarray(points, dtype=float)
        if self.kind == "circle":
            return np.abs(np.linalg.norm(p, axis=1) - self.radius)
        if self.kind == "sphere":
            return np.abs(np.linalg.norm(p, axis=1) - self.radius)
        rho = np.linalg.norm(p[:, :2], axis=1)
        return np.abs(np.sqrt((rho - self.major_radius) ** 2 + p[:, 2] ** 2) - self.radius)


@dataclass(frozen=True)
class PointCloud:
    points: np.ndarray
    provenance: dict

    def __len__(self) -> int:
        return self.points.shape[0]


def sample_points(spec: ManifoldSpec, n: int, seed: int) -> PointCloud:
    """n i.i.d. points from the uniform surface measure, reproducible per seed.

    Circle: uniform angle. Sphere: uniform z and angle (area-preserving).
    Torus: rejection against the (R + r cos w) area density.
    """
    if n < 1:
        raise ComplexError("need n >= 1 samples")
    rng = np.random.default_rng(seed)
    if spec.kind == "circle":
        theta = rng.uniform(0.0, 2.0 * math.pi, size=n)
        pts = spec.radius * np.column_stack([np.cos(theta), np.sin(theta)])
    elif spec.kind == "sphere":
        z = rng.uniform(-1.0, 1.0, size=n)
        phi = rng.uniform(0.0, 2.0 * math.pi, size=n)
        rho = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        pts = spec.radius * np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])
    else:
        R, r = spec.major_radius, spec.radius
        out = np.empty((n, 3))
        filled = 0
        while filled < n:
            need = n - filled
            u = rng.uniform(0.0, 2.0 * math.pi, size=need)
            w = rng.uniform(0.0, 2.0 * math.pi, size=need)
            accept = rng.uniform(0.0, 1.0, size=need) * (R + r) <= R + r * np.cos(w)
            u, w = u[accept], w[accept]
            k = u.size
            rho = R + r * np.cos(w)
            out[filled:filled + k] = np.column_stack(
                [rho * np.cos(u), rho * np.sin(u), r * np.sin(w)]
            )
            filled += k
        pts = out
    pts.flags.writeable = False
    return PointCloud(pts, {"kind": spec.kind, "radius": spec.radius,
                            "major_radius": spec.major_radius, "n": n, "seed": seed})


@dataclass(frozen=True)
class DensityReport:
    ok: bool
    radius: float
    max_gap: float
    worst_point: tuple


def _reference_grid(spec: ManifoldSpec, resolution: int) -> np.ndarray:
    if spec.kind == "circle":
        theta = 2.0 * math.pi * np.arange(resolution) / resolution
        return spec.radius * np.column_stack([np.cos(theta), np.sin(theta)])
    if spec.kind == "sphere":
        from .transform import fibonacci_sphere

        return spec.radius * fibonacci_sphere(resolution)
    R, r = spec.major_radius, spec.radius
    u = 2.0 * math.pi * np.arange(resolution) / resolution
    w = 2.0 * math.pi * np.arange(resolution) / resolution
    uu, ww = np.meshgrid(u, w)
    rho = R + r * np.cos(ww)
    return np.column_stack([
        (rho * np.cos(uu)).ravel(), (rho * np.sin(uu)).ravel(), (r * np.sin(ww)).ravel()
    ])


def density_check(cloud: PointCloud, spec: ManifoldSpec, r: float, ref_resolution: int = 2048) -> DensityReport:
    """Is every point of a deterministic reference grid within r of a sample?

    Reports the worst gap (the covering radius of the sample, measured on
    the grid).
    """
    grid = _reference_grid(spec, ref_resolution)
    samples = cloud.points
    max_gap = -1.0
    worst = grid[0]
    block = 4096
    for start in range(0, grid.shape[0], block):
        g = grid[start:start + block]
        d2 = ((g[:, None, :] - samples[None, :, :]) ** 2).sum(axis=2)
        gaps = np.sqrt(d2.min(axis=1))
        i = int(np.argmax(gaps))
        if gaps[i] > max_gap:
            max_gap = float(gaps[i])
            worst = g[i]
    return DensityReport(ok=max_gap <= r, radius=float(r), max_gap=max_gap,
                         worst_point=tuple(float(x) for x in worst))


@dataclass(frozen=True)
class CechParams:
    """Ball radius and simplex-dimension cap for the ball-nerve complex."""

    radius: float
    max_dim: int = 0  # 0 means: ambient dimension

    def __post_init__(self):
        if self.radius <= 0:
            raise ComplexError("ball radius must be positive")


def _triangle_radii(pts: np.ndarray, i: np.ndarray, j: np.ndarray, k: np.ndarray) -> np.ndarray:
    """Minimum enclosing ball radius of point triples, vectorized.

    Obtuse (or degenerate) triangles are enclosed by the ball of their
    longest edge; acute ones by their circumball.
    """
    a2 = ((pts[j] - pts[k]) ** 2).sum(axis=1)
    b2 = ((pts[i] - pts[k]) ** 2).sum(axis=1)
    c2 = ((pts[i] - pts[j]) ** 2).sum(axis=1)
    m = np.maximum(np.maximum(a2, b2), c2)
    obtuse = m >= a2 + b2 + c2 - m
    u = pts[j] - pts[i]
    w = pts[k] - pts[i]
    if pts.shape[1] == 2:
        cross2 = (u[:, 0] * w[:, 1] - u[:, 1] * w[:, 0]) ** 2
    else:
        cr = np.cross(u, w)
        cross2 = (cr * cr).sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        circ2 = a2 * b2 * c2 / (4.0 * cross2)
    r2 = np.where(obtuse, m / 4.0, circ2)
    return np.sqrt(r2)


def cech_complex(cloud: PointCloud, params: CechParams) -> EmbeddedComplex:
    """Nerve of the closed balls: a simplex enters iff its points fit in a ball
    of the given radius (exact minimum enclosing ball test).

    Face-closed by monotonicity of the enclosing radius; simplex dimension
    is capped (default: ambient dimension, which keeps homology correct up
    to degree cap-1).
    """
    pts = cloud.points
    n, d = pts.shape
    eps = params.radius
    cap = params.max_dim if params.max_dim > 0 else d

    by_dim: list[list[tuple]] = [[(i,) for i in range(n)]]
    if cap >= 1 and n >= 2:
        d2 = ((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2)
        within = d2 <= (2.0 * eps) ** 2
        ii, jj = np.nonzero(np.triu(within, k=1))
        by_dim.append([(int(a), int(b)) for a, b in zip(ii, jj)])
        neighbors = [np.flatnonzero(within[i] & (np.arange(n) > i)) for i in range(n)]
    if cap >= 2 and n >= 3:
        tris = []
        for i in range(n):
            nb = neighbors[i]
            if nb.size < 2:
                continue
            a, b = np.triu_indices(nb.size, k=1)
            jj, kk = nb[a], nb[b]
            keep = within[jj, kk]
            jj, kk = jj[keep], kk[keep]
            if not jj.size:
                continue
            radii = _triangle_radii(pts, np.full(jj.size, i), jj, kk)
            for j, k in zip(jj[radii <= eps], kk[radii <= eps]):
                tris.append((i, int(j), int(k)))
        by_dim.append(tris)
    for dim in range(3, cap + 1):
        prev = by_dim[dim - 1]
        if not prev:
            break
        cur = []
        prev_set = set(prev)
        for t in prev:
            for j in neighbors[t[-1]]:
                j = int(j)
                cand = t + (j,)
                if all(cand[:x] + cand[x + 1:] in prev_set for x in range(len(cand) - 1)):
                    _, r = smallest_enclosing_ball(pts[list(cand)])
                    if r <= eps:
                        cur.append(cand)
        by_dim.append(cur)
    return EmbeddedComplex(d, pts, by_dim)


def reference_complex(spec: ManifoldSpec, resolution: int) -> EmbeddedComplex:
    """Fine deterministic triangulation: n-gon / subdivided icosahedron / torus grid."""
    if spec.kind == "circle":
        return regular_ngon(resolution, spec.radius)
    if spec.kind == "sphere":
        return icosahedron_sphere(resolution, spec.radius)
    return torus_grid(resolution, spec.major_radius, spec.radius)


_DEFAULT_REFERENCE_RESOLUTION = {"circle": 256, "sphere": 3, "torus": 24}


def approximation_report(
    spec: ManifoldSpec,
    n: int,
    eps: float,
    seed: int,
    grid: Optional[DirectionGrid] = None,
    ref_resolution: Optional[int] = None,
    density_resolution: int = 2048,
    jobs: int = 1,
) -> dict:
    """Run the whole sampling pipeline and check the approximation bound.

    Draws the cloud, certifies eps/2-density, builds the ball-nerve complex,
    and compares its transform against the reference triangulation. The
    comparison runs in degrees 0..d-1: the complex is dimension-capped at d,
    so top-degree bars are truncation artifacts, while a codimension-one
    manifold carries all its homology below degree d anyway. Reports the
    weighted distance, the 2*eps*vol(S^{d-1}) bound, and which eps regime
    the run certifies.
    """
    tau = spec.tau
    if not (0.0 < eps < tau / 2.0):
        raise ComplexError(f"need 0 < eps < tau/2 = {tau / 2.0}, got {eps}")
    d = spec.ambient_d
    if grid is None:
        grid = make_grid(d, 8)
    if ref_resolution is None:
        ref_resolution = _DEFAULT_REFERENCE_RESOLUTION[spec.kind]

    cloud = sample_points(spec, n, seed)
    density = density_check(cloud, spec, eps / 2.0, density_resolution)
    complex_k = cech_complex(cloud, CechParams(eps))
    reference = reference_complex(spec, ref_resolution)

    degrees = list(range(d))
    pht_k = compute_pht(complex_k, grid, max_degree=d - 1, jobs=jobs)
    pht_m = compute_pht(reference, grid, max_degree=d - 1, jobs=jobs)
    # Betti numbers = essential bar counts (any one direction suffices);
    # this reuses the transform instead of a second full rank computation
    betti_k = [int(pht_k.barcodes[0].essential_births(q).size) for q in range(d)]
    betti_m = betti_numbers(reference, max_degree=d - 1)
    homology_match = betti_k == betti_m
    surrogate = pht_distance(pht_k, pht_m, degrees=degrees)
    vol = sphere_volume(d)
    bound = 2.0 * eps * vol

    return {
        "spec": {"kind": spec.kind, "radius": spec.radius, "major_radius": spec.major_radius},
        "n": n,
        "eps": eps,
        "seed": seed,
        "tau": tau,
        "density": {
            "ok": density.ok,
            "radius": density.radius,
            "max_gap": density.max_gap,
        },
        "betti_complex": [int(x) for x in betti_k],
        "betti_reference": [int(x) for x in betti_m],
        "homology_match": homology_match,
        "compared_degrees": degrees,
        "distance": surrogate,
        "bound_two_eps_vol": bound,
        "bound_satisfied": surrogate <= bound + 1e-9,
        "eps_below_tau_over_vol": eps < tau / vol,
        "pass": bool(density.ok and homology_match),
    }
