"""The persistent homology transform on direction grids, plus distances and plots.

A PHTSample is the discretized transform: for every direction v of a grid
on S^{d-1}, the full barcode of the height filtration in direction v. Grid
weights sum to the sphere volume (2*pi or 4*pi) so that integrals against
the grid are comparable to the continuum statements.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .complexes import ComplexError, EmbeddedComplex, Subcomplex
from .parallel import parallel_map
from .persistence import Barcode, bottleneck, compute_barcode, lower_star_filtration

__all__ = [
    "DirectionGrid",
    "PHTSample",
    "sphere_volume",
    "make_grid",
    "fibonacci_sphere",
    "compute_pht",
    "pht_distance",
    "render_heatmap",
    "sample_to_json",
    "sample_from_json",
    "barcode_to_csv",
]


def sphere_volume(d: int) -> float:
    """Volume (measure) of S^{d-1}: 2*pi for d=2, 4*pi for d=3."""
    if d == 2:
        return 2.0 * math.pi
    if d == 3:
        return 4.0 * math.pi
    raise ComplexError(f"unsupported ambient dimension {d}")


@dataclass(frozen=True)
class DirectionGrid:
    """Directions on S^{d-1} with positive weights summing to vol(S^{d-1})."""

    d: int
    directions: np.ndarray  # (N, d), unit rows
    weights: np.ndarray     # (N,)
    scheme: str = "custom"

    def __post_init__(self):
        dirs = np.asarray(self.directions, dtype=float).reshape(-1, self.d)
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if dirs.shape[0] != w.shape[0]:
            raise ComplexError("direction and weight counts differ")
        if np.any(w <= 0):
            raise ComplexError("grid weights must be positive")
        norms = np.linalg.norm(dirs, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-12):
            raise ComplexError("grid directions must be unit vectors")
        if abs(float(w.sum()) - sphere_volume(self.d)) >= 1e-9:
            raise ComplexError("grid weights must sum to vol(S^{d-1})")
        dirs = dirs.copy()
        w = w.copy()
        dirs.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "directions", dirs)
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return self.directions.shape[0]

    def same_grid(self, other: "DirectionGrid") -> bool:
        return (
            self.d == other.d
            and self.directions.shape == other.directions.shape
            and np.array_equal(self.directions, other.directions)
            and np.array_equal(self.weights, other.weights)
        )

    @staticmethod
    def from_vectors(vectors, scheme: str = "custom") -> "DirectionGrid":
        dirs = np.asarray(vectors, dtype=float)
        d = dirs.shape[1]
        n = dirs.shape[0]
        w = np.full(n, sphere_volume(d) / n)
        return DirectionGrid(d, dirs, w, scheme)


def fibonacci_sphere(n: int) -> np.ndarray:
    """n near-evenly spread unit vectors on S^2 (golden-angle spiral)."""
    i = np.arange(n, dtype=float)
    z = 1.0 - (2.0 * i + 1.0) / n
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    golden = math.pi * (3.0 - math.sqrt(5.0))
    phi = golden * i
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def make_grid(d: int, resolution: int, scheme: Optional[str] = None) -> DirectionGrid:
    """Direction grid: uniform angles for d=2, Fibonacci spiral for d=3.

    Weights are vol(S^{d-1}) / resolution in both schemes.
    """
    if resolution < 1:
        raise ComplexError("grid resolution must be >= 1")
    if d == 2:
        if scheme not in (None, "uniform"):
            raise ComplexError(f"unsupported scheme {scheme!r} for d=2")
        theta = 2.0 * math.pi * np.arange(resolution) / resolution
        dirs = np.column_stack([np.cos(theta), np.sin(theta)])
        dirs[np.abs(dirs) < 1e-15] = 0.0  # axis directions exactly on-axis
        return DirectionGrid(2, dirs, np.full(resolution, 2.0 * math.pi / resolution), "uniform")
    if d == 3:
        if scheme not in (None, "fibonacci"):
            raise ComplexError(f"unsupported scheme {scheme!r} for d=3")
        dirs = fibonacci_sphere(resolution)
        return DirectionGrid(3, dirs, np.full(resolution, 4.0 * math.pi / resolution), "fibonacci")
    raise ComplexError(f"unsupported ambient dimension {d}")


@dataclass(frozen=True)
class PHTSample:
    """Barcodes of the height filtration for every direction of a grid."""

    complex_hash: str
    grid: DirectionGrid
    barcodes: tuple  # one Barcode per grid direction
    max_degree: int

    def __post_init__(self):
        if len(self.barcodes) != len(self.grid):
            raise ComplexError("one barcode per grid direction required")

    def betti(self, dir_index: int, degree: int, t: float) -> int:
        return self.barcodes[dir_index].betti(degree, t)


def _pht_chunk(args):
    sub, vectors, max_degree = args
    return [
        compute_barcode(lower_star_filtration(sub, v), max_degree).padded(max_degree)
        for v in vectors
    ]


def compute_pht(
    sub: Subcomplex | EmbeddedComplex,
    grid: DirectionGrid,
    max_degree: Optional[int] = None,
    jobs: int = 1,
) -> PHTSample:
    """Full barcodes of sub along every grid direction, degrees 0..max_degree.

    max_degree defaults to the ambient dimension. Deterministic: the result
    is independent of the parallelism level.
    """
    if isinstance(sub, EmbeddedComplex):
        sub = sub.full_subcomplex()
    if sub.parent.dimension != grid.d:
        raise ComplexError("grid dimension does not match the complex")
    if max_degree is None:
        max_degree = grid.d
    vectors = list(grid.directions)
    n_chunks = min(max(jobs, 1), len(vectors)) or 1
    chunks = [list(c) for c in np.array_split(np.arange(len(vectors)), n_chunks) if len(c)]
    results = parallel_map(
        _pht_chunk,
        [(sub, [vectors[i] for i in c], max_degree) for c in chunks],
        jobs=jobs,
    )
    barcodes = tuple(bc for chunk in results for bc in chunk)
    h = sub.parent.content_hash() if sub.mask.all() else _sub_hash(sub)
    return PHTSample(h, grid, barcodes, max_degree)


def _sub_hash(sub: Subcomplex) -> str:
    import hashlib

    base = sub.parent.content_hash()
    mask_bytes = np.packbits(sub.mask).tobytes()
    return hashlib.sha256(base.encode() + mask_bytes).hexdigest()


def pht_distance(a: PHTSample, b: PHTSample, degrees: Optional[Sequence[int]] = None) -> float:
    """Grid-weighted aggregate of per-direction bottleneck distances.

    sum_v weight(v) * max_n bottleneck(a(v), b(v), n). This is the
    computable stand-in for the integral-type transform distance; it is
    reported as its own quantity, and only checked against upper bounds.
    """
    if not a.grid.same_grid(b.grid):
        raise ComplexError("samples live on different grids")
    if degrees is None:
        degrees = range(min(a.max_degree, b.max_degree) + 1)
    degrees = list(degrees)
    total = 0.0
    for i, w in enumerate(a.grid.weights):
        worst = 0.0
        for n in degrees:
            worst = max(worst, bottleneck(a.barcodes[i], b.barcodes[i], n))
        total += float(w) * worst
    return total


# -- serialization -----------------------------------------------------------


def _interval_to_jsonable(b: float, d: float):
    return [b, "inf" if math.isinf(d) else d]


def sample_to_json(sample: PHTSample) -> str:
    payload = {
        "format": "phtkit-pht-sample",
        "complex_hash": sample.complex_hash,
        "max_degree": sample.max_degree,
        "grid": {
            "d": sample.grid.d,
            "scheme": sample.grid.scheme,
            "directions": [[float(x) for x in v] for v in sample.grid.directions],
            "weights": [float(w) for w in sample.grid.weights],
        },
        "barcodes": [
            [
                [_interval_to_jsonable(float(b), float(d)) for b, d in zip(bc.births[n], bc.deaths[n])]
                for n in range(sample.max_degree + 1)
            ]
            for bc in sample.barcodes
        ],
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def sample_from_json(text: str) -> PHTSample:
    payload = json.loads(text)
    if payload.get("format") != "phtkit-pht-sample":
        raise ComplexError("not a PHT sample file")
    g = payload["grid"]
    grid = DirectionGrid(int(g["d"]), np.asarray(g["directions"], dtype=float), np.asarray(g["weights"], dtype=float), g.get("scheme", "custom"))
    max_degree = int(payload["max_degree"])
    barcodes = []
    for per_degree in payload["barcodes"]:
        births = []
        deaths = []
        for intervals in per_degree:
            births.append([float(iv[0]) for iv in intervals])
            deaths.append([math.inf if iv[1] == "inf" else float(iv[1]) for iv in intervals])
        barcodes.append(Barcode(births, deaths))
    return PHTSample(payload["complex_hash"], grid, tuple(barcodes), max_degree)


def barcode_to_csv(bc: Barcode, include_ephemeral: bool = False) -> str:
    """CSV rows "degree,birth,death" with "inf" for essential deaths."""
    lines = ["degree,birth,death"]
    for n in range(bc.max_degree + 1):
        for b, d in zip(bc.births[n], bc.deaths[n]):
            if not include_ephemeral and b == d:
                continue
            death = "inf" if math.isinf(d) else repr(float(d))
            lines.append(f"{n},{float(b)!r},{death}")
    return "\n".join(lines) + "\n"


# -- heatmap rendering -------------------------------------------------------

_PALETTE = ["#f7f7f7", "#3182bd", "#fd8d3c", "#74c476", "#9e9ac8", "#e31a1c", "#252525"]


def _color(count: int) -> str:
    return _PALETTE[min(count, len(_PALETTE) - 1)]


def _arc_point(cx: float, cy: float, r: float, theta: float) -> tuple[float, float]:
    return cx + r * math.cos(theta), cy - r * math.sin(theta)


def _sector_path(cx, cy, r0, r1, th0, th1) -> str:
    """Annular sector split at the midpoint so each arc spans < pi."""
    thm = 0.5 * (th0 + th1)
    p = []
    x, y = _arc_point(cx, cy, r0, th0)
    p.append(f"M {x:.4f} {y:.4f}")
    for a, b in ((th0, thm), (thm, th1)):
        x, y = _arc_point(cx, cy, r0, b)
        p.append(f"A {r0:.4f} {r0:.4f} 0 0 0 {x:.4f} {y:.4f}")
    x, y = _arc_point(cx, cy, r1, th1)
    p.append(f"L {x:.4f} {y:.4f}")
    for a, b in ((th1, thm), (thm, th0)):
        x, y = _arc_point(cx, cy, r1, b)
        p.append(f"A {r1:.4f} {r1:.4f} 0 0 1 {x:.4f} {y:.4f}")
    p.append("Z")
    return " ".join(p)


def render_heatmap(sample: PHTSample, degree: int, path: str) -> str:
    """Polar heatmap of the degree-n Betti curve over (direction angle, level).

    d=2 only: each direction gets an angular sector, the filtration level
    maps to the radius, and the fill encodes the Betti count. Output bytes
    are a pure function of the input sample.
    """
    if sample.grid.d != 2:
        raise ComplexError("heatmaps are only rendered for d=2")
    dirs = sample.grid.directions
    n_dirs = len(dirs)
    angles = np.arctan2(dirs[:, 1], dirs[:, 0])

    events = []
    for bc in sample.barcodes:
        if degree <= bc.max_degree:
            events.extend(float(b) for b in bc.births[degree])
            events.extend(float(d) for d in bc.deaths[degree] if math.isfinite(d))
    if events:
        tmin, tmax = min(events), max(events)
    else:
        tmin, tmax = -1.0, 1.0
    span = tmax - tmin
    if span <= 0:
        span = 1.0
    tlo, thi = tmin - 0.05 * span, tmax + 0.05 * span

    size = 360.0
    cx = cy = size / 2.0
    r_in, r_out = 26.0, 168.0

    def radius(t: float) -> float:
        return r_in + (r_out - r_in) * (t - tlo) / (thi - tlo)

    half = math.pi / n_dirs
    cells = []
    max_count = 0
    for i in range(n_dirs):
        bc = sample.barcodes[i]
        th0, th1 = angles[i] - half, angles[i] + half
        cuts = sorted({tlo, thi} | {
            float(x)
            for x in (list(bc.births[degree]) + [d for d in bc.deaths[degree] if math.isfinite(d)] if degree <= bc.max_degree else [])
            if tlo < float(x) < thi
        })
        for a, b in zip(cuts[:-1], cuts[1:]):
            count = bc.betti(degree, 0.5 * (a + b))
            max_count = max(max_count, count)
            cells.append((radius(a), radius(b), th0, th1, count))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size:.0f}" height="{size:.0f}" viewBox="0 0 {size:.0f} {size:.0f}">',
        f'<rect width="{size:.0f}" height="{size:.0f}" fill="#ffffff"/>',
        f'<!-- polar Betti heatmap, degree {degree}; radius {r_in:.0f}..{r_out:.0f} spans levels {tlo!r}..{thi!r} -->',
    ]
    for r0, r1, th0, th1, count in cells:
        parts.append(f'<path d="{_sector_path(cx, cy, r0, r1, th0, th1)}" fill="{_color(count)}"/>')
    for c in range(min(max_count, len(_PALETTE) - 1) + 1):
        x = 8 + 22 * c
        parts.append(f'<rect x="{x}" y="{size - 16:.0f}" width="18" height="10" fill="{_color(c)}"/>')
        parts.append(f'<text x="{x + 4}" y="{size - 18:.0f}" font-size="9">{c}</text>')
    parts.append("</svg>")
    svg = "\n".join(parts) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(svg)
    return svg
