"""Assembling the transform of a shape from a closed cover.

Two routes are implemented and cross-checked against direct computation:

* fast degree-0 route: at each stalk (v, t), the cochain complex whose
  depth-k term is spanned by the connected components of the sublevel sets
  of the depth-k cover intersections. Its cohomology equals the direct
  answer exactly when no intersection shows higher cohomology in any
  sublevel (e.g. covers by closed simplices).
* total route: the Cech-simplicial double complex (horizontal restriction,
  vertical coboundary) folded into its total complex. Its cohomology equals
  the direct answer for every cover; this is descent, and it is verified,
  not assumed.

Everything is exact integer linear algebra over F2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import f2
from .complexes import ComplexError, Cover, Direction, EmbeddedComplex, Subcomplex
from .homology import betti_numbers
from .parallel import parallel_map
from .persistence import Filtration, compute_barcode, lower_star_filtration

__all__ = [
    "Nerve",
    "CechH0Complex",
    "DoubleComplex",
    "StalkReport",
    "build_nerve",
    "cech_h0_stalk",
    "total_cohomology_stalk",
    "e1_page",
    "critical_t_grid",
    "glued_betti_curves",
    "GluedCurves",
    "verify_descent",
    "DescentReport",
    "stalk_report",
    "convexity_check",
    "ConvexityReport",
]


class _NerveEntry:
    """One nonempty intersection M_I, with the per-dimension data reused by stalks."""

    __slots__ = ("I", "mask", "verts", "edges", "gids_by_dim")

    def __init__(self, I: tuple, mask: np.ndarray, parent: EmbeddedComplex):
        self.I = I
        self.mask = mask
        sub = Subcomplex(parent, mask)
        self.verts = sub.vertex_ids()
        e = sub.active_of_dim(1)
        self.edges = (
            parent.simplices[1][e - parent._offsets[1]] if e.size else np.empty((0, 2), dtype=np.int64)
        )
        self.gids_by_dim = [sub.active_of_dim(k) for k in range(len(parent.simplices))]

    def __getstate__(self):
        return (self.I, self.mask, self.verts, self.edges, self.gids_by_dim)

    def __setstate__(self, state):
        self.I, self.mask, self.verts, self.edges, self.gids_by_dim = state


class Nerve:
    """All nonempty intersections of a cover, by depth, with inclusion maps.

    entries is flat in (depth, lexicographic index set) order; by_depth[k]
    lists entry positions of depth k+1. facets/children give the positions
    of one-smaller/one-larger index sets.
    """

    def __init__(self, cover: Cover, entries, by_depth, facets, children, max_depth):
        self.cover = cover
        self.parent = cover.parent
        self.entries: list[_NerveEntry] = entries
        self.by_depth: list[list[int]] = by_depth
        self.facets: list[list[int]] = facets
        self.children: list[list[int]] = children
        self.max_depth = max_depth

    @property
    def depth(self) -> int:
        return len(self.by_depth)

    def entry(self, I: Sequence[int]) -> _NerveEntry:
        I = tuple(sorted(I))
        for e in self.entries:
            if e.I == I:
                return e
        raise ComplexError(f"no nonempty intersection for {I}")

    def subcomplex(self, I: Sequence[int]) -> Subcomplex:
        return Subcomplex(self.parent, self.entry(I).mask)


def build_nerve(cover: Cover, max_depth: Optional[int] = None) -> Nerve:
    """All nonempty depth-k intersections, k <= max_depth (default: |cover|).

    Enumeration extends each nonempty index set by larger indices only, so
    every nonempty set is generated exactly once, in lexicographic order
    per depth; downward closure makes this complete.
    """
    parent = cover.parent
    n = len(cover.elements)
    if max_depth is None:
        max_depth = n
    max_depth = min(max_depth, n)

    entries: list[_NerveEntry] = []
    by_depth: list[list[int]] = []
    index: dict[tuple, int] = {}

    frontier: list[tuple[tuple, np.ndarray]] = []
    for i, el in enumerate(cover.elements):
        frontier.append(((i,), el.mask))
    depth = 1
    while frontier and depth <= max_depth:
        positions = []
        for I, mask in frontier:
            pos = len(entries)
            entries.append(_NerveEntry(I, mask, parent))
            index[I] = pos
            positions.append(pos)
        by_depth.append(positions)
        nxt = []
        if depth < max_depth:
            for I, mask in frontier:
                for j in range(I[-1] + 1, n):
                    m = mask & cover.elements[j].mask
                    if m.any():
                        nxt.append((I + (j,), m))
        frontier = nxt
        depth += 1

    facets = [[] for _ in entries]
    children = [[] for _ in entries]
    for pos, e in enumerate(entries):
        if len(e.I) == 1:
            continue
        for x in range(len(e.I)):
            fpos = index[e.I[:x] + e.I[x + 1:]]
            facets[pos].append(fpos)
            children[fpos].append(pos)
    return Nerve(cover, entries, by_depth, facets, children, max_depth)


# -- the fast degree-0 stalk complex ----------------------------------------


@dataclass
class CechH0Complex:
    """Degree-0 stalk complex at (v, t): component bases and F2 differentials.

    bases[k] lists (entry position, component root) for depth k+1;
    differentials[k] holds the columns of C^k -> C^{k+1}.
    """

    v: np.ndarray
    t: float
    bases: list
    differentials: list  # differentials[k]: list of column bitsets, rows in bases[k+1]

    def dims(self) -> list[int]:
        return [len(b) for b in self.bases]

    def cohomology(self) -> list[int]:
        dims = self.dims()
        ranks = [f2.rank(cols) for cols in self.differentials]
        out = []
        for p in range(len(dims)):
            r_out = ranks[p] if p < len(ranks) else 0
            r_in = ranks[p - 1] if p >= 1 else 0
            out.append(dims[p] - r_out - r_in)
        return out

    def squares_to_zero(self) -> bool:
        for k in range(len(self.differentials) - 1):
            if not f2.matmul_is_zero(self.differentials[k + 1], self.differentials[k]):
                return False
        return True


class _StalkComponents:
    """Connected components of every entry's sublevel at one (v, t)."""

    def __init__(self, nerve: Nerve, vertex_heights: np.ndarray, t: float):
        self.label: list[dict[int, int]] = []
        self.roots: list[list[int]] = []
        for e in nerve.entries:
            parent_of: dict[int, int] = {}
            for vid in e.verts:
                vid = int(vid)
                if vertex_heights[vid] <= t:
                    parent_of[vid] = vid

            def find(x: int) -> int:
                root = x
                while parent_of[root] != root:
                    root = parent_of[root]
                while parent_of[x] != root:
                    parent_of[x], x = root, parent_of[x]
                return root

            for a, b in e.edges:
                a, b = int(a), int(b)
                if a in parent_of and b in parent_of:
                    ra, rb = find(a), find(b)
                    if ra != rb:
                        if rb < ra:
                            ra, rb = rb, ra
                        parent_of[rb] = ra
            lab = {x: find(x) for x in parent_of}
            self.label.append(lab)
            self.roots.append(sorted(set(lab.values())))


def cech_h0_stalk(nerve: Nerve, v, t: float) -> CechH0Complex:
    """The degree-0 stalk complex at (v, t).

    The differential entry between a component of a depth-(k+1) piece and a
    component of one of its k-deep facets is 1 iff the former sits inside
    the latter; over F2 the facet sum needs no signs.
    """
    v = v.vector if isinstance(v, Direction) else np.asarray(v, dtype=float)
    hv = nerve.parent.vertex_heights(v)
    comps = _StalkComponents(nerve, hv, t)

    bases: list[list[tuple[int, int]]] = []
    pos_of: list[dict[tuple[int, int], int]] = []
    for k, entry_positions in enumerate(nerve.by_depth):
        basis = []
        for pos in entry_positions:
            for r in comps.roots[pos]:
                basis.append((pos, r))
        bases.append(basis)
        pos_of.append({key: i for i, key in enumerate(basis)})

    diffs: list[list[int]] = []
    for k in range(len(bases) - 1):
        cols = [0] * len(bases[k])
        for row_idx, (jpos, root) in enumerate(bases[k + 1]):
            bit = 1 << row_idx
            for fpos in nerve.facets[jpos]:
                col_idx = pos_of[k][(fpos, comps.label[fpos][root])]
                cols[col_idx] |= bit
        diffs.append(cols)
    return CechH0Complex(v=np.asarray(v, dtype=float), t=float(t), bases=bases, differentials=diffs)


# -- the total (double) complex ----------------------------------------------


@dataclass
class DoubleComplex:
    """Cech-simplicial double complex at one stalk, exposed via its totalization.

    basis[n] lists (entry position, global simplex id) with depth + dim =
    n + 1; columns[n] is the total differential T^n -> T^{n+1} over F2.
    Horizontal arrows restrict cochains to deeper intersections, vertical
    arrows are the simplicial coboundary; over F2 the two commute and the
    folded differential squares to zero.
    """

    v: np.ndarray
    t: float
    basis: list
    columns: list

    def dims(self) -> list[int]:
        return [len(b) for b in self.basis]

    def cohomology(self, max_degree: int) -> list[int]:
        ranks = [f2.rank(cols) for cols in self.columns]
        out = []
        for n in range(max_degree + 1):
            dim = len(self.basis[n]) if n < len(self.basis) else 0
            r_out = ranks[n] if n < len(ranks) else 0
            r_in = ranks[n - 1] if n >= 1 else 0
            out.append(dim - r_out - r_in)
        return out

    def squares_to_zero(self) -> bool:
        for n in range(len(self.columns) - 1):
            if not f2.matmul_is_zero(self.columns[n + 1], self.columns[n]):
                return False
        return True


def build_double_complex(nerve: Nerve, v, t: float, max_degree: Optional[int] = None) -> DoubleComplex:
    parent = nerve.parent
    if max_degree is None:
        max_degree = parent.dimension
    v = v.vector if isinstance(v, Direction) else np.asarray(v, dtype=float)
    heights = parent.heights(v)
    active = heights <= t
    cofaces = parent.coface_ids()

    n_levels = max_degree + 2
    basis: list[list[tuple[int, int]]] = [[] for _ in range(n_levels)]
    pos: list[dict[tuple[int, int], int]] = [dict() for _ in range(n_levels)]
    dims_of = parent.dims_array()
    for p, entry_positions in enumerate(nerve.by_depth):
        for epos in entry_positions:
            entry = nerve.entries[epos]
            for q in range(len(entry.gids_by_dim)):
                n = p + q
                if n >= n_levels:
                    break
                gids = entry.gids_by_dim[q]
                for g in gids[active[gids]]:
                    key = (epos, int(g))
                    pos[n][key] = len(basis[n])
                    basis[n].append(key)

    columns: list[list[int]] = []
    for n in range(min(max_degree + 1, n_levels - 1)):
        target = pos[n + 1]
        cols = []
        for (epos, g) in basis[n]:
            col = 0
            entry = nerve.entries[epos]
            for c in cofaces[g]:
                c = int(c)
                if entry.mask[c] and active[c]:
                    col |= 1 << target[(epos, c)]
            for child in nerve.children[epos]:
                if nerve.entries[child].mask[g]:
                    col |= 1 << target[(child, g)]
            cols.append(col)
        columns.append(cols)
    return DoubleComplex(v=np.asarray(v, dtype=float), t=float(t), basis=basis, columns=columns)


def total_cohomology_stalk(nerve: Nerve, v, t: float, max_degree: Optional[int] = None) -> list[int]:
    """Cohomology dimensions of the totalized double complex at (v, t).

    Contract (descent): equal to the Betti numbers of the direct sublevel
    set for every cover; the test suite checks this, it is never assumed.
    """
    if max_degree is None:
        max_degree = nerve.parent.dimension
    return build_double_complex(nerve, v, t, max_degree).cohomology(max_degree)


def e1_page(nerve: Nerve, v, t: float, max_q: Optional[int] = None) -> np.ndarray:
    """Table e1[p, q] = sum over |I| = p+1 of dim H^q of the sublevel of M_I."""
    parent = nerve.parent
    if max_q is None:
        max_q = parent.dimension
    v = v.vector if isinstance(v, Direction) else np.asarray(v, dtype=float)
    heights = parent.heights(v)
    active = heights <= t
    table = np.zeros((len(nerve.by_depth), max_q + 1), dtype=np.int64)
    for p, entry_positions in enumerate(nerve.by_depth):
        for epos in entry_positions:
            sub = Subcomplex(parent, nerve.entries[epos].mask & active)
            b = betti_numbers(sub, max_degree=max_q)
            table[p] += np.asarray(b[: max_q + 1], dtype=np.int64)
    return table


# -- curves over (v, t) grids -------------------------------------------------


def critical_t_grid(parent: EmbeddedComplex, v) -> np.ndarray:
    """Vertex heights, their midpoints, and one probe below and above.

    Simplex heights all equal vertex heights, so the sublevel complex is
    constant between consecutive values; this grid hits every stalk type.
    """
    hv = np.unique(parent.vertex_heights(v))
    if not hv.size:
        return np.array([0.0])
    mids = (hv[:-1] + hv[1:]) / 2.0
    return np.unique(np.concatenate([[hv[0] - 1.0], hv, mids, [hv[-1] + 1.0]]))


@dataclass(frozen=True)
class GluedCurves:
    """Glued Betti counts over a (direction, level) grid, one mode at a time."""

    mode: str
    directions: np.ndarray
    t_grids: tuple          # per direction: np.ndarray of levels
    counts: tuple           # per direction: (len(t), max_degree+1) int array
    max_degree: int
    warnings: tuple = ()


def _all_single_simplex(cover: Cover) -> list[bool]:
    parent = cover.parent
    cofaces = parent.coface_ids()
    out = []
    for el in cover.elements:
        maximal = 0
        for g in el.active_gids():
            if not any(el.mask[int(c)] for c in cofaces[int(g)]):
                maximal += 1
                if maximal > 1:
                    break
        out.append(maximal == 1)
    return out


def _nerve_filtration(nerve: Nerve, v) -> Filtration:
    """The nerve as an abstract filtered complex: entry I enters when M_I does."""
    hv = nerve.parent.vertex_heights(v)
    items = []
    for e in nerve.entries:
        items.append((float(hv[e.verts].min()), len(e.I) - 1, e.I))
    items.sort()
    return Filtration([I for _, _, I in items], [val for val, _, _ in items])


def _glued_one_direction(args):
    nerve, v, ts, mode, max_degree, fast_single = args
    ts = critical_t_grid(nerve.parent, v) if ts is None else np.asarray(ts, dtype=float)
    counts = np.zeros((ts.size, max_degree + 1), dtype=np.int64)
    if mode == "fastH0" and fast_single:
        bc = compute_barcode(_nerve_filtration(nerve, v))
        for n in range(min(max_degree, bc.max_degree) + 1):
            counts[:, n] = bc.betti_many(n, ts)
    else:
        hv_keys = np.unique(nerve.parent.vertex_heights(v))
        cache: dict[int, list[int]] = {}
        for i, t in enumerate(ts):
            key = int(np.searchsorted(hv_keys, t, side="right"))
            dims = cache.get(key)
            if dims is None:
                if mode == "fastH0":
                    dims = cech_h0_stalk(nerve, v, float(t)).cohomology()
                elif mode == "total":
                    dims = total_cohomology_stalk(nerve, v, float(t), max_degree)
                else:
                    raise ComplexError(f"unknown mode {mode!r}")
                cache[key] = dims
            row = dims[: max_degree + 1] + [0] * (max_degree + 1 - len(dims))
            counts[i] = row
    return ts, counts


def _as_vectors(directions) -> np.ndarray:
    from .transform import DirectionGrid

    if isinstance(directions, DirectionGrid):
        return np.asarray(directions.directions, dtype=float)
    return np.asarray(directions, dtype=float).reshape(-1, np.asarray(directions).shape[-1])


def glued_betti_curves(
    cover: Cover,
    directions,
    t_grid=None,
    mode: str = "total",
    max_degree: Optional[int] = None,
    jobs: int = 1,
    nerve: Optional[Nerve] = None,
) -> GluedCurves:
    """Glued Betti counts per (direction, level, degree).

    mode="total" always reproduces the direct computation (descent);
    mode="fastH0" does so whenever no intersection sublevel carries higher
    cohomology. When the cover is not made of single closed simplices the
    fast result is tagged with a "fast path unsound" warning rather than
    refused: the mismatch itself is informative.
    """
    if max_degree is None:
        max_degree = cover.parent.dimension
    if nerve is None:
        nerve = build_nerve(cover)
    vectors = _as_vectors(directions)
    single = _all_single_simplex(cover)
    fast_single = all(single)
    warnings = ()
    if mode == "fastH0" and not fast_single:
        warnings = ("fast path unsound: cover elements are not single closed simplices",)
    tasks = [(nerve, v, t_grid, mode, max_degree, fast_single) for v in vectors]
    results = parallel_map(_glued_one_direction, tasks, jobs=jobs)
    return GluedCurves(
        mode=mode,
        directions=vectors,
        t_grids=tuple(r[0] for r in results),
        counts=tuple(r[1] for r in results),
        max_degree=max_degree,
        warnings=warnings,
    )


# -- descent verification ------------------------------------------------------


@dataclass(frozen=True)
class DescentReport:
    ok: bool
    mode: str
    n_stalks: int
    n_mismatches: int
    mismatches: tuple  # (direction index, v tuple, t, glued dims, direct dims), capped
    warnings: tuple = ()

    MISMATCH_CAP = 200


def _verify_one_direction(args):
    nerve, v, ts, mode, max_degree, fast_single = args
    ts, counts = _glued_one_direction((nerve, v, ts, mode, max_degree, fast_single))
    bc = compute_barcode(lower_star_filtration(nerve.parent.full_subcomplex(), v))
    direct = np.zeros_like(counts)
    for n in range(max_degree + 1):
        direct[:, n] = bc.betti_many(n, ts)
    bad = np.flatnonzero(np.any(counts != direct, axis=1))
    mismatches = [
        (float(ts[i]), [int(x) for x in counts[i]], [int(x) for x in direct[i]]) for i in bad
    ]
    return ts.size, mismatches


def verify_descent(
    cover: Cover,
    directions,
    mode: str = "total",
    t_grid=None,
    max_degree: Optional[int] = None,
    jobs: int = 1,
    nerve: Optional[Nerve] = None,
) -> DescentReport:
    """Compare glued against direct Betti counts at every sampled stalk."""
    if max_degree is None:
        max_degree = cover.parent.dimension
    if nerve is None:
        nerve = build_nerve(cover)
    vectors = _as_vectors(directions)
    single = all(_all_single_simplex(cover))
    warnings = ()
    if mode == "fastH0" and not single:
        warnings = ("fast path unsound: cover elements are not single closed simplices",)
    tasks = [(nerve, v, t_grid, mode, max_degree, single) for v in vectors]
    results = parallel_map(_verify_one_direction, tasks, jobs=jobs)
    n_stalks = sum(r[0] for r in results)
    mismatches = []
    for k, (_, bad) in enumerate(results):
        for t, glued, direct in bad:
            if len(mismatches) < DescentReport.MISMATCH_CAP:
                mismatches.append((k, tuple(float(x) for x in vectors[k]), t, glued, direct))
    n_bad = sum(len(r[1]) for r in results)
    return DescentReport(
        ok=n_bad == 0,
        mode=mode,
        n_stalks=n_stalks,
        n_mismatches=n_bad,
        mismatches=tuple(mismatches),
        warnings=warnings,
    )


# -- per-stalk report ----------------------------------------------------------


@dataclass(frozen=True)
class StalkReport:
    """Everything the gluing machinery knows about one stalk (v, t)."""

    v: tuple
    t: float
    e1: tuple                    # e1[p][q]
    fast_dims: tuple
    total_dims: tuple
    direct_betti: tuple
    fast_agrees: bool
    total_agrees: bool

    def to_dict(self) -> dict:
        return {
            "v": list(self.v),
            "t": self.t,
            "e1": [list(row) for row in self.e1],
            "fast_dims": list(self.fast_dims),
            "total_dims": list(self.total_dims),
            "direct_betti": list(self.direct_betti),
            "fast_agrees": self.fast_agrees,
            "total_agrees": self.total_agrees,
        }


def stalk_report(nerve: Nerve, v, t: float, max_degree: Optional[int] = None) -> StalkReport:
    parent = nerve.parent
    if max_degree is None:
        max_degree = parent.dimension
    v_arr = v.vector if isinstance(v, Direction) else np.asarray(v, dtype=float)
    heights = parent.heights(v_arr)
    direct = betti_numbers(Subcomplex(parent, heights <= t), max_degree=max_degree)

    fast = cech_h0_stalk(nerve, v_arr, t).cohomology()
    fast = fast[: max_degree + 1] + [0] * (max_degree + 1 - len(fast))
    total = total_cohomology_stalk(nerve, v_arr, t, max_degree)
    table = e1_page(nerve, v_arr, t, max_q=max_degree)
    return StalkReport(
        v=tuple(float(x) for x in v_arr),
        t=float(t),
        e1=tuple(tuple(int(x) for x in row) for row in table),
        fast_dims=tuple(int(x) for x in fast),
        total_dims=tuple(int(x) for x in total),
        direct_betti=tuple(int(x) for x in direct),
        fast_agrees=list(fast) == list(direct),
        total_agrees=list(total) == list(direct),
    )


# -- convexity / fast-path soundness -------------------------------------------


@dataclass(frozen=True)
class ConvexityReport:
    """Per-element fast-path verdicts plus an optional empirical stalk scan.

    "guaranteed" elements are face closures of a single simplex: every
    directional sublevel of every intersection they enter is a face, hence
    contractible or empty. Anything else is "unverified"; the scan samples
    stalks and looks for higher cohomology on intersection sublevels.
    """

    verdicts: tuple
    all_guaranteed: bool
    scan_passed: Optional[bool] = None
    scan_stalks: int = 0
    scan_failures: tuple = ()  # (I, direction index, t, degree q, dim)

    FAILURE_CAP = 50


def _scan_one_direction(args):
    nerve, v, ts, max_q = args
    parent = nerve.parent
    ts = critical_t_grid(parent, v) if ts is None else np.asarray(ts, dtype=float)
    failures = []
    for epos, e in enumerate(nerve.entries):
        bc = compute_barcode(lower_star_filtration(Subcomplex(parent, e.mask), v), max_q)
        for q in range(1, max_q + 1):
            hits = np.flatnonzero(bc.betti_many(q, ts))
            if hits.size:
                failures.append((e.I, float(ts[hits[0]]), q, int(bc.betti(q, float(ts[hits[0]])))))
    return ts.size * len(nerve.entries), failures


def convexity_check(
    cover: Cover,
    scan_directions=None,
    t_grid=None,
    jobs: int = 1,
    nerve: Optional[Nerve] = None,
) -> ConvexityReport:
    """Fast-path soundness: guaranteed for single-simplex elements, else scanned.

    Pass scan_directions (a DirectionGrid or vectors) to run the empirical
    stalk scan; the scan passes iff every intersection's sublevel has zero
    cohomology in all degrees >= 1 at every sampled stalk.
    """
    single = _all_single_simplex(cover)
    verdicts = tuple("guaranteed" if s else "unverified" for s in single)
    if scan_directions is None:
        return ConvexityReport(verdicts=verdicts, all_guaranteed=all(single))
    if nerve is None:
        nerve = build_nerve(cover)
    vectors = _as_vectors(scan_directions)
    max_q = cover.parent.dimension
    results = parallel_map(
        _scan_one_direction,
        [(nerve, v, t_grid, max_q) for v in vectors],
        jobs=jobs,
    )
    n_stalks = sum(r[0] for r in results)
    failures = []
    for k, (_, fails) in enumerate(results):
        for I, t, q, dim in fails:
            if len(failures) < ConvexityReport.FAILURE_CAP:
                failures.append((tuple(I), k, t, q, dim))
    return ConvexityReport(
        verdicts=verdicts,
        all_guaranteed=all(single),
        scan_passed=not any(r[1] for r in results),
        scan_stalks=n_stalks,
        scan_failures=tuple(failures),
    )
