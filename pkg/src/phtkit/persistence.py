"""Height filtrations, persistence barcodes over F2, Betti curves, bottleneck distance.

Coefficients are the two-element field throughout: every acceptance shape
is torsion-free, so Betti numbers agree with characteristic 0, and column
reduction needs no sign bookkeeping. Interval convention: closed at birth,
open at death, so the Betti curve at t is the rank of the sublevel set at
t under the closed half-space x.v <= t.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .complexes import ComplexError, Direction, Subcomplex

__all__ = [
    "Filtration",
    "Interval",
    "Barcode",
    "lower_star_filtration",
    "compute_barcode",
    "betti_curve",
    "bottleneck",
]

INF = math.inf


class Filtration:
    """Simplices in filtration order with their entry values.

    Order is by (value, dimension, lexicographic vertex tuple); every
    simplex appears after all of its faces and values are non-decreasing.
    """

    def __init__(self, simplices: Sequence[tuple], values, _parent=None, _gids=None):
        self._simplices = list(simplices) if simplices is not None else None
        self.values = np.asarray(values, dtype=float)
        self._parent = _parent
        self._gids = _gids  # global ids in filtration order, when built from a complex

    @property
    def simplices(self) -> list[tuple]:
        if self._simplices is None:
            parent = self._parent
            self._simplices = [parent.simplex(int(g)) for g in self._gids]
        return self._simplices

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(zip(self.simplices, self.values))

    def dims(self) -> np.ndarray:
        if self._gids is not None:
            return self._parent.dims_array()[self._gids]
        return np.array([len(s) - 1 for s in self.simplices], dtype=np.int64)

    def check(self) -> list[str]:
        """Report order violations (monotone values, faces before cofaces)."""
        problems = []
        vals = self.values
        if np.any(np.diff(vals) < 0):
            problems.append("values decrease along the filtration")
        pos = {s: i for i, s in enumerate(self.simplices)}
        for i, s in enumerate(self.simplices):
            if len(s) > 1:
                for face in itertools.combinations(s, len(s) - 1):
                    j = pos.get(face)
                    if j is None:
                        problems.append(f"face {face} of {s} missing")
                    elif j > i:
                        problems.append(f"face {face} of {s} appears later")
        return problems


@dataclass(frozen=True)
class Interval:
    """A persistence interval [birth, death) in one homology degree."""

    degree: int
    birth: float
    death: float  # math.inf for essential classes

    @property
    def ephemeral(self) -> bool:
        return self.birth == self.death

    def contains(self, t: float) -> bool:
        return self.birth <= t < self.death


class Barcode:
    """Per-degree multisets of persistence intervals.

    Intervals are held as parallel (birth, death) arrays per degree, sorted
    by (birth, death); ephemeral intervals (birth == death) are retained
    but never contribute to Betti curves or distances.
    """

    def __init__(self, births_by_degree: Sequence, deaths_by_degree: Sequence):
        self.births: list[np.ndarray] = []
        self.deaths: list[np.ndarray] = []
        for b, d in zip(births_by_degree, deaths_by_degree):
            b = np.asarray(b, dtype=float)
            d = np.asarray(d, dtype=float)
            order = np.lexsort((d, b))
            self.births.append(b[order])
            self.deaths.append(d[order])

    @property
    def max_degree(self) -> int:
        return len(self.births) - 1

    def intervals(self, degree: int, include_ephemeral: bool = True) -> list[Interval]:
        if degree >= len(self.births):
            return []
        out = [
            Interval(degree, float(b), float(d))
            for b, d in zip(self.births[degree], self.deaths[degree])
        ]
        if not include_ephemeral:
            out = [iv for iv in out if not iv.ephemeral]
        return out

    def finite_pairs(self, degree: int) -> np.ndarray:
        """Non-ephemeral finite (birth, death) rows in one degree."""
        if degree >= len(self.births):
            return np.empty((0, 2))
        b, d = self.births[degree], self.deaths[degree]
        keep = np.isfinite(d) & (d > b)
        return np.column_stack([b[keep], d[keep]])

    def essential_births(self, degree: int) -> np.ndarray:
        if degree >= len(self.births):
            return np.empty(0)
        b, d = self.births[degree], self.deaths[degree]
        return b[np.isinf(d)]

    def betti(self, degree: int, t: float) -> int:
        if degree >= len(self.births):
            return 0
        b, d = self.births[degree], self.deaths[degree]
        return int(np.count_nonzero((b <= t) & (t < d)))

    def betti_many(self, degree: int, ts) -> np.ndarray:
        """Betti curve sampled at an array of levels."""
        ts = np.asarray(ts, dtype=float)
        if degree >= len(self.births):
            return np.zeros(ts.shape, dtype=np.int64)
        b, d = self.births[degree], self.deaths[degree]
        return np.count_nonzero((b[None, :] <= ts[:, None]) & (ts[:, None] < d[None, :]), axis=1)

    def multiset(self, degree: int) -> tuple:
        """Sorted non-ephemeral (birth, death) pairs; for equality checks."""
        pairs = [
            (float(b), float(d))
            for b, d in zip(self.births[degree], self.deaths[degree])
            if d > b
        ] if degree < len(self.births) else []
        return tuple(sorted(pairs))

    def padded(self, max_degree: int) -> "Barcode":
        """Copy with empty degrees appended up to max_degree."""
        b = list(self.births) + [np.empty(0)] * (max_degree + 1 - len(self.births))
        d = list(self.deaths) + [np.empty(0)] * (max_degree + 1 - len(self.deaths))
        return Barcode(b, d)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Barcode):
            return NotImplemented
        top = max(self.max_degree, other.max_degree)
        return all(self.multiset(n) == other.multiset(n) for n in range(top + 1))


def lower_star_filtration(sub: Subcomplex, v: Direction | Sequence[float]) -> Filtration:
    """Filtration of sub by simplex height in direction v (max over vertices).

    The prefix at value t is exactly sublevel(sub, v, t) for every t.
    """
    parent = sub.parent
    heights = parent.heights(v)
    gids = sub.active_gids()
    values = heights[gids]
    dims = parent.dims_array()[gids]

    width = len(parent.simplices)
    pad = np.full((gids.size, width), -1, dtype=np.int64)
    for k in range(width):
        sel = dims == k
        if np.any(sel):
            local = gids[sel] - parent._offsets[k]
            pad[sel, :k + 1] = parent.simplices[k][local]
    keys = tuple(pad[:, i] for i in reversed(range(width))) + (dims, values)
    order = np.lexsort(keys)
    return Filtration(None, values[order], _parent=parent, _gids=gids[order])


def _boundary_position_columns(filt: Filtration) -> tuple[np.ndarray, list[int]]:
    """(dims, columns) for the reduction, columns as bitsets over positions."""
    m = len(filt)
    if filt._gids is not None:
        parent = filt._parent
        gids = filt._gids
        dims = parent.dims_array()[gids]
        pos_of_gid = np.full(parent.n_simplices, -1, dtype=np.int64)
        pos_of_gid[gids] = np.arange(m)
        cols: list[int] = [0] * m
        facet_ids = parent.facet_ids()
        for k in range(1, len(parent.simplices)):
            sel = np.flatnonzero(dims == k)
            if not sel.size:
                continue
            local = gids[sel] - parent._offsets[k]
            fpos = pos_of_gid[facet_ids[k][local]]
            for row, j in enumerate(sel):
                col = 0
                for p in fpos[row]:
                    col |= 1 << int(p)
                cols[j] = col
        return dims, cols

    simplices = filt.simplices
    dims = np.array([len(s) - 1 for s in simplices], dtype=np.int64)
    pos = {s: i for i, s in enumerate(simplices)}
    cols = [0] * m
    for j, s in enumerate(simplices):
        if len(s) == 1:
            continue
        col = 0
        for face in itertools.combinations(s, len(s) - 1):
            col |= 1 << pos[face]
        cols[j] = col
    return dims, cols


def _barcode_generic(filt: Filtration, max_degree: int) -> Barcode:
    """Plain column reduction with clearing, columns as global-position bitsets."""
    m = len(filt)
    values = filt.values
    dims, cols = _boundary_position_columns(filt)
    top = int(dims.max()) if m else 0

    cleared = bytearray(m)
    is_creator = bytearray(m)
    pairs: list[tuple[int, int]] = []
    pivot_col: dict[int, int] = {}

    for q in range(top, 0, -1):
        for j in np.flatnonzero(dims == q):
            j = int(j)
            if cleared[j]:
                is_creator[j] = 1  # paired creator; its interval comes from the pair
                continue
            col = cols[j]
            while col:
                low = col.bit_length() - 1
                piv = pivot_col.get(low)
                if piv is None:
                    pivot_col[low] = col
                    pairs.append((low, j))
                    cleared[low] = 1
                    break
                col ^= piv
            else:
                is_creator[j] = 1
    for j in np.flatnonzero(dims == 0):
        is_creator[int(j)] = 1

    births: list[list[float]] = [[] for _ in range(max_degree + 1)]
    deaths: list[list[float]] = [[] for _ in range(max_degree + 1)]
    paired = bytearray(m)
    for i, j in pairs:
        paired[i] = 1
        q = int(dims[i])
        if q <= max_degree:
            births[q].append(float(values[i]))
            deaths[q].append(float(values[j]))
    for i in range(m):
        if is_creator[i] and not paired[i]:
            q = int(dims[i])
            if q <= max_degree:
                births[q].append(float(values[i]))
                deaths[q].append(INF)
    return Barcode(births, deaths)


def _xor_desc(a: list, b: list) -> list:
    """Symmetric difference of two descending index lists (F2 column sum)."""
    out = []
    i = j = 0
    na, nb = len(a), len(b)
    while i < na and j < nb:
        x, y = a[i], b[j]
        if x == y:
            i += 1
            j += 1
        elif x > y:
            out.append(x)
            i += 1
        else:
            out.append(y)
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return out


_DENSE_THRESHOLD = 192


def _to_bits(col: list, width: int) -> int:
    """Descending index list -> int bitset (bit i = index i)."""
    buf = bytearray((width >> 3) + 1)
    for r in col:
        buf[r >> 3] |= 1 << (r & 7)
    return int.from_bytes(buf, "little")


def _xor_any(col, piv, width: int):
    """F2 sum of columns that may be index lists or int bitsets.

    Columns that grow past a threshold are promoted to bitsets, which caps
    the cost of long reduction chains at machine-word XORs.
    """
    if isinstance(col, int):
        return col ^ (piv if isinstance(piv, int) else _to_bits(piv, width))
    if isinstance(piv, int):
        return _to_bits(col, width) ^ piv
    out = _xor_desc(col, piv)
    if len(out) > _DENSE_THRESHOLD:
        return _to_bits(out, width)
    return out


def _barcode_dual(filt: Filtration, max_degree: int) -> Barcode:
    """Reduction of the anti-transposed boundary matrix (persistent cohomology).

    The persistence pairing of a filtration is unique, so this yields the
    same intervals as _barcode_generic (the tests cross-check both routes);
    column entries are cofacet ranks within one dimension, processed in
    reverse filtration order with clearing. The payoff: with a degree cap,
    top-dimension simplices only ever appear as rows, so e.g. degree-0/1
    barcodes of a large 2-complex never reduce a triangle column.
    """
    parent = filt._parent
    gids = filt._gids
    m = len(filt)
    values = filt.values
    if m == 0:
        return Barcode([[]] * (max_degree + 1), [[]] * (max_degree + 1))
    dims = parent.dims_array()[gids]
    top = int(dims.max())

    pos_by_dim = [np.flatnonzero(dims == q) for q in range(top + 1)]
    rank_of_pos = np.empty(m, dtype=np.int64)
    for q in range(top + 1):
        rank_of_pos[pos_by_dim[q]] = np.arange(pos_by_dim[q].size)
    pos_of_gid = np.full(parent.n_simplices, -1, dtype=np.int64)
    pos_of_gid[gids] = np.arange(m)
    cofaces = parent.coface_ids()

    vals_by_dim = [values[pos_by_dim[q]] for q in range(top + 1)]
    cleared = [bytearray(pos_by_dim[q].size) for q in range(top + 1)]
    births: list[list[float]] = [[] for _ in range(max_degree + 1)]
    deaths: list[list[float]] = [[] for _ in range(max_degree + 1)]

    for q in range(0, min(top, max_degree) + 1):
        n_q = pos_by_dim[q].size
        if not n_q:
            continue
        vals_q = vals_by_dim[q].tolist()
        cleared_q = cleared[q]
        if q == top:
            for r in range(n_q):
                if not cleared_q[r]:
                    births[q].append(vals_q[r])
                    deaths[q].append(INF)
            continue
        n_up = pos_by_dim[q + 1].size
        vals_up = vals_by_dim[q + 1].tolist()
        cleared_up = cleared[q + 1]
        gids_q = gids[pos_by_dim[q]]
        pivots: dict[int, object] = {}
        for r in range(n_q - 1, -1, -1):
            if cleared_q[r]:
                continue
            cf = pos_of_gid[cofaces[int(gids_q[r])]]
            cf = cf[cf >= 0]
            if cf.size:
                # reversed ranks of the cofacets, descending
                col = np.sort(n_up - 1 - rank_of_pos[cf]).tolist()[::-1]
            else:
                col = []
            while True:
                if isinstance(col, int):
                    if not col:
                        col = None
                        break
                    low = col.bit_length() - 1
                elif col:
                    low = col[0]
                else:
                    col = None
                    break
                piv = pivots.get(low)
                if piv is None:
                    pivots[low] = col
                    up_rank = n_up - 1 - low
                    cleared_up[up_rank] = 1
                    births[q].append(vals_q[r])
                    deaths[q].append(vals_up[up_rank])
                    break
                col = _xor_any(col, piv, n_up)
            if col is None:
                births[q].append(vals_q[r])
                deaths[q].append(INF)
    return Barcode(births, deaths)


def compute_barcode(filt: Filtration, max_degree: Optional[int] = None, method: str = "auto") -> Barcode:
    """Persistence pairing of a valid filtration over F2.

    Filtrations built from a complex take the dual (cohomology) route;
    plain simplex-list filtrations go through the generic bitset reduction.
    Both produce the same interval multisets; zero-length intervals are
    recorded and flagged ephemeral by construction (birth == death).
    """
    if max_degree is None:
        if filt._gids is not None:
            top = len(filt._parent.simplices) - 1
        else:
            top = max((len(s) - 1 for s in filt.simplices), default=0)
        max_degree = top
    if method == "auto":
        method = "dual" if filt._gids is not None else "generic"
    if method == "dual":
        if filt._gids is None:
            raise ComplexError("the dual reduction needs a complex-backed filtration")
        return _barcode_dual(filt, max_degree)
    return _barcode_generic(filt, max_degree)


def betti_curve(bc: Barcode, degree: int, t: float) -> int:
    """Number of non-ephemeral degree-n intervals containing t ([birth, death))."""
    return bc.betti(degree, t)


# -- bottleneck distance ----------------------------------------------------


def _sup_cost_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise sup-norm costs between (birth, death) rows of a and b."""
    if not a.size or not b.size:
        return np.empty((a.shape[0], b.shape[0]))
    db = np.abs(a[:, 0, None] - b[None, :, 0])
    dd = np.abs(a[:, 1, None] - b[None, :, 1])
    return np.maximum(db, dd)


def _max_matching(adj: list[list[int]], n_right: int) -> int:
    """Size of a maximum bipartite matching (Kuhn's augmenting paths)."""
    match_r = [-1] * n_right
    match_l = [-1] * len(adj)

    def try_augment(u: int, seen: list[bool]) -> bool:
        for w in adj[u]:
            if not seen[w]:
                seen[w] = True
                if match_r[w] == -1 or try_augment(match_r[w], seen):
                    match_r[w] = u
                    match_l[u] = w
                    return True
        return False

    size = 0
    for u in range(len(adj)):
        if try_augment(u, [False] * n_right):
            size += 1
    return size


def _finite_feasible(cost: np.ndarray, half_a: np.ndarray, half_b: np.ndarray, c: float) -> bool:
    """Can all intervals be matched (to each other or the diagonal) at max cost <= c?

    Intervals with half-length > c must be matched; everything else may
    retire to the diagonal. Short intervals are kept only when they can
    relieve a long one on the other side.
    """
    long_a = np.flatnonzero(half_a > c)
    long_b = np.flatnonzero(half_b > c)
    if not long_a.size and not long_b.size:
        return True
    ok = cost <= c
    help_a = np.flatnonzero((half_a <= c) & ok[:, long_b].any(axis=1)) if long_b.size else np.empty(0, dtype=int)
    help_b = np.flatnonzero((half_b <= c) & ok[long_a].any(axis=0)) if long_a.size else np.empty(0, dtype=int)

    left = list(long_a) + list(help_a)      # real a-intervals
    right = list(long_b) + list(help_b)     # real b-intervals
    n_left, n_right = len(left), len(right)
    # perfect matching on: (real a) x (real b) edges with cost <= c,
    # short-or-absent partners via per-interval diagonal slots,
    # diagonal x diagonal always allowed.
    n_l = n_left + n_right   # left side: a's, then diagonal slots of b's
    n_r = n_right + n_left   # right side: b's, then diagonal slots of a's
    adj: list[list[int]] = [[] for _ in range(n_l)]
    for ia, a_idx in enumerate(left):
        for ib, b_idx in enumerate(right):
            if ok[a_idx, b_idx]:
                adj[ia].append(ib)
        if half_a[a_idx] <= c:
            adj[ia].append(n_right + ia)
    for ib, b_idx in enumerate(right):
        u = n_left + ib
        if half_b[b_idx] <= c:
            adj[u].append(ib)
        adj[u].extend(range(n_right, n_r))
    return _max_matching(adj, n_r) == n_l


def bottleneck(a: Barcode, b: Barcode, degree: int) -> float:
    """Exact bottleneck distance between the degree-n parts of two barcodes.

    Matched intervals pay the sup-norm cost, unmatched ones half their
    length; essential intervals match only essential intervals at
    |birth difference| and a count mismatch is infinite. Exact because the
    optimum lies in the finite set of coordinate differences, searched by
    bisection with a matching feasibility test.
    """
    ess_a = np.sort(a.essential_births(degree))
    ess_b = np.sort(b.essential_births(degree))
    if ess_a.size != ess_b.size:
        return INF
    essential = float(np.abs(ess_a - ess_b).max()) if ess_a.size else 0.0

    fin_a = a.finite_pairs(degree)
    fin_b = b.finite_pairs(degree)
    half_a = (fin_a[:, 1] - fin_a[:, 0]) / 2.0
    half_b = (fin_b[:, 1] - fin_b[:, 0]) / 2.0
    cost = _sup_cost_matrix(fin_a, fin_b)

    candidates = np.unique(np.concatenate([cost.ravel(), half_a, half_b, [0.0]]))
    lo, hi = 0, candidates.size - 1
    if not _finite_feasible(cost, half_a, half_b, float(candidates[hi])):  # pragma: no cover
        raise AssertionError("largest candidate must be feasible")
    while lo < hi:
        mid = (lo + hi) // 2
        if _finite_feasible(cost, half_a, half_b, float(candidates[mid])):
            hi = mid
        else:
            lo = mid + 1
    return max(essential, float(candidates[lo]))
