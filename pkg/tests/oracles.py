"""Independent brute-force oracles the implementation is checked against.

Everything here deliberately avoids the package's own linear algebra:
dense numpy arrays mod 2, exhaustive enumeration, direct definitions.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


# -- mod-2 homology ------------------------------------------------------------


def _rref_mod2(mat: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Row-reduce a 0/1 matrix mod 2; returns (rref, pivot column list)."""
    a = mat.copy() % 2
    pivots = []
    row = 0
    for col in range(a.shape[1]):
        sel = None
        for r in range(row, a.shape[0]):
            if a[r, col]:
                sel = r
                break
        if sel is None:
            continue
        a[[row, sel]] = a[[sel, row]]
        for r in range(a.shape[0]):
            if r != row and a[r, col]:
                a[r] ^= a[row]
        pivots.append(col)
        row += 1
        if row == a.shape[0]:
            break
    return a, pivots


def rank_mod2(mat: np.ndarray) -> int:
    if mat.size == 0:
        return 0
    return len(_rref_mod2(mat)[1])


def kernel_basis_mod2(mat: np.ndarray) -> np.ndarray:
    """Columns spanning the kernel of mat (over F2)."""
    n_cols = mat.shape[1]
    if n_cols == 0:
        return np.zeros((0, 0), dtype=np.int64)
    if mat.size == 0:
        return np.eye(n_cols, dtype=np.int64)
    rref, pivots = _rref_mod2(mat)
    free = [c for c in range(n_cols) if c not in pivots]
    basis = np.zeros((n_cols, len(free)), dtype=np.int64)
    for i, fc in enumerate(free):
        basis[fc, i] = 1
        for row, pc in enumerate(pivots):
            if rref[row, fc]:
                basis[pc, i] = 1
    return basis


def boundary_matrix(simplices_k: list, simplices_km1: list) -> np.ndarray:
    """Dense mod-2 boundary matrix from explicit simplex tuple lists."""
    index = {s: i for i, s in enumerate(simplices_km1)}
    mat = np.zeros((len(simplices_km1), len(simplices_k)), dtype=np.int64)
    for j, s in enumerate(simplices_k):
        for face in itertools.combinations(s, len(s) - 1):
            mat[index[face], j] ^= 1
    return mat


def betti_mod2(simplices: list[tuple]) -> list[int]:
    """Betti numbers of a simplicial complex given as a flat list of tuples."""
    if not simplices:
        return [0]
    by_dim: dict[int, list] = {}
    for s in simplices:
        by_dim.setdefault(len(s) - 1, []).append(tuple(sorted(s)))
    top = max(by_dim)
    lists = [sorted(set(by_dim.get(k, []))) for k in range(top + 1)]
    ranks = [0] * (top + 2)
    for k in range(1, top + 1):
        if lists[k]:
            ranks[k] = rank_mod2(boundary_matrix(lists[k], lists[k - 1]))
    return [len(lists[k]) - ranks[k] - ranks[k + 1] for k in range(top + 1)]


def sub_simplices(sub) -> list[tuple]:
    """Flat simplex list of a Subcomplex (via public accessors only)."""
    parent = sub.parent
    return [parent.simplex(int(g)) for g in sub.active_gids()]


def persistent_rank(simplices_s: list, simplices_t: list, n: int) -> int:
    """rank of H_n(K_s) -> H_n(K_t) for K_s a subcomplex of K_t, over F2.

    dim Z_n(K_s) - dim(Z_n(K_s) cap B_n(K_t)), computed in the chain space
    of K_t-n-simplices.
    """
    def of_dim(lst, k):
        return sorted({tuple(sorted(s)) for s in lst if len(s) == k + 1})

    t_n = of_dim(simplices_t, n)
    s_n = of_dim(simplices_s, n)
    s_nm1 = of_dim(simplices_s, n - 1) if n >= 1 else []
    t_np1 = of_dim(simplices_t, n + 1)
    index_t = {s: i for i, s in enumerate(t_n)}

    if n >= 1:
        d_s = boundary_matrix(s_n, s_nm1) if s_n else np.zeros((0, 0), dtype=np.int64)
        z_basis_local = kernel_basis_mod2(d_s)
    else:
        z_basis_local = np.eye(len(s_n), dtype=np.int64)
    z_basis = np.zeros((len(t_n), z_basis_local.shape[1]), dtype=np.int64)
    for local, s in enumerate(s_n):
        z_basis[index_t[s]] = z_basis_local[local]

    b_gens = boundary_matrix(t_np1, t_n) if t_np1 else np.zeros((len(t_n), 0), dtype=np.int64)
    dim_z = rank_mod2(z_basis)
    dim_b = rank_mod2(b_gens)
    dim_sum = rank_mod2(np.hstack([z_basis, b_gens]))
    return dim_z - (dim_z + dim_b - dim_sum)


# -- bottleneck ------------------------------------------------------------------


def exhaustive_bottleneck(finite_a, finite_b, essential_a=(), essential_b=()) -> float:
    """Minimum over all partial matchings of the max matching cost.

    Finite intervals pay sup-norm against a partner or half their length
    on the diagonal; essential intervals must match essential intervals.
    """
    essential_a = sorted(essential_a)
    essential_b = sorted(essential_b)
    if len(essential_a) != len(essential_b):
        return math.inf
    ess = 0.0
    if essential_a:
        best = math.inf
        for perm in itertools.permutations(range(len(essential_b))):
            cost = max(abs(essential_a[i] - essential_b[p]) for i, p in enumerate(perm))
            best = min(best, cost)
        ess = best

    finite_a = [tuple(map(float, iv)) for iv in finite_a]
    finite_b = [tuple(map(float, iv)) for iv in finite_b]

    def rec(rem_a: tuple, used_b: frozenset) -> float:
        if not rem_a:
            return max(
                ((finite_b[i][1] - finite_b[i][0]) / 2.0 for i in range(len(finite_b)) if i not in used_b),
                default=0.0,
            )
        (b0, d0), rest = rem_a[0], rem_a[1:]
        best = max((d0 - b0) / 2.0, rec(rest, used_b))
        for i, (b1, d1) in enumerate(finite_b):
            if i in used_b:
                continue
            cost = max(abs(b0 - b1), abs(d0 - d1))
            if cost < best:
                best = min(best, max(cost, rec(rest, used_b | {i})))
        return best

    return max(ess, rec(tuple(finite_a), frozenset()))


# -- smallest enclosing ball -------------------------------------------------------


def brute_force_meb(points: np.ndarray) -> float:
    """Minimum enclosing ball radius by enumerating candidate support sets."""
    pts = np.asarray(points, dtype=float)
    n, d = pts.shape
    best = math.inf
    for size in range(1, min(n, d + 1) + 1):
        for subset in itertools.combinations(range(n), size):
            sel = pts[list(subset)]
            if size == 1:
                center, r = sel[0], 0.0
            else:
                p0 = sel[0]
                u = sel[1:] - p0
                sol, residual, rank, _ = np.linalg.lstsq(u @ u.T, 0.5 * (u * u).sum(axis=1), rcond=None)
                center = p0 + sol @ u
                r = float(np.linalg.norm(sel[0] - center))
                if np.any(np.abs(np.linalg.norm(sel - center, axis=1) - r) > 1e-7):
                    continue
            if np.all(np.linalg.norm(pts - center, axis=1) <= r + 1e-9):
                best = min(best, r)
    return best
