"""Betti numbers of (sub)complexes over F2 by boundary-matrix ranks.

This is the direct route used to cross-check glued and barcode-derived
answers: beta_k = dim C_k - rank d_k - rank d_{k+1}. Over a field,
homology and cohomology dimensions agree, so these are also the stalk
cohomology dimensions that descent must reproduce.
"""

from __future__ import annotations

import numpy as np

from . import f2
from .complexes import EmbeddedComplex, Subcomplex

__all__ = ["betti_numbers", "euler_characteristic"]


def _boundary_columns(sub: Subcomplex, k: int, row_pos: dict[int, int]) -> list[int]:
    """Columns of d_k for the active k-simplices, rows indexed by row_pos."""
    parent = sub.parent
    gids = sub.active_of_dim(k)
    if not gids.size:
        return []
    facet_ids = parent.facet_ids()[k]
    local = gids - parent._offsets[k]
    cols = []
    for j in local:
        col = 0
        for f in facet_ids[j]:
            col |= 1 << row_pos[int(f)]
        cols.append(col)
    return cols


def betti_numbers(sub: Subcomplex | EmbeddedComplex, max_degree: int | None = None) -> list[int]:
    """[beta_0, ..., beta_m] of the subcomplex over F2.

    m defaults to the parent's top simplex dimension; trailing degrees up
    to max_degree are padded with zeros when requested.
    """
    if isinstance(sub, EmbeddedComplex):
        sub = sub.full_subcomplex()
    parent = sub.parent
    top = len(parent.simplices) - 1
    m = top if max_degree is None else max_degree

    counts = []
    ranks = []
    row_pos_prev: dict[int, int] = {}
    for k in range(0, min(m, top) + 2):
        if k > top:
            counts.append(0)
            ranks.append(0)
            continue
        gids = sub.active_of_dim(k)
        counts.append(int(gids.size))
        if k == 0:
            ranks.append(0)
        else:
            cols = _boundary_columns(sub, k, row_pos_prev)
            ranks.append(f2.rank(cols))
        row_pos_prev = {int(g): i for i, g in enumerate(gids)}

    betti = []
    for k in range(m + 1):
        c = counts[k] if k < len(counts) else 0
        rk = ranks[k] if k < len(ranks) else 0
        rk1 = ranks[k + 1] if k + 1 < len(ranks) else 0
        betti.append(c - rk - rk1)
    return betti


def euler_characteristic(sub: Subcomplex | EmbeddedComplex) -> int:
    if isinstance(sub, EmbeddedComplex):
        sub = sub.full_subcomplex()
    return int(sum((-1) ** k * c for k, c in enumerate(sub.simplex_counts())))
