"""Linear algebra over the two-element field, with columns stored as int bitsets.

A column is a Python int whose bit i is the coefficient of basis row i.
Python ints give branch-free XOR of whole columns and an O(1) "highest
set bit" via int.bit_length(), which is all Gaussian elimination needs.
"""

from __future__ import annotations

from typing import Iterable, List


def rank(columns: Iterable[int]) -> int:
    """Rank of the matrix whose columns are the given bitsets."""
    pivots: dict[int, int] = {}
    r = 0
    for col in columns:
        while col:
            low = col.bit_length() - 1
            other = pivots.get(low)
            if other is None:
                pivots[low] = col
                r += 1
                break
            col ^= other
    return r


def rank_and_nullity(columns: List[int]) -> tuple[int, int]:
    """(rank, nullity) of the column list."""
    r = rank(columns)
    return r, len(columns) - r


def columns_from_rows(rows: List[int], n_cols: int) -> List[int]:
    """Transpose a row-bitset matrix into column bitsets."""
    cols = [0] * n_cols
    for i, row in enumerate(rows):
        bit = 1 << i
        while row:
            j = row.bit_length() - 1
            cols[j] |= bit
            row ^= 1 << j
    return cols


def matmul_is_zero(a_cols: List[int], b_cols: List[int]) -> bool:
    """True iff A @ B = 0 over F2, where B's columns index into A's columns.

    b_cols[j] holds the set of columns of A entering column j of the product.
    """
    for b in b_cols:
        acc = 0
        while b:
            k = b.bit_length() - 1
            acc ^= a_cols[k]
            b ^= 1 << k
        if acc:
            return False
    return True
