"""Exact rank of integer matrices by fraction-free elimination.

Used for affine-rank computations on polytope vertex sets.  Rows are combined
as ``pivot_value * row - row[pivot_col] * pivot_row`` and divided by their
gcd, which keeps everything in integers; no tolerance is involved anywhere.

Arithmetic runs on int64 numpy arrays while a conservative magnitude guard
holds, and falls back to Python big integers the moment an overflow is even
possible, so results are exact unconditionally.
"""

from __future__ import annotations

import math

import numpy as np

_INT64_SAFE = 2**62


class ExactRankAccumulator:
    """Incremental row-echelon rank over the integers.

    Pivot rows are kept in insertion order; every freshly added pivot row has
    been reduced against all earlier ones, so reducing a new row against the
    pivots in insertion order can never reintroduce an eliminated column.
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.pivots = []  # (pivot_col, row, pivot_value); row is ndarray or list
        self.big = False  # True once arithmetic switched to Python ints

    @property
    def rank(self) -> int:
        return len(self.pivots)

    # -- numpy fast path ----------------------------------------------------

    def _to_big(self):
        if not self.big:
            self.pivots = [
                (c, [int(v) for v in row], int(p)) for c, row, p in self.pivots
            ]
            self.big = True

    def _add_row_np(self, row: np.ndarray) -> bool:
        for c, prow, pval in self.pivots:
            rc = int(row[c])
            if rc == 0:
                continue
            hi = abs(pval) * int(np.abs(row).max()) + abs(rc) * int(np.abs(prow).max())
            if hi >= _INT64_SAFE:
                self._to_big()
                return self._add_row_big([int(v) for v in row])
            row = pval * row - rc * prow
            nz = row[row != 0]
            if nz.size == 0:
                return False
            g = int(np.gcd.reduce(np.abs(nz)))
            if g > 1:
                row //= g
        nzc = np.nonzero(row)[0]
        if nzc.size == 0:
            return False
        c = int(nzc[0])
        self.pivots.append((c, row, int(row[c])))
        return True

    # -- big-int path ---------------------------------------------------------

    def _add_row_big(self, row: list) -> bool:
        for k in range(len(self.pivots)):
            c, prow, pval = self.pivots[k]
            rc = row[c]
            if rc == 0:
                continue
            row = [pval * rv - rc * pv for rv, pv in zip(row, prow)]
            g = 0
            for v in row:
                if v:
                    g = math.gcd(g, abs(v))
                    if g == 1:
                        break
            if g == 0:
                return False
            if g > 1:
                row = [v // g for v in row]
        for c, v in enumerate(row):
            if v:
                self.pivots.append((c, row, v))
                return True
        return False

    # -- public ----------------------------------------------------------------

    def add_row(self, row) -> bool:
        """Reduce one row against the echelon; True if the rank grew."""
        if self.big:
            return self._add_row_big([int(v) for v in row])
        arr = np.asarray(row, dtype=np.int64)
        if arr.shape != (self.ncols,):
            raise ValueError("row length mismatch")
        return self._add_row_np(arr.copy())

    def add_rows(self, matrix) -> int:
        added = 0
        for row in matrix:
            if self.add_row(row):
                added += 1
        return added


def integer_rank(matrix) -> int:
    """Exact rank of an integer matrix (any iterable of rows)."""
    rows = [np.asarray(r, dtype=np.int64) for r in matrix]
    if not rows:
        return 0
    acc = ExactRankAccumulator(len(rows[0]))
    acc.add_rows(rows)
    return acc.rank


def affine_rank(matrix) -> int:
    """Exact affine rank (dimension of the affine hull) of integer points."""
    rows = [np.asarray(r, dtype=np.int64) for r in matrix]
    if len(rows) <= 1:
        return 0
    base = rows[0]
    acc = ExactRankAccumulator(len(base))
    for r in rows[1:]:
        acc.add_row(r - base)
    return acc.rank
