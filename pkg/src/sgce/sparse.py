"""Minimal sparse matrix with canonical COO storage.

Entries are kept sorted row-major with duplicates summed and exact zeros
dropped, so equal matrices have identical storage and all reductions run in
a fixed order (ascending column within each row). That makes every product
bit-stable across runs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SparseMatrix:
    rows: int
    cols: int
    row_idx: np.ndarray  # int64, canonical order
    col_idx: np.ndarray  # int64
    vals: np.ndarray  # float64

    @staticmethod
    def from_entries(rows, cols, row_idx, col_idx, vals) -> "SparseMatrix":
        """Build from COO triplets: sorts row-major, sums duplicates, drops zeros."""
        r = np.asarray(row_idx, dtype=np.int64).ravel()
        c = np.asarray(col_idx, dtype=np.int64).ravel()
        v = np.asarray(vals, dtype=np.float64).ravel()
        if not (r.shape == c.shape == v.shape):
            raise ValueError("row_idx, col_idx, vals must have equal lengths")
        if r.size:
            if r.min() < 0 or r.max() >= rows:
                raise ValueError("row index out of range")
            if c.min() < 0 or c.max() >= cols:
                raise ValueError("column index out of range")
            order = np.lexsort((c, r))
            r, c, v = r[order], c[order], v[order]
            # sum duplicates: group boundaries where (row, col) changes
            new_group = np.empty(r.size, dtype=bool)
            new_group[0] = True
            new_group[1:] = (r[1:] != r[:-1]) | (c[1:] != c[:-1])
            group_ids = np.cumsum(new_group) - 1
            n_groups = int(group_ids[-1]) + 1
            summed = np.zeros(n_groups, dtype=np.float64)
            np.add.at(summed, group_ids, v)
            starts = np.nonzero(new_group)[0]
            r, c, v = r[starts], c[starts], summed
            keep = v != 0.0
            r, c, v = r[keep], c[keep], v[keep]
        return SparseMatrix(rows, cols, r, c, v)

    @staticmethod
    def identity(n: int) -> "SparseMatrix":
        idx = np.arange(n, dtype=np.int64)
        return SparseMatrix(n, n, idx, idx.copy(), np.ones(n))

    @staticmethod
    def from_dense(a: np.ndarray) -> "SparseMatrix":
        a = np.asarray(a, dtype=np.float64)
        r, c = np.nonzero(a)
        return SparseMatrix.from_entries(a.shape[0], a.shape[1], r, c, a[r, c])

    @property
    def nnz(self) -> int:
        return self.vals.size

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols))
        out[self.row_idx, self.col_idx] = self.vals
        return out

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix.from_entries(
            self.cols, self.rows, self.col_idx, self.row_idx, self.vals
        )

    def diagonal(self) -> np.ndarray:
        d = np.zeros(min(self.rows, self.cols))
        on_diag = self.row_idx == self.col_idx
        d[self.row_idx[on_diag]] = self.vals[on_diag]
        return d

    def scale(self, factor: float) -> "SparseMatrix":
        return SparseMatrix.from_entries(
            self.rows, self.cols, self.row_idx, self.col_idx, self.vals * factor
        )

    def add_scaled_identity(self, factor: float) -> "SparseMatrix":
        """self + factor * I (square matrices only)."""
        if self.rows != self.cols:
            raise ValueError("add_scaled_identity needs a square matrix")
        idx = np.arange(self.rows, dtype=np.int64)
        return SparseMatrix.from_entries(
            self.rows,
            self.cols,
            np.concatenate([self.row_idx, idx]),
            np.concatenate([self.col_idx, idx]),
            np.concatenate([self.vals, np.full(self.rows, float(factor))]),
        )

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Exact product self @ x with fixed summation order.

        np.add.at accumulates the canonical entries sequentially, i.e. in
        ascending column order within each row.
        """
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 1:
            return self.apply(x[:, None])[:, 0]
        if x.shape[0] != self.cols:
            raise ValueError(f"shape mismatch: {self.shape} @ {x.shape}")
        out = np.zeros((self.rows, x.shape[1]))
        if self.nnz:
            np.add.at(out, self.row_idx, self.vals[:, None] * x[self.col_idx])
        return out

    def equal(self, other: "SparseMatrix") -> bool:
        return (
            self.shape == other.shape
            and np.array_equal(self.row_idx, other.row_idx)
            and np.array_equal(self.col_idx, other.col_idx)
            and np.array_equal(self.vals, other.vals)
        )


def sparse_apply(s: SparseMatrix, x: np.ndarray) -> np.ndarray:
    """Module-level alias for SparseMatrix.apply."""
    return s.apply(x)
