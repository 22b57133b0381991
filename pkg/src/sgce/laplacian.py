"""Graph construction and Laplacians for fixed-topology meshes."""

from __future__ import annotations

import warnings

import numpy as np

from .errors import NumericError
from .mesh import Mesh
from .sparse import SparseMatrix


class ConvergenceWarning(UserWarning):
    pass


def adjacency_from_faces(mesh: Mesh) -> SparseMatrix:
    """Symmetric binary adjacency: (i, j) = 1 iff i != j share a face edge."""
    f = mesh.faces
    if f.shape[0] == 0:
        raise ValueError("mesh has no faces")
    src = np.concatenate([f[:, 0], f[:, 1], f[:, 2], f[:, 1], f[:, 2], f[:, 0]])
    dst = np.concatenate([f[:, 1], f[:, 2], f[:, 0], f[:, 0], f[:, 1], f[:, 2]])
    keep = src != dst  # degenerate face edges contribute no self-loop
    src, dst = src[keep], dst[keep]
    # from_entries sums duplicates; clamp multi-face edges back to 1
    raw = SparseMatrix.from_entries(
        mesh.n_vertices, mesh.n_vertices, src, dst, np.ones(src.size)
    )
    return SparseMatrix(
        raw.rows, raw.cols, raw.row_idx, raw.col_idx, np.ones(raw.nnz)
    )


def degrees(adj: SparseMatrix) -> np.ndarray:
    d = np.zeros(adj.rows)
    np.add.at(d, adj.row_idx, adj.vals)
    return d


def normalized_laplacian(adj: SparseMatrix) -> SparseMatrix:
    """Symmetric normalized Laplacian I - D^{-1/2} A D^{-1/2}.

    Requires a symmetric zero-diagonal adjacency with no isolated vertices.
    Output has unit diagonal and spectrum in [0, 2].
    """
    if adj.rows != adj.cols:
        raise ValueError("adjacency must be square")
    if np.any(adj.row_idx == adj.col_idx):
        raise ValueError("adjacency must have zero diagonal")
    if not adj.equal(adj.transpose()):
        raise ValueError("adjacency must be symmetric")
    d = degrees(adj)
    isolated = np.nonzero(d == 0)[0]
    if isolated.size:
        raise NumericError(f"isolated vertices (zero degree): {isolated.tolist()}")
    inv_sqrt = 1.0 / np.sqrt(d)
    off_vals = -adj.vals * inv_sqrt[adj.row_idx] * inv_sqrt[adj.col_idx]
    diag = np.arange(adj.rows, dtype=np.int64)
    return SparseMatrix.from_entries(
        adj.rows,
        adj.cols,
        np.concatenate([adj.row_idx, diag]),
        np.concatenate([adj.col_idx, diag]),
        np.concatenate([off_vals, np.ones(adj.rows)]),
    )


def scaled_laplacian(lap: SparseMatrix, lambda_max: float) -> SparseMatrix:
    """Rescale so the spectrum lands in [-1, 1]: (2 / lambda_max) L - I."""
    if lambda_max <= 0:
        raise ValueError(f"lambda_max must be positive, got {lambda_max}")
    return lap.scale(2.0 / lambda_max).add_scaled_identity(-1.0)


def estimate_lambda_max(
    lap: SparseMatrix, tol: float = 1e-8, max_iter: int = 1000
) -> float:
    """Power-iteration estimate of the largest eigenvalue of a symmetric matrix.

    Starts from the normalized all-ones vector. For Laplacians of regular
    graphs that vector sits in the kernel, so on breakdown the iteration
    restarts once from a deterministic ramp vector. Emits ConvergenceWarning
    and returns the best estimate if max_iter is exhausted.
    """
    n = lap.rows
    if n != lap.cols:
        raise ValueError("matrix must be square")
    v = np.ones(n) / np.sqrt(n)
    restarted = False
    estimate = 0.0
    for _ in range(max_iter):
        w = lap.apply(v)
        norm_w = float(np.linalg.norm(w))
        if norm_w <= 1e-300:
            if restarted:
                # matrix annihilates both start vectors: treat as zero matrix
                return 0.0
            v = 1.0 + np.arange(n) / max(n, 1)
            v /= np.linalg.norm(v)
            restarted = True
            continue
        new_estimate = float(v @ w)  # Rayleigh quotient, v normalized
        v = w / norm_w
        if abs(new_estimate - estimate) <= tol * max(abs(new_estimate), 1e-30):
            return new_estimate
        estimate = new_estimate
    warnings.warn(
        f"power iteration did not converge in {max_iter} iterations",
        ConvergenceWarning,
        stacklevel=2,
    )
    return estimate
