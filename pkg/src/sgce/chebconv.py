"""Chebyshev spectral graph convolution, forward and backward.

Forward computes Y = sum_k T_k(Lt) X theta_k + bias with the usual basis
recursion T_0 = I, T_1 = Lt, T_k = 2 Lt T_{k-1} - T_{k-2} on the rescaled
Laplacian Lt. The backward pass is exact reverse mode: theta and bias
gradients fall out of the cached basis products, and the input gradient
sum_k T_k(Lt) (dY theta_k^T) is evaluated with the Clenshaw recurrence
(Lt is symmetric, so the adjoint of each T_k(Lt) is itself).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sparse import SparseMatrix


@dataclass
class ChebLayer:
    """Filter coefficients theta (K, Cin, Cout) and bias (Cout,)."""

    k: int
    c_in: int
    c_out: int
    theta: np.ndarray
    bias: np.ndarray

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("Chebyshev order K must be >= 1")
        self.theta = np.asarray(self.theta, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64)
        if self.theta.shape != (self.k, self.c_in, self.c_out):
            raise ValueError(
                f"theta shape {self.theta.shape} != {(self.k, self.c_in, self.c_out)}"
            )
        if self.bias.shape != (self.c_out,):
            raise ValueError(f"bias shape {self.bias.shape} != ({self.c_out},)")

    @staticmethod
    def zeros(k: int, c_in: int, c_out: int) -> "ChebLayer":
        return ChebLayer(k, c_in, c_out, np.zeros((k, c_in, c_out)), np.zeros(c_out))


@dataclass
class ChebCache:
    ltilde: SparseMatrix
    basis: list  # K arrays of shape (N, Cin): T_k(Lt) X
    layer: ChebLayer


def cheb_conv_forward(
    ltilde: SparseMatrix, x: np.ndarray, layer: ChebLayer
) -> tuple[np.ndarray, ChebCache]:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != layer.c_in:
        raise ValueError(f"input shape {x.shape} incompatible with Cin={layer.c_in}")
    if x.shape[0] != ltilde.cols:
        raise ValueError(f"input rows {x.shape[0]} != Laplacian size {ltilde.cols}")
    basis = [x]
    if layer.k > 1:
        basis.append(ltilde.apply(x))
    for _ in range(2, layer.k):
        basis.append(2.0 * ltilde.apply(basis[-1]) - basis[-2])
    y = basis[0] @ layer.theta[0]
    for k in range(1, layer.k):
        y = y + basis[k] @ layer.theta[k]
    y = y + layer.bias
    return y, ChebCache(ltilde=ltilde, basis=basis, layer=layer)


def cheb_conv_backward(
    cache: ChebCache, dy: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gradients (dX, dTheta, dBias) of the forward map at the cached point."""
    layer = cache.layer
    dy = np.asarray(dy, dtype=np.float64)
    n = cache.basis[0].shape[0]
    if dy.shape != (n, layer.c_out):
        raise ValueError(f"dY shape {dy.shape} != {(n, layer.c_out)}")

    dbias = dy.sum(axis=0)
    dtheta = np.empty_like(layer.theta)
    for k in range(layer.k):
        dtheta[k] = cache.basis[k].T @ dy

    # dX = sum_k T_k(Lt) G_k with G_k = dY theta_k^T, via Clenshaw:
    # b_k = G_k + 2 Lt b_{k+1} - b_{k+2}, dX = G_0 + Lt b_1 - b_2
    lt = cache.ltilde
    g = [dy @ layer.theta[k].T for k in range(layer.k)]
    b_next = np.zeros_like(g[0])
    b_cur = np.zeros_like(g[0])
    for k in range(layer.k - 1, 0, -1):
        b_prev = g[k] + 2.0 * lt.apply(b_cur) - b_next
        b_next = b_cur
        b_cur = b_prev
    dx = g[0] + lt.apply(b_cur) - b_next
    return dx, dtheta, dbias
