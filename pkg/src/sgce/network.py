"""Mesh autoencoder: spectral-convolution encoder, mirrored decoder, exact
reverse-mode gradients.

The encoder maps an (N, 3) vertex array to a low-dimensional structural
latent: optional input normalization, then per resolution level a Chebyshev
convolution, activation, and selection-based downsampling, then a dense
layer. The decoder mirrors it (dense layer, then per level barycentric
upsampling and convolution, final layer linear) and emits vertices at the
reference topology. With center_scale normalization the reconstruction is
centered: the per-mesh centroid is deliberately removed before encoding and
is not recoverable from the latent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .chebconv import ChebCache, ChebLayer, cheb_conv_backward, cheb_conv_forward
from .errors import ConfigError, NumericError
from .laplacian import (
    adjacency_from_faces,
    estimate_lambda_max,
    normalized_laplacian,
    scaled_laplacian,
)
from .mesh import Mesh
from .pooling import PoolingPair, build_pooling
from .sparse import SparseMatrix

NORMALIZATIONS = ("none", "center_scale")


@dataclass
class NetworkSpec:
    """Architecture description: per-layer widths, filter orders, pooling.

    Defaults are the full-scale architecture (4 filters of order 6 into an
    8-dim latent); pooling ratios and channel widths are configurable since
    desk-scale meshes need gentler coarsening.
    """

    n_vertices: int
    layer_channels: list = field(default_factory=lambda: [16, 16, 16, 32])
    cheb_k: list = field(default_factory=lambda: [6, 6, 6, 6])
    pooling_ratios: list = field(default_factory=lambda: [0.25, 0.25, 0.25, 0.25])
    latent_dim: int = 8
    activation: list = field(default_factory=lambda: ["relu", "relu", "relu", "relu"])
    lambda_max: float | None = 2.0  # None: estimate by power iteration per level

    def __post_init__(self):
        n_layers = len(self.layer_channels)
        if not (
            len(self.cheb_k) == len(self.pooling_ratios) == len(self.activation) == n_layers
        ):
            raise ConfigError(
                "layer_channels, cheb_k, pooling_ratios, activation must have equal lengths"
            )
        if n_layers < 1:
            raise ConfigError("need at least one convolution layer")
        if self.latent_dim < 1:
            raise ConfigError("latent_dim must be >= 1")
        for a in self.activation:
            if a not in ("relu", "none"):
                raise ConfigError(f"unknown activation {a!r}")
        if self.lambda_max is not None and self.lambda_max <= 0:
            raise ConfigError("lambda_max must be positive or None")

    @property
    def n_layers(self) -> int:
        return len(self.layer_channels)

    def to_dict(self) -> dict:
        return {
            "n_vertices": self.n_vertices,
            "layer_channels": list(self.layer_channels),
            "cheb_k": list(self.cheb_k),
            "pooling_ratios": list(self.pooling_ratios),
            "latent_dim": self.latent_dim,
            "activation": list(self.activation),
            "lambda_max": self.lambda_max,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NetworkSpec":
        known = {
            "n_vertices",
            "layer_channels",
            "cheb_k",
            "pooling_ratios",
            "latent_dim",
            "activation",
            "lambda_max",
        }
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown network spec keys: {sorted(unknown)}")
        if "n_vertices" not in d:
            raise ConfigError("network spec needs n_vertices")
        return cls(**d)


@dataclass
class Network:
    spec: NetworkSpec
    topology: Mesh
    enc_layers: list
    enc_fc_w: np.ndarray  # (flat_dim, latent_dim)
    enc_fc_b: np.ndarray  # (latent_dim,)
    dec_fc_w: np.ndarray  # (latent_dim, flat_dim)
    dec_fc_b: np.ndarray  # (flat_dim,)
    dec_layers: list  # dec_layers[l] runs at resolution level l
    pooling: list  # PoolingPair per level
    laplacians: list  # scaled Laplacian per level
    level_sizes: list  # vertex counts [N_0, ..., N_L]
    normalization: str = "center_scale"
    input_scale: float = 1.0

    @property
    def flat_dim(self) -> int:
        return self.level_sizes[-1] * self.spec.layer_channels[-1]

    def parameters(self) -> dict:
        out = {}
        for i, layer in enumerate(self.enc_layers):
            out[f"enc.{i}.theta"] = layer.theta
            out[f"enc.{i}.bias"] = layer.bias
        out["enc_fc.w"] = self.enc_fc_w
        out["enc_fc.b"] = self.enc_fc_b
        out["dec_fc.w"] = self.dec_fc_w
        out["dec_fc.b"] = self.dec_fc_b
        for i, layer in enumerate(self.dec_layers):
            out[f"dec.{i}.theta"] = layer.theta
            out[f"dec.{i}.bias"] = layer.bias
        return out

    def load_parameters(self, params: dict) -> None:
        """Copy values into the live arrays (shapes must match)."""
        own = self.parameters()
        if set(params) != set(own):
            raise ConfigError(
                f"parameter name mismatch: {sorted(set(params) ^ set(own))}"
            )
        for name, arr in own.items():
            new = np.asarray(params[name], dtype=np.float64)
            if new.shape != arr.shape:
                raise ConfigError(f"parameter {name} shape {new.shape} != {arr.shape}")
            arr[...] = new


def _rms_radius(vertices: np.ndarray) -> float:
    centered = vertices - vertices.mean(axis=0)
    return float(np.sqrt(np.mean(np.sum(centered * centered, axis=1))))


def init_network(
    spec: NetworkSpec,
    topology: Mesh,
    seed: int,
    input_normalization: str = "center_scale",
) -> Network:
    """Build pooling/Laplacian structure from the topology and seed parameters.

    Filter coefficients are uniform in +-sqrt(6 / (K * Cin * Cout)), dense
    weights uniform in +-sqrt(6 / (fan_in * fan_out)), biases zero. The same
    seed always produces a bit-identical network.
    """
    if input_normalization not in NORMALIZATIONS:
        raise ConfigError(f"unknown input normalization {input_normalization!r}")
    if topology.n_vertices != spec.n_vertices:
        raise ConfigError(
            f"spec.n_vertices={spec.n_vertices} but topology has {topology.n_vertices}"
        )

    meshes = [topology]
    pooling = []
    laplacians = []
    for l in range(spec.n_layers):
        mesh_l = meshes[-1]
        lap = normalized_laplacian(adjacency_from_faces(mesh_l))
        lam = spec.lambda_max
        if lam is None:
            lam = estimate_lambda_max(lap)
        laplacians.append(scaled_laplacian(lap, lam))
        pair = build_pooling(mesh_l, spec.pooling_ratios[l])
        pooling.append(pair)
        meshes.append(pair.coarse_mesh)
    level_sizes = [m.n_vertices for m in meshes]

    rng = np.random.default_rng(seed)

    def cheb_init(k, c_in, c_out):
        bound = math.sqrt(6.0 / (k * c_in * c_out))
        theta = rng.uniform(-bound, bound, size=(k, c_in, c_out))
        return ChebLayer(k, c_in, c_out, theta, np.zeros(c_out))

    enc_layers = []
    widths_in = [3] + list(spec.layer_channels[:-1])
    for l in range(spec.n_layers):
        enc_layers.append(cheb_init(spec.cheb_k[l], widths_in[l], spec.layer_channels[l]))

    flat_dim = level_sizes[-1] * spec.layer_channels[-1]

    def dense_init(n_in, n_out):
        bound = math.sqrt(6.0 / (n_in * n_out))
        return rng.uniform(-bound, bound, size=(n_in, n_out))

    enc_fc_w = dense_init(flat_dim, spec.latent_dim)
    dec_fc_w = dense_init(spec.latent_dim, flat_dim)

    # decoder layer at level l maps C_l back toward C_{l-1} (3 at level 0)
    dec_layers = []
    widths_out = [3] + list(spec.layer_channels[:-1])
    for l in range(spec.n_layers):
        dec_layers.append(
            cheb_init(spec.cheb_k[l], spec.layer_channels[l], widths_out[l])
        )

    scale = _rms_radius(topology.vertices) if input_normalization == "center_scale" else 1.0
    if scale <= 0:
        raise NumericError("topology has zero RMS radius; cannot normalize")

    return Network(
        spec=spec,
        topology=topology,
        enc_layers=enc_layers,
        enc_fc_w=enc_fc_w,
        enc_fc_b=np.zeros(spec.latent_dim),
        dec_fc_w=dec_fc_w,
        dec_fc_b=np.zeros(flat_dim),
        dec_layers=dec_layers,
        pooling=pooling,
        laplacians=laplacians,
        level_sizes=level_sizes,
        normalization=input_normalization,
        input_scale=scale,
    )


@dataclass
class EncodeCache:
    x0: np.ndarray  # normalized input
    cheb_caches: list
    relu_masks: list  # None where no activation
    flat: np.ndarray
    latent: np.ndarray


@dataclass
class DecodeCache:
    z: np.ndarray
    flat: np.ndarray
    cheb_caches: list  # indexed by level l
    relu_masks: list


@dataclass
class ForwardCache:
    enc: EncodeCache
    dec: DecodeCache
    reconstruction: np.ndarray


def _check_vertices(net: Network, vertices: np.ndarray) -> np.ndarray:
    v = np.asarray(vertices, dtype=np.float64)
    if v.shape != (net.spec.n_vertices, 3):
        raise ConfigError(
            f"vertex array shape {v.shape} != ({net.spec.n_vertices}, 3)"
        )
    if not np.all(np.isfinite(v)):
        raise NumericError("vertex array contains non-finite values")
    return v


def normalize_input(net: Network, vertices: np.ndarray) -> np.ndarray:
    if net.normalization == "center_scale":
        return (vertices - vertices.mean(axis=0)) / net.input_scale
    return vertices


def target_for_training(net: Network, vertices: np.ndarray) -> np.ndarray:
    """Reconstruction target matching decode's output frame (centered in mm
    when center_scale normalization is on)."""
    if net.normalization == "center_scale":
        return vertices - vertices.mean(axis=0)
    return vertices


def encode_with_cache(net: Network, vertices: np.ndarray) -> tuple[np.ndarray, EncodeCache]:
    v = _check_vertices(net, vertices)
    x = normalize_input(net, v)
    x0 = x
    caches = []
    masks = []
    for l in range(net.spec.n_layers):
        y, cache = cheb_conv_forward(net.laplacians[l], x, net.enc_layers[l])
        caches.append(cache)
        if net.spec.activation[l] == "relu":
            mask = y > 0
            masks.append(mask)
            y = np.where(mask, y, 0.0)
        else:
            masks.append(None)
        x = net.pooling[l].down.apply(y)
    flat = x.reshape(-1)
    latent = flat @ net.enc_fc_w + net.enc_fc_b
    return latent, EncodeCache(x0=x0, cheb_caches=caches, relu_masks=masks, flat=flat, latent=latent)


def encode(net: Network, vertices: np.ndarray) -> np.ndarray:
    """Structural latent of a vertex array on the reference topology."""
    latent, _ = encode_with_cache(net, vertices)
    return latent


def encode_backward(net: Network, cache: EncodeCache, d_latent: np.ndarray) -> tuple[dict, np.ndarray]:
    """Gradients of the encoder at the cached point.

    Returns (param_grads, input_grad); param_grads covers encoder parameters
    only. Callers treating the encoder as frozen use just input_grad.
    """
    d_latent = np.asarray(d_latent, dtype=np.float64)
    if d_latent.shape != (net.spec.latent_dim,):
        raise ConfigError(f"d_latent shape {d_latent.shape} != ({net.spec.latent_dim},)")
    grads = {
        "enc_fc.w": np.outer(cache.flat, d_latent),
        "enc_fc.b": d_latent.copy(),
    }
    g = (net.enc_fc_w @ d_latent).reshape(net.level_sizes[-1], net.spec.layer_channels[-1])
    for l in range(net.spec.n_layers - 1, -1, -1):
        g = net.pooling[l].down.transpose().apply(g)
        if cache.relu_masks[l] is not None:
            g = np.where(cache.relu_masks[l], g, 0.0)
        g, d_theta, d_bias = cheb_conv_backward(cache.cheb_caches[l], g)
        grads[f"enc.{l}.theta"] = d_theta
        grads[f"enc.{l}.bias"] = d_bias
    if net.normalization == "center_scale":
        input_grad = (g - g.mean(axis=0)) / net.input_scale
    else:
        input_grad = g
    return grads, input_grad


def decode_with_cache(net: Network, z: np.ndarray) -> tuple[np.ndarray, DecodeCache]:
    z = np.asarray(z, dtype=np.float64)
    if z.shape != (net.spec.latent_dim,):
        raise ConfigError(f"latent shape {z.shape} != ({net.spec.latent_dim},)")
    if not np.all(np.isfinite(z)):
        raise NumericError("latent contains non-finite values")
    flat = z @ net.dec_fc_w + net.dec_fc_b
    h = flat.reshape(net.level_sizes[-1], net.spec.layer_channels[-1])
    n_layers = net.spec.n_layers
    caches = [None] * n_layers
    masks = [None] * n_layers
    for l in range(n_layers - 1, -1, -1):
        h = net.pooling[l].up.apply(h)
        y, cache = cheb_conv_forward(net.laplacians[l], h, net.dec_layers[l])
        caches[l] = cache
        if l > 0 and net.spec.activation[l] == "relu":
            mask = y > 0
            masks[l] = mask
            h = np.where(mask, y, 0.0)
        else:
            h = y  # final layer is linear
    recon = h * net.input_scale if net.normalization == "center_scale" else h
    return recon, DecodeCache(z=z, flat=flat, cheb_caches=caches, relu_masks=masks)


def decode(net: Network, z: np.ndarray) -> np.ndarray:
    """Vertex array on the reference topology from a latent.

    With center_scale normalization the output lives in the centered frame:
    the encoder discards the input centroid, so reconstructions are centered
    at the origin.
    """
    recon, _ = decode_with_cache(net, z)
    return recon


def decode_backward(net: Network, cache: DecodeCache, d_recon: np.ndarray) -> tuple[dict, np.ndarray]:
    """Gradients of the decoder at the cached point: (param_grads, d_latent)."""
    d_recon = np.asarray(d_recon, dtype=np.float64)
    n0 = net.level_sizes[0]
    if d_recon.shape != (n0, 3):
        raise ConfigError(f"d_recon shape {d_recon.shape} != ({n0}, 3)")
    g = d_recon * net.input_scale if net.normalization == "center_scale" else d_recon
    grads = {}
    for l in range(net.spec.n_layers):
        if cache.relu_masks[l] is not None:
            g = np.where(cache.relu_masks[l], g, 0.0)
        g, d_theta, d_bias = cheb_conv_backward(cache.cheb_caches[l], g)
        grads[f"dec.{l}.theta"] = d_theta
        grads[f"dec.{l}.bias"] = d_bias
        g = net.pooling[l].up.transpose().apply(g)
    d_flat = g.reshape(-1)
    grads["dec_fc.w"] = np.outer(cache.z, d_flat)
    grads["dec_fc.b"] = d_flat.copy()
    d_z = net.dec_fc_w @ d_flat
    return grads, d_z


def autoencoder_forward(net: Network, vertices: np.ndarray) -> tuple[np.ndarray, np.ndarray, ForwardCache]:
    """(reconstruction, latent, cache) for a full encode/decode pass."""
    latent, enc_cache = encode_with_cache(net, vertices)
    recon, dec_cache = decode_with_cache(net, latent)
    return recon, latent, ForwardCache(enc=enc_cache, dec=dec_cache, reconstruction=recon)


def autoencoder_backward(
    net: Network, cache: ForwardCache, grad_on_reconstruction: np.ndarray
) -> tuple[dict, np.ndarray]:
    """Exact gradients of the autoencoder for every parameter and the input."""
    dec_grads, d_z = decode_backward(net, cache.dec, grad_on_reconstruction)
    enc_grads, input_grad = encode_backward(net, cache.enc, d_z)
    grads = {**enc_grads, **dec_grads}
    return grads, input_grad
