"""Seeded synthetic mesh datasets for desk-scale training and tests.

Base topologies are an icosphere (N = 10*4^level + 2, F = 20*4^level) or a
triangulated square grid. Samples are the base vertices plus smooth
low-frequency displacement fields with peak magnitude <= amplitude,
deterministic in the seed.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ConfigError
from .mesh import Mesh, MeshDataset

ICOSPHERE_RADIUS_MM = 100.0
GRID_EXTENT_MM = 100.0


def icosphere(level: int, radius: float = ICOSPHERE_RADIUS_MM) -> Mesh:
    """Icosahedron subdivided ``level`` times, projected onto a sphere."""
    if level < 0:
        raise ConfigError("icosphere level must be >= 0")
    t = (1.0 + math.sqrt(5.0)) / 2.0
    verts = [
        (-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0),
        (0, -1, t), (0, 1, t), (0, -1, -t), (0, 1, -t),
        (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1),
    ]
    verts = [np.asarray(v, dtype=np.float64) / np.linalg.norm(v) for v in verts]
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]

    midpoint_cache: dict[tuple[int, int], int] = {}

    def midpoint(i: int, j: int) -> int:
        key = (i, j) if i < j else (j, i)
        if key in midpoint_cache:
            return midpoint_cache[key]
        m = verts[i] + verts[j]
        verts.append(m / np.linalg.norm(m))
        k = len(verts) - 1
        midpoint_cache[key] = k
        return k

    for _ in range(level):
        new_faces = []
        for a, b, c in faces:
            ab = midpoint(a, b)
            bc = midpoint(b, c)
            ca = midpoint(c, a)
            new_faces += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new_faces

    return Mesh(vertices=radius * np.vstack(verts), faces=np.asarray(faces, dtype=np.int64))


def grid(level: int, extent: float = GRID_EXTENT_MM) -> Mesh:
    """Triangulated square grid with (level + 2)^2 vertices in the z=0 plane."""
    if level < 0:
        raise ConfigError("grid level must be >= 0")
    side = level + 2
    coords = np.linspace(0.0, extent, side)
    xx, yy = np.meshgrid(coords, coords, indexing="ij")
    vertices = np.column_stack([xx.ravel(), yy.ravel(), np.zeros(side * side)])
    faces = []
    for i in range(side - 1):
        for j in range(side - 1):
            v00 = i * side + j
            v01 = v00 + 1
            v10 = v00 + side
            v11 = v10 + 1
            faces.append((v00, v10, v11))
            faces.append((v00, v11, v01))
    return Mesh(vertices=vertices, faces=np.asarray(faces, dtype=np.int64))


def smooth_displacement_fields(
    vertices: np.ndarray, count: int, amplitude: float, seed: int, n_waves: int = 4
) -> list[np.ndarray]:
    """``count`` smooth low-frequency displacement fields over ``vertices``.

    Each field is a sum of sinusoidal plane waves with wavelength on the
    order of the bounding-box diagonal, rescaled so the largest per-vertex
    displacement norm equals ``amplitude``.
    """
    if count < 1:
        raise ConfigError("count must be >= 1")
    if amplitude < 0:
        raise ConfigError("amplitude must be >= 0")
    rng = np.random.default_rng(seed)
    diag = float(np.linalg.norm(vertices.max(axis=0) - vertices.min(axis=0)))
    if diag == 0.0:
        diag = 1.0
    fields = []
    for _ in range(count):
        disp = np.zeros_like(vertices)
        for _ in range(n_waves):
            wavevec = rng.normal(size=3) * (2.0 * np.pi / diag)
            phase = rng.uniform(0.0, 2.0 * np.pi)
            direction = rng.normal(size=3)
            direction /= np.linalg.norm(direction)
            weight = rng.uniform(0.5, 1.0)
            disp += weight * np.sin(vertices @ wavevec + phase)[:, None] * direction
        peak = float(np.linalg.norm(disp, axis=1).max())
        if peak > 0.0:
            disp *= amplitude / peak
        fields.append(disp)
    return fields


def gen_synthetic(
    kind: str, level: int, count: int, amplitude: float, seed: int
) -> MeshDataset:
    """Seeded dataset of deformed copies of a base topology.

    kind is "icosphere" or "grid". Samples share the base face list; each is
    the base vertices plus a smooth displacement with peak norm <= amplitude.
    Identical arguments produce bit-identical datasets.
    """
    if kind == "icosphere":
        base = icosphere(level)
    elif kind == "grid":
        base = grid(level)
    else:
        raise ConfigError(f"unsupported synthetic kind {kind!r}")
    fields = smooth_displacement_fields(base.vertices, count, amplitude, seed)
    samples = [base.vertices + f for f in fields]
    return MeshDataset(topology=base, samples=samples, seed=seed)
