"""Triangle mesh container, validation, and region masks.

A mesh is a fixed-topology triangle mesh: vertex coordinates in millimeters
plus a face index list. The container itself only enforces array shapes;
deeper well-formedness checks are report-style via :func:`validate_mesh` so
that broken meshes can still be inspected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class Mesh:
    """Vertices (N, 3) float64 in mm and faces (F, 3) int64, zero-based."""

    vertices: np.ndarray
    faces: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(np.asarray(self.vertices, dtype=np.float64))
        f = np.ascontiguousarray(np.asarray(self.faces, dtype=np.int64))
        if v.ndim != 2 or v.shape[1] != 3:
            raise ValueError(f"vertices must have shape (N, 3), got {v.shape}")
        if f.size == 0:
            f = f.reshape(0, 3)
        if f.ndim != 2 or f.shape[1] != 3:
            raise ValueError(f"faces must have shape (F, 3), got {f.shape}")
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "faces", f)

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def n_faces(self) -> int:
        return self.faces.shape[0]

    def with_vertices(self, vertices: np.ndarray) -> "Mesh":
        """Same topology, new coordinates."""
        return Mesh(vertices=vertices, faces=self.faces)

    def same_topology(self, other: "Mesh") -> bool:
        return (
            self.n_vertices == other.n_vertices
            and self.faces.shape == other.faces.shape
            and bool(np.array_equal(self.faces, other.faces))
        )


@dataclass(frozen=True)
class RegionMask:
    """Per-vertex nonnegative weights emphasizing areas of the surface."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.ascontiguousarray(np.asarray(self.weights, dtype=np.float64))
        if w.ndim != 1:
            raise ValueError("mask weights must be a 1-D array")
        if np.any(w < 0):
            raise ValueError("mask weights must be nonnegative")
        if not np.any(w > 0):
            raise ValueError("mask must have at least one positive weight")
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, n: int) -> "RegionMask":
        return cls(np.ones(n))


@dataclass(frozen=True)
class MeshDataset:
    """Reference topology plus vertex arrays sharing it, tagged with its seed."""

    topology: Mesh
    samples: list = field(default_factory=list)
    seed: int = 0

    def __post_init__(self):
        n = self.topology.n_vertices
        for i, s in enumerate(self.samples):
            if s.shape != (n, 3):
                raise ValueError(
                    f"sample {i} has shape {s.shape}, topology has {n} vertices"
                )

    def __len__(self) -> int:
        return len(self.samples)


# validate_mesh violation kinds
FACE_INDEX_OUT_OF_RANGE = "face_index_out_of_range"
DEGENERATE_FACE = "degenerate_face"
UNREFERENCED_VERTEX = "unreferenced_vertex"
ZERO_AREA_FACE = "zero_area_face"
TOO_FEW_VERTICES = "too_few_vertices"
NO_FACES = "no_faces"

ZERO_AREA_MM2 = 1e-12


@dataclass(frozen=True)
class Violation:
    kind: str
    index: int
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple

    @property
    def ok(self) -> bool:
        return len(self.violations) == 0

    def by_kind(self, kind: str):
        return [v for v in self.violations if v.kind == kind]


def triangle_areas(vertices: np.ndarray, faces: np.ndarray) -> np.ndarray:
    a = vertices[faces[:, 0]]
    b = vertices[faces[:, 1]]
    c = vertices[faces[:, 2]]
    return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)


def validate_mesh(mesh: Mesh) -> ValidationReport:
    """Report-only well-formedness check.

    Flags out-of-range face indices, faces with repeated indices,
    vertices referenced by no face, and faces with area below
    ``ZERO_AREA_MM2`` square millimeters.
    """
    out = []
    n = mesh.n_vertices
    if n < 3:
        out.append(Violation(TOO_FEW_VERTICES, -1, f"mesh has {n} vertices, need >= 3"))
    if mesh.n_faces < 1:
        out.append(Violation(NO_FACES, -1, "mesh has no faces"))

    faces = mesh.faces
    in_range = np.ones(mesh.n_faces, dtype=bool)
    for fi in range(mesh.n_faces):
        f = faces[fi]
        if np.any(f < 0) or np.any(f >= n):
            out.append(Violation(FACE_INDEX_OUT_OF_RANGE, fi, f"face {fi} = {tuple(f)}"))
            in_range[fi] = False
            continue
        if len({int(f[0]), int(f[1]), int(f[2])}) != 3:
            out.append(Violation(DEGENERATE_FACE, fi, f"face {fi} repeats an index"))

    if mesh.n_faces:
        valid = faces[in_range]
        referenced = np.zeros(n, dtype=bool)
        if valid.size:
            referenced[valid.ravel()] = True
        for vi in np.nonzero(~referenced)[0]:
            out.append(Violation(UNREFERENCED_VERTEX, int(vi), f"vertex {vi} unused"))
        if valid.size:
            areas = triangle_areas(mesh.vertices, valid)
            nondegenerate = np.array(
                [len({int(f[0]), int(f[1]), int(f[2])}) == 3 for f in valid]
            )
            face_ids = np.nonzero(in_range)[0]
            for local_i in np.nonzero((areas < ZERO_AREA_MM2) & nondegenerate)[0]:
                fi = int(face_ids[local_i])
                out.append(
                    Violation(ZERO_AREA_FACE, fi, f"face {fi} area {areas[local_i]:.3e} mm^2")
                )

    return ValidationReport(tuple(out))


def load_region_mask(data: bytes | str, mesh: Mesh) -> RegionMask:
    """Parse a per-vertex weight mask for ``mesh``.

    Accepts a UTF-8 JSON array of N nonnegative numbers, or the literal
    string ``"uniform"`` (bare or JSON-quoted) for all-ones.
    """
    if isinstance(data, bytes):
        text = data.decode("utf-8")
    else:
        text = data
    stripped = text.strip()
    if stripped == "uniform":
        return RegionMask.uniform(mesh.n_vertices)
    try:
        parsed = json.loads(stripped)
    except json.JSONDecodeError as e:
        raise ConfigError(f"region mask is neither 'uniform' nor valid JSON: {e}") from e
    if parsed == "uniform":
        return RegionMask.uniform(mesh.n_vertices)
    if not isinstance(parsed, list):
        raise ConfigError("region mask JSON must be an array of numbers")
    if len(parsed) != mesh.n_vertices:
        raise ConfigError(
            f"region mask length {len(parsed)} != mesh vertex count {mesh.n_vertices}"
        )
    arr = np.asarray(parsed, dtype=np.float64)
    if np.any(arr < 0):
        raise ConfigError("region mask weights must be nonnegative")
    if not np.any(arr > 0):
        raise ConfigError("region mask must have at least one positive weight")
    return RegionMask(arr)
