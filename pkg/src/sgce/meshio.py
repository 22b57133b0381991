"""Wavefront OBJ and ASCII PLY readers/writers.

Both formats are restricted to triangle meshes. Coordinates are serialized
with shortest round-trip precision (``repr``), so parse(write(mesh))
reproduces the mesh bit-exactly.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import MeshIOError
from .mesh import Mesh


def _parse_float(token: str, lineno: int) -> float:
    try:
        return float(token)
    except ValueError as e:
        raise MeshIOError(f"line {lineno}: malformed float {token!r}") from e


def parse_obj(data: bytes | str) -> Mesh:
    """Parse an OBJ file: `v x y z` and triangle `f` lines.

    Attribute suffixes after ``/`` in face references are ignored,
    ``#`` comments and unknown line types are skipped. Faces must be
    triangles; indices are one-based in the file.
    """
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    vertices = []
    faces = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        tag = parts[0]
        if tag == "v":
            if len(parts) < 4:
                raise MeshIOError(f"line {lineno}: vertex needs 3 coordinates")
            vertices.append([_parse_float(t, lineno) for t in parts[1:4]])
        elif tag == "f":
            refs = parts[1:]
            if len(refs) != 3:
                raise MeshIOError(
                    f"line {lineno}: face has {len(refs)} vertex references, "
                    "only triangles are supported"
                )
            idx = []
            for r in refs:
                head = r.split("/", 1)[0]
                try:
                    one_based = int(head)
                except ValueError as e:
                    raise MeshIOError(f"line {lineno}: malformed face index {r!r}") from e
                if one_based < 1:
                    raise MeshIOError(f"line {lineno}: face index {one_based} out of range")
                idx.append(one_based - 1)
            faces.append(idx)
        # vt / vn / o / g / usemtl ... are skipped

    n = len(vertices)
    for f in faces:
        for i in f:
            if i >= n:
                raise MeshIOError(f"face index {i + 1} out of range (mesh has {n} vertices)")
    return Mesh(
        vertices=np.asarray(vertices, dtype=np.float64).reshape(n, 3),
        faces=np.asarray(faces, dtype=np.int64).reshape(len(faces), 3),
    )


def write_obj(mesh: Mesh) -> bytes:
    """Serialize a mesh as OBJ with full round-trip precision."""
    lines = []
    for x, y, z in mesh.vertices:
        lines.append(f"v {x!r} {y!r} {z!r}")
    for i, j, k in mesh.faces:
        lines.append(f"f {i + 1} {j + 1} {k + 1}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def parse_ply(data: bytes | str) -> Mesh:
    """Parse an ASCII PLY with float x/y/z vertex properties and triangle faces.

    Binary PLY is rejected. Extra vertex properties are tolerated as long as
    x, y, z are present; faces must be index lists of length 3.
    """
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    lines = text.splitlines()
    if not lines or lines[0].strip() != "ply":
        raise MeshIOError("missing 'ply' header magic")

    n_vertices = None
    n_faces = None
    vertex_props = []
    current_element = None
    saw_format = False
    body_start = None
    for i, raw in enumerate(lines[1:], start=1):
        line = raw.strip()
        if not line or line.startswith("comment"):
            continue
        parts = line.split()
        if parts[0] == "format":
            if len(parts) < 2 or parts[1] != "ascii":
                raise MeshIOError(f"unsupported PLY format {line!r}, only ascii 1.0")
            saw_format = True
        elif parts[0] == "element":
            if len(parts) != 3:
                raise MeshIOError(f"malformed element line {line!r}")
            current_element = parts[1]
            if parts[1] == "vertex":
                n_vertices = int(parts[2])
            elif parts[1] == "face":
                n_faces = int(parts[2])
        elif parts[0] == "property":
            if current_element == "vertex" and parts[1] != "list":
                vertex_props.append(parts[-1])
        elif parts[0] == "end_header":
            body_start = i + 1
            break
    if body_start is None:
        raise MeshIOError("PLY header has no end_header")
    if not saw_format:
        raise MeshIOError("PLY header has no format line")
    if n_vertices is None or n_faces is None:
        raise MeshIOError("PLY header must declare vertex and face elements")
    for axis in ("x", "y", "z"):
        if axis not in vertex_props:
            raise MeshIOError(f"PLY vertex element lacks property {axis!r}")
    ix, iy, iz = (vertex_props.index(a) for a in ("x", "y", "z"))

    body = [l for l in (raw.strip() for raw in lines[body_start:]) if l]
    if len(body) < n_vertices + n_faces:
        raise MeshIOError(
            f"PLY body has {len(body)} rows, expected {n_vertices + n_faces}"
        )
    vertices = np.empty((n_vertices, 3), dtype=np.float64)
    for vi in range(n_vertices):
        parts = body[vi].split()
        if len(parts) < len(vertex_props):
            raise MeshIOError(f"PLY vertex row {vi} has too few values")
        vertices[vi] = (
            _parse_float(parts[ix], vi),
            _parse_float(parts[iy], vi),
            _parse_float(parts[iz], vi),
        )
    faces = np.empty((n_faces, 3), dtype=np.int64)
    for fi in range(n_faces):
        parts = body[n_vertices + fi].split()
        count = int(parts[0])
        if count != 3:
            raise MeshIOError(f"PLY face {fi} has {count} vertices, only triangles supported")
        if len(parts) < 4:
            raise MeshIOError(f"PLY face row {fi} is truncated")
        faces[fi] = [int(p) for p in parts[1:4]]
    if faces.size and (faces.min() < 0 or faces.max() >= n_vertices):
        raise MeshIOError("PLY face index out of range")
    return Mesh(vertices=vertices, faces=faces)


def write_ply(mesh: Mesh) -> bytes:
    """Serialize a mesh as ASCII PLY 1.0."""
    lines = [
        "ply",
        "format ascii 1.0",
        f"element vertex {mesh.n_vertices}",
        "property float x",
        "property float y",
        "property float z",
        f"element face {mesh.n_faces}",
        "property list uchar int vertex_indices",
        "end_header",
    ]
    for x, y, z in mesh.vertices:
        lines.append(f"{x!r} {y!r} {z!r}")
    for i, j, k in mesh.faces:
        lines.append(f"3 {i} {j} {k}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def load_mesh(path: str | Path) -> Mesh:
    """Load OBJ or PLY by file extension."""
    p = Path(path)
    data = p.read_bytes()
    suffix = p.suffix.lower()
    if suffix == ".obj":
        return parse_obj(data)
    if suffix == ".ply":
        return parse_ply(data)
    raise MeshIOError(f"unsupported mesh extension {suffix!r} (use .obj or .ply)")


def save_mesh(mesh: Mesh, path: str | Path) -> None:
    p = Path(path)
    suffix = p.suffix.lower()
    if suffix == ".obj":
        p.write_bytes(write_obj(mesh))
    elif suffix == ".ply":
        p.write_bytes(write_ply(mesh))
    else:
        raise MeshIOError(f"unsupported mesh extension {suffix!r} (use .obj or .ply)")
