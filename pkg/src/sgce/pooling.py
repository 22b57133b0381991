"""Mesh coarsening for the multi-resolution encoder/decoder.

Decimation is greedy half-edge collapse ranked by quadric error: each vertex
accumulates the plane quadrics of its incident faces, and collapsing u into v
costs h^T (Q_u + Q_v) h at v's (unchanged) position. Because survivors keep
their original coordinates, the down transform is a pure vertex selection;
the up transform maps every fine vertex to barycentric coordinates on its
nearest coarse triangle (weight 1 on itself if it survived).

Collapses are ordered deterministically: the heap key is (cost, u, v) and
stale entries are dropped by version stamps, so identical inputs always
produce the identical pooling pair.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .geometry import closest_point_on_triangle
from .mesh import Mesh
from .sparse import SparseMatrix


@dataclass(frozen=True)
class PoolingPair:
    down: SparseMatrix  # (M_coarse, N_fine) one-hot selection rows
    up: SparseMatrix  # (N_fine, M_coarse) convex-weight rows
    coarse_mesh: Mesh
    reached_target: bool = True


def _vertex_quadrics(vertices: np.ndarray, faces: np.ndarray) -> np.ndarray:
    q = np.zeros((vertices.shape[0], 4, 4))
    for i, j, k in faces:
        a, b, c = vertices[i], vertices[j], vertices[k]
        n = np.cross(b - a, c - a)
        norm = np.linalg.norm(n)
        if norm < 1e-300:
            continue
        n = n / norm
        plane = np.array([n[0], n[1], n[2], -(n @ a)])
        kq = np.outer(plane, plane)
        q[i] += kq
        q[j] += kq
        q[k] += kq
    return q


def collapse_cost(quadrics: np.ndarray, positions: np.ndarray, u: int, v: int) -> float:
    """Quadric error of collapsing u into v (v keeps its position)."""
    h = np.array([positions[v, 0], positions[v, 1], positions[v, 2], 1.0])
    return float(h @ (quadrics[u] + quadrics[v]) @ h)


def build_pooling(mesh: Mesh, target_ratio: float) -> PoolingPair:
    """Coarsen ``mesh`` to ceil(target_ratio * N) vertices.

    target_ratio must lie in (0, 1] with target_ratio * N >= 4 (ratio 1.0 is
    an identity fast path). If no legal collapse remains before the target is
    reached, the closest achievable coarsening is returned with
    reached_target=False.
    """
    n = mesh.n_vertices
    if not (0.0 < target_ratio <= 1.0):
        raise ValueError(f"target_ratio must be in (0, 1], got {target_ratio}")
    if target_ratio == 1.0:
        eye = SparseMatrix.identity(n)
        return PoolingPair(down=eye, up=eye, coarse_mesh=mesh, reached_target=True)
    if target_ratio * n < 4:
        raise ValueError(
            f"target_ratio * N = {target_ratio * n:.2f} < 4; mesh too small to pool"
        )
    target = math.ceil(target_ratio * n)

    pos = mesh.vertices
    quadrics = _vertex_quadrics(pos, mesh.faces)
    alive = np.ones(n, dtype=bool)
    version = np.zeros(n, dtype=np.int64)

    faces: dict[int, tuple[int, int, int]] = {
        fid: tuple(int(x) for x in f) for fid, f in enumerate(mesh.faces)
    }
    face_keys = {fid: frozenset(f) for fid, f in faces.items()}
    key_to_fid = {}
    for fid, key in face_keys.items():
        key_to_fid.setdefault(key, fid)
    vfaces: list[set] = [set() for _ in range(n)]
    for fid, f in faces.items():
        for vtx in f:
            vfaces[vtx].add(fid)

    def neighbors(v: int) -> set:
        out = set()
        for fid in vfaces[v]:
            out.update(faces[fid])
        out.discard(v)
        return out

    heap: list = []

    def push_edge(u: int, v: int) -> None:
        heapq.heappush(
            heap, (collapse_cost(quadrics, pos, u, v), u, v, version[u], version[v])
        )

    seen = set()
    for f in faces.values():
        for u, v in ((f[0], f[1]), (f[1], f[2]), (f[2], f[0])):
            key = (u, v) if u < v else (v, u)
            if u != v and key not in seen:
                seen.add(key)
                push_edge(key[0], key[1])
                push_edge(key[1], key[0])

    alive_count = n
    while alive_count > target and heap:
        cost, u, v, vu, vv = heapq.heappop(heap)
        if not (alive[u] and alive[v]):
            continue
        if version[u] != vu or version[v] != vv:
            continue
        nu = neighbors(u)
        if v not in nu:
            continue
        nv = neighbors(v)
        dying = vfaces[u] & vfaces[v]
        common = nu & nv
        if len(common) != len(dying):
            continue  # collapsing would pinch a non-manifold fan
        total_faces_after = len(faces) - len(dying)
        if total_faces_after > 0:
            # no alive vertex may end up with zero incident faces
            isolated = False
            for w in common:
                if not (vfaces[w] - dying):
                    isolated = True
                    break
            if not isolated and not ((vfaces[v] | vfaces[u]) - dying):
                isolated = True
            if isolated:
                continue

        # apply collapse u -> v
        quadrics[v] = quadrics[v] + quadrics[u]
        for fid in list(vfaces[u]):
            f = faces[fid]
            for w in f:
                vfaces[w].discard(fid)
            old_key = face_keys.pop(fid)
            if key_to_fid.get(old_key) == fid:
                del key_to_fid[old_key]
            del faces[fid]
            if fid in dying:
                continue
            new_f = tuple(v if w == u else w for w in f)
            new_key = frozenset(new_f)
            if new_key in key_to_fid:
                continue  # would duplicate an existing face
            faces[fid] = new_f
            face_keys[fid] = new_key
            key_to_fid[new_key] = fid
            for w in new_f:
                vfaces[w].add(fid)
        alive[u] = False
        alive_count -= 1
        version[u] += 1
        version[v] += 1
        for w in sorted(neighbors(v)):
            push_edge(w, v)
            push_edge(v, w)

    reached = alive_count == target

    survivors = np.nonzero(alive)[0]
    coarse_index = {int(orig): ci for ci, orig in enumerate(survivors)}
    m = survivors.size
    coarse_faces = np.asarray(
        sorted(tuple(coarse_index[w] for w in f) for f in faces.values()),
        dtype=np.int64,
    ).reshape(len(faces), 3)
    coarse_mesh = Mesh(vertices=pos[survivors], faces=coarse_faces)

    down = SparseMatrix.from_entries(
        m, n, np.arange(m), survivors, np.ones(m)
    )

    up_rows, up_cols, up_vals = [], [], []
    coarse_tris = [
        (coarse_mesh.vertices[i], coarse_mesh.vertices[j], coarse_mesh.vertices[k], (i, j, k))
        for i, j, k in coarse_faces
    ]
    for i in range(n):
        if alive[i]:
            up_rows.append(i)
            up_cols.append(coarse_index[i])
            up_vals.append(1.0)
            continue
        p = pos[i]
        if coarse_tris:
            best = None
            for a, b, c, idx in coarse_tris:
                q, bary = closest_point_on_triangle(a, b, c, p)
                d = float(np.linalg.norm(p - q))
                if best is None or d < best[0]:
                    best = (d, bary, idx)
            _, bary, idx = best
            w = np.maximum(np.asarray(bary, dtype=np.float64), 0.0)
            w = w / w.sum()
            for weight, ci in zip(w, idx):
                if weight > 0.0:
                    up_rows.append(i)
                    up_cols.append(ci)
                    up_vals.append(float(weight))
        else:
            # face-less coarse set: snap to the nearest surviving vertex
            d = np.linalg.norm(pos[survivors] - p, axis=1)
            up_rows.append(i)
            up_cols.append(int(np.argmin(d)))
            up_vals.append(1.0)

    up = SparseMatrix.from_entries(n, m, up_rows, up_cols, up_vals)
    return PoolingPair(down=down, up=up, coarse_mesh=coarse_mesh, reached_target=reached)
