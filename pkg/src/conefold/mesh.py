"""Triangle meshes and OBJ serialisation."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .formatting import fmt


@dataclass
class Mesh:
    vertices: np.ndarray
    triangles: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float).reshape(-1, 3)
        self.triangles = np.asarray(self.triangles, dtype=int).reshape(-1, 3)
        if self.triangles.size and (self.triangles.min() < 0 or self.triangles.max() >= len(self.vertices)):
            raise ValueError("triangle index out of range")
        if not np.all(np.isfinite(self.vertices)):
            raise ValueError("non-finite vertex coordinates")

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    def triangle_areas(self) -> np.ndarray:
        a, b, c = (self.vertices[self.triangles[:, k]] for k in range(3))
        return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)

    def edges(self) -> list[tuple[int, int]]:
        out = set()
        for tri in self.triangles:
            for k in range(3):
                i, j = int(tri[k]), int(tri[(k + 1) % 3])
                out.add((min(i, j), max(i, j)))
        return sorted(out)

    def edge_faces(self) -> dict[tuple[int, int], list[int]]:
        out: dict[tuple[int, int], list[int]] = {}
        for f, tri in enumerate(self.triangles):
            for k in range(3):
                i, j = int(tri[k]), int(tri[(k + 1) % 3])
                out.setdefault((min(i, j), max(i, j)), []).append(f)
        return out

    def vertex_angle_sums(self) -> np.ndarray:
        """Sum of the triangle corner angles incident to each vertex."""
        sums = np.zeros(len(self.vertices))
        for tri in self.triangles:
            pts = self.vertices[tri]
            for k in range(3):
                u = pts[(k + 1) % 3] - pts[k]
                v = pts[(k + 2) % 3] - pts[k]
                cosang = np.dot(u, v) / (np.linalg.norm(u) * np.linalg.norm(v))
                sums[tri[k]] += np.arccos(np.clip(cosang, -1.0, 1.0))
        return sums

    def interior_vertices(self) -> np.ndarray:
        """Indices of vertices whose link is a closed cycle (every incident edge has two faces)."""
        ef = self.edge_faces()
        boundary = set()
        for (i, j), faces in ef.items():
            if len(faces) != 2:
                boundary.update((i, j))
        used = set(int(v) for v in self.triangles.ravel())
        return np.array(sorted(used - boundary), dtype=int)


def write_obj(mesh: Mesh, path) -> None:
    Path(path).write_text(obj_text(mesh))


def obj_text(mesh: Mesh) -> str:
    lines = []
    for key in sorted(mesh.metadata):
        lines.append(f"# {key}: {mesh.metadata[key]}")
    for v in mesh.vertices:
        lines.append("v " + " ".join(fmt(x) for x in v))
    for t in mesh.triangles:
        lines.append("f " + " ".join(str(int(i) + 1) for i in t))
    return "\n".join(lines) + "\n"


def read_obj(path) -> Mesh:
    verts, tris = [], []
    for line in Path(path).read_text().splitlines():
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        if parts[0] == "v":
            verts.append([float(x) for x in parts[1:4]])
        elif parts[0] == "f":
            tris.append([int(tok.split("/")[0]) - 1 for tok in parts[1:4]])
    return Mesh(np.array(verts), np.array(tris, dtype=int))
