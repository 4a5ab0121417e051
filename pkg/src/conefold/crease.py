"""Planar crease patterns of triangulated strips.

:func:`develop` unrolls a mesh into the plane face by face along a
breadth-first spanning tree of the face adjacency graph. Copies of a vertex
that land on the same point are merged; edges whose two faces disagree form
the glue line. Each interior edge stores the signed fold angle of the 3D
dihedral: the rotation, right-handed about the edge as oriented in its first
face, taking that face's normal to the other's.
"""
from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .formatting import fmt, rounded
from .mesh import Mesh

FLAT_TOL = 1e-9
MERGE_TOL = 1e-9


@dataclass
class CreaseEdge:
    i: int  # pattern vertex indices
    j: int
    kind: str  # mountain, valley, flat, boundary or glue
    fold_angle: float


@dataclass
class CreasePattern:
    vertices: np.ndarray  # (m, 2)
    source: np.ndarray  # (m,) mesh vertex of each pattern vertex
    triangles: np.ndarray  # (T, 3) counter-clockwise in the plane
    edges: list[CreaseEdge]
    parent: np.ndarray  # (T,) spanning-tree parent face, -1 at the root
    hinge: np.ndarray  # (T, 2) pattern vertices of the edge shared with the parent
    hinge_angle: np.ndarray  # (T,) fold angle across that edge, as seen from the parent
    metadata: dict = field(default_factory=dict)

    @property
    def glue_line(self) -> list[CreaseEdge]:
        return [e for e in self.edges if e.kind == "glue"]

    def fold_angles(self) -> np.ndarray:
        return np.array([e.fold_angle for e in self.edges if e.kind not in ("boundary", "glue")])

    def angle_sums(self, mesh: Mesh) -> dict[int, float]:
        """Planar corner-angle sum around each interior mesh vertex."""
        interior = set(int(v) for v in mesh.interior_vertices())
        sums: dict[int, float] = {v: 0.0 for v in interior}
        for tri in self.triangles:
            pts = self.vertices[tri]
            for k in range(3):
                v = int(self.source[tri[k]])
                if v in sums:
                    u, w = pts[(k + 1) % 3] - pts[k], pts[(k + 2) % 3] - pts[k]
                    sums[v] += math.atan2(abs(u[0] * w[1] - u[1] * w[0]), float(np.dot(u, w)))
        return sums

    def edge_length_error(self, mesh: Mesh) -> float:
        err = 0.0
        for tri in self.triangles:
            for k in range(3):
                a, b = tri[k], tri[(k + 1) % 3]
                planar = np.linalg.norm(self.vertices[b] - self.vertices[a])
                spatial = np.linalg.norm(mesh.vertices[self.source[b]] - mesh.vertices[self.source[a]])
                err = max(err, abs(planar - spatial))
        return err

    def to_dict(self) -> dict:
        return {
            "vertices": self.vertices.tolist(),
            "source": [int(s) for s in self.source],
            "triangles": self.triangles.tolist(),
            "edges": [{"i": e.i, "j": e.j, "kind": e.kind, "fold_angle": e.fold_angle} for e in self.edges],
            "parent": [int(p) for p in self.parent],
            "hinge": self.hinge.tolist(),
            "hinge_angle": self.hinge_angle.tolist(),
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CreasePattern":
        return cls(
            np.array(d["vertices"], dtype=float).reshape(-1, 2),
            np.array(d["source"], dtype=int),
            np.array(d["triangles"], dtype=int).reshape(-1, 3),
            [CreaseEdge(int(e["i"]), int(e["j"]), e["kind"], float(e["fold_angle"])) for e in d["edges"]],
            np.array(d["parent"], dtype=int),
            np.array(d["hinge"], dtype=int).reshape(-1, 2),
            np.array(d["hinge_angle"], dtype=float),
            dict(d.get("metadata", {})),
        )


def _place_third(a2, b2, la, lb, side: float) -> np.ndarray:
    """Point at distances ``la`` from ``a2`` and ``lb`` from ``b2``, left of a->b if ``side > 0``."""
    d = b2 - a2
    base = np.linalg.norm(d)
    x = (la * la - lb * lb + base * base) / (2 * base)
    y = math.sqrt(max(la * la - x * x, 0.0))
    ex = d / base
    ey = np.array([-ex[1], ex[0]])
    return a2 + x * ex + math.copysign(y, side) * ey


def _fold_angle(p3: np.ndarray, f1: tuple[int, int, int], f2: tuple[int, int, int], a: int, b: int) -> float:
    def normal(t):
        v = np.cross(p3[t[1]] - p3[t[0]], p3[t[2]] - p3[t[0]])
        return v / np.linalg.norm(v)

    n1, n2 = normal(f1), normal(f2)
    e = p3[b] - p3[a]
    e = e / np.linalg.norm(e)
    return math.atan2(float(np.dot(np.cross(n1, n2), e)), float(np.dot(n1, n2)))


def _check_strip(mesh: Mesh) -> dict[tuple[int, int], list[int]]:
    if mesh.n_triangles == 0:
        raise ValueError("empty mesh")
    if np.any(mesh.triangle_areas() <= 0):
        raise ValueError("mesh has degenerate triangles")
    ef = mesh.edge_faces()
    if any(len(f) > 2 for f in ef.values()):
        raise ValueError("non-strip combinatorics: an edge has more than two faces")
    return ef


def develop(mesh: Mesh) -> CreasePattern:
    """Unroll ``mesh`` isometrically into the plane."""
    ef = _check_strip(mesh)
    p3 = mesh.vertices
    tris = [tuple(int(v) for v in t) for t in mesh.triangles]
    n_t = len(tris)
    oriented: list[tuple[int, int, int] | None] = [None] * n_t
    pos: list[dict[int, np.ndarray] | None] = [None] * n_t
    parent = np.full(n_t, -1, dtype=int)
    hinge_src = np.zeros((n_t, 2), dtype=int)
    hinge_angle = np.zeros(n_t)

    def length(i, j):
        return float(np.linalg.norm(p3[j] - p3[i]))

    a, b, c = tris[0]
    pa, pb = np.zeros(2), np.array([length(a, b), 0.0])
    pos[0] = {a: pa, b: pb, c: _place_third(pa, pb, length(a, c), length(b, c), 1.0)}
    oriented[0] = (a, b, c)
    queue = deque([0])
    while queue:
        f = queue.popleft()
        of = oriented[f]
        for k in range(3):
            u, v = of[k], of[(k + 1) % 3]
            for g in ef[(min(u, v), max(u, v))]:
                if g == f or oriented[g] is not None:
                    continue
                w = next(x for x in tris[g] if x not in (u, v))
                # the shared edge runs v->u in the neighbour's orientation
                oriented[g] = (v, u, w)
                pu, pv = pos[f][u], pos[f][v]
                pos[g] = {u: pu, v: pv, w: _place_third(pv, pu, length(v, w), length(u, w), 1.0)}
                parent[g] = f
                hinge_src[g] = (u, v)
                hinge_angle[g] = _fold_angle(p3, of, oriented[g], u, v)
                queue.append(g)
    if any(o is None for o in oriented):
        raise ValueError("non-strip combinatorics: mesh is not connected")

    scale = float(np.max(np.ptp(p3, axis=0))) or 1.0
    verts: list[np.ndarray] = []
    source: list[int] = []
    by_source: dict[int, list[int]] = {}

    def vertex_id(s: int, xy: np.ndarray) -> int:
        for idx in by_source.get(s, []):
            if np.linalg.norm(verts[idx] - xy) <= MERGE_TOL * scale:
                return idx
        verts.append(xy)
        source.append(s)
        by_source.setdefault(s, []).append(len(verts) - 1)
        return len(verts) - 1

    tri2d = np.array([[vertex_id(s, pos[f][s]) for s in oriented[f]] for f in range(n_t)], dtype=int)
    hinge = np.array(
        [[vertex_id(int(s), pos[f][int(s)]) for s in hinge_src[f]] if parent[f] >= 0 else [-1, -1] for f in range(n_t)], dtype=int
    )

    edges = []
    for (i, j), faces in sorted(ef.items()):
        f1 = faces[0]
        ids1 = {s: tri2d[f1][k] for k, s in enumerate(oriented[f1])}
        if len(faces) == 1:
            edges.append(CreaseEdge(int(ids1[i]), int(ids1[j]), "boundary", 0.0))
            continue
        f2 = faces[1]
        ids2 = {s: tri2d[f2][k] for k, s in enumerate(oriented[f2])}
        o1 = oriented[f1]
        k = o1.index(i)
        u, v = (i, j) if o1[(k + 1) % 3] == j else (j, i)
        angle = _fold_angle(p3, o1, oriented[f2], u, v)
        if ids1[i] != ids2[i] or ids1[j] != ids2[j]:
            kind = "glue"
        elif abs(angle) < FLAT_TOL:
            kind, angle = "flat", 0.0
        else:
            kind = "valley" if angle > 0 else "mountain"
        edges.append(CreaseEdge(int(ids1[u]), int(ids1[v]), kind, angle))
    meta = dict(mesh.metadata)
    return CreasePattern(np.array(verts), np.array(source, dtype=int), tri2d, edges, parent, hinge, hinge_angle, meta)


def _rotation(axis: np.ndarray, angle: float) -> np.ndarray:
    x, y, z = axis / np.linalg.norm(axis)
    k = np.array([[0, -z, y], [z, 0, -x], [-y, x, 0]])
    return np.eye(3) + math.sin(angle) * k + (1 - math.cos(angle)) * k @ k


def refold(pattern: CreasePattern) -> np.ndarray:
    """3D positions of the pattern vertices after folding every tree hinge by its angle.

    The root face stays in the plane ``z = 0``; compare with the mesh up to a rigid motion.
    """
    n_t = len(pattern.triangles)
    rot = [np.eye(3)] * n_t
    shift = [np.zeros(3)] * n_t
    lifted = np.column_stack([pattern.vertices, np.zeros(len(pattern.vertices))])
    order = sorted(range(n_t), key=lambda f: _depth(pattern.parent, f))
    out = np.zeros_like(lifted)
    for f in order:
        g = pattern.parent[f]
        if g >= 0:
            a, b = pattern.hinge[f]
            pa = rot[g] @ lifted[a] + shift[g]
            pb = rot[g] @ lifted[b] + shift[g]
            r = _rotation(pb - pa, pattern.hinge_angle[f])
            rot[f] = r @ rot[g]
            shift[f] = r @ (shift[g] - pa) + pa
        for v in pattern.triangles[f]:
            out[v] = rot[f] @ lifted[v] + shift[f]
    return out


def _depth(parent: np.ndarray, f: int) -> int:
    d = 0
    while parent[f] >= 0:
        f = parent[f]
        d += 1
    return d


def rigid_align_error(moving: np.ndarray, target: np.ndarray) -> float:
    """Max point distance after the best rigid motion (Kabsch) of ``moving`` onto ``target``."""
    mc, tc = moving.mean(axis=0), target.mean(axis=0)
    h = (moving - mc).T @ (target - tc)
    u, _, vt = np.linalg.svd(h)
    d = np.sign(np.linalg.det(vt.T @ u.T))
    r = vt.T @ np.diag([1.0, 1.0, d]) @ u.T
    return float(np.max(np.linalg.norm((moving - mc) @ r.T + tc - target, axis=1)))


_STROKES = {"mountain": "#d62728", "valley": "#1f77b4", "flat": "#999999", "boundary": "#000000", "glue": "#2ca02c"}


def svg_text(pattern: CreasePattern, margin: float = 0.05) -> str:
    lo, hi = pattern.vertices.min(axis=0), pattern.vertices.max(axis=0)
    size = float(max(hi - lo)) or 1.0
    pad = margin * size
    w, h = hi - lo + 2 * pad

    def xy(v):
        x = pattern.vertices[v, 0] - lo[0] + pad
        y = hi[1] - pattern.vertices[v, 1] + pad
        return fmt(x), fmt(y)

    width = fmt(size / 500)
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {fmt(w)} {fmt(h)}">',
    ]
    for e in pattern.edges:
        (x1, y1), (x2, y2) = xy(e.i), xy(e.j)
        dash = ' stroke-dasharray="4 2"' if e.kind == "glue" else ""
        lines.append(
            f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="{_STROKES[e.kind]}" stroke-width="{width}"{dash}'
            f' data-kind="{e.kind}" data-fold-angle="{fmt(e.fold_angle)}"/>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def write_pattern(pattern: CreasePattern, svg_path) -> Path:
    """Write the SVG and a sidecar JSON next to it; returns the JSON path."""
    svg_path = Path(svg_path)
    svg_path.write_text(svg_text(pattern))
    json_path = svg_path.with_suffix(".json")
    json_path.write_text(json.dumps(rounded(pattern.to_dict()), indent=2, sort_keys=True) + "\n")
    return json_path


def read_pattern(json_path) -> CreasePattern:
    return CreasePattern.from_dict(json.loads(Path(json_path).read_text()))
