"""Triangle-triangle intersection tests for folded meshes.

Pairs sharing an edge are skipped. Pairs sharing exactly one vertex count as
intersecting only if they meet somewhere away from that vertex; such pairs
are classified ``local``, all others ``global``. Coordinates are normalised
to a unit bounding-box diagonal before the epsilon tests.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .mesh import Mesh

EPS = 1e-10


@dataclass
class IntersectionReport:
    intersecting_pairs: list[tuple[int, int]] = field(default_factory=list)
    classification: list[str] = field(default_factory=list)
    degenerate_triangles: list[int] = field(default_factory=list)

    @property
    def is_empty(self) -> bool:
        return not self.intersecting_pairs

    def count(self, kind: str) -> int:
        return sum(1 for c in self.classification if c == kind)


def _plane(tri):
    nrm = np.cross(tri[1] - tri[0], tri[2] - tri[0])
    return nrm / np.linalg.norm(nrm), tri[0]


def _inside(pt, tri, nrm, eps):
    for k in range(3):
        a, b = tri[k], tri[(k + 1) % 3]
        if np.dot(np.cross(b - a, pt - a), nrm) < -eps * np.linalg.norm(b - a):
            return False
    return True


def _clip_segment_2d(a, b, tri, nrm, eps):
    """Part of an in-plane segment ``ab`` inside ``tri`` (Cyrus-Beck)."""
    t0, t1 = 0.0, 1.0
    d = b - a
    for k in range(3):
        u, v = tri[k], tri[(k + 1) % 3]
        inward = np.cross(nrm, v - u)
        inward /= np.linalg.norm(inward)
        num = np.dot(a - u, inward) + eps
        den = np.dot(d, inward)
        if abs(den) < 1e-300:
            if num < 0:
                return []
            continue
        t = -num / den
        if den > 0:
            t0 = max(t0, t)
        else:
            t1 = min(t1, t)
        if t0 > t1:
            return []
    return [a + t0 * d, a + t1 * d]


def _segment_hits(a, b, tri, nrm, origin, eps):
    da, db = np.dot(a - origin, nrm), np.dot(b - origin, nrm)
    if (da > eps and db > eps) or (da < -eps and db < -eps):
        return []
    if abs(da) <= eps and abs(db) <= eps:
        return _clip_segment_2d(a, b, tri, nrm, eps)
    if abs(da) <= eps:
        pts = [a]
    elif abs(db) <= eps:
        pts = [b]
    else:
        pts = [a + da / (da - db) * (b - a)]
    return [x for x in pts if _inside(x, tri, nrm, eps)]


def _coplanar_overlap_area(t1, t2, nrm):
    """Area of the planar overlap of two coplanar triangles (Sutherland-Hodgman)."""
    poly = [x for x in t1]
    for k in range(3):
        u, v = t2[k], t2[(k + 1) % 3]
        inward = np.cross(nrm, v - u)
        out = []
        for i in range(len(poly)):
            p, q = poly[i], poly[(i + 1) % len(poly)]
            sp, sq = np.dot(p - u, inward), np.dot(q - u, inward)
            if sp >= 0:
                out.append(p)
            if (sp >= 0) != (sq >= 0):
                out.append(p + sp / (sp - sq) * (q - p))
        poly = out
        if not poly:
            return 0.0
    area = 0.0
    for i in range(1, len(poly) - 1):
        area += 0.5 * np.dot(np.cross(poly[i] - poly[0], poly[i + 1] - poly[0]), nrm)
    return abs(area)


def triangles_intersect(t1: np.ndarray, t2: np.ndarray, shared: np.ndarray | None = None, eps: float = EPS) -> bool:
    """True if the triangles meet anywhere other than the optional shared vertex."""
    n1, o1 = _plane(t1)
    n2, o2 = _plane(t2)
    if abs(abs(np.dot(n1, n2)) - 1) < eps and abs(np.dot(o2 - o1, n1)) < eps:
        return _coplanar_overlap_area(t1, t2, n1) > eps
    pts = []
    for k in range(3):
        pts += _segment_hits(t1[k], t1[(k + 1) % 3], t2, n2, o2, eps)
        pts += _segment_hits(t2[k], t2[(k + 1) % 3], t1, n1, o1, eps)
    if shared is None:
        return bool(pts)
    return any(np.linalg.norm(x - shared) > 10 * eps for x in pts)


def detect_mesh_intersections(mesh: Mesh, eps: float = EPS) -> IntersectionReport:
    verts = mesh.vertices
    tris = mesh.triangles
    diag = np.linalg.norm(verts.max(axis=0) - verts.min(axis=0))
    v = (verts - verts.min(axis=0)) / (diag if diag > 0 else 1.0)
    report = IntersectionReport()
    areas = np.linalg.norm(np.cross(v[tris[:, 1]] - v[tris[:, 0]], v[tris[:, 2]] - v[tris[:, 0]]), axis=1) / 2
    report.degenerate_triangles = [int(i) for i in np.flatnonzero(areas <= eps)]
    bad = set(report.degenerate_triangles)
    lo = v[tris].min(axis=1) - eps
    hi = v[tris].max(axis=1) + eps
    m = len(tris)
    for i in range(m):
        if i in bad:
            continue
        cand = np.flatnonzero(np.all(lo[i + 1 :] <= hi[i], axis=1) & np.all(hi[i + 1 :] >= lo[i], axis=1)) + i + 1
        si = set(tris[i].tolist())
        for j in cand:
            if j in bad:
                continue
            common = si.intersection(tris[j].tolist())
            if len(common) >= 2:
                continue
            shared = v[next(iter(common))] if common else None
            if triangles_intersect(v[tris[i]], v[tris[j]], shared, eps):
                report.intersecting_pairs.append((i, int(j)))
                report.classification.append("local" if common else "global")
    return report


def realization_self_intersects(realization, num_vertices: int | None = None) -> bool:
    from .spiral import build_spiral_mesh

    return not detect_mesh_intersections(build_spiral_mesh(realization, num_vertices)).is_empty
