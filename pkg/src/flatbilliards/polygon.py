"""Polygonal billiard tables: input parsing, validation and cut triangulation."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .scalar import (TAU_LEN, angle_between, cross, is_rational_input, norm2,
                     orient, parse_number, segments_intersect, shoelace, sign, sub)


class PolygonError(ValueError):
    """Base class for polygon validation failures."""


class SelfIntersection(PolygonError):
    pass


class BadOrientation(PolygonError):
    pass


class DegenerateEdge(PolygonError):
    pass


class InvalidPolygon(PolygonError):
    pass


@dataclass(frozen=True)
class Polygon:
    """A planar polygonal domain.

    ``outer`` is counterclockwise, each ring in ``holes`` is clockwise and each
    slit is an open polyline lying in the interior.  Coordinates are Fractions
    when ``exact`` is set, floats otherwise.
    """
    outer: tuple
    holes: tuple = ()
    slits: tuple = ()
    exact: bool = False

    @classmethod
    def from_coords(cls, outer, holes=(), slits=(), exact=None) -> "Polygon":
        flat = [c for p in outer for c in p]
        flat += [c for ring in holes for p in ring for c in p]
        flat += [c for s in slits for p in s for c in p]
        if exact is None:
            exact = all(is_rational_input(c) for c in flat)

        def pts(seq):
            return tuple((parse_number(x, exact), parse_number(y, exact)) for x, y in seq)

        return cls(pts(outer), tuple(pts(h) for h in holes), tuple(pts(s) for s in slits), exact)

    @classmethod
    def from_json(cls, text: str, exact=None) -> "Polygon":
        doc = json.loads(text)
        return cls.from_coords(doc["outer"], doc.get("holes", []), doc.get("slits", []), exact=exact)

    def to_json(self) -> str:
        def fmt(v):
            if isinstance(v, Fraction):
                return str(v)
            return repr(float(v))

        def ring(r):
            return [[fmt(x), fmt(y)] for x, y in r]

        doc = {"outer": ring(self.outer), "holes": [ring(h) for h in self.holes],
               "slits": [ring(s) for s in self.slits]}
        return json.dumps(doc)

    @property
    def area(self):
        return shoelace(self.outer) + sum(shoelace(h) for h in self.holes)

    @property
    def vertices(self) -> list:
        """All points that count as vertices: outer, hole and slit vertices."""
        out = list(self.outer)
        for h in self.holes:
            out.extend(h)
        for s in self.slits:
            out.extend(s)
        return out

    @property
    def rings(self) -> list:
        return [self.outer, *self.holes]

    def boundary_segments(self) -> list:
        segs = []
        for ring in self.rings:
            n = len(ring)
            segs.extend((ring[i], ring[(i + 1) % n]) for i in range(n))
        for s in self.slits:
            segs.extend((s[i], s[i + 1]) for i in range(len(s) - 1))
        return segs

    def diameter(self) -> float:
        pts = np.array([[float(x), float(y)] for x, y in self.vertices])
        return float(np.max(np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)))

    def contains(self, p) -> bool:
        """Closed-domain membership (slits are ignored)."""
        if not point_in_ring(p, self.outer, closed=True):
            return False
        return not any(point_in_ring(p, h, closed=False) for h in self.holes)


def point_in_ring(p, ring, closed: bool = True) -> bool:
    """Even-odd point-in-polygon test; ``closed`` decides the boundary case."""
    n = len(ring)
    tol = 0.0 if isinstance(p[0], Fraction) else 1e-12
    for i in range(n):
        a, b = ring[i], ring[(i + 1) % n]
        if sign(orient(a, b, p), tol) == 0 and (
                min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])):
            return closed
    inside = False
    x, y = p
    for i in range(n):
        (x1, y1), (x2, y2) = ring[i], ring[(i + 1) % n]
        if (y1 > y) != (y2 > y):
            xi = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x < xi:
                inside = not inside
    return inside


@dataclass
class ValidationReport:
    valid: bool
    orientation_ok: bool
    simple: bool
    angles: dict = field(default_factory=dict)
    errors: list = field(default_factory=list)

    def raise_for_errors(self):
        if self.errors:
            raise self.errors[0]


def ring_angles(ring) -> list[float]:
    """Interior angle at every vertex of a ring (domain on the left)."""
    n = len(ring)
    out = []
    for i in range(n):
        v = ring[i]
        a = sub(ring[(i + 1) % n], v)
        b = sub(ring[i - 1], v)
        ang = angle_between(a, b)
        if ang == 0.0 and sign(cross(a, b)) == 0:
            ang = 0.0
        out.append(ang)
    return out


def validate_polygon(p: Polygon, strict: bool = False) -> ValidationReport:
    """Check simplicity, orientation and containment; list every vertex angle.

    With ``strict`` the first problem is raised instead of being reported.
    """
    tol = 0.0 if p.exact else 1e-12
    errors: list[PolygonError] = []
    rings = p.rings

    for r_idx, ring in enumerate(rings):
        if len(ring) < 3:
            errors.append(InvalidPolygon(f"ring {r_idx} has fewer than 3 vertices"))
            continue
        for i in range(len(ring)):
            e = sub(ring[(i + 1) % len(ring)], ring[i])
            if float(norm2(e)) <= TAU_LEN ** 2:
                errors.append(DegenerateEdge(f"ring {r_idx} edge {i} has length below {TAU_LEN}"))
    for s_idx, s in enumerate(p.slits):
        if len(s) < 2:
            errors.append(InvalidPolygon(f"slit {s_idx} needs two points"))
        for i in range(len(s) - 1):
            if float(norm2(sub(s[i + 1], s[i]))) <= TAU_LEN ** 2:
                errors.append(DegenerateEdge(f"slit {s_idx} edge {i} has length below {TAU_LEN}"))
    if errors:
        return _finish(errors, strict, False, False, {})

    orientation_ok = sign(shoelace(p.outer), tol) > 0 and all(sign(shoelace(h), tol) < 0 for h in p.holes)
    if sign(shoelace(p.outer), tol) <= 0:
        errors.append(BadOrientation("outer boundary must be counterclockwise"))
    for h_idx, h in enumerate(p.holes):
        if sign(shoelace(h), tol) >= 0:
            errors.append(BadOrientation(f"hole {h_idx} must be clockwise"))

    # every pair of non-adjacent segments must be disjoint
    segs = []
    for r_idx, ring in enumerate(rings):
        n = len(ring)
        for i in range(n):
            segs.append((("r", r_idx, i, n), ring[i], ring[(i + 1) % n]))
    for s_idx, s in enumerate(p.slits):
        for i in range(len(s) - 1):
            segs.append((("s", s_idx, i, len(s) - 1), s[i], s[i + 1]))

    def adjacent(k1, k2):
        if k1[:2] != k2[:2]:
            return False
        i, j, n = k1[2], k2[2], k1[3]
        if k1[0] == "r":
            return (i - j) % n in (1, n - 1)
        return abs(i - j) == 1

    simple = True
    for a in range(len(segs)):
        ka, p1, p2 = segs[a]
        for b in range(a + 1, len(segs)):
            kb, q1, q2 = segs[b]
            if adjacent(ka, kb):
                # consecutive edges may only share their common endpoint
                if sign(orient(p1, p2, q1), tol) == 0 and sign(orient(p1, p2, q2), tol) == 0:
                    shared = p2 if (p2 == q1 or p2 == q2) else p1
                    other_a = p1 if shared == p2 else p2
                    other_b = q2 if shared == q1 else q1
                    if sign(_dot3(shared, other_a, other_b), tol) > 0:
                        simple = False
                        errors.append(SelfIntersection(f"edges {ka[:3]} and {kb[:3]} overlap"))
                continue
            if segments_intersect(p1, p2, q1, q2, tol):
                simple = False
                errors.append(SelfIntersection(f"edges {ka[:3]} and {kb[:3]} intersect"))

    if simple:
        for h_idx, h in enumerate(p.holes):
            if not all(point_in_ring(v, p.outer, closed=False) for v in h):
                errors.append(InvalidPolygon(f"hole {h_idx} is not strictly inside the outer boundary"))
            for g_idx, g in enumerate(p.holes):
                if g_idx != h_idx and point_in_ring(h[0], g, closed=True):
                    errors.append(InvalidPolygon(f"hole {h_idx} lies inside hole {g_idx}"))
        for s_idx, s in enumerate(p.slits):
            for v in s:
                if not point_in_ring(v, p.outer, closed=False) or any(
                        point_in_ring(v, h, closed=True) for h in p.holes):
                    errors.append(InvalidPolygon(f"slit {s_idx} leaves the interior"))
                    break

    angles = {}
    if simple and orientation_ok:
        angles["outer"] = ring_angles(p.outer)
        angles["holes"] = [ring_angles(h) for h in p.holes]
        slit_angles = []
        for s in p.slits:
            row = [2 * math.pi]
            for i in range(1, len(s) - 1):
                left = angle_between(sub(s[i - 1], s[i]), sub(s[i + 1], s[i]))
                row.append((left, 2 * math.pi - left))
            row.append(2 * math.pi)
            slit_angles.append(row)
        angles["slits"] = slit_angles
        for ang in angles["outer"] + [a for row in angles["holes"] for a in row]:
            if not (0.0 < ang <= 2 * math.pi):
                errors.append(InvalidPolygon(f"vertex angle {ang} outside (0, 2pi]"))
    return _finish(errors, strict, orientation_ok, simple, angles)


def _dot3(o, a, b):
    return (a[0] - o[0]) * (b[0] - o[0]) + (a[1] - o[1]) * (b[1] - o[1])


def _finish(errors, strict, orientation_ok, simple, angles):
    report = ValidationReport(not errors, orientation_ok, simple, angles, errors)
    if strict:
        report.raise_for_errors()
    return report


def _drop_straight(ring, closed: bool):
    """Remove vertices where the boundary continues straight (angle pi)."""
    pts = list(ring)
    changed = True
    while changed and len(pts) > (3 if closed else 2):
        changed = False
        n = len(pts)
        rng = range(n) if closed else range(1, n - 1)
        for i in rng:
            a, v, b = pts[i - 1], pts[i], pts[(i + 1) % n]
            if sign(orient(a, v, b), 0.0 if isinstance(v[0], Fraction) else 1e-14) == 0 \
                    and _dot3(v, a, b) < 0:
                del pts[i]
                changed = True
                break
    return pts


@dataclass
class CutTriangulation:
    """Triangulation of a polygon cut open along its slits.

    ``points`` are in polygon coordinates; ``triangles`` are CCW index triples.
    ``neighbors[t][i]`` is ``(t2, j)`` for an interior edge or ``None`` when edge
    ``i`` (from corner ``i`` to ``i+1``) lies on the boundary, slit sides included.
    ``origin[v]`` maps a (possibly duplicated) vertex back to its input point.
    """
    points: list
    triangles: list
    neighbors: list
    origin: list
    slit_endpoint: list


def cut_triangulation(p: Polygon) -> CutTriangulation:
    """Constrained triangulation without Steiner points, slits split open."""
    import shapely.geometry as sg
    import triangle

    outer = _drop_straight(p.outer, True)
    holes = [_drop_straight(h, True) for h in p.holes]
    slits = [_drop_straight(s, False) for s in p.slits]

    index: dict = {}
    pts: list = []

    def idx(v):
        if v not in index:
            index[v] = len(pts)
            pts.append(v)
        return index[v]

    segments = []
    for ring in [outer, *holes]:
        ids = [idx(v) for v in ring]
        segments += [(ids[i], ids[(i + 1) % len(ids)]) for i in range(len(ids))]
    slit_edges = set()
    endpoints = set()
    for s in slits:
        ids = [idx(v) for v in s]
        endpoints.update((ids[0], ids[-1]))
        for i in range(len(ids) - 1):
            segments.append((ids[i], ids[i + 1]))
            slit_edges.add(frozenset((ids[i], ids[i + 1])))

    data = {"vertices": np.array([[float(x), float(y)] for x, y in pts]),
            "segments": np.array(segments, dtype=int)}
    if holes:
        data["holes"] = np.array([sg.Polygon([(float(x), float(y)) for x, y in h]).representative_point().coords[0]
                                  for h in holes])
    tri = triangle.triangulate(data, "p")
    if len(tri["vertices"]) != len(pts):
        raise InvalidPolygon("constrained triangulation needed Steiner points; check for crossing edges")
    triangles = []
    for a, b, c in tri["triangles"].tolist():
        if sign(orient(pts[a], pts[b], pts[c])) < 0:
            b, c = c, b
        triangles.append([a, b, c])

    # split the corners around each vertex into fans separated by slit edges
    corner_parent = {}

    def find(x):
        while corner_parent[x] != x:
            corner_parent[x] = corner_parent[corner_parent[x]]
            x = corner_parent[x]
        return x

    for t, tv in enumerate(triangles):
        for k in range(3):
            corner_parent[(t, k)] = (t, k)
    edge_map: dict = {}
    for t, tv in enumerate(triangles):
        for i in range(3):
            key = frozenset((tv[i], tv[(i + 1) % 3]))
            edge_map.setdefault(key, []).append((t, i))
    neighbors = [[None, None, None] for _ in triangles]
    for key, users in edge_map.items():
        if len(users) == 2 and key not in slit_edges:
            (t1, i1), (t2, i2) = users
            neighbors[t1][i1] = (t2, i2)
            neighbors[t2][i2] = (t1, i1)
            # corners at both shared vertices are in the same fan
            for v in key:
                k1 = triangles[t1].index(v)
                k2 = triangles[t2].index(v)
                r1, r2 = find((t1, k1)), find((t2, k2))
                if r1 != r2:
                    corner_parent[r1] = r2
        elif len(users) > 2:
            raise InvalidPolygon("non-manifold triangulation")

    new_id: dict = {}
    points, origin, slit_endpoint = [], [], []
    new_tris = []
    for t, tv in enumerate(triangles):
        row = []
        for k in range(3):
            root = find((t, k))
            key = (tv[k], root)
            if key not in new_id:
                new_id[key] = len(points)
                points.append(pts[tv[k]])
                origin.append(tv[k])
                slit_endpoint.append(tv[k] in endpoints)
            row.append(new_id[key])
        new_tris.append(row)
    return CutTriangulation(points, new_tris, neighbors, origin, slit_endpoint)
