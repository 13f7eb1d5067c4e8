"""Flat surfaces with cone points, built by doubling polygons."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .polygon import InvalidPolygon, Polygon, cut_triangulation, validate_polygon
from .scalar import (TAU_LEN, add, angle_between, cross, dot, norm2, orient,
                     parse_number, pi_multiple, sign, sub)


class SurfaceError(ValueError):
    pass


@dataclass(frozen=True)
class Gluing:
    """Orientation-preserving isometry ``x -> R x + b`` between two charts.

    ``R`` is the rotation with cosine ``c`` and sine ``s``.  For doubles of
    rational polygons all four numbers are rational.
    """
    c: object
    s: object
    bx: object
    by: object

    def apply(self, p):
        x, y = p
        return (self.c * x - self.s * y + self.bx, self.s * x + self.c * y + self.by)

    def rotate(self, v):
        x, y = v
        return (self.c * x - self.s * y, self.s * x + self.c * y)

    def inverse(self) -> "Gluing":
        # R^T (x - b)
        c, s = self.c, self.s
        bx = -(c * self.bx + s * self.by)
        by = -(-s * self.bx + c * self.by)
        return Gluing(c, -s, bx, by)

    def compose(self, other: "Gluing") -> "Gluing":
        """``self`` after ``other``."""
        c = self.c * other.c - self.s * other.s
        s = self.s * other.c + self.c * other.s
        bx, by = self.apply((other.bx, other.by))
        return Gluing(c, s, bx, by)

    @property
    def angle(self) -> float:
        return math.atan2(float(self.s), float(self.c))


def identity_map(exact: bool) -> Gluing:
    one, zero = (Fraction(1), Fraction(0)) if exact else (1.0, 0.0)
    return Gluing(one, zero, zero, zero)


@dataclass(frozen=True)
class ConePoint:
    vertex_class: int
    angle: float
    angle_over_pi: object  # Fraction when the angle is a rational multiple of pi
    position: tuple        # location in polygon coordinates (for doubles)
    pi_over_n: bool = False

    @property
    def curvature(self) -> float:
        return 2 * math.pi - self.angle


@dataclass
class FlatSurface:
    """Triangulated flat surface with edge gluings.

    ``triangles[t]`` holds three CCW points in the chart of ``t``;
    ``vertex_classes[t][k]`` names the identified vertex of corner ``k``;
    ``adjacency[t][i] = (t2, j)`` glues edge ``i`` (corner ``i`` to ``i+1``) of
    ``t`` to edge ``j`` of ``t2`` via ``gluings[t][i]`` (chart of ``t`` to chart
    of ``t2``).
    """
    triangles: list
    vertex_classes: list
    adjacency: list
    gluings: list
    cone_points: list
    class_angles: list
    exact: bool
    sheets: list = field(default_factory=list)
    source: object = None

    def __post_init__(self):
        self._cone_of_class = {c.vertex_class: i for i, c in enumerate(self.cone_points)}

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @property
    def area(self):
        return sum(orient(*tri) for tri in self.triangles) / 2

    def euler_characteristic(self) -> int:
        V = len(self.class_angles)
        E = sum(1 for t in range(self.n_triangles) for i in range(3)) // 2
        F = self.n_triangles
        return V - E + F

    def curvature_sum(self) -> float:
        return sum(2 * math.pi - c.angle for c in self.cone_points)

    def is_cone_class(self, vclass: int) -> bool:
        return vclass in self._cone_of_class

    def cone_index(self, vclass: int):
        return self._cone_of_class.get(vclass)

    def corner_angle(self, t: int, k: int) -> float:
        tri = self.triangles[t]
        return angle_between(sub(tri[(k + 1) % 3], tri[k]), sub(tri[(k + 2) % 3], tri[k]))

    def tol(self) -> float:
        return 0.0 if self.exact else 1e-12

    def corners_of_class(self, vclass: int) -> list:
        return [(t, k) for t in range(self.n_triangles) for k in range(3)
                if self.vertex_classes[t][k] == vclass]

    def check(self, tol_len: float = TAU_LEN) -> None:
        """Verify the gluing invariants; raises :class:`SurfaceError`."""
        for t in range(self.n_triangles):
            for i in range(3):
                t2, j = self.adjacency[t][i]
                if self.adjacency[t2][j] != (t, i):
                    raise SurfaceError(f"edge ({t},{i}) is not glued symmetrically")
                g = self.gluings[t][i]
                p0, p1 = self.triangles[t][i], self.triangles[t][(i + 1) % 3]
                q1, q0 = self.triangles[t2][j], self.triangles[t2][(j + 1) % 3]
                for a, b in ((g.apply(p0), q0), (g.apply(p1), q1)):
                    if float(norm2(sub(a, b))) > tol_len ** 2:
                        raise SurfaceError(f"gluing of edge ({t},{i}) does not map endpoints")
                back = self.gluings[t2][j].compose(g)
                if abs(float(back.c) - 1) > tol_len or abs(float(back.bx)) > tol_len or abs(float(back.by)) > tol_len:
                    raise SurfaceError(f"gluings of edge ({t},{i}) are not mutually inverse")

    def as_float(self) -> "FlatSurface":
        """Float copy (cached); returns ``self`` when already in float mode."""
        if not self.exact:
            return self
        cached = getattr(self, "_float_copy", None)
        if cached is None:
            f = float
            tris = [tuple((f(x), f(y)) for x, y in tri) for tri in self.triangles]
            gl = [[Gluing(f(g.c), f(g.s), f(g.bx), f(g.by)) for g in row] for row in self.gluings]
            cones = [ConePoint(c.vertex_class, c.angle, c.angle_over_pi,
                               (f(c.position[0]), f(c.position[1])), c.pi_over_n) for c in self.cone_points]
            cached = FlatSurface(tris, self.vertex_classes, self.adjacency, gl, cones,
                                 self.class_angles, False, self.sheets, self.source)
            self._float_copy = cached
        return cached

    # --- serialization -------------------------------------------------
    def to_json(self) -> str:
        def num(v):
            if isinstance(v, Fraction):
                return str(v) if v.denominator != 1 else str(v.numerator)
            return repr(float(v))

        gl = []
        for t in range(self.n_triangles):
            for i in range(3):
                t2, j = self.adjacency[t][i]
                if (t, i) < (t2, j):
                    g = self.gluings[t][i]
                    gl.append({"edge": [t, i], "partner": [t2, j],
                               "rotation": [num(g.c), num(g.s)], "translation": [num(g.bx), num(g.by)]})
        cones = []
        for c in self.cone_points:
            cones.append({"id": c.vertex_class,
                          "angle_over_pi": str(c.angle_over_pi) if c.angle_over_pi is not None else None,
                          "angle": c.angle, "position": [num(c.position[0]), num(c.position[1])],
                          "pi_over_n": c.pi_over_n})
        doc = {"exact": self.exact, "area": num(self.area),
               "triangles": [[[num(x), num(y)] for x, y in tri] for tri in self.triangles],
               "vertex_classes": self.vertex_classes, "sheets": self.sheets,
               "gluings": gl, "cone_points": cones, "class_angles": self.class_angles}
        return json.dumps(doc, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "FlatSurface":
        doc = json.loads(text)
        exact = bool(doc["exact"])
        tris = [tuple((parse_number(x, exact), parse_number(y, exact)) for x, y in tri) for tri in doc["triangles"]]
        n = len(tris)
        adjacency = [[None] * 3 for _ in range(n)]
        gluings = [[None] * 3 for _ in range(n)]
        for g in doc["gluings"]:
            (t, i), (t2, j) = g["edge"], g["partner"]
            c, s = (parse_number(v, exact) for v in g["rotation"])
            bx, by = (parse_number(v, exact) for v in g["translation"])
            fwd = Gluing(c, s, bx, by)
            adjacency[t][i] = (t2, j)
            adjacency[t2][j] = (t, i)
            gluings[t][i] = fwd
            gluings[t2][j] = fwd.inverse()
        cones = [ConePoint(c["id"], c["angle"],
                           Fraction(c["angle_over_pi"]) if c["angle_over_pi"] is not None else None,
                           tuple(parse_number(v, exact) for v in c["position"]), c.get("pi_over_n", False))
                 for c in doc["cone_points"]]
        return cls(tris, [list(v) for v in doc["vertex_classes"]], adjacency, gluings, cones,
                   list(doc["class_angles"]), exact, list(doc.get("sheets", [])))


def edge_gluing(p0, p1, q0, q1) -> Gluing:
    """Rotation+translation taking ``p0 -> q0`` and ``p1 -> q1`` (equal lengths)."""
    e, f = sub(p1, p0), sub(q1, q0)
    n = norm2(e)
    c = dot(e, f) / n
    s = cross(e, f) / n
    g = Gluing(c, s, 0, 0)
    rp = g.rotate(p0)
    return Gluing(c, s, q0[0] - rp[0], q0[1] - rp[1])


def _mirror(p):
    return (p[0], -p[1])


def double(p: Polygon) -> FlatSurface:
    """Glue a polygon to its mirror image along every boundary edge.

    A vertex of interior angle ``a`` becomes a cone point of angle ``2a``;
    slit endpoints become cone points of angle ``4*pi``.  Sheet 0 uses polygon
    coordinates, sheet 1 the mirrored chart ``(x, -y)`` so that both sheets are
    positively oriented.
    """
    report = validate_polygon(p)
    if not report.valid:
        raise InvalidPolygon(f"cannot double an invalid polygon: {report.errors[0]}") from report.errors[0]
    cut = cut_triangulation(p)
    nT, nV = len(cut.triangles), len(cut.points)

    triangles, vclass_raw, sheets = [], [], []
    for tv in cut.triangles:
        triangles.append(tuple(cut.points[v] for v in tv))
        vclass_raw.append(list(tv))
        sheets.append(0)
    for tv in cut.triangles:
        a, b, c = tv
        # reversed corner order keeps the mirrored triangle counterclockwise
        triangles.append(tuple(_mirror(cut.points[v]) for v in (a, c, b)))
        vclass_raw.append([nV + a, nV + c, nV + b])
        sheets.append(1)

    def mirror_edge(i):
        return 2 - i

    adjacency = [[None] * 3 for _ in range(2 * nT)]
    parent = list(range(2 * nV))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for t in range(nT):
        for i in range(3):
            nb = cut.neighbors[t][i]
            if nb is not None:
                t2, j = nb
                adjacency[t][i] = (t2, j)
                adjacency[nT + t][mirror_edge(i)] = (nT + t2, mirror_edge(j))
            else:
                adjacency[t][i] = (nT + t, mirror_edge(i))
                adjacency[nT + t][mirror_edge(i)] = (t, i)
                for v in (cut.triangles[t][i], cut.triangles[t][(i + 1) % 3]):
                    ra, rb = find(v), find(nV + v)
                    if ra != rb:
                        parent[ra] = rb

    gluings = [[None] * 3 for _ in range(2 * nT)]
    for t in range(2 * nT):
        for i in range(3):
            t2, j = adjacency[t][i]
            p0, p1 = triangles[t][i], triangles[t][(i + 1) % 3]
            q1, q0 = triangles[t2][j], triangles[t2][(j + 1) % 3]
            if float(norm2(sub(p1, p0))) - float(norm2(sub(q1, q0))) > TAU_LEN:
                raise SurfaceError("glued edges differ in length")
            gluings[t][i] = edge_gluing(p0, p1, q0, q1)

    roots = sorted({find(v) for v in range(2 * nV)})
    relabel = {r: k for k, r in enumerate(roots)}
    vertex_classes = [[relabel[find(v)] for v in row] for row in vclass_raw]
    class_angles = [0.0] * len(roots)
    class_pos = [None] * len(roots)
    for t in range(2 * nT):
        tri = triangles[t]
        for k in range(3):
            ang = angle_between(sub(tri[(k + 1) % 3], tri[k]), sub(tri[(k + 2) % 3], tri[k]))
            class_angles[vertex_classes[t][k]] += ang
            if class_pos[vertex_classes[t][k]] is None:
                raw = vclass_raw[t][k]
                class_pos[vertex_classes[t][k]] = cut.points[raw % nV]

    cone_points = []
    for vc, ang in enumerate(class_angles):
        if abs(ang - 2 * math.pi) < 1e-9:
            continue
        q = pi_multiple(ang)
        # polygon angle pi/n  <=>  cone angle 2*pi/n
        pi_over_n = q is not None and (q / 2).numerator == 1
        cone_points.append(ConePoint(vc, ang, q, class_pos[vc], pi_over_n))
    surf = FlatSurface(triangles, vertex_classes, adjacency, gluings, cone_points,
                       class_angles, p.exact, sheets, p)
    return surf


def gauss_bonnet_defect(s: FlatSurface) -> float:
    """``sum(2*pi - theta_i) - 2*pi*chi``; zero for a consistent surface."""
    return s.curvature_sum() - 2 * math.pi * s.euler_characteristic()
