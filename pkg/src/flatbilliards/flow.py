"""Straight-line flow on flat surfaces and billiard orbits in polygons."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from .neighborhood import surface_distance_to_P
from .polygon import Polygon
from .scalar import (add, cross, dot, is_exact, length_to_param, norm, norm2,
                     point_segment_dist2, scale, sign, sub)
from .surface import FlatSurface, double, identity_map
from .unfolding import sweep_segment


class FlowError(ValueError):
    pass


class NonUnitDirection(FlowError):
    pass


class StartOutsideSurface(FlowError):
    pass


MAX_LENGTH = "max_length"
HIT_CONE = "hit_cone"
PERIODIC = "periodic"

POS_TOL = 1e-12
PERIOD_TOL = 1e-9


@dataclass(frozen=True)
class PhasePoint:
    """Base point in the chart of ``triangle`` plus a direction vector.

    Float mode expects unit directions.  Exact mode accepts any nonzero
    rational vector; flow time is then measured in multiples of it.
    """
    triangle: int
    position: tuple
    direction: tuple

    def reversed(self) -> "PhasePoint":
        return PhasePoint(self.triangle, self.position, (-self.direction[0], -self.direction[1]))


class Segment(NamedTuple):
    triangle: int
    entry: tuple
    exit: tuple


@dataclass(frozen=True)
class Termination:
    kind: str
    cone: int | None = None         # vertex class for HIT_CONE
    period: float | None = None     # Euclidean period for PERIODIC
    period_param: object = None     # exact period in flow time
    offset: float | None = None     # transverse mismatch at the return (0 when exact)
    closest: float | None = None    # closest approach to the cone for HIT_CONE


@dataclass
class Trajectory:
    start: PhasePoint
    segments: list
    total_param: object
    speed: float
    termination: Termination
    end: PhasePoint
    projected: list = field(default_factory=list)

    @property
    def total_length(self) -> float:
        return float(self.total_param) * self.speed

    @property
    def is_periodic(self) -> bool:
        return self.termination.kind == PERIODIC

    @property
    def is_singular(self) -> bool:
        return self.termination.kind == HIT_CONE

    @property
    def period(self):
        return self.termination.period

    def reversed_start(self) -> PhasePoint:
        return self.end.reversed()


def _on_edge(s: FlatSurface, t: int, p):
    tri = s.triangles[t]
    tol = s.tol()
    return [i for i in range(3)
            if sign(cross(sub(tri[(i + 1) % 3], tri[i]), sub(p, tri[i])), tol) == 0]


def _inside(s: FlatSurface, t: int, p) -> bool:
    tri = s.triangles[t]
    tol = s.tol()
    return all(sign(cross(sub(tri[(i + 1) % 3], tri[i]), sub(p, tri[i])), tol) >= 0 for i in range(3))


def sector_at_corner(s: FlatSurface, t: int, k: int, d):
    """Find the corner (around the same vertex) whose sector contains ``d``.

    Walks counterclockwise from corner ``k`` of ``t``, rotating ``d`` into each
    chart.  Directions along the first edge of a corner belong to that corner.
    Returns ``(t, k, d)``.
    """
    n_corners = len(s.corners_of_class(s.vertex_classes[t][k]))
    tol = s.tol()
    for _ in range(n_corners + 1):
        tri = s.triangles[t]
        V = tri[k]
        e1, e2 = sub(tri[(k + 1) % 3], V), sub(tri[(k + 2) % 3], V)
        c1, c2 = sign(cross(e1, d), tol), sign(cross(d, e2), tol)
        if (c1 > 0 or (c1 == 0 and dot(e1, d) > 0)) and c2 > 0:
            return t, k, d
        i = (k + 2) % 3
        g = s.gluings[t][i]
        t, j = s.adjacency[t][i]
        d = g.rotate(d)
        k = j
    raise StartOutsideSurface("direction not found in any sector around the vertex")


def normalize_start(s: FlatSurface, start: PhasePoint) -> tuple[PhasePoint, int | None]:
    """Move a start on an edge or vertex into the triangle the flow enters.

    Returns the adjusted phase point and the corner index if it sits on a vertex.
    """
    t, p, d = start.triangle, start.position, start.direction
    if not (0 <= t < s.n_triangles) or not _inside(s, t, p):
        raise StartOutsideSurface(f"position {p} is not in triangle {t}")
    edges = _on_edge(s, t, p)
    if len(edges) >= 2:
        k = [i for i in range(3) if i in edges and (i + 2) % 3 in edges][0]
        t, k, d = sector_at_corner(s, t, k, d)
        return PhasePoint(t, s.triangles[t][k], d), k
    if len(edges) == 1:
        i = edges[0]
        tri = s.triangles[t]
        if sign(cross(sub(tri[(i + 1) % 3], tri[i]), d), s.tol()) < 0:
            g = s.gluings[t][i]
            t2, _ = s.adjacency[t][i]
            return PhasePoint(t2, g.apply(p), g.rotate(d)), None
    return PhasePoint(t, p, d), None


def trace(s: FlatSurface, start: PhasePoint, max_length: float, cone_tol: float = 1e-9,
          max_param=None, record: bool = True) -> Trajectory:
    """Follow the straight-line flow from ``start``.

    Stops when the ray passes within ``cone_tol`` of a cone point (exact
    incidence in exact mode), when it returns to the starting phase point, or
    after ``max_length``.  Passing exactly through a chart vertex that is a
    cone point counts as a hit.
    """
    if max_length is not None and max_length <= 0:
        raise ValueError("max_length must be positive")
    if cone_tol < 0:
        raise ValueError("cone_tol must be nonnegative")
    d = start.direction
    exact = s.exact
    if exact:
        if not (is_exact(d[0]) and is_exact(d[1])):
            d = (Fraction(d[0]), Fraction(d[1]))
        p = start.position
        if not (is_exact(p[0]) and is_exact(p[1])):
            start = PhasePoint(start.triangle, (Fraction(p[0]), Fraction(p[1])), d)
        else:
            start = PhasePoint(start.triangle, p, d)
        if norm2(d) == 0:
            raise NonUnitDirection("direction must be nonzero")
    else:
        d = (float(d[0]), float(d[1]))
        start = PhasePoint(start.triangle, (float(start.position[0]), float(start.position[1])), d)
        if abs(math.hypot(*d) - 1.0) > 1e-12:
            raise NonUnitDirection(f"direction {d} is not a unit vector")

    start, corner = normalize_start(s, start)
    t, p, d = start.triangle, start.position, start.direction
    speed = norm(d)
    dd = norm2(d)
    if max_param is None:
        max_param = length_to_param(max_length, d)
    tol = s.tol()
    cone_tol2 = cone_tol * cone_tol

    p0, d0, t0 = p, d, t
    param = 0 if not exact else Fraction(0)
    segments: list[Segment] = []
    entry_edge = None
    # a start on an edge: never exit back through it immediately
    edges_here = _on_edge(s, t, p)
    if corner is None and len(edges_here) == 1:
        entry_edge = edges_here[0]
    at_vertex = corner
    n_seg = 0
    term = None

    while True:
        tri = s.triangles[t]
        tau_exit, exit_i = None, None
        for i in range(3):
            if i == entry_edge:
                continue
            A = tri[i]
            e = sub(tri[(i + 1) % 3], A)
            cd = cross(e, d)
            if not cd < 0:
                continue
            tau = -cross(e, sub(p, A)) / cd
            if tau < 0:
                tau = 0 * tau
            if tau_exit is None or tau < tau_exit:
                tau_exit, exit_i = tau, i
        if tau_exit is None:
            raise FlowError(f"no exit edge found in triangle {t}")

        event, ev_tau, info = "exit", tau_exit, None
        # vertices met on this segment
        for k in range(3):
            if at_vertex is not None and k == at_vertex:
                continue
            w = sub(tri[k], p)
            along = dot(d, w) / dd
            if not (0 < along <= tau_exit + (0 if exact else 1e-12)):
                continue
            c = cross(d, w)
            vclass = s.vertex_classes[t][k]
            if s.is_cone_class(vclass):
                hit = (c == 0) if exact else (c * c / dd <= cone_tol2)
            else:
                hit = (c == 0) if exact else (c * c / dd <= 1e-24)
            # a vertex wins over the edge exit at the same time
            if hit and along <= ev_tau + (0 if exact else 1e-15) and (event != "vertex" or along < ev_tau):
                event, ev_tau, info = "vertex", along, (k, math.sqrt(float(c * c / dd)))
        # return to the start
        if n_seg >= 1 and t == t0:
            w = sub(p0, p)
            along = dot(d, w) / dd
            lo = 0 if exact else -1e-12
            if lo <= along <= ev_tau + (0 if exact else 1e-12):
                c = cross(d, w)
                if exact:
                    same = c == 0 and d == d0
                else:
                    same = (c * c / dd <= PERIOD_TOL ** 2 and norm2(sub(d, d0)) <= PERIOD_TOL ** 2)
                if same and (event != "vertex" or along <= ev_tau):
                    event, ev_tau, info = "periodic", max(along, 0 * along), math.sqrt(float(c * c / dd))
        if param + ev_tau >= max_param:
            event, ev_tau = "max", max_param - param

        q = add(p, scale(d, ev_tau))
        if record:
            segments.append(Segment(t, p, q))
        n_seg += 1
        param = param + ev_tau

        if event == "max":
            term = Termination(MAX_LENGTH)
            break
        if event == "periodic":
            term = Termination(PERIODIC, period=float(param) * speed, period_param=param, offset=info)
            break
        if event == "vertex":
            k, dist = info
            vclass = s.vertex_classes[t][k]
            if s.is_cone_class(vclass):
                term = Termination(HIT_CONE, cone=vclass, closest=dist)
                break
            # regular vertex: continue straight on the far side of the star
            t, k, d = sector_at_corner(s, t, k, d)
            p = s.triangles[t][k]
            entry_edge = None
            at_vertex = k
            continue
        # cross edge exit_i
        A, B = tri[exit_i], tri[(exit_i + 1) % 3]
        e = sub(B, A)
        mu = dot(sub(q, A), e) / norm2(e)
        g = s.gluings[t][exit_i]
        t2, j = s.adjacency[t][exit_i]
        tri2 = s.triangles[t2]
        a2, b2 = tri2[(j + 1) % 3], tri2[j]  # images of A and B
        p = add(a2, scale(sub(b2, a2), mu))
        d = g.rotate(d)
        t = t2
        entry_edge = j
        at_vertex = None

    end = PhasePoint(t, q, d)
    return Trajectory(start, segments, param, speed, term, end)


def phase_point_at_cone(s: FlatSurface, triangle: int, corner: int, direction) -> PhasePoint:
    """Phase point sitting on the vertex of ``corner`` pointing along ``direction``."""
    t, k, d = sector_at_corner(s, triangle, corner, direction)
    return PhasePoint(t, s.triangles[t][k], d)


def locate_in_sheet(s: FlatSurface, point, direction, sheet: int = 0) -> PhasePoint:
    """Phase point for a polygon point on the given sheet of a double."""
    if sheet == 1:
        point = (point[0], -point[1])
        direction = (direction[0], -direction[1])
    if s.exact:
        point = (Fraction(point[0]), Fraction(point[1]))
    for t in range(s.n_triangles):
        if s.sheets and s.sheets[t] != sheet:
            continue
        if _inside(s, t, point):
            return PhasePoint(t, point, direction)
    raise StartOutsideSurface(f"point {point} is not in the polygon")


_DOUBLE_CACHE: dict = {}


def _double_of(p: Polygon) -> FlatSurface:
    key = id(p)
    hit = _DOUBLE_CACHE.get(key)
    if hit is None or hit[0] is not p:
        hit = (p, double(p))
        _DOUBLE_CACHE[key] = hit
    return hit[1]


def billiard_trace(p: Polygon, point, direction, max_length: float, cone_tol: float = 1e-9,
                   surface: FlatSurface | None = None) -> Trajectory:
    """Billiard orbit in ``p``: a geodesic on the double projected back.

    ``projected`` on the result lists ``(sheet, a, b)`` pieces in polygon
    coordinates; consecutive pieces on different sheets meet at a bounce.
    """
    s = surface if surface is not None else _double_of(p)
    start = locate_in_sheet(s, point, direction, 0)
    traj = trace(s, start, max_length, cone_tol)
    for seg in traj.segments:
        sh = s.sheets[seg.triangle]
        if sh == 0:
            traj.projected.append((0, seg.entry, seg.exit))
        else:
            traj.projected.append((1, (seg.entry[0], -seg.entry[1]), (seg.exit[0], -seg.exit[1])))
    return traj


def min_distance_to_P(s: FlatSurface, traj: Trajectory, below: float | None = None) -> float:
    """Smallest distance from the trajectory to the cone set.

    The nearest cone point to a straight orbit is reached either orthogonally
    from an interior point or from an end point, so every segment is swept
    sideways in both directions and the two ends are handled by visibility.
    With ``below`` the search stops as soon as a distance under it is found.
    """
    if traj.is_singular:
        return float(traj.termination.closest or 0.0)
    # cheap upper bound from each segment's own triangle; sweeps need a finite
    # height limit because a sideways beam may run along a cone-free cylinder
    best2 = math.inf
    for seg in traj.segments:
        tri = s.triangles[seg.triangle]
        for k in range(3):
            if s.is_cone_class(s.vertex_classes[seg.triangle][k]):
                best2 = min(best2, float(point_segment_dist2(tri[k], seg.entry, seg.exit)))
    if not traj.is_periodic:
        for pp in (traj.start, traj.end):
            dist = surface_distance_to_P(s, pp.triangle, pp.position)
            best2 = min(best2, dist * dist)
    if below is not None and best2 < below * below:
        return math.sqrt(best2)

    def done():
        return below is not None and best2 < below * below

    for seg in traj.segments:
        a, b = seg.entry, seg.exit
        L2 = norm2(sub(b, a))
        if sign(L2, 1e-30) == 0:
            continue
        L = math.sqrt(float(L2))
        for P0, P1 in ((a, b), (b, a)):
            lim = math.sqrt(best2) * L * (1 + 1e-9) + 1e-15
            hit = sweep_segment(s, seg.triangle, P0, P1, limit=lim)
            if hit is not None and s.is_cone_class(hit.vertex_class):
                best2 = min(best2, float(hit.height * hit.height / L2))
        if done():
            return math.sqrt(best2)
    return math.sqrt(best2)


def develop(s: FlatSurface, traj: Trajectory):
    """Unfold the triangles crossed by ``traj`` into the chart of its start.

    Returns ``(triangles, polyline)`` with float coordinates; the polyline is
    the straight developed image of the orbit.
    """
    F = identity_map(s.exact)
    tris, line = [], []
    prev = None
    for seg in traj.segments:
        if prev is not None:
            tri = s.triangles[prev.triangle]
            for i in range(3):
                t2, j = s.adjacency[prev.triangle][i]
                e = sub(tri[(i + 1) % 3], tri[i])
                if t2 == seg.triangle and sign(cross(e, sub(prev.exit, tri[i])), 1e-9) == 0:
                    F = F.compose(s.gluings[t2][j])
                    break
        tris.append([tuple(map(float, F.apply(v))) for v in s.triangles[seg.triangle]])
        a, b = F.apply(seg.entry), F.apply(seg.exit)
        if not line:
            line.append(tuple(map(float, a)))
        line.append(tuple(map(float, b)))
        prev = seg
    return tris, line


def trajectory_to_json(s: FlatSurface, traj: Trajectory) -> str:
    def num(v):
        return str(v) if isinstance(v, Fraction) else float(v)

    tris, line = develop(s, traj)
    term = traj.termination
    doc = {
        "segments": [{"triangle": g.triangle, "entry": [num(g.entry[0]), num(g.entry[1])],
                      "exit": [num(g.exit[0]), num(g.exit[1])]} for g in traj.segments],
        "total_length": traj.total_length,
        "termination": {"kind": term.kind, "cone": term.cone, "period": term.period},
        "development": {"triangles": tris, "polyline": line},
    }
    return json.dumps(doc, indent=1)
