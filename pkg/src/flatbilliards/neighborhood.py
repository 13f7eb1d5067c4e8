"""Distances to the cone set and epsilon-neighbourhoods of it."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .scalar import norm2, point_segment_dist2, sub
from .surface import FlatSurface
from .unfolding import unfold_wedges


def surface_distance_to_P(s: FlatSurface, triangle: int, x, limit: float | None = None) -> float:
    """Distance on the surface from point ``x`` (chart of ``triangle``) to the cone set.

    The shortest path to the nearest cone point is a straight segment avoiding
    other cone points, so it shows up as a directly visible vertex in the
    unfolding.  When ``limit`` is given and no cone point is that close the
    result is ``inf`` (the true distance is at least ``limit``).
    """
    bound = math.inf if limit is None else limit
    d2 = _nearest_cone_dist2(s, triangle, x, bound)
    return math.sqrt(float(d2)) if d2 is not None else math.inf


def _nearest_cone_dist2(s: FlatSurface, triangle: int, x, bound: float):
    if not math.isfinite(bound):
        # a finite starting radius is needed to prune: the farthest own vertex
        # is always visible, so its distance bounds the answer
        tri = s.triangles[triangle]
        cones = [tri[k] for k in range(3) if s.is_cone_class(s.vertex_classes[triangle][k])]
        if cones:
            bound2 = max(norm2(sub(v, x)) for v in cones)
        else:
            bound2 = float(s.area) * 1e6
    else:
        bound2 = bound * bound
        if s.exact:
            from fractions import Fraction
            bound2 = Fraction(bound2)
    hits = unfold_wedges(s, triangle, x, bound2, nearest_only=True)
    cone_hits = [h.dist2 for h in hits if s.is_cone_class(h.vertex_class)]
    if not cone_hits:
        if any(not s.is_cone_class(h.vertex_class) for h in hits):
            # only regular vertices in sight: widen with exhaustive search
            hits = unfold_wedges(s, triangle, x, bound2)
            cone_hits = [h.dist2 for h in hits if s.is_cone_class(h.vertex_class)]
        if not cone_hits:
            return None
    return min(cone_hits)


@dataclass
class Sector:
    cone: int          # vertex class
    triangle: int
    corner: int
    angle: float
    radius: float


@dataclass
class ConeNeighborhood:
    """Circular sectors of radius ``epsilon`` around every cone point.

    ``embedded`` says whether the sectors are disjoint and lie inside their
    triangles; then ``area`` is exactly ``sum(theta_i) * eps**2 / 2``.
    Otherwise ``area`` comes from clipping developed disks against triangles.
    """
    epsilon: float
    sectors: dict = field(default_factory=dict)
    area: float = 0.0
    embedded: bool = True
    per_cone_area: dict = field(default_factory=dict)

    def contains(self, s: FlatSurface, triangle: int, x) -> bool:
        if self.epsilon <= 0:
            return False
        return surface_distance_to_P(s, triangle, x, limit=self.epsilon) < self.epsilon


def embedding_radius(s: FlatSurface) -> float:
    """Largest eps for which the cone sectors are embedded and disjoint.

    Minimum over triangle corners at cone points of the distance to the
    opposite edge, and half of every edge joining two cone points.
    """
    r = math.inf
    for t, tri in enumerate(s.triangles):
        for k in range(3):
            if not s.is_cone_class(s.vertex_classes[t][k]):
                continue
            a, b = tri[(k + 1) % 3], tri[(k + 2) % 3]
            r = min(r, math.sqrt(float(point_segment_dist2(tri[k], a, b))))
            for other in (a, b):
                r = min(r, 0.5 * math.sqrt(float(norm2(sub(other, tri[k])))))
    return r


def cone_neighborhood(s: FlatSurface, eps: float, disk_resolution: int = 512) -> ConeNeighborhood:
    """The eps-neighbourhood of the cone set as a sector cover with its area."""
    eps = float(eps)
    nb = ConeNeighborhood(eps)
    if eps <= 0:
        nb.area = 0.0
        return nb
    for c in s.cone_points:
        nb.sectors[c.vertex_class] = [Sector(c.vertex_class, t, k, s.corner_angle(t, k), eps)
                                      for t, k in s.corners_of_class(c.vertex_class)]
    if eps <= embedding_radius(s):
        nb.embedded = True
        for c in s.cone_points:
            nb.per_cone_area[c.vertex_class] = c.angle * eps * eps / 2
        nb.area = sum(nb.per_cone_area.values())
        return nb
    nb.embedded = False
    nb.area = _clipped_area(s, eps, disk_resolution)
    return nb


def _clipped_area(s: FlatSurface, eps: float, resolution: int) -> float:
    """Area of {d(x, P) < eps} by clipping developed disks to each triangle.

    Disks are centred at every cone point visible from inside the triangle
    within eps of it, found by unfolding from the triangle's vertices and
    edge points.  Approximate when eps exceeds the embedding radius.
    """
    import shapely
    import shapely.geometry as sg

    total = 0.0
    for t, tri in enumerate(s.triangles):
        poly = sg.Polygon([(float(x), float(y)) for x, y in tri])
        centers = set()
        cx = sum(float(p[0]) for p in tri) / 3
        cy = sum(float(p[1]) for p in tri) / 3
        # corners pulled slightly inward: unfolding from a vertex needs a sector
        probes = [(float(x) + 1e-9 * (cx - float(x)), float(y) + 1e-9 * (cy - float(y))) for x, y in tri]
        for i in range(3):
            a, b = tri[i], tri[(i + 1) % 3]
            for m in np.linspace(0.1, 0.9, 5):
                probes.append((a[0] + (b[0] - a[0]) * m, a[1] + (b[1] - a[1]) * m))
        probes.append((cx, cy))
        for q in probes:
            lim = float(eps + math.sqrt(float(max(norm2(sub(v, q)) for v in tri)))) ** 2
            for h in unfold_wedges(s.as_float() if s.exact else s, t,
                                   (float(q[0]), float(q[1])), lim):
                if s.is_cone_class(h.vertex_class):
                    centers.add((round(float(h.position[0]), 12), round(float(h.position[1]), 12)))
        if not centers:
            continue
        disks = [sg.Point(c).buffer(eps, quad_segs=resolution // 4) for c in centers]
        total += shapely.union_all(disks).intersection(poly).area
    return total
