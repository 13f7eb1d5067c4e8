"""Developing triangles into the plane around a point or along a segment.

Two searches share the same idea: follow a family of straight rays out of a
source and unfold each triangle the rays enter into the source chart.

* :func:`unfold_wedges` shoots rays from a point (a regular point or a corner
  of a cone point) and reports every vertex that is directly visible.  It
  gives distances to the cone set and saddle connections.
* :func:`sweep_segment` moves a segment sideways (parallel rays orthogonal to
  it) and reports the first vertex it meets.  It gives strip widths.

Everything is exact on Fraction input.
"""
from __future__ import annotations

from dataclasses import dataclass

from .scalar import cross, dot, norm2, point_segment_dist2, sign, sub
from .surface import FlatSurface, Gluing, identity_map


class SearchLimitExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class VertexHit:
    dist2: object        # squared distance from the source
    vertex_class: int
    position: tuple      # developed position in the source chart
    triangle: int
    corner: int
    develop: Gluing      # chart of ``triangle`` -> source chart


def _clip_edge_to_wedge(O, P, Q, r, l):
    """Sub-segment of PQ inside the closed wedge between rays ``r`` and ``l``."""
    e = sub(Q, P)
    lo, hi = 0, 1
    for a0, a1 in ((cross(r, sub(P, O)), cross(r, e)), (cross(sub(P, O), l), cross(e, l))):
        # a0 + mu * a1 >= 0
        if a1 == 0:
            if a0 < 0:
                return None
            continue
        mu = -a0 / a1
        if a1 > 0:
            lo = max(lo, mu)
        else:
            hi = min(hi, mu)
    if lo > hi:
        return None
    return ((P[0] + lo * e[0], P[1] + lo * e[1]), (P[0] + hi * e[0], P[1] + hi * e[1]))


def unfold_wedges(s: FlatSurface, t0: int, origin, limit2, corner=None, nearest_only=False,
                  max_nodes: int = 2_000_000) -> list[VertexHit]:
    """Vertices visible from ``origin`` (in the chart of ``t0``) within ``sqrt(limit2)``.

    ``origin`` is interior to ``t0``, on one of its edges, or (with ``corner``)
    the vertex at that corner, in which case only rays inside that corner's
    sector are followed.  A ray ending exactly at a vertex stops there; rays
    through regular (angle ``2*pi``) vertices are not continued.
    With ``nearest_only`` the search radius shrinks to the best hit so far.
    """
    tri0 = s.triangles[t0]
    ident = identity_map(s.exact)
    hits: list[VertexHit] = []
    stack = []
    bound = [limit2]

    def report(V, vclass, t, k, F):
        d2 = norm2(sub(V, origin))
        if d2 <= bound[0]:
            hits.append(VertexHit(d2, vclass, V, t, k, F))
            if nearest_only:
                bound[0] = d2

    def push_edge(t, i, F, P, Q, r, l):
        seg = _clip_edge_to_wedge(origin, P, Q, r, l)
        if seg is None:
            return
        if point_segment_dist2(origin, seg[0], seg[1]) > bound[0]:
            return
        t2, j = s.adjacency[t][i]
        F2 = F.compose(s.gluings[t2][j])
        stack.append((t2, j, F2, r, l))

    if corner is not None:
        k = corner
        A, B = tri0[(k + 1) % 3], tri0[(k + 2) % 3]
        report(A, s.vertex_classes[t0][(k + 1) % 3], t0, (k + 1) % 3, ident)
        report(B, s.vertex_classes[t0][(k + 2) % 3], t0, (k + 2) % 3, ident)
        push_edge(t0, (k + 1) % 3, ident, A, B, sub(A, origin), sub(B, origin))
    else:
        roots = [(t0, ident)]
        on_edge = [i for i in range(3)
                   if sign(cross(sub(tri0[(i + 1) % 3], tri0[i]), sub(origin, tri0[i])), s.tol()) == 0]
        skip = {(t0, i) for i in on_edge}
        for i in on_edge:
            t2, j = s.adjacency[t0][i]
            roots.append((t2, s.gluings[t2][j]))
            skip.add((t2, j))
        for t, F in roots:
            tri = s.triangles[t]
            for k in range(3):
                V = F.apply(tri[k])
                if sign(norm2(sub(V, origin)), s.tol() ** 2) == 0:
                    hits.append(VertexHit(norm2(sub(V, origin)), s.vertex_classes[t][k], V, t, k, F))
                    if nearest_only:
                        bound[0] = 0
                    continue
                report(V, s.vertex_classes[t][k], t, k, F)
        if nearest_only and sign(bound[0]) == 0:
            return hits
        for t, F in roots:
            tri = s.triangles[t]
            for i in range(3):
                if (t, i) in skip:
                    continue
                P, Q = F.apply(tri[i]), F.apply(tri[(i + 1) % 3])
                push_edge(t, i, F, P, Q, sub(P, origin), sub(Q, origin))

    nodes = 0
    while stack:
        t, j, F, r, l = stack.pop()
        nodes += 1
        if nodes > max_nodes:
            raise SearchLimitExceeded("wedge unfolding exceeded its node budget")
        tri = s.triangles[t]
        A = F.apply(tri[(j + 1) % 3])
        B = F.apply(tri[j])
        kv = (j + 2) % 3
        V = F.apply(tri[kv])
        w = sub(V, origin)
        sr, sl = cross(r, w), cross(w, l)
        if sr > 0 and sl > 0:
            report(V, s.vertex_classes[t][kv], t, kv, F)
            push_edge(t, (j + 1) % 3, F, A, V, r, w)
            push_edge(t, kv, F, V, B, w, l)
        elif sr <= 0:
            push_edge(t, kv, F, V, B, r, l)
        else:
            push_edge(t, (j + 1) % 3, F, A, V, r, l)
    return hits


@dataclass(frozen=True)
class SweepHit:
    height: object       # cross(d, V - P0): |d| times the true height
    along: object        # dot(d, V - P0): |d| times the distance along the segment
    vertex_class: int
    position: tuple
    triangle: int
    corner: int


def sweep_segment(s: FlatSurface, t0: int, P0, P1, limit=None, max_nodes: int = 2_000_000):
    """First cone point met when segment ``P0 P1`` of triangle ``t0`` slides to its left.

    Returns the lowest :class:`SweepHit` (heights scaled by ``|P1 - P0|``) whose
    foot lies on the closed segment, or ``None`` if none is found below
    ``limit`` (also a scaled height).  Vertices on the segment itself (height
    0) are ignored.
    """
    d = sub(P1, P0)
    D = norm2(d)
    ident = identity_map(s.exact)
    best = [limit, None]

    def u_of(X):
        return dot(d, sub(X, P0))

    def h_of(X):
        return cross(d, sub(X, P0))

    def consider(X, t, k):
        # regular vertices do not stop the beam; it splits around them anyway
        if not s.is_cone_class(s.vertex_classes[t][k]):
            return
        h = h_of(X)
        if sign(h, 1e-12) <= 0:
            return
        if best[0] is None or h < best[0]:
            best[0] = h
            best[1] = SweepHit(h, u_of(X), s.vertex_classes[t][k], X, t, k)

    stack = []

    def push(t, i, F, P, Q, lo, hi):
        # beam crosses edge P->Q (u decreasing from P to Q) for u in [lo, hi]
        if not lo < hi:
            return
        uP, uQ = u_of(P), u_of(Q)
        hP, hQ = h_of(P), h_of(Q)
        span = uP - uQ
        hl = hP + (uP - lo) / span * (hQ - hP)
        hh = hP + (uP - hi) / span * (hQ - hP)
        if best[0] is not None and min(hl, hh) >= best[0]:
            return
        t2, j = s.adjacency[t][i]
        stack.append((t2, j, F.compose(s.gluings[t2][j]), lo, hi))

    tri = s.triangles[t0]
    for k in range(3):
        u = u_of(tri[k])
        if 0 <= u <= D:
            consider(tri[k], t0, k)
    for i in range(3):
        A, B = tri[i], tri[(i + 1) % 3]
        if sign(dot(sub(B, A), d)) < 0:
            lo, hi = max(u_of(B), 0), min(u_of(A), D)
            push(t0, i, ident, A, B, lo, hi)

    nodes = 0
    while stack:
        t, j, F, lo, hi = stack.pop()
        nodes += 1
        if nodes > max_nodes:
            raise SearchLimitExceeded("segment sweep exceeded its node budget")
        tri = s.triangles[t]
        P = F.apply(tri[(j + 1) % 3])
        Q = F.apply(tri[j])
        kv = (j + 2) % 3
        V = F.apply(tri[kv])
        uV = u_of(V)
        if lo <= uV <= hi:
            consider(V, t, kv)
        if uV > lo:
            push(t, kv, F, V, Q, lo, min(uV, hi))
        if uV < hi:
            push(t, (j + 1) % 3, F, P, V, max(uV, lo), hi)
    return best[1]
