"""Strips, maximal cylinders and saddle connections on flat surfaces.

A periodic geodesic that misses the cone set sits inside a family of parallel
periodic geodesics of the same length.  The family is bounded on each side by
a closed chain of saddle connections, so every cylinder can be found by
walking off a short saddle connection and checking whether the parallel orbit
closes up.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .flow import (PERIODIC, PhasePoint, Trajectory, develop, min_distance_to_P,
                   phase_point_at_cone, trace)
from .scalar import (add, cross, dot, is_exact, norm, norm2, pi_multiple, rot90, scale,
                     sign, sqrt_exact, sub)
from .surface import FlatSurface
from .unfolding import sweep_segment, unfold_wedges


class CylinderError(ValueError):
    pass


class CoreNotPeriodic(CylinderError):
    pass


class EpsNonPositive(CylinderError):
    pass


class NoIntersection(CylinderError):
    pass


# slack on the area bound for the sideways sweeps
_WIDTH_SLACK = 1 + 1e-6


@dataclass
class Strip:
    """A periodic core with its maximal sideways extent.

    ``width_minus``/``width_plus`` are Euclidean; ``param_minus``/``param_plus``
    are the same offsets as multiples of ``|direction|`` (exact on rational input).
    ``pieces`` lists ``(triangle, entry, exit, minus, plus)`` per core segment.
    """
    core: Trajectory
    width_minus: float
    width_plus: float
    param_minus: object
    param_plus: object
    pieces: list
    boundary_minus: list
    boundary_plus: list

    @property
    def width(self) -> float:
        return self.width_minus + self.width_plus


@dataclass
class SaddleConnection:
    start: int              # vertex class
    end: int
    holonomy: tuple         # vector in the chart of ``triangle``
    length: float
    triangle: int
    corner: int

    @property
    def direction(self) -> float:
        return math.atan2(float(self.holonomy[1]), float(self.holonomy[0]))


@dataclass
class Cylinder:
    circumference: float
    width: float
    direction: tuple        # canonical direction class representative
    core: Trajectory        # central geodesic
    boundary_cones: tuple   # (one side, other side) lists of vertex classes
    key: tuple = ()
    width_sq: object = None  # exact width squared when available
    pi_over_n_boundary: list = field(default_factory=list)

    def distance_to_P(self) -> float:
        return self.width / 2


def line_multiplicity(s: FlatSurface) -> int:
    """How many times an immersed cylinder can cover a point of ``s``.

    A parallel family meets a point once per line direction in the orbit of
    the holonomy group.  The group generated by the gluing rotations contains
    the holonomy, so its order (counted on lines) bounds this.
    """
    n = 1
    for row in s.gluings:
        for g in row:
            q = pi_multiple(g.angle % (2 * math.pi))
            if q is None:
                raise CylinderError("gluing rotation is not a rational multiple of pi")
            n = math.lcm(n, (q / 2).denominator)
    return n // 2 if n % 2 == 0 else n


def _segment_tau(s: FlatSurface, seg, d_norm2):
    """Flow time spent on ``seg`` (exact whenever the surface is)."""
    r = norm2(sub(seg.exit, seg.entry)) / d_norm2
    if s.exact:
        root = sqrt_exact(r)
        if root is not None:
            return root
    return math.sqrt(float(r))


def extend_strip(s: FlatSurface, core: Trajectory) -> Strip:
    """Widen a periodic non-singular core to the maximal parallel strip.

    Each core segment is slid sideways in its own chart until it meets a cone
    point.  A cylinder of width ``w`` around a core of length ``L`` covers
    each point at most ``m`` times (see :func:`line_multiplicity`), so
    ``w * L <= m * area`` caps the search.
    """
    if not core.is_periodic:
        raise CoreNotPeriodic(f"core terminated with {core.termination.kind}")
    d0 = core.start.direction
    dd = norm2(d0)
    speed = norm(d0)
    L = core.period
    cap = line_multiplicity(s) * float(s.area) / L * _WIDTH_SLACK
    best = {+1: None, -1: None}
    hits = {+1: [], -1: []}
    pieces = []
    for seg in core.segments:
        seglen2 = norm2(sub(seg.exit, seg.entry))
        if sign(seglen2, 1e-30) == 0:
            continue
        tau = _segment_tau(s, seg, dd)
        seglen = math.sqrt(float(seglen2))
        row = []
        for side, (P0, P1) in ((+1, (seg.entry, seg.exit)), (-1, (seg.exit, seg.entry))):
            hit = sweep_segment(s, seg.triangle, P0, P1, limit=cap * seglen)
            if hit is None:
                row.append(None)
                continue
            hp = hit.height / tau / dd  # offset as a multiple of |d|
            row.append(hp)
            cur = best[side]
            if cur is None or _lt(s, hp, cur):
                best[side] = hp
                hits[side] = [hit.vertex_class]
            elif _eq(s, hp, cur):
                hits[side].append(hit.vertex_class)
        pieces.append((seg.triangle, seg.entry, seg.exit, row[1], row[0]))
    if best[+1] is None or best[-1] is None:
        raise CoreNotPeriodic("no cone point bounds the strip; surface area bound violated")
    pm, pp = best[-1], best[+1]
    return Strip(core, float(pm) * speed, float(pp) * speed, pm, pp,
                 pieces, sorted(set(hits[-1])), sorted(set(hits[+1])))


def _lt(s, a, b):
    return a < b if s.exact else a < b - 1e-12 * max(1.0, abs(float(b)))


def _eq(s, a, b):
    return a == b if s.exact else abs(float(a) - float(b)) <= 1e-9 * max(1.0, abs(float(b)))


def shift_sideways(s: FlatSurface, pp: PhasePoint, offset) -> PhasePoint | None:
    """Move ``pp`` to its left by ``offset`` times ``|direction|``.

    Returns ``None`` when the transverse path runs into a cone point.
    """
    if offset == 0:
        return pp
    d = pp.direction
    v = rot90(d) if offset > 0 else scale(rot90(d), -1)
    amount = offset if offset > 0 else -offset
    if not s.exact:
        # float tracing wants unit vectors; d is already unit
        amount = float(amount)
    tr = trace(s, PhasePoint(pp.triangle, pp.position, v), None, max_param=amount, record=False)
    if tr.is_singular:
        return None
    ve = tr.end.direction
    # undo the quarter turn in the end chart
    de = (ve[1], -ve[0]) if offset > 0 else (-ve[1], ve[0])
    return PhasePoint(tr.end.triangle, tr.end.position, de)


def _crossing_key(s: FlatSurface, core: Trajectory) -> tuple:
    """Chart-independent label of a closed geodesic.

    Its smallest edge crossing ``(triangle, x, y)`` together with the chart
    direction there, taken up to sign.  Distinct closed geodesics may share a
    crossing point but not a point and a line through it.
    """
    pts = []
    segs = core.segments
    for n, seg in enumerate(segs):
        v = sub(seg.exit, seg.entry)
        if sign(norm2(v), 1e-30) == 0:
            continue
        u = _primitive(v)
        if u[1] < 0 or (u[1] == 0 and u[0] < 0):
            u = (-u[0], -u[1])
        if not s.exact:
            u = (round(u[0], 6), round(u[1], 6))
        if n > 0:
            pts.append((seg.triangle, seg.entry, u))
        if n < len(segs) - 1:
            pts.append((seg.triangle, seg.exit, u))
    if s.exact:
        return min((t, p[0], p[1], u) for t, p, u in pts)
    return min((t, round(float(p[0]), 7), round(float(p[1]), 7), u) for t, p, u in pts)


def _primitive(v):
    """Smallest integer vector parallel to a rational ``v`` (float: unit vector)."""
    if is_exact(v[0]) and is_exact(v[1]):
        x, y = Fraction(v[0]), Fraction(v[1])
        den = math.lcm(x.denominator, y.denominator)
        a, b = int(x * den), int(y * den)
        g = math.gcd(a, b)
        return (a // g, b // g)
    n = math.hypot(float(v[0]), float(v[1]))
    return (float(v[0]) / n, float(v[1]) / n)


def direction_class(s: FlatSurface, core: Trajectory) -> tuple:
    """Canonical direction of a core, taken mod pi and in polygon coordinates.

    On a double the sheet-1 charts are mirrored, so their directions are
    mirrored back before comparing; the smallest angle in ``[0, pi)`` wins.
    """
    cands = []
    for seg in core.segments:
        v = sub(seg.exit, seg.entry)
        if sign(norm2(v), 1e-30) == 0:
            continue
        if s.sheets and s.sheets[seg.triangle] == 1:
            v = (v[0], -v[1])
        if v[1] < 0 or (v[1] == 0 and v[0] < 0):
            v = (-v[0], -v[1])
        ang = math.atan2(float(v[1]), float(v[0]))
        cands.append((round(ang, 12), v))
    _, v = min(cands, key=lambda c: c[0])
    return _primitive(v)


def _pi_over_n(s: FlatSurface, classes) -> list:
    out = []
    for vc in classes:
        i = s.cone_index(vc)
        if i is not None and s.cone_points[i].pi_over_n:
            out.append(vc)
    return out


def cylinder_from_core(s: FlatSurface, core: Trajectory) -> Cylinder:
    """Maximal cylinder containing a periodic core, described by its central geodesic."""
    strip = extend_strip(s, core)
    mid = (strip.param_plus - strip.param_minus) / 2
    start = shift_sideways(s, core.start, mid)
    if start is None:
        raise CoreNotPeriodic("central geodesic runs into a cone point")
    centre = trace(s, start, core.period * 1.5 + 1.0)
    if not centre.is_periodic:
        raise CoreNotPeriodic("central geodesic did not close up")
    width_sq = None
    if s.exact:
        width_sq = (strip.param_plus + strip.param_minus) ** 2 * norm2(core.start.direction)
    bm, bp = strip.boundary_minus, strip.boundary_plus
    return Cylinder(circumference=centre.period, width=strip.width,
                    direction=direction_class(s, centre), core=centre,
                    boundary_cones=(bm, bp), key=_crossing_key(s, centre),
                    width_sq=width_sq, pi_over_n_boundary=_pi_over_n(s, set(bm) | set(bp)))


def enumerate_saddle_connections(s: FlatSurface, l_max) -> list[SaddleConnection]:
    """Every saddle connection of length at most ``l_max``, once per direction of travel.

    Rays out of each cone point are unfolded corner by corner; a cone vertex
    seen directly is the far end of a connection.
    """
    if l_max <= 0:
        raise ValueError("l_max must be positive")
    lim2 = Fraction(l_max) ** 2 if s.exact else float(l_max) ** 2
    out = []
    for c in s.cone_points:
        for t, k in s.corners_of_class(c.vertex_class):
            V = s.triangles[t][k]
            for h in unfold_wedges(s, t, V, lim2, corner=k):
                if not s.is_cone_class(h.vertex_class) or sign(h.dist2, 1e-24) == 0:
                    continue
                hol = sub(h.position, V)
                # rays along the second edge of a corner belong to the next corner
                e2 = sub(s.triangles[t][(k + 2) % 3], V)
                if sign(cross(hol, e2), s.tol()) == 0 and dot(hol, e2) > 0:
                    continue
                out.append(SaddleConnection(c.vertex_class, h.vertex_class, hol,
                                            math.sqrt(float(h.dist2)), t, k))
    out.sort(key=lambda sc: (sc.length, sc.start, sc.direction))
    return out


def _connection_probes(s: FlatSurface, sc: SaddleConnection, push):
    """Phase points just beside the midpoint of a connection, one per side."""
    pp = phase_point_at_cone(s, sc.triangle, sc.corner, sc.holonomy)
    half = Fraction(1, 2) if s.exact else 0.5
    d = pp.direction
    if not s.exact:
        n = math.hypot(*d)
        d = (d[0] / n, d[1] / n)
        half = sc.length / 2
        pp = PhasePoint(pp.triangle, pp.position, d)
    tr = trace(s, pp, None, max_param=half, record=False)
    if tr.is_singular:
        return []
    mid = tr.end
    out = []
    for sgn in (+1, -1):
        q = shift_sideways(s, mid, push * sgn)
        if q is not None:
            out.append(q)
    return out


def enumerate_maximal_cylinders(s: FlatSurface, eps, l_max=None) -> list[Cylinder]:
    """Maximal cylinders whose central geodesic stays more than ``eps`` from the cone set.

    A qualifying cylinder has width above ``2*eps`` and so circumference below
    ``m*area/(2*eps)`` with ``m`` from :func:`line_multiplicity`; one of its boundary saddle connections is no longer than
    that.  Each short connection is probed on both sides at distance about
    ``eps`` and the parallel orbit is tested for closing up.
    """
    if eps is None or eps <= 0:
        raise EpsNonPositive("eps must be positive")
    area = line_multiplicity(s) * float(s.area)
    L_max = area / (2 * float(eps)) if l_max is None else float(l_max)
    found: dict = {}
    for sc in enumerate_saddle_connections(s, L_max * (1 + 1e-9)):
        if s.exact:
            push = Fraction(0.99 * float(eps) / sc.length).limit_denominator(10 ** 6)
        else:
            push = 0.99 * float(eps)
        for q in _connection_probes(s, sc, push):
            if s.exact:
                dq = q.direction
            else:
                n = math.hypot(*q.direction)
                dq = (q.direction[0] / n, q.direction[1] / n)
            tr = trace(s, PhasePoint(q.triangle, q.position, dq), L_max * (1 + 1e-9) + 1e-9)
            if not tr.is_periodic:
                continue
            cyl = cylinder_from_core(s, tr)
            if cyl.key in found:
                continue
            if not _wide_enough(cyl, eps):
                found[cyl.key] = None
                continue
            found[cyl.key] = cyl
    cyls = [c for c in found.values() if c is not None]
    cyls.sort(key=lambda c: (c.circumference, _dir_angle(c.direction), c.key))
    return cyls


def _wide_enough(cyl: Cylinder, eps) -> bool:
    # strict: the borderline cylinder has no core at distance >= eps except its centre line
    if cyl.width_sq is not None and is_exact(eps):
        return cyl.width_sq > 4 * Fraction(eps) ** 2
    return cyl.width / 2 > float(eps) * (1 + 1e-12)


def _dir_angle(v) -> float:
    return math.atan2(float(v[1]), float(v[0]))


def cylinder_volume_bound(s: FlatSurface, eps) -> float:
    """Upper bound ``2*pi*area/eps**2`` on the number of cylinders avoiding U_eps."""
    return 2 * math.pi * float(s.area) / float(eps) ** 2


# -- condition (CC) --------------------------------------------------------

ENTERS = "enters"
SINGULAR = "singular"
STAYS_OUT = "stays_out"


@dataclass
class OrbitRecord:
    start: PhasePoint
    kind: str
    min_distance: float
    cylinder: int | None = None


@dataclass
class CCReport:
    eps: float
    samples: int
    orbit_length: float
    counts: dict
    violations: list
    cylinders: list
    records: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def random_phase_point(s: FlatSurface, rng) -> PhasePoint:
    """Uniform point (by area) with a uniform unit direction."""
    import numpy as np
    areas = np.array([abs(float(cross(sub(t[1], t[0]), sub(t[2], t[0])))) / 2 for t in s.triangles])
    t = int(rng.choice(len(areas), p=areas / areas.sum()))
    a, b = rng.random(2)
    if a + b > 1:
        a, b = 1 - a, 1 - b
    tri = [(float(x), float(y)) for x, y in s.triangles[t]]
    p = (tri[0][0] + a * (tri[1][0] - tri[0][0]) + b * (tri[2][0] - tri[0][0]),
         tri[0][1] + a * (tri[1][1] - tri[0][1]) + b * (tri[2][1] - tri[0][1]))
    ang = rng.uniform(0, 2 * math.pi)
    return PhasePoint(t, p, (math.cos(ang), math.sin(ang)))


def classify_orbit(s: FlatSurface, start: PhasePoint, eps: float, orbit_length: float):
    """Return ``(kind, trajectory, min_distance)`` for one orbit on a float surface."""
    tr = trace(s, start, orbit_length)
    if tr.is_singular:
        return SINGULAR, tr, 0.0
    dist = min_distance_to_P(s, tr, below=eps)
    if dist < eps:
        return ENTERS, tr, dist
    return STAYS_OUT, tr, dist


def _chart_directions(fs: FlatSurface, cyls: list) -> list:
    """Per cylinder, the unit directions its core takes in each triangle chart."""
    out = []
    for c in cyls:
        dirs = {}
        for seg in c.core.segments:
            v = sub(seg.exit, seg.entry)
            n = norm(v)
            if n == 0:
                continue
            u = (float(v[0]) / n, float(v[1]) / n)
            dirs.setdefault(seg.triangle, []).extend([u, (-u[0], -u[1])])
        out.append(dirs)
    return out


def _member_of(fs: FlatSurface, pp: PhasePoint, cyls, cyl_dirs, float_keys,
               orbit_length: float) -> int | None:
    d = pp.direction
    best = None
    for i, dirs in enumerate(cyl_dirs):
        for u in dirs.get(pp.triangle, []):
            if dot(u, d) <= 0:
                continue
            err = abs(cross(u, d))
            if best is None or err < best[0]:
                best = (err, i, u)
    if best is None:
        return None
    err, i, u = best
    c = cyls[i]
    # an orbit of this length stays inside only if its drift across is below the width
    if err * orbit_length > c.width * (1 + 1e-9):
        return None
    tr = trace(fs, PhasePoint(pp.triangle, pp.position, u), c.circumference * 1.5 + 1.0)
    if not tr.is_periodic:
        return None
    try:
        key = cylinder_from_core(fs, tr).key
    except CoreNotPeriodic:
        return None
    return i if key == float_keys[i] else None


def check_cc(s: FlatSurface, eps: float, samples: int, orbit_length: float, seed: int = 0,
             cylinders: list | None = None, keep_records: bool = False) -> CCReport:
    """Sample orbits and check that those avoiding U_eps lie in known cylinders.

    Each orbit is classified as singular, entering U_eps, or staying out.  A
    stay-out orbit must lie in one of the enumerated cylinders: the start and
    end points are flowed along the nearest cylinder direction and the closed
    geodesic found there must belong to that cylinder.
    """
    import numpy as np

    if samples < 1:
        raise ValueError("samples must be at least 1")
    if cylinders is None:
        cylinders = enumerate_maximal_cylinders(s, eps)
    fs = s.as_float() if s.exact else s
    float_keys = [cylinder_from_core(fs, _float_core(fs, c)).key for c in cylinders]
    fcyls = [_float_core_cyl(fs, c) for c in cylinders]
    cyl_dirs = _chart_directions(fs, fcyls)
    rng = np.random.default_rng(seed)
    counts = {ENTERS: 0, SINGULAR: 0, STAYS_OUT: 0}
    violations, records = [], []
    for _ in range(samples):
        start = random_phase_point(fs, rng)
        kind, tr, dist = classify_orbit(fs, start, float(eps), orbit_length)
        counts[kind] += 1
        member = None
        if kind == STAYS_OUT:
            m1 = _member_of(fs, tr.start, fcyls, cyl_dirs, float_keys, orbit_length)
            m2 = _member_of(fs, tr.end, fcyls, cyl_dirs, float_keys, orbit_length)
            if m1 is None or m1 != m2:
                violations.append(OrbitRecord(start, kind, dist, None))
            member = m1
        if keep_records:
            records.append(OrbitRecord(start, kind, dist, member))
    return CCReport(float(eps), samples, orbit_length, counts, violations, cylinders, records)


def _float_core(fs: FlatSurface, c: Cylinder) -> Trajectory:
    st = c.core.start
    d = (float(st.direction[0]), float(st.direction[1]))
    n = math.hypot(*d)
    pp = PhasePoint(st.triangle, (float(st.position[0]), float(st.position[1])), (d[0] / n, d[1] / n))
    return trace(fs, pp, c.circumference * 1.5 + 1.0)


def _float_core_cyl(fs: FlatSurface, c: Cylinder) -> Cylinder:
    if not c.core.segments or not is_exact(c.core.start.position[0]):
        return c
    core = _float_core(fs, c)
    return Cylinder(c.circumference, c.width, c.direction, core, c.boundary_cones, c.key)


# -- angle bound between cylinders --------------------------------------------

@dataclass
class BoundCheck:
    angles: list            # intersection angles in (0, pi/2]
    lhs_max: float          # largest 1/sin(theta)
    rhs: float              # min(L_i, L_j) / eps
    holds: bool


def core_intersections(s: FlatSurface, c1: Cylinder, c2: Cylinder) -> list[float]:
    """Angles at which the two central geodesics cross, one per crossing."""
    by_tri: dict = {}
    for seg in c2.core.segments:
        by_tri.setdefault(seg.triangle, []).append(seg)
    angles = []
    seen = set()
    for a in c1.core.segments:
        for b in by_tri.get(a.triangle, []):
            u, v = sub(a.exit, a.entry), sub(b.exit, b.entry)
            den = cross(u, v)
            if sign(den, 1e-18) == 0:
                continue
            w = sub(b.entry, a.entry)
            ta = cross(w, v) / den
            tb = cross(w, u) / den
            lo = 0 if s.exact else -1e-12
            if not (lo <= ta <= 1 - lo and lo <= tb <= 1 - lo):
                continue
            x = add(a.entry, scale(u, ta))
            k = (a.triangle, round(float(x[0]), 9), round(float(x[1]), 9))
            if k in seen:
                continue
            seen.add(k)
            sin_t = abs(float(den)) / (norm(u) * norm(v))
            angles.append(math.asin(min(1.0, sin_t)))
    return angles


def pairwise_angle_bound(s: FlatSurface, c1: Cylinder, c2: Cylinder, eps) -> BoundCheck:
    """Check ``1/sin(theta) <= min(L1, L2)/eps`` at every crossing of two cores."""
    if eps <= 0:
        raise EpsNonPositive("eps must be positive")
    angles = core_intersections(s, c1, c2)
    if not angles:
        raise NoIntersection("the central geodesics do not cross")
    lhs = max(1 / math.sin(t) for t in angles)
    rhs = min(c1.circumference, c2.circumference) / float(eps)
    return BoundCheck(angles, lhs, rhs, lhs <= rhs * (1 + 1e-12))


# -- export -----------------------------------------------------------------

def _num(v):
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else v.numerator
    if isinstance(v, int):
        return v
    return float(v)


def cylinders_to_json(s: FlatSurface, cyls: list, eps=None, seed=None) -> str:
    doc = {"eps": None if eps is None else float(eps), "seed": seed, "count": len(cyls),
           "cylinders": [{
               "circumference": c.circumference,
               "width": c.width,
               "width_squared": None if c.width_sq is None else _num(c.width_sq),
               "direction": [_num(c.direction[0]), _num(c.direction[1])],
               "boundary_cones": [list(c.boundary_cones[0]), list(c.boundary_cones[1])],
               "pi_over_n_boundary": list(c.pi_over_n_boundary),
           } for c in cyls]}
    return json.dumps(doc, indent=1)


def cylinders_svg(s: FlatSurface, cyls: list, size: int = 480) -> str:
    """Each cylinder drawn as its developed core band, stacked vertically."""
    from .reports import fmt9
    rows = []
    y = 10.0
    pad = 10.0
    Lmax = max((c.circumference for c in cyls), default=1.0)
    scale_x = (size - 2 * pad) / Lmax
    for i, c in enumerate(cyls):
        h = max(4.0, c.width * scale_x)
        rows.append(f'<rect x="{fmt9(pad)}" y="{fmt9(y)}" width="{fmt9(c.circumference * scale_x)}" '
                    f'height="{fmt9(h)}" fill="#9ecae1" stroke="#08519c"/>')
        rows.append(f'<text x="{fmt9(pad + 4)}" y="{fmt9(y + h / 2 + 4)}" font-size="10">'
                    f'#{i} dir=({c.direction[0]},{c.direction[1]}) L={fmt9(c.circumference)} '
                    f'w={fmt9(c.width)}</text>')
        y += h + 6
    height = int(math.ceil(y + pad))
    body = "\n".join(rows)
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{height}">\n'
            f'{body}\n</svg>\n')


def develop_cylinder(s: FlatSurface, c: Cylinder):
    """Developed triangles and polyline of a cylinder's central geodesic."""
    return develop(s, c.core)
