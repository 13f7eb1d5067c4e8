"""Independent reference computations for the test suite.

None of these import the library's geometry: each one uses a closed form or a
different algorithm on the same inputs.
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import shapely
import shapely.geometry as sg


# -- rectangle billiards as a flat torus ----------------------------------------

def _frac_gcd(a: Fraction, b: Fraction) -> Fraction:
    den = math.lcm(a.denominator, b.denominator)
    return Fraction(math.gcd(int(a * den), int(b * den)), den)


def _frac_lcm(a: Fraction, b: Fraction) -> Fraction:
    return a * b / _frac_gcd(a, b)


def _primitive(p: int, q: int) -> tuple[int, int]:
    g = math.gcd(p, q)
    return (abs(p) // g, abs(q) // g)


def rectangle_orbit(a: Fraction, b: Fraction, start, direction):
    """Closed form for the billiard orbit in ``[0, a] x [0, b]``.

    Unfolding by reflections turns the double of the rectangle into the
    torus ``R^2 / (2a Z x 2b Z)`` with the vertices at ``a Z x b Z``.  For an
    integer direction ``(p, q)`` the orbit closes after flow time
    ``k = lcm(2a/|p|, 2b/|q|)``; the lines through vertices parallel to it are
    ``g/|v|`` apart with ``g = gcd(|p| b, |q| a)``.

    Returns ``(direction_class, L_sq, width_sq, distance)`` with ``distance``
    the closest approach of the orbit to a vertex.
    """
    p, q = direction
    x0, y0 = start
    v2 = p * p + q * q
    times = [Fraction(2) * a / abs(p)] if p else []
    if q:
        times.append(Fraction(2) * b / abs(q))
    k = times[0] if len(times) == 1 else _frac_lcm(*times)
    g = _frac_gcd(abs(p) * b, abs(q) * a)
    c0 = p * y0 - q * x0
    n = math.floor(c0 / g)
    off = min(c0 - n * g, (n + 1) * g - c0)
    return _primitive(p, q), k * k * v2, g * g / v2, math.sqrt(off * off / v2)


def torus_cylinder_oracle(a, b, eps, samples: int, seed: int, max_coord: int = 10):
    """Sample random rational orbits and cluster the ones staying ``eps`` away.

    Directions are random primitive integer vectors with entries up to
    ``max_coord``.  That covers every qualifying cylinder: its width exceeds
    ``2 eps`` so its length is below ``area / (2 eps)``, and the length is at
    least ``|v|``.  Returns the set of ``(direction, L_sq, width_sq)``.
    """
    a, b, eps = Fraction(a), Fraction(b), Fraction(eps)
    rng = np.random.default_rng(seed)
    found = set()
    den = 10 ** 6
    for _ in range(samples):
        while True:
            p, q = (int(v) for v in rng.integers(-max_coord, max_coord + 1, size=2))
            if (p, q) != (0, 0) and math.gcd(p, q) == 1:
                break
        x0 = Fraction(int(rng.integers(1, den)), den) * a
        y0 = Fraction(int(rng.integers(1, den)), den) * b
        cls, L2, w2, dist = rectangle_orbit(a, b, (x0, y0), (p, q))
        if dist >= eps:
            found.add((cls, L2, w2))
    return found


def square_fold(start, direction, t):
    """Billiard position in the unit square after time ``t`` (triangle wave)."""
    out = []
    for x, d in zip(start, direction):
        u = (x + d * t) % 2.0
        out.append(u if u <= 1.0 else 2.0 - u)
    return tuple(out)


# -- distance to the vertices of a polygon ---------------------------------------

def vertex_distance(polygon_coords, holes, point) -> float:
    """Shortest in-polygon path from ``point`` to any vertex.

    The first vertex on a shortest path to the vertex set is itself a vertex,
    so only vertices in direct sight matter.  Folding the double onto the
    polygon preserves lengths, hence this is the distance to the cone set on
    the double whenever every vertex is a cone point.
    """
    poly = sg.Polygon(polygon_coords, holes)
    verts = list(polygon_coords) + [v for h in holes for v in h]
    best = math.inf
    pt = tuple(map(float, point))
    for v in verts:
        v = tuple(map(float, v))
        seg = sg.LineString([pt, v])
        if poly.buffer(1e-12).covers(seg):
            best = min(best, math.dist(pt, v))
    return best


def mc_area(polygon_coords, eps: float, samples: int, seed: int) -> float:
    """Monte-Carlo area of points of a convex polygon within ``eps`` of a vertex, on the double."""
    poly = sg.Polygon(polygon_coords)
    minx, miny, maxx, maxy = poly.bounds
    rng = np.random.default_rng(seed)
    pts = rng.uniform((minx, miny), (maxx, maxy), size=(samples, 2))
    inside = shapely.contains_xy(poly, pts[:, 0], pts[:, 1])
    V = np.asarray(polygon_coords, float)
    d = np.min(np.linalg.norm(pts[:, None, :] - V[None], axis=2), axis=1)
    box = (maxx - minx) * (maxy - miny)
    return 2 * box * float(np.mean(inside & (d < eps)))


# -- Laplacian eigenvalues in closed form ----------------------------------------

def square_dirichlet(k: int) -> np.ndarray:
    vals = sorted(math.pi ** 2 * (m * m + n * n) for m in range(1, 12) for n in range(1, 12))
    return np.array(vals[:k])


def square_neumann(k: int) -> np.ndarray:
    vals = sorted(math.pi ** 2 * (m * m + n * n) for m in range(0, 12) for n in range(0, 12))
    return np.array(vals[:k])


def corner_box_u11(eps: float) -> float:
    """Mass of ``2 sin(pi x) sin(pi y)`` in the four ``eps`` boxes at the corners.

    Computed by 1D Gauss-Legendre quadrature of ``2 sin^2(pi x)`` on ``[0, eps]``,
    squared and multiplied by the four corners.
    """
    x, w = np.polynomial.legendre.leggauss(40)
    xs = eps / 2 * (x + 1)
    one_d = float(np.sum(w * 2 * np.sin(np.pi * xs) ** 2) * eps / 2)
    return 4 * one_d ** 2
