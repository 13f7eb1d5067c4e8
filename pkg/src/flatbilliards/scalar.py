"""Scalar helpers shared by the exact (Fraction) and float code paths.

Every geometric routine in the package is written against plain Python
arithmetic so that it runs unchanged on ``fractions.Fraction`` (exact mode)
or ``float`` (float mode).  Predicates go through :func:`sign` which takes a
tolerance that is ignored for exact values.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence, Union

Number = Union[Fraction, float, int]
Point = tuple

TAU_LEN = 1e-9


def parse_number(value, exact: bool):
    """Parse an input coordinate.

    Strings may be decimals (``"0.25"``) or rationals (``"1/3"``).  In exact
    mode the result is a :class:`Fraction`; otherwise a float.
    """
    if isinstance(value, str):
        value = value.strip()
        frac = Fraction(value)
        return frac if exact else float(frac)
    if isinstance(value, bool):
        raise TypeError("boolean is not a coordinate")
    if exact:
        if isinstance(value, Rational):
            return Fraction(value)
        # floats are exactly representable dyadic rationals
        return Fraction(value)
    return float(value)


def is_rational_input(value) -> bool:
    """True when ``value`` can be read exactly as a rational without rounding."""
    if isinstance(value, str):
        try:
            Fraction(value.strip())
        except ValueError:
            return False
        return True
    return isinstance(value, Rational) and not isinstance(value, bool)


def is_exact(x) -> bool:
    return isinstance(x, Fraction)


def sign(x, tol: float = 0.0) -> int:
    if isinstance(x, Fraction):
        return (x > 0) - (x < 0)
    if x > tol:
        return 1
    if x < -tol:
        return -1
    return 0


def sub(a: Point, b: Point) -> Point:
    return (a[0] - b[0], a[1] - b[1])


def add(a: Point, b: Point) -> Point:
    return (a[0] + b[0], a[1] + b[1])


def scale(a: Point, t) -> Point:
    return (a[0] * t, a[1] * t)


def dot(a: Point, b: Point):
    return a[0] * b[0] + a[1] * b[1]


def cross(a: Point, b: Point):
    return a[0] * b[1] - a[1] * b[0]


def norm2(a: Point):
    return a[0] * a[0] + a[1] * a[1]


def norm(a: Point) -> float:
    return math.hypot(float(a[0]), float(a[1]))


def rot90(a: Point) -> Point:
    """Counterclockwise quarter turn."""
    return (-a[1], a[0])


def orient(a: Point, b: Point, c: Point):
    return cross(sub(b, a), sub(c, a))


def to_float_point(p: Point) -> tuple[float, float]:
    return (float(p[0]), float(p[1]))


def sqrt_exact(q: Fraction):
    """Exact square root of a rational if it is a perfect square, else None."""
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def length_to_param(length, direction: Point):
    """Flow parameter that covers Euclidean ``length`` along ``direction``."""
    if is_exact(direction[0]):
        n2 = norm2(direction)
        root = sqrt_exact(n2)
        if root is not None:
            return Fraction(length) / root if not isinstance(length, Fraction) else length / root
        return Fraction(float(length) / math.sqrt(float(n2)))
    return float(length) / norm(direction)


def angle_between(a: Point, b: Point) -> float:
    """Counterclockwise angle from ``a`` to ``b`` in [0, 2*pi)."""
    ang = math.atan2(float(cross(a, b)), float(dot(a, b)))
    if ang < 0:
        ang += 2 * math.pi
    return ang


def pi_multiple(theta: float, max_den: int = 1000, tol: float = 1e-9):
    """``theta / pi`` as a small Fraction when it is one, else None."""
    q = Fraction(theta / math.pi).limit_denominator(max_den)
    if abs(float(q) * math.pi - theta) < tol:
        return q
    return None


def shoelace(points: Sequence[Point]):
    """Signed area (positive for counterclockwise rings)."""
    n = len(points)
    acc = 0
    for i in range(n):
        acc += cross(points[i], points[(i + 1) % n])
    return acc / 2


def segments_intersect(p1, p2, q1, q2, tol: float = 0.0, proper_only: bool = False) -> bool:
    """Closed-segment intersection test (collinear overlap counts)."""
    d1 = sign(orient(q1, q2, p1), tol)
    d2 = sign(orient(q1, q2, p2), tol)
    d3 = sign(orient(p1, p2, q1), tol)
    d4 = sign(orient(p1, p2, q2), tol)
    if d1 * d2 < 0 and d3 * d4 < 0:
        return True
    if proper_only:
        return False

    def on_seg(a, b, c):
        return (min(a[0], b[0]) - tol <= c[0] <= max(a[0], b[0]) + tol
                and min(a[1], b[1]) - tol <= c[1] <= max(a[1], b[1]) + tol)

    if d1 == 0 and on_seg(q1, q2, p1):
        return True
    if d2 == 0 and on_seg(q1, q2, p2):
        return True
    if d3 == 0 and on_seg(p1, p2, q1):
        return True
    if d4 == 0 and on_seg(p1, p2, q2):
        return True
    return False


def point_segment_dist2(p: Point, a: Point, b: Point):
    """Squared distance from ``p`` to the closed segment ``ab`` (exact-friendly)."""
    ab = sub(b, a)
    ap = sub(p, a)
    den = norm2(ab)
    if sign(den) == 0:
        return norm2(ap)
    t = dot(ap, ab) / den
    if t <= 0:
        return norm2(ap)
    if t >= 1:
        return norm2(sub(p, b))
    c = cross(ab, ap)
    return c * c / den


def all_close(values: Iterable, ref, tol: float) -> bool:
    return all(abs(float(v) - float(ref)) <= tol for v in values)
