"""Seeded phase-point samplers shared by the tests."""
from __future__ import annotations

from fractions import Fraction

from flatbilliards.flow import PhasePoint
from flatbilliards.cylinders import random_phase_point
from flatbilliards.surface import FlatSurface


def exact_phase_point(s: FlatSurface, rng, den: int = 997, max_dir: int = 20) -> PhasePoint:
    """Rational interior point of a random triangle with a random integer direction."""
    t = int(rng.integers(s.n_triangles))
    while True:
        a, b = (int(v) for v in rng.integers(1, den, size=2))
        if a + b < den:
            break
    A, B, C = s.triangles[t]
    fa, fb = Fraction(a, den), Fraction(b, den)
    p = (A[0] + fa * (B[0] - A[0]) + fb * (C[0] - A[0]),
         A[1] + fa * (B[1] - A[1]) + fb * (C[1] - A[1]))
    while True:
        dx, dy = (int(v) for v in rng.integers(-max_dir, max_dir + 1, size=2))
        if (dx, dy) != (0, 0):
            break
    return PhasePoint(t, p, (Fraction(dx), Fraction(dy)))


def float_phase_point(s: FlatSurface, rng) -> PhasePoint:
    return random_phase_point(s, rng)
