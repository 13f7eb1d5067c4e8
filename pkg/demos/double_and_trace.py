"""Double the L-shape, then follow a few billiard orbits on it.

Run: python demos/double_and_trace.py
"""
from fractions import Fraction as F

from flatbilliards import billiard_trace, corpus, double, min_distance_to_P

p = corpus.get("l_shape")
s = double(p)
print(f"L-shape double: {s.n_triangles} triangles, area {s.area}, Euler characteristic {s.euler_characteristic()}")
for c in s.cone_points:
    print(f"  cone at {tuple(map(str, c.position))}: angle {c.angle_over_pi} pi")

starts = [((F(1, 2), F(3, 10)), (1, 0)), ((F(1, 4), F(1, 3)), (1, 2)), ((F(1, 3), F(1, 7)), (3, 1)),
          ((F(1, 2), F(1, 2)), (1, 1))]
for point, direction in starts:
    tr = billiard_trace(p, point, direction, 60, surface=s)
    term = tr.termination
    extra = f", period {term.period:.6f}" if tr.is_periodic else ""
    dist = min_distance_to_P(s, tr) if not tr.is_singular else 0.0
    print(f"start {tuple(map(str, point))} dir {direction}: {term.kind}{extra}, "
          f"{len(tr.projected)} pieces, closest approach to a corner {dist:.4f}")
