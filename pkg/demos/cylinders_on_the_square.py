"""Maximal cylinders of the doubled square and rectangle that stay eps away from the corners.

Every cylinder is listed with its direction class, circumference and exact
squared width, then checked against sampled orbits.

Run: python demos/cylinders_on_the_square.py
"""
from fractions import Fraction as F

from flatbilliards import check_cc, corpus, double, enumerate_maximal_cylinders
from flatbilliards.cylinders import cylinder_volume_bound

eps = F(1, 10)
for name in ("square", "rectangle_1x2"):
    s = double(corpus.get(name))
    cyls = enumerate_maximal_cylinders(s, eps)
    print(f"{name}: {len(cyls)} maximal cylinders with eps = {eps} "
          f"(volume bound {cylinder_volume_bound(s, eps):.0f})")
    seen = set()
    for c in cyls:
        row = (c.direction, round(c.circumference, 6), c.width_sq)
        if row in seen:
            continue
        seen.add(row)
        twins = sum(1 for d in cyls if (d.direction, round(d.circumference, 6), d.width_sq) == row)
        print(f"  direction {c.direction}: L = {c.circumference:.6f}, width^2 = {c.width_sq}, copies {twins}")

s = double(corpus.get("square"))
rep = check_cc(s, eps, samples=500, orbit_length=100, seed=1)
print(f"sampled orbits on the square: {rep.counts}, violations {len(rep.violations)}")
