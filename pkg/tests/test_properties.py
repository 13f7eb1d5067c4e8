"""Property-based checks on random inputs."""
import math
from fractions import Fraction

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from flatbilliards import Polygon, corpus, double, gauss_bonnet_defect, locate_in_sheet, trace
from flatbilliards.cylinders import cylinder_from_core
from flatbilliards.reports import csv_text, json_text
from flatbilliards.scalar import sqrt_exact

SQUARE = double(corpus.get("square"))

unit = st.fractions(min_value=Fraction(1, 50), max_value=Fraction(49, 50), max_denominator=50)
small = st.integers(min_value=-6, max_value=6)


@given(st.fractions(min_value=0, max_value=100, max_denominator=1000))
def test_sqrt_exact_on_squares(q):
    assert sqrt_exact(q * q) == q


@given(st.lists(st.tuples(st.integers(1, 9), st.integers(1, 9)), min_size=3, max_size=3))
def test_rectangles_satisfy_gauss_bonnet(dims):
    for w, h in dims:
        p = Polygon.from_coords([("0", "0"), (str(w), "0"), (str(w), str(h)), ("0", str(h))])
        s = double(p)
        assert gauss_bonnet_defect(s) < 1e-9
        assert s.area == 2 * w * h


@settings(max_examples=60, suppress_health_check=[HealthCheck.too_slow], deadline=None)
@given(unit, unit, small, small, st.integers(1, 40))
def test_exact_reversal_on_the_square(x, y, dx, dy, length):
    if (dx, dy) == (0, 0):
        return
    start = locate_in_sheet(SQUARE, (x, y), (Fraction(dx), Fraction(dy)))
    tr = trace(SQUARE, start, length)
    if tr.is_singular:
        return
    back = trace(SQUARE, tr.reversed_start(), None, max_param=tr.total_param)
    assert back.end.position == start.position
    assert back.end.triangle == start.triangle


@settings(max_examples=40, suppress_health_check=[HealthCheck.too_slow], deadline=None)
@given(unit, unit, st.integers(0, 3), st.integers(1, 3))
def test_rational_directions_on_the_square_are_periodic_or_singular(x, y, p, q):
    if math.gcd(p, q) != 1:
        return
    tr = trace(SQUARE, locate_in_sheet(SQUARE, (x, y), (Fraction(p), Fraction(q))), 100)
    assert tr.is_periodic or tr.is_singular
    if tr.is_periodic:
        assert math.isclose(tr.period, 2 * math.hypot(p, q))
        c = cylinder_from_core(SQUARE, tr)
        assert c.width_sq == Fraction(1, p * p + q * q)


@settings(max_examples=40, deadline=None)
@given(st.fractions(min_value=Fraction(1, 20), max_value=Fraction(19, 20), max_denominator=40),
       st.fractions(min_value=Fraction(1, 20), max_value=Fraction(19, 20), max_denominator=40))
def test_horizontal_cores_give_one_cylinder(y, x):
    c = cylinder_from_core(SQUARE, trace(SQUARE, locate_in_sheet(SQUARE, (x, y), (Fraction(1), Fraction(0))), 10))
    ref = cylinder_from_core(SQUARE, trace(SQUARE, locate_in_sheet(SQUARE, (Fraction(1, 2), Fraction(1, 2)),
                                                                   (Fraction(1), Fraction(0))), 10))
    assert c.key == ref.key


@given(st.lists(st.floats(allow_nan=False, allow_infinity=False, width=64), min_size=1, max_size=8), st.integers())
def test_reports_are_byte_stable(values, seed):
    rows = [(i, v) for i, v in enumerate(values)]
    assert csv_text(["i", "v"], rows, {"seed": seed}) == csv_text(["i", "v"], list(rows), {"seed": seed})
    assert json_text({"v": values}) == json_text({"v": list(values)})
