"""Small named polygons used by the demos, tests and CLI examples.

Coordinates are strings so the polygons come out exact; pass ``exact=False``
for float copies.
"""
from __future__ import annotations

from .polygon import Polygon

_SHAPES = {
    "square": {"outer": [("0", "0"), ("1", "0"), ("1", "1"), ("0", "1")]},
    "rectangle_1x2": {"outer": [("0", "0"), ("1", "0"), ("1", "2"), ("0", "2")]},
    "l_shape": {"outer": [("0", "0"), ("2", "0"), ("2", "1"), ("1", "1"), ("1", "2"), ("0", "2")]},
    "pentagon": {"outer": [("0", "0"), ("2", "0"), ("2", "2"), ("1", "1"), ("0", "2")]},
    "square_with_hole": {"outer": [("0", "0"), ("3", "0"), ("3", "3"), ("0", "3")],
                         "holes": [[("1", "1"), ("1", "2"), ("2", "2"), ("2", "1")]]},
    "square_with_slit": {"outer": [("0", "0"), ("1", "0"), ("1", "1"), ("0", "1")],
                         "slits": [[("7/20", "1/2"), ("13/20", "1/2")]]},
    "bent_slit": {"outer": [("0", "0"), ("2", "0"), ("2", "2"), ("0", "2")],
                  "slits": [[("1/2", "1/2"), ("1", "1"), ("3/2", "1/2")]]},
}

NAMES = tuple(_SHAPES)


def get(name: str, exact: bool | None = None) -> Polygon:
    doc = _SHAPES[name]
    return Polygon.from_coords(doc["outer"], doc.get("holes", []), doc.get("slits", []), exact=exact)


def all_polygons(exact: bool | None = None) -> dict:
    return {name: get(name, exact) for name in NAMES}
