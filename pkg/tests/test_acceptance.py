"""Acceptance criteria 1 to 9, each at its stated tolerance.

Run with ``pytest tests/test_acceptance.py``; the terminal summary prints one
PASS/FAIL line per criterion.
"""
import itertools
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from flatbilliards import (check_cc, corpus, double, enumerate_maximal_cylinders,
                           gauss_bonnet_defect, mass_ratio, mesh_polygon, pairwise_angle_bound,
                           solve_eigs, trace)
from flatbilliards.bz import sweep
from flatbilliards.cylinders import NoIntersection, cylinder_volume_bound
from flatbilliards.scalar import norm2
from flatbilliards.spectral import DIRICHLET, NEUMANN, control_constant

from helpers import exact_phase_point, float_phase_point
from oracles import corner_box_u11, square_dirichlet, torus_cylinder_oracle

pytestmark = pytest.mark.slow

# Euler characteristic of each double, from its topology: a sphere, one handle
# per hole, and a slit opens the sphere into a torus.
EXPECTED_CHI = {"square": 2, "rectangle_1x2": 2, "l_shape": 2, "pentagon": 2,
                "square_with_hole": 0, "square_with_slit": 0, "bent_slit": 0}


@pytest.mark.criterion(1, "Gauss-Bonnet on the corpus")
def test_c1_gauss_bonnet():
    t0 = time.perf_counter()
    for name, p in corpus.all_polygons().items():
        s = double(p)
        lhs = sum(2 * math.pi - c.angle for c in s.cone_points)
        chi = s.euler_characteristic()
        assert chi == EXPECTED_CHI[name], name
        assert abs(lhs - 2 * math.pi * chi) <= 1e-9, name
        assert gauss_bonnet_defect(s) <= 1e-9
    assert len(EXPECTED_CHI) >= 6
    assert time.perf_counter() - t0 < 1.0


@pytest.mark.criterion(2, "square Dirichlet spectrum and O(h^2) refinement")
def test_c2_square_spectrum():
    t0 = time.perf_counter()
    p = corpus.get("square", exact=False)
    exact = square_dirichlet(10)
    errs = []
    for h in (0.02, 0.01):
        pairs = solve_eigs(mesh_polygon(p, h), DIRICHLET, 10)
        lam = np.array([e.lambda_sq for e in pairs])
        errs.append(np.abs(lam - exact) / exact)
    assert errs[0].max() < 0.01
    ratio = errs[0].max() / errs[1].max()
    assert 3.5 <= ratio <= 4.5, ratio
    assert time.perf_counter() - t0 < 120


@pytest.mark.criterion(3, "corner-box mass of u_11")
def test_c3_corner_mass():
    p = corpus.get("square", exact=False)
    mesh = mesh_polygon(p, 0.02)
    u11 = solve_eigs(mesh, DIRICHLET, 1)[0]
    got = mass_ratio(u11, mesh, p, 0.2, shape="box")
    want = corner_box_u11(0.2)
    assert abs(got / want - 1) < 0.02, (got, want)


@pytest.mark.criterion(4, "control positivity and c_hat stability")
def test_c4_control_positivity():
    t0 = time.perf_counter()
    for name in ("square", "l_shape"):
        p = corpus.get(name, exact=False)
        for bc in (DIRICHLET, NEUMANN):
            coarse = control_constant(p, 0.25, bc, 100, 0.02)
            fine = control_constant(p, 0.25, bc, 100, 0.01)
            for rep in (coarse, fine):
                assert (rep.ratios > 1e-6).all(), (name, bc)
                assert rep.c_hat > 0
            assert abs(coarse.c_hat / fine.c_hat - 1) <= 0.2, (name, bc, coarse.c_hat, fine.c_hat)
    assert time.perf_counter() - t0 < 600


def _triples(cyls):
    out = set()
    for c in cyls:
        L2 = c.core.termination.period_param ** 2 * norm2(c.core.start.direction)
        out.add((c.direction, L2, c.width_sq))
    return out


@pytest.mark.criterion(5, "cylinder enumeration equals the sampling oracle")
@pytest.mark.parametrize("name,a,b", [("square", 1, 1), ("rectangle_1x2", 1, 2)])
def test_c5_cylinder_oracle(name, a, b):
    eps = Fraction(1, 10)
    s = double(corpus.get(name))
    cyls = enumerate_maximal_cylinders(s, eps)
    oracle = torus_cylinder_oracle(a, b, eps, samples=100_000, seed=5)
    assert _triples(cyls) == oracle
    assert len(cyls) <= cylinder_volume_bound(s, eps)


@pytest.mark.criterion(6, "condition (CC) on sampled orbits")
def test_c6_cc():
    s = double(corpus.get("square"))
    rep = check_cc(s, Fraction(1, 10), samples=1000, orbit_length=100, seed=6)
    assert rep.ok, rep.violations[:3]
    assert sum(rep.counts.values()) == 1000


ANGLE_CASES = [("square", Fraction(1, 10)), ("rectangle_1x2", Fraction(1, 10)),
               ("l_shape", Fraction(1, 5)), ("pentagon", Fraction(1, 4)),
               ("square_with_slit", Fraction(1, 5)), ("square_with_hole", Fraction(1, 3))]


@pytest.mark.criterion(7, "angle bound at core intersections")
@pytest.mark.parametrize("name,eps", ANGLE_CASES)
def test_c7_angle_bound(name, eps):
    s = double(corpus.get(name))
    cyls = enumerate_maximal_cylinders(s, eps)
    checked = 0
    for c1, c2 in itertools.combinations(cyls, 2):
        try:
            res = pairwise_angle_bound(s, c1, c2, eps)
        except NoIntersection:
            continue
        checked += 1
        assert res.holds, (c1.direction, c2.direction, res.lhs_max, res.rhs)
    assert checked > 0


@pytest.mark.criterion(8, "resolvent sweep stable under refinement")
def test_c8_bz_sweep():
    t0 = time.perf_counter()
    lambdas = np.linspace(10, 500, 50)
    best = {}
    for n in (256, 512):
        res = sweep(1.0, 1.0, lambdas, (0.4, 0.6), n, seed=8, workers=4)
        ratios = np.array([r.ratio for r in res])
        assert np.isfinite(ratios).all()
        best[n] = ratios.max()
    assert abs(best[256] / best[512] - 1) <= 0.05
    assert time.perf_counter() - t0 < 300


REVERSAL_SURFACES = ("l_shape", "pentagon", "square_with_slit")


def _reversal_runs(s, sampler, n, seed):
    rng = np.random.default_rng(seed)
    done = 0
    while done < n:
        start = sampler(s, rng)
        tr = trace(s, start, 50, record=False)
        if tr.is_singular:
            continue
        back = trace(s, tr.reversed_start(), None, max_param=tr.total_param, record=False)
        yield start, back.end
        done += 1


@pytest.mark.criterion(9, "flow reversibility, float and exact")
@pytest.mark.parametrize("name", REVERSAL_SURFACES)
def test_c9_reversibility(name):
    s = double(corpus.get(name))
    for start, end in _reversal_runs(s, exact_phase_point, 1000, seed=9):
        assert end.triangle == start.triangle
        assert end.position == start.position
        assert end.direction == (-start.direction[0], -start.direction[1])
    fs = s.as_float()
    for start, end in _reversal_runs(fs, float_phase_point, 1000, seed=9):
        assert end.triangle == start.triangle
        assert math.dist(end.position, start.position) <= 1e-9
        assert math.dist(end.direction, (-start.direction[0], -start.direction[1])) <= 1e-9
