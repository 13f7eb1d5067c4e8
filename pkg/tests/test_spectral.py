import math

import numpy as np
import pytest

from flatbilliards import corpus, mesh_polygon, solve_eigs, mass_ratio
from flatbilliards.polygon import Polygon
from flatbilliards.spectral import (DIRICHLET, NEUMANN, SLIT, Mesh, MeshFailure, assemble,
                                    control_constant, corner_box_mass, eigen_clusters,
                                    polygon_moments, region_mass_matrix, vertex_region)

from oracles import corner_box_u11, square_dirichlet, square_neumann


@pytest.fixture(scope="module")
def square():
    return corpus.get("square", exact=False)


@pytest.fixture(scope="module")
def square_mesh(square):
    return mesh_polygon(square, 0.05)


def test_mesh_quality(square):
    m = mesh_polygon(square, 0.1)
    assert 150 <= len(m.triangles) <= 350
    assert m.min_angle() >= 20.0
    corners = {(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)}
    assert corners <= set(map(tuple, m.vertices.tolist()))
    assert m.areas().sum() == pytest.approx(1.0, abs=1e-12)
    assert (m.areas() > 0).all()


def test_coarse_mesh_still_conforms(square):
    m = mesh_polygon(square, 10.0)
    assert m.areas().sum() == pytest.approx(1.0, abs=1e-12)
    assert m.min_angle() >= 20.0


def test_bad_h(square):
    with pytest.raises(ValueError):
        mesh_polygon(square, 0)


def test_invalid_polygon_mesh_failure():
    bowtie = Polygon.from_coords([("0", "0"), ("1", "1"), ("1", "0"), ("0", "1")], exact=False)
    with pytest.raises(MeshFailure, match="invalid polygon"):
        mesh_polygon(bowtie, 0.1)


def test_slit_nodes_are_duplicated():
    p = corpus.get("square_with_slit", exact=False)
    m = mesh_polygon(p, 0.05)
    assert m.slit_copies
    K, M = assemble(m)
    for a, b in m.slit_copies:
        assert np.allclose(m.vertices[a], m.vertices[b])
        assert m.markers[b] == SLIT
        # the two sides of the cut share no element
        assert K[a, b] == 0 and M[a, b] == 0
    assert abs(K.sum(axis=1)).max() < 1e-10
    # the indicator of the upper side costs no energy next to the middle of the cut
    up = np.zeros(m.n_vertices)
    cent = m.vertices[m.triangles].mean(axis=1)
    for tri, c in zip(m.triangles, cent):
        if c[1] > 0.5:
            up[tri] = 1.0
    window = (np.abs(cent[:, 0] - 0.5) < 0.1) & (np.abs(cent[:, 1] - 0.5) < 0.1)
    sub = Mesh(m.vertices, m.triangles[window], m.markers, m.h)
    Kw, _ = assemble(sub)
    assert float(up @ (Kw @ up)) < 1e-12
    # gluing the copies back makes the same function expensive
    glued = up.copy()
    for a, b in m.slit_copies:
        glued[a] = glued[b] = 1.0
    assert float(glued @ (Kw @ glued)) > 1.0


def test_dirichlet_square(square_mesh):
    pairs = solve_eigs(square_mesh, DIRICHLET, 4)
    lam = np.array([e.lambda_sq for e in pairs])
    assert np.allclose(lam, square_dirichlet(4), rtol=0.02)
    assert lam[0] == pytest.approx(2 * math.pi ** 2, rel=0.01)
    assert (np.diff(lam) >= 0).all()


def test_neumann_square(square_mesh):
    pairs = solve_eigs(square_mesh, NEUMANN, 6)
    lam = np.array([e.lambda_sq for e in pairs])
    assert abs(lam[0]) < 1e-8
    assert np.allclose(lam[1:], square_neumann(6)[1:], rtol=0.02)


def test_normalisation_and_orthogonality(square_mesh):
    pairs = solve_eigs(square_mesh, DIRICHLET, 8)
    _, M = assemble(square_mesh)
    U = np.column_stack([e.u for e in pairs])
    G = U.T @ (M @ U)
    assert np.allclose(np.diag(G), 1.0, atol=1e-10)
    assert np.abs(G - np.diag(np.diag(G))).max() < 1e-8


def test_sparse_and_dense_agree(square):
    m = mesh_polygon(square, 0.04)
    dense = [e.lambda_sq for e in solve_eigs(m, DIRICHLET, 6, dense_below=10 ** 9)]
    sparse = [e.lambda_sq for e in solve_eigs(m, DIRICHLET, 6, dense_below=0)]
    assert np.allclose(dense, sparse, rtol=1e-8)


def test_convergence_slope(square):
    hs = [0.08, 0.04, 0.02]
    errs = []
    for h in hs:
        lam = solve_eigs(mesh_polygon(square, h), DIRICHLET, 1)[0].lambda_sq
        errs.append(abs(lam - 2 * math.pi ** 2))
    slope = np.polyfit(np.log(hs), np.log(errs), 1)[0]
    assert 1.7 <= slope <= 2.3


def test_l_shape_first_eigenvalue():
    p = corpus.get("l_shape", exact=False)
    coarse = solve_eigs(mesh_polygon(p, 0.03), DIRICHLET, 1)[0].lambda_sq
    fine = solve_eigs(mesh_polygon(p, 0.015), DIRICHLET, 1)[0].lambda_sq
    assert abs(coarse / fine - 1) < 0.005
    # the L-shape sits inside the 2x2 square, so its ground state is higher
    assert fine > math.pi ** 2 / 2


def test_k_validation(square_mesh):
    with pytest.raises(ValueError):
        solve_eigs(square_mesh, DIRICHLET, 0)
    with pytest.raises(ValueError):
        solve_eigs(square_mesh, "robin", 1)


def test_polygon_moments_of_unit_square():
    import shapely.geometry as sg
    m = polygon_moments(sg.box(0, 0, 1, 1))
    assert np.allclose(m, [1, 0.5, 0.5, 1 / 3, 0.25, 1 / 3])


def test_region_mass_matrix_integrates_quadratics(square_mesh, square):
    region = vertex_region(square, 0.3, "box")
    W = region_mass_matrix(square_mesh, region)
    one = np.ones(square_mesh.n_vertices)
    assert float(one @ W @ one) == pytest.approx(4 * 0.09, rel=1e-12)
    x = square_mesh.vertices[:, 0]
    # integral of x^2 over the four boxes: two at x=0 and two at x=1
    want = 2 * (0.3 * 0.3 ** 3 / 3) + 2 * 0.3 * (1 - 0.7 ** 3) / 3
    assert float(x @ W @ x) == pytest.approx(want, rel=1e-12)


def test_corner_box_oracle_agreement():
    assert corner_box_mass(0.2) == pytest.approx(corner_box_u11(0.2), rel=1e-12)
    assert corner_box_mass(0.2) == pytest.approx(9.461e-3, rel=1e-3)


def test_mass_ratio_limits(square_mesh, square):
    e = solve_eigs(square_mesh, DIRICHLET, 1)[0]
    assert mass_ratio(e, square_mesh, square, 0.0) == 0.0
    assert mass_ratio(e, square_mesh, square, 1e-3) < 1e-8
    assert mass_ratio(e, square_mesh, square, 2.0) == pytest.approx(1.0, abs=1e-10)


def test_control_constant_single_mode(square):
    rep = control_constant(square, 0.2, DIRICHLET, 1, 0.02, shape="box")
    assert rep.c_hat == pytest.approx(corner_box_u11(0.2), rel=0.02)


def test_control_constant_rectangle():
    p = corpus.get("rectangle_1x2", exact=False)
    rep = control_constant(p, 0.25, DIRICHLET, 30, 0.04)
    assert rep.c_hat > 0
    assert (rep.ratios > 1e-6).all()
    assert (rep.space_ratios <= rep.ratios + 1e-12).all()


def test_eigen_clusters():
    assert eigen_clusters([1.0, 2.0, 2.001, 5.0]) == [[0], [1, 2], [3]]
