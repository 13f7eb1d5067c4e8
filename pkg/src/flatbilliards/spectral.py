"""Laplace eigenfunctions on polygons and their mass near the vertices.

Piecewise-linear finite elements on a constrained Delaunay mesh from the
``triangle`` package.  Slits are meshed as two-sided cuts: nodes strictly
inside a slit are duplicated so the two sides do not talk to each other.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla
import shapely
import shapely.geometry as sg
import triangle

from .polygon import Polygon, validate_polygon

DIRICHLET = "dirichlet"
NEUMANN = "neumann"

INTERIOR, OUTER, HOLE, SLIT = 0, 1, 2, 3


class MeshFailure(RuntimeError):
    pass


class SolverNoConvergence(RuntimeError):
    pass


@dataclass
class Mesh:
    vertices: np.ndarray     # (n, 2)
    triangles: np.ndarray    # (m, 3) counterclockwise
    markers: np.ndarray      # per vertex: 0 interior, 1 outer, 2 hole, 3 slit
    h: float
    slit_copies: list = field(default_factory=list)   # (original, duplicate) node pairs

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def boundary_nodes(self) -> np.ndarray:
        return np.flatnonzero(self.markers != INTERIOR)

    def min_angle(self) -> float:
        """Smallest interior angle over all triangles, in degrees."""
        P = self.vertices[self.triangles]
        worst = 180.0
        for k in range(3):
            a = P[:, (k + 1) % 3] - P[:, k]
            b = P[:, (k + 2) % 3] - P[:, k]
            cosv = np.einsum("ij,ij->i", a, b) / (np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1))
            worst = min(worst, float(np.degrees(np.arccos(np.clip(cosv, -1, 1))).min()))
        return worst

    def areas(self) -> np.ndarray:
        P = self.vertices[self.triangles]
        e1, e2 = P[:, 1] - P[:, 0], P[:, 2] - P[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])


def _subdivide(a, b, h):
    n = max(1, int(math.ceil(math.dist(a, b) / h - 1e-9)))
    return [(a[0] + (b[0] - a[0]) * i / n, a[1] + (b[1] - a[1]) * i / n) for i in range(n)]


def _shapely_domain(p: Polygon):
    outer = [(float(x), float(y)) for x, y in p.outer]
    holes = [[(float(x), float(y)) for x, y in h] for h in p.holes]
    return sg.Polygon(outer, holes)


def mesh_polygon(p: Polygon, h: float, min_angle: float = 20.0) -> Mesh:
    """Quality triangulation of ``p`` with target edge length ``h``.

    Boundary edges are split at spacing ``h`` and the interior is seeded with
    an equilateral lattice, so meshes at ``h`` and ``h/2`` are close to
    similar.  Triangle's quality refinement then enforces ``min_angle``.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    rep = validate_polygon(p)
    if not rep.valid:
        raise MeshFailure("invalid polygon: " + "; ".join(map(str, rep.errors)))
    domain = _shapely_domain(p)
    h = float(min(h, 2 * p.diameter()))

    verts, segs, seg_marks = [], [], []

    def add_chain(points, closed, mark):
        pts = [(float(x), float(y)) for x, y in points]
        n = len(pts)
        chain = []
        stop = n if closed else n - 1
        for i in range(stop):
            chain.extend(_subdivide(pts[i], pts[(i + 1) % n], h))
        if not closed:
            chain.append(pts[-1])
        base = len(verts)
        verts.extend(chain)
        m = len(chain)
        for i in range(m if closed else m - 1):
            segs.append((base + i, base + (i + 1) % m))
            seg_marks.append(mark)

    add_chain(p.outer, True, OUTER)
    for hole in p.holes:
        add_chain(hole, True, HOLE)
    for slit in p.slits:
        add_chain(slit, False, SLIT)

    # equilateral lattice seeds away from boundaries and slits
    minx, miny, maxx, maxy = domain.bounds
    dy = h * math.sqrt(3) / 2
    xs, ys = [], []
    for j in range(int((maxy - miny) / dy) + 2):
        y = miny + j * dy
        off = 0.5 * h * (j % 2)
        for x in np.arange(minx + off, maxx + h, h):
            xs.append(x)
            ys.append(y)
    if xs:
        keep_zone = domain.buffer(-0.55 * h)
        for slit in p.slits:
            keep_zone = keep_zone.difference(
                sg.LineString([(float(x), float(y)) for x, y in slit]).buffer(0.55 * h))
        pts = shapely.points(np.column_stack([xs, ys]))
        inside = shapely.contains(keep_zone, pts) if not keep_zone.is_empty else np.zeros(len(xs), bool)
        verts.extend(zip(np.asarray(xs)[inside], np.asarray(ys)[inside]))

    data = {"vertices": np.array(verts, float), "segments": np.array(segs, int),
            "segment_markers": np.array(seg_marks, int)[:, None]}
    if p.holes:
        data["holes"] = np.array([sg.Polygon([(float(x), float(y)) for x, y in hole])
                                  .representative_point().coords[0] for hole in p.holes])
    try:
        out = triangle.triangulate(data, f"pq{min_angle:g}QY")
    except Exception as exc:  # triangle raises bare RuntimeErrors
        raise MeshFailure(f"triangulation failed: {exc}") from exc
    V = np.asarray(out["vertices"], float)
    T = np.asarray(out["triangles"], int)
    if len(T) == 0:
        raise MeshFailure("triangulation produced no triangles")
    markers = np.zeros(len(V), int)
    for (a, b), m in zip(np.asarray(out["segments"], int), np.asarray(out["segment_markers"]).ravel()):
        for v in (a, b):
            markers[v] = max(markers[v], int(m)) if markers[v] != SLIT else SLIT
    # orientation
    P = V[T]
    cr = (P[:, 1, 0] - P[:, 0, 0]) * (P[:, 2, 1] - P[:, 0, 1]) - (P[:, 1, 1] - P[:, 0, 1]) * (P[:, 2, 0] - P[:, 0, 0])
    T[cr < 0] = T[cr < 0][:, [0, 2, 1]]
    mesh = Mesh(V, T, markers, h)
    if p.slits:
        slit_edges = {tuple(sorted(map(int, e))) for e, m in
                      zip(np.asarray(out["segments"], int), np.asarray(out["segment_markers"]).ravel())
                      if int(m) == SLIT}
        _split_slits(mesh, slit_edges)
    return mesh


def _split_slits(mesh: Mesh, slit_edges: set) -> None:
    """Duplicate nodes inside slits so each side gets its own copy."""
    slit_nodes = {v for e in slit_edges for v in e}
    incident: dict = {v: [] for v in slit_nodes}
    for t, tri in enumerate(mesh.triangles):
        for v in tri:
            if int(v) in incident:
                incident[int(v)].append(t)
    V = list(map(tuple, mesh.vertices))
    markers = list(mesh.markers)
    T = mesh.triangles.copy()
    for v, tris in incident.items():
        parent = {t: t for t in tris}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        by_edge: dict = {}
        for t in tris:
            for w in mesh.triangles[t]:
                w = int(w)
                if w != v:
                    by_edge.setdefault(w, []).append(t)
        for w, ts in by_edge.items():
            if tuple(sorted((v, w))) in slit_edges or len(ts) != 2:
                continue
            parent[find(ts[0])] = find(ts[1])
        groups: dict = {}
        for t in tris:
            groups.setdefault(find(t), []).append(t)
        if len(groups) < 2:
            continue   # slit tip
        for grp in sorted(groups.values(), key=min)[1:]:
            new = len(V)
            V.append(V[v])
            markers.append(SLIT)
            mesh.slit_copies.append((v, new))
            for t in grp:
                T[t][T[t] == v] = new
    mesh.vertices = np.array(V, float)
    mesh.markers = np.array(markers, int)
    mesh.triangles = T


def assemble(mesh: Mesh):
    """Stiffness and mass matrices of the P1 Galerkin problem."""
    P = mesh.vertices[mesh.triangles]
    area = mesh.areas()
    # gradients of the barycentric coordinates
    G = np.empty((len(P), 3, 2))
    for k in range(3):
        e = P[:, (k + 2) % 3] - P[:, (k + 1) % 3]
        G[:, k, 0] = -e[:, 1]
        G[:, k, 1] = e[:, 0]
    G /= (2 * area)[:, None, None]
    Kl = area[:, None, None] * np.einsum("tik,tjk->tij", G, G)
    Ml = area[:, None, None] / 12 * (np.ones((3, 3)) + np.eye(3))[None]
    rows = np.repeat(mesh.triangles, 3, axis=1).ravel()
    cols = np.tile(mesh.triangles, (1, 3)).ravel()
    n = mesh.n_vertices
    K = sp.csr_matrix((Kl.ravel(), (rows, cols)), shape=(n, n))
    M = sp.csr_matrix((Ml.ravel(), (rows, cols)), shape=(n, n))
    return K, M


@dataclass
class EigenPair:
    lambda_sq: float
    u: np.ndarray           # nodal values on the full mesh, M-normalised
    residual: float = 0.0


def solve_eigs(mesh: Mesh, bc: str, k: int, dense_below: int = 3000, tol: float = 0.0) -> list[EigenPair]:
    """The ``k`` smallest eigenpairs of ``K u = lambda^2 M u`` under ``bc``."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if bc not in (DIRICHLET, NEUMANN):
        raise ValueError(f"unknown boundary condition {bc!r}")
    K, M = assemble(mesh)
    if bc == DIRICHLET:
        free = np.flatnonzero(mesh.markers == INTERIOR)
    else:
        free = np.arange(mesh.n_vertices)
    n = len(free)
    if k > n:
        raise ValueError(f"asked for {k} eigenpairs but only {n} degrees of freedom")
    Kf = K[free][:, free].tocsc()
    Mf = M[free][:, free].tocsc()
    if n < dense_below:
        vals, vecs = scipy.linalg.eigh(Kf.toarray(), Mf.toarray(), subset_by_index=[0, k - 1])
    else:
        sigma = -1.0 if bc == NEUMANN else 0.0
        try:
            vals, vecs = spla.eigsh(Kf, k=k, M=Mf, sigma=sigma, which="LM", tol=tol)
        except spla.ArpackNoConvergence as exc:
            raise SolverNoConvergence(f"eigsh did not converge: {exc}") from exc
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
    pairs = []
    for i in range(k):
        v = vecs[:, i]
        v = v / math.sqrt(float(v @ (Mf @ v)))
        j = int(np.argmax(np.abs(v)))
        if v[j] < 0:
            v = -v
        lam = float(max(vals[i], 0.0)) if abs(vals[i]) < 1e-10 else float(vals[i])
        r = Kf @ v - lam * (Mf @ v)
        res = float(math.sqrt(max(r @ spla.spsolve(Mf, r), 0.0))) if n < 2000 else float(np.linalg.norm(r))
        u = np.zeros(mesh.n_vertices)
        u[free] = v
        pairs.append(EigenPair(lam, u, res))
    return pairs


# -- mass near the vertices -------------------------------------------------

def _ngon_radius(eps: float, n: int) -> float:
    # equal-area radius: the n-gon then has area pi * eps**2
    return eps * math.sqrt(math.pi / (0.5 * n * math.sin(2 * math.pi / n)))


def vertex_region(p: Polygon, eps: float, shape: str = "disk", centers=None, sides: int = 512):
    """Union of eps-disks (or axis boxes) around the vertices, clipped to the domain."""
    domain = _shapely_domain(p)
    if centers is None:
        centers = [(float(x), float(y)) for x, y in p.vertices]
    if eps <= 0:
        return sg.Polygon()
    if shape == "disk":
        r = _ngon_radius(eps, sides)
        pieces = [sg.Point(c).buffer(r, quad_segs=sides // 4) for c in centers]
    elif shape == "box":
        pieces = [sg.box(c[0] - eps, c[1] - eps, c[0] + eps, c[1] + eps) for c in centers]
    else:
        raise ValueError(f"unknown neighbourhood shape {shape!r}")
    return shapely.union_all(pieces).intersection(domain)


def _ring_moments(coords: np.ndarray) -> np.ndarray:
    x, y = coords[:-1, 0], coords[:-1, 1]
    x1, y1 = coords[1:, 0], coords[1:, 1]
    c = x * y1 - x1 * y
    return np.array([
        c.sum() / 2,
        ((x + x1) * c).sum() / 6,
        ((y + y1) * c).sum() / 6,
        ((x * x + x * x1 + x1 * x1) * c).sum() / 12,
        ((x * y1 + 2 * x * y + 2 * x1 * y1 + x1 * y) * c).sum() / 24,
        ((y * y + y * y1 + y1 * y1) * c).sum() / 12,
    ])


def polygon_moments(geom, origin=(0.0, 0.0)) -> np.ndarray:
    """``[int 1, x, y, x^2, xy, y^2]`` over a (multi)polygon, coordinates relative to ``origin``."""
    out = np.zeros(6)
    if geom.is_empty:
        return out
    polys = getattr(geom, "geoms", [geom])
    o = np.asarray(origin, float)
    for g in polys:
        if g.geom_type != "Polygon" or g.is_empty:
            continue
        g = shapely.geometry.polygon.orient(g, 1.0)
        out += _ring_moments(np.asarray(g.exterior.coords) - o)
        for ring in g.interiors:
            out += _ring_moments(np.asarray(ring.coords) - o)
    return out


def region_mass_matrix(mesh: Mesh, region) -> sp.csr_matrix:
    """Sparse ``W`` with ``u @ W @ u`` equal to the integral of ``u**2`` over ``region``.

    Exact for piecewise-linear ``u``: each triangle is clipped against the
    region and the quadratic is integrated with polygon moments.
    """
    n = mesh.n_vertices
    if region.is_empty:
        return sp.csr_matrix((n, n))
    tris = shapely.polygons(mesh.vertices[mesh.triangles])
    tree = shapely.STRtree(tris)
    cand = tree.query(region, predicate="intersects")
    cand = np.sort(cand)
    shapely.prepare(region)
    inside = shapely.contains(region, tris[cand])
    rows, cols, vals = [], [], []
    for t, whole in zip(cand, inside):
        P = mesh.vertices[mesh.triangles[t]]
        c = P.mean(axis=0)
        clip = tris[t] if whole else tris[t].intersection(region)
        m = polygon_moments(clip, c)
        if m[0] <= 0:
            continue
        Q = np.array([[m[0], m[1], m[2]], [m[1], m[3], m[4]], [m[2], m[4], m[5]]])
        A = np.column_stack([np.ones(3), P - c])
        Ainv = np.linalg.inv(A)
        W = Ainv.T @ Q @ Ainv
        idx = mesh.triangles[t]
        rows.append(np.repeat(idx, 3))
        cols.append(np.tile(idx, 3))
        vals.append(W.ravel())
    if not vals:
        return sp.csr_matrix((n, n))
    return sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                         shape=(n, n))


def mass_ratio(e: EigenPair, mesh: Mesh, p: Polygon, eps: float, shape: str = "disk",
               centers=None, W=None) -> float:
    """Integral of ``u**2`` over the eps-neighbourhood of the vertices (``u`` is normalised)."""
    if W is None:
        W = region_mass_matrix(mesh, vertex_region(p, eps, shape, centers))
    return float(e.u @ (W @ e.u))


@dataclass
class ControlReport:
    """Mass ratios of the first ``k_max`` eigenfunctions.

    ``ratios`` depend on the basis the solver picks inside a repeated
    eigenvalue.  ``space_ratios`` remove that freedom: for each cluster of
    (numerically) equal eigenvalues they hold the smallest ratio over all
    normalised functions in the span, which is what a lower bound has to
    survive.  ``c_hat`` is the minimum of those.
    """
    eps: float
    bc: str
    h: float
    k_max: int
    shape: str
    lambdas: np.ndarray
    ratios: np.ndarray
    space_ratios: np.ndarray
    clusters: list
    n_vertices: int = 0

    @property
    def c_hat(self) -> float:
        return float(self.space_ratios.min())

    @property
    def argmin(self) -> int:
        return int(self.space_ratios.argmin())


def eigen_clusters(lambdas, rel_tol: float = 3e-3) -> list[list[int]]:
    """Group consecutive eigenvalues whose relative gap is below ``rel_tol``."""
    groups = [[0]]
    for i in range(1, len(lambdas)):
        scale = max(abs(lambdas[i]), 1.0)
        if lambdas[i] - lambdas[i - 1] <= rel_tol * scale:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def control_constant(p: Polygon, eps: float, bc: str, k_max: int, h: float,
                     shape: str = "disk", mesh: Mesh | None = None,
                     cluster_tol: float = 3e-3) -> ControlReport:
    """Mass ratios of the first ``k_max`` eigenfunctions and their minimum."""
    mesh = mesh_polygon(p, h) if mesh is None else mesh
    pairs = solve_eigs(mesh, bc, k_max)
    W = region_mass_matrix(mesh, vertex_region(p, eps, shape))
    U = np.column_stack([e.u for e in pairs])
    lambdas = np.array([e.lambda_sq for e in pairs])
    G = U.T @ (W @ U)
    ratios = np.diag(G).copy()
    clusters = eigen_clusters(lambdas, cluster_tol)
    space = np.empty(k_max)
    for grp in clusters:
        # U is M-orthonormal, so the span minimum is the smallest eigenvalue of G
        space[grp] = np.linalg.eigvalsh(G[np.ix_(grp, grp)])[0]
    return ControlReport(float(eps), bc, float(h), k_max, shape, lambdas, ratios, space,
                         clusters, mesh.n_vertices)


def corner_box_mass(eps: float) -> float:
    """Closed form: mass of ``2 sin(pi x) sin(pi y)`` in the four eps-boxes at the square's corners."""
    one_d = eps / 2 - math.sin(2 * math.pi * eps) / (4 * math.pi)
    return 4 * 4 * one_d ** 2
