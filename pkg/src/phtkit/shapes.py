"""Built-in shapes and covers: polygons, spheres, tori, and randomized polyhedra.

These feed the demos and the verification suites. Random generators are
fully determined by their seed and keep vertex stars small, so nerves of
top-simplex covers stay a manageable size.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .complexes import Cover, EmbeddedComplex, Subcomplex

__all__ = [
    "regular_ngon",
    "half_circle_cover",
    "square_boundary",
    "octahedron",
    "subdivided_octahedron_sphere",
    "octant_cover",
    "icosahedron_sphere",
    "torus_grid",
    "triangulated_rectangle",
    "random_polyhedron",
    "top_simplex_cover",
    "random_cover",
]


def regular_ngon(n: int, radius: float = 1.0) -> EmbeddedComplex:
    """The boundary of a regular n-gon: the polygonal circle model.

    Coordinates that should be exactly zero (the four axis points) are
    snapped, so ties like "the poles sit at height 0" hold exactly.
    """
    theta = 2.0 * math.pi * np.arange(n) / n
    verts = np.column_stack([np.cos(theta), np.sin(theta)])
    verts[np.abs(verts) < 1e-15] = 0.0
    verts *= radius
    edges = [(i, (i + 1) % n) for i in range(n)]
    return EmbeddedComplex.from_simplices(2, verts, edges)


def half_circle_cover(ngon: EmbeddedComplex) -> Cover:
    """Cover of an n-gon (n divisible by 4) by its closed east and west arcs.

    The arcs meet exactly at the two poles (0, r) and (0, -r).
    """
    n = ngon.n_vertices
    if n % 4 != 0:
        raise ValueError("need n divisible by 4 so the poles are vertices")
    top, bottom = n // 4, 3 * n // 4
    east = [(k % n, (k + 1) % n) for k in range(bottom, n + top)]
    west = [(k, k + 1) for k in range(top, bottom)]
    return Cover([
        Subcomplex.from_simplices(ngon, east),
        Subcomplex.from_simplices(ngon, west),
    ])


def square_boundary(half_side: float = 1.0) -> EmbeddedComplex:
    verts = np.array([[half_side, half_side], [-half_side, half_side],
                      [-half_side, -half_side], [half_side, -half_side]])
    edges = [(0, 1), (1, 2), (2, 3), (0, 3)]
    return EmbeddedComplex.from_simplices(2, verts, edges)


def octahedron(radius: float = 1.0) -> tuple[np.ndarray, list, list]:
    """(vertices, triangles, octant signs): the 8 faces sit in the 8 orthants."""
    verts = radius * np.array([
        [1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1],
    ], dtype=float)
    faces = []
    tags = []
    for sx, ix in ((1, 0), (-1, 1)):
        for sy, iy in ((1, 2), (-1, 3)):
            for sz, iz in ((1, 4), (-1, 5)):
                faces.append(tuple(sorted((ix, iy, iz))))
                tags.append((sx, sy, sz))
    return verts, faces, tags


def _subdivide_tagged(verts: np.ndarray, faces: list, tags: list) -> tuple[np.ndarray, list, list]:
    verts = [tuple(v) for v in verts]
    midpoint: dict[tuple, int] = {}

    def mid(a: int, b: int) -> int:
        key = (a, b) if a < b else (b, a)
        if key not in midpoint:
            pa, pb = verts[a], verts[b]
            verts.append(tuple((x + y) / 2.0 for x, y in zip(pa, pb)))
            midpoint[key] = len(verts) - 1
        return midpoint[key]

    out_faces = []
    out_tags = []
    for (a, b, c), tag in zip(faces, tags):
        ab, ac, bc = mid(a, b), mid(a, c), mid(b, c)
        for tri in ((a, ab, ac), (b, ab, bc), (c, ac, bc), (ab, ac, bc)):
            out_faces.append(tuple(sorted(tri)))
            out_tags.append(tag)
    return np.asarray(verts, dtype=float), out_faces, out_tags


def subdivided_octahedron_sphere(levels: int, radius: float = 1.0) -> tuple[EmbeddedComplex, list]:
    """Sphere model: octahedron subdivided `levels` times, vertices pushed to radius.

    Returns (complex, octant tag per triangle in the complex's triangle
    order); the tags drive octant_cover. With levels >= 2 each curved
    octant has interior vertices, which is what makes its sublevels able to
    be annuli in the octant's own direction.
    """
    verts, faces, tags = octahedron(1.0)
    for _ in range(levels):
        verts, faces, tags = _subdivide_tagged(verts, faces, tags)
    norms = np.linalg.norm(verts, axis=1, keepdims=True)
    verts = radius * verts / norms
    cx = EmbeddedComplex.from_simplices(3, verts, faces)
    tri_rows = [tuple(int(v) for v in row) for row in cx.simplices[2]]
    tag_of = {f: t for f, t in zip(faces, tags)}
    ordered_tags = [tag_of[row] for row in tri_rows]
    return cx, ordered_tags


def octant_cover(sphere: EmbeddedComplex, tags: list) -> Cover:
    """Cover of a subdivided-octahedron sphere by its 8 closed curved octants."""
    by_tag: dict[tuple, list] = {}
    tri_rows = [tuple(int(v) for v in row) for row in sphere.simplices[2]]
    for row, tag in zip(tri_rows, tags):
        by_tag.setdefault(tag, []).append(row)
    elements = [
        Subcomplex.from_simplices(sphere, by_tag[tag])
        for tag in sorted(by_tag)
    ]
    return Cover(elements)


def icosahedron_sphere(levels: int, radius: float = 1.0) -> EmbeddedComplex:
    """Sphere model from a subdivided icosahedron projected to the radius."""
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    raw = []
    for a, b in ((1.0, phi), (-1.0, phi), (1.0, -phi), (-1.0, -phi)):
        raw.extend([(0.0, a, b), (a, b, 0.0), (b, 0.0, a)])
    verts = np.asarray(raw, dtype=float)
    verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    # faces: all vertex triples forming equilateral triangles of edge length 2/sqrt(phi^2+1)
    edge2 = 4.0 / (phi * phi + 1.0)
    faces = []
    n = len(verts)
    for i, j, k in itertools.combinations(range(n), 3):
        d2 = (
            np.sum((verts[i] - verts[j]) ** 2),
            np.sum((verts[i] - verts[k]) ** 2),
            np.sum((verts[j] - verts[k]) ** 2),
        )
        if all(abs(x - edge2) < 1e-9 for x in d2):
            faces.append((i, j, k))
    tags = [None] * len(faces)
    for _ in range(levels):
        verts, faces, tags = _subdivide_tagged(verts, faces, tags)
    verts = radius * verts / np.linalg.norm(verts, axis=1, keepdims=True)
    return EmbeddedComplex.from_simplices(3, verts, faces)


def torus_grid(m: int, major: float = 2.0, minor: float = 1.0) -> EmbeddedComplex:
    """Torus of revolution triangulated on an m x m parameter grid."""
    if m < 3:
        raise ValueError("need m >= 3 for an embedded triangulation")
    verts = []
    for i in range(m):
        u = 2.0 * math.pi * i / m
        for j in range(m):
            w = 2.0 * math.pi * j / m
            rho = major + minor * math.cos(w)
            verts.append((rho * math.cos(u), rho * math.sin(u), minor * math.sin(w)))
    faces = []
    for i in range(m):
        for j in range(m):
            a = i * m + j
            b = ((i + 1) % m) * m + j
            c = i * m + (j + 1) % m
            d = ((i + 1) % m) * m + (j + 1) % m
            faces.append((a, b, d))
            faces.append((a, c, d))
    return EmbeddedComplex.from_simplices(3, np.asarray(verts), faces)


def triangulated_rectangle(nx: int, ny: int, jitter: float = 0.0, seed: int = 0) -> EmbeddedComplex:
    """Grid triangulation of a rectangle; optional interior jitter keeps stars <= 6."""
    rng = np.random.default_rng(seed)
    xs, ys = np.meshgrid(np.arange(nx + 1, dtype=float), np.arange(ny + 1, dtype=float))
    verts = np.column_stack([xs.ravel(), ys.ravel()])
    if jitter > 0:
        bump = rng.uniform(-jitter, jitter, size=verts.shape)
        interior = (verts[:, 0] > 0) & (verts[:, 0] < nx) & (verts[:, 1] > 0) & (verts[:, 1] < ny)
        verts[interior] += bump[interior]
    faces = []
    for i in range(ny):
        for j in range(nx):
            a = i * (nx + 1) + j
            b = a + 1
            c = a + nx + 1
            d = c + 1
            faces.append((a, b, c))
            faces.append((b, c, d))
    return EmbeddedComplex.from_simplices(2, verts, faces)


def _cube_tets() -> tuple[np.ndarray, list]:
    """A unit cube split into 5 tetrahedra."""
    verts = np.array(list(itertools.product((0.0, 1.0), repeat=3)))
    # corner tets + the central regular one, for the 000/011/101/110 parity
    tets = [(0, 1, 2, 4), (3, 1, 2, 7), (5, 1, 4, 7), (6, 2, 4, 7), (1, 2, 4, 7)]
    return verts, [tuple(sorted(t)) for t in tets]


def _rotation(rng: np.random.Generator, d: int) -> np.ndarray:
    a = rng.normal(size=(d, d))
    q, r = np.linalg.qr(a)
    q *= np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def random_polyhedron(seed: int, d: int = 2, max_simplices: int = 300) -> EmbeddedComplex:
    """A randomized polyhedron: triangulated patch with holes (d=2) or a small
    3D shape (sphere, torus patch, solid cube, or cube with a fin).

    Deterministic per seed; vertex stars stay small so top-simplex covers
    have tame nerves.
    """
    rng = np.random.default_rng(seed)
    if d == 2:
        nx = int(rng.integers(3, 6))
        ny = int(rng.integers(3, 6))
        base = triangulated_rectangle(nx, ny, jitter=0.25, seed=int(rng.integers(0, 2**31)))
        tris = [tuple(int(v) for v in row) for row in base.simplices[2]]
        n_drop = int(rng.integers(0, max(1, len(tris) // 3)))
        drop = set(rng.choice(len(tris), size=n_drop, replace=False).tolist()) if n_drop else set()
        keep = [t for i, t in enumerate(tris) if i not in drop]
        if not keep:
            keep = tris[:1]
        # dropping triangles keeps their edges: mixed-dimension polyhedra are fine
        top = list(keep)
        kept_edges = set()
        for t in keep:
            for e in itertools.combinations(t, 2):
                kept_edges.add(e)
        for i in sorted(drop):
            for e in itertools.combinations(tris[i], 2):
                if e not in kept_edges and rng.random() < 0.5:
                    top.append(e)
                    kept_edges.add(e)
        verts = base.vertices @ _rotation(rng, 2).T * rng.uniform(0.5, 1.5)
        cx = EmbeddedComplex.from_simplices(2, verts, top)
    else:
        kind = int(rng.integers(0, 4))
        if kind == 0:
            cx, _ = subdivided_octahedron_sphere(1, radius=float(rng.uniform(0.5, 2.0)))
        elif kind == 1:
            cx = torus_grid(int(rng.integers(3, 5)), major=2.0, minor=float(rng.uniform(0.5, 1.0)))
        elif kind == 2:
            verts, tets = _cube_tets()
            cx = EmbeddedComplex.from_simplices(3, verts, tets)
        else:
            verts, tets = _cube_tets()
            verts = np.vstack([verts, [[0.5, 0.5, 1.8]]])
            fin = (4, 5, 8)
            cx = EmbeddedComplex.from_simplices(3, verts, list(tets) + [fin])
        verts = cx.vertices @ _rotation(rng, 3).T
        cx = EmbeddedComplex(3, verts, [[list(map(int, r)) for r in arr] for arr in cx.simplices])
    if cx.n_simplices > max_simplices:
        raise AssertionError(f"generator produced {cx.n_simplices} > {max_simplices} simplices")
    return cx


def maximal_simplices(cx: EmbeddedComplex) -> list[tuple]:
    cofaces = cx.coface_ids()
    out = []
    for gid in range(cx.n_simplices):
        if cofaces[gid].size == 0:
            out.append(cx.simplex(gid))
    return out


def top_simplex_cover(cx: EmbeddedComplex) -> Cover:
    """Cover by the face closures of the maximal simplices (the nerve-lemma cover)."""
    return Cover([Subcomplex.from_simplices(cx, [s]) for s in maximal_simplices(cx)])


def random_cover(cx: EmbeddedComplex, k: int, seed: int) -> Cover:
    """Random closed cover: maximal simplices dealt into k groups (non-convex)."""
    rng = np.random.default_rng(seed)
    tops = maximal_simplices(cx)
    k = min(k, len(tops))
    assignment = rng.integers(0, k, size=len(tops))
    # every group gets at least one simplex
    for g in range(k):
        if not np.any(assignment == g):
            assignment[int(rng.integers(0, len(tops)))] = g
    groups = [[] for _ in range(k)]
    for t, g in zip(tops, assignment):
        groups[int(g)].append(t)
    return Cover([Subcomplex.from_simplices(cx, g) for g in groups if g])
