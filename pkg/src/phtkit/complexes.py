"""Embedded simplicial complexes, subcomplexes, covers, and directional sublevel sets.

Everything downstream (filtrations, barcodes, Cech gluing) works on these
types. All of them are immutable after construction and all operations are
pure functions, so grids of (direction, level) queries can be evaluated
concurrently without shared state.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

__all__ = [
    "EmbeddedComplex",
    "Subcomplex",
    "Cover",
    "Direction",
    "ValidationReport",
    "validate",
    "intersect",
    "height",
    "sublevel",
    "components",
]

UNIT_TOLERANCE = 1e-12


class ComplexError(ValueError):
    """Raised for structurally invalid complexes, masks, or covers."""


@dataclass(frozen=True)
class Direction:
    """A unit vector on S^{d-1}; the viewing direction of a height filtration."""

    vector: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vector, dtype=float)
        if v.ndim != 1:
            raise ComplexError("direction must be a flat vector")
        if abs(float(np.linalg.norm(v)) - 1.0) > UNIT_TOLERANCE:
            raise ComplexError(f"direction norm {np.linalg.norm(v)!r} is not 1 within {UNIT_TOLERANCE}")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "vector", v)

    @property
    def d(self) -> int:
        return self.vector.shape[0]

    @staticmethod
    def from_angle(theta: float) -> "Direction":
        return Direction(np.array([math.cos(theta), math.sin(theta)]))

    @staticmethod
    def normalized(v) -> "Direction":
        v = np.asarray(v, dtype=float)
        n = float(np.linalg.norm(v))
        if n == 0.0:
            raise ComplexError("cannot normalize the zero vector")
        return Direction(v / n)


def _as_direction(v) -> Direction:
    return v if isinstance(v, Direction) else Direction(np.asarray(v, dtype=float))


class EmbeddedComplex:
    """A finite simplicial complex with vertex coordinates in R^d (d = 2 or 3).

    simplices[k] is an integer array of shape (m_k, k+1); each row is a
    strictly increasing vertex tuple, rows in lexicographic order. The
    constructor canonicalizes ordering but does not enforce closure; use
    validate() for a full invariant report, or from_simplices() to build a
    complex that is face-closed by construction.
    """

    def __init__(self, dimension: int, vertices, simplices: Sequence[Sequence[Sequence[int]]]):
        if dimension not in (2, 3):
            raise ComplexError(f"ambient dimension must be 2 or 3, got {dimension}")
        self.dimension = int(dimension)
        verts = np.asarray(vertices, dtype=float).reshape(-1, dimension)
        verts.flags.writeable = False
        self.vertices = verts

        canon: list[np.ndarray] = []
        for k, simps in enumerate(simplices):
            arr = np.asarray(sorted(tuple(sorted(map(int, s))) for s in simps), dtype=np.int64)
            arr = arr.reshape(-1, k + 1)
            arr.flags.writeable = False
            canon.append(arr)
        while canon and canon[-1].shape[0] == 0:
            canon.pop()
        self.simplices = canon

        self._counts = [a.shape[0] for a in self.simplices]
        self._offsets = np.concatenate([[0], np.cumsum(self._counts)]).astype(np.int64)
        self.n_simplices = int(self._offsets[-1])
        self._index: Optional[dict] = None
        self._facet_ids: Optional[list] = None
        self._coface_ids: Optional[list] = None
        self._dims: Optional[np.ndarray] = None

    # -- structure ---------------------------------------------------------

    @property
    def top_dimension(self) -> int:
        return len(self.simplices) - 1

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    def simplex_counts(self) -> list[int]:
        return list(self._counts)

    def simplex(self, gid: int) -> tuple[int, ...]:
        """Vertex tuple of the simplex with global id gid (dim-major order)."""
        k = int(np.searchsorted(self._offsets, gid, side="right") - 1)
        return tuple(int(v) for v in self.simplices[k][gid - self._offsets[k]])

    def simplex_dim(self, gid: int) -> int:
        return int(np.searchsorted(self._offsets, gid, side="right") - 1)

    def gids_of_dim(self, k: int) -> np.ndarray:
        return np.arange(self._offsets[k], self._offsets[k + 1], dtype=np.int64)

    def dims_array(self) -> np.ndarray:
        """Dimension of every simplex, indexed by global id."""
        if self._dims is None:
            out = np.empty(self.n_simplices, dtype=np.int64)
            for k in range(len(self.simplices)):
                out[self._offsets[k]:self._offsets[k + 1]] = k
            out.flags.writeable = False
            self._dims = out
        return self._dims

    def index(self) -> dict:
        """Map vertex tuple -> global id. Requires a duplicate-free complex."""
        if self._index is None:
            idx = {}
            gid = 0
            for arr in self.simplices:
                for row in arr:
                    idx[tuple(int(v) for v in row)] = gid
                    gid += 1
            self._index = idx
        return self._index

    def _encode_rows(self, arr: np.ndarray) -> np.ndarray | None:
        """Pack sorted vertex tuples into int64 keys; None if they would overflow."""
        base = max(self.n_vertices, 1)
        width = arr.shape[1]
        if base ** width >= 2 ** 62:
            return None
        key = arr[:, 0].astype(np.int64)
        for i in range(1, width):
            key = key * base + arr[:, i]
        return key

    def facet_ids(self) -> list:
        """facet_ids()[k] has shape (m_k, k+1): global ids of each k-simplex's facets.

        Entry [j, i] is the id of the facet omitting vertex position i.
        Vertices (k = 0) get an empty array.
        """
        if self._facet_ids is None:
            out = [np.empty((self._counts[0], 0), dtype=np.int64)]
            for k in range(1, len(self.simplices)):
                arr = self.simplices[k]
                faces = self.simplices[k - 1]
                ids = np.empty((arr.shape[0], k + 1), dtype=np.int64)
                face_keys = self._encode_rows(faces) if faces.size else None
                if arr.size and face_keys is not None:
                    cols = np.arange(k + 1)
                    for i in range(k + 1):
                        sub = arr[:, cols[cols != i]].reshape(-1, k)
                        keys = self._encode_rows(sub)
                        where = np.searchsorted(face_keys, keys)
                        if np.any(where >= face_keys.size) or np.any(face_keys[np.minimum(where, face_keys.size - 1)] != keys):
                            raise ComplexError("face missing; validate() the complex first")
                        ids[:, i] = where + self._offsets[k - 1]
                elif arr.size:
                    idx = self.index()
                    for j, row in enumerate(arr):
                        t = tuple(int(v) for v in row)
                        for i in range(k + 1):
                            ids[j, i] = idx[t[:i] + t[i + 1:]]
                ids.flags.writeable = False
                out.append(ids)
            self._facet_ids = out
        return self._facet_ids

    def coface_ids(self) -> list:
        """Per global id, the array of global ids of its codimension-1 cofaces."""
        if self._coface_ids is None:
            facet_ids = self.facet_ids()
            parts_faces = []
            parts_cofaces = []
            for k in range(1, len(self.simplices)):
                if not self._counts[k]:
                    continue
                parts_faces.append(facet_ids[k].ravel())
                gids = np.arange(self._offsets[k], self._offsets[k + 1], dtype=np.int64)
                parts_cofaces.append(np.repeat(gids, k + 1))
            out: list[np.ndarray] = [np.empty(0, dtype=np.int64)] * self.n_simplices
            if parts_faces:
                faces = np.concatenate(parts_faces)
                cofs = np.concatenate(parts_cofaces)
                order = np.argsort(faces, kind="stable")
                faces = faces[order]
                cofs = cofs[order]
                uniq, starts = np.unique(faces, return_index=True)
                bounds = np.append(starts, faces.size)
                for u, lo, hi in zip(uniq, bounds[:-1], bounds[1:]):
                    out[int(u)] = cofs[lo:hi]
            self._coface_ids = out
        return self._coface_ids

    # -- geometry ----------------------------------------------------------

    def vertex_heights(self, v) -> np.ndarray:
        """Dot product of every vertex with the direction v."""
        return self.vertices @ _as_direction(v).vector

    def heights(self, v) -> np.ndarray:
        """Height of every simplex (max over its vertices), by global id."""
        hv = self.vertex_heights(v)
        out = np.empty(self.n_simplices, dtype=float)
        for k, arr in enumerate(self.simplices):
            seg = slice(self._offsets[k], self._offsets[k + 1])
            out[seg] = hv[arr].max(axis=1) if arr.size else np.empty(0)
        return out

    # -- identity ----------------------------------------------------------

    def __getstate__(self):
        state = self.__dict__.copy()
        state["_index"] = None
        state["_facet_ids"] = None
        state["_coface_ids"] = None
        state["_dims"] = None
        return state

    def canonical_payload(self) -> dict:
        return {
            "dimension": self.dimension,
            "vertices": [[float(x) for x in row] for row in self.vertices],
            "simplices": [[[int(v) for v in row] for row in arr] for arr in self.simplices],
        }

    def content_hash(self) -> str:
        payload = json.dumps(self.canonical_payload(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()

    def full_subcomplex(self) -> "Subcomplex":
        return Subcomplex(self, np.ones(self.n_simplices, dtype=bool))

    def __eq__(self, other) -> bool:
        if not isinstance(other, EmbeddedComplex):
            return NotImplemented
        return (
            self.dimension == other.dimension
            and self.vertices.shape == other.vertices.shape
            and np.array_equal(self.vertices, other.vertices)
            and len(self.simplices) == len(other.simplices)
            and all(np.array_equal(a, b) for a, b in zip(self.simplices, other.simplices))
        )

    def __repr__(self) -> str:
        counts = "+".join(str(c) for c in self._counts) or "0"
        return f"EmbeddedComplex(d={self.dimension}, vertices={self.n_vertices}, simplices={counts})"

    @staticmethod
    def from_simplices(dimension: int, vertices, top_simplices: Iterable[Sequence[int]]) -> "EmbeddedComplex":
        """Build the face closure of the given simplices (any dimensions mixed)."""
        by_dim: list[set] = []
        for s in top_simplices:
            t = tuple(sorted(map(int, s)))
            if len(set(t)) != len(t):
                raise ComplexError(f"simplex {t} repeats a vertex")
            for r in range(1, len(t) + 1):
                while len(by_dim) < r:
                    by_dim.append(set())
                for face in itertools.combinations(t, r):
                    by_dim[r - 1].add(face)
        return EmbeddedComplex(dimension, vertices, [sorted(s) for s in by_dim])


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    problems: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def validate(complex: EmbeddedComplex) -> ValidationReport:
    """Check closure, duplicates, index ranges, and coordinate finiteness.

    Returns a report rather than raising; the first problem names the
    offending simplex.
    """
    problems: list[str] = []
    n = complex.n_vertices
    if not np.all(np.isfinite(complex.vertices)):
        bad = int(np.argwhere(~np.isfinite(complex.vertices))[0][0])
        problems.append(f"vertex {bad} has a non-finite coordinate")

    listed: set = set()
    for k, arr in enumerate(complex.simplices):
        seen: set = set()
        for row in arr:
            t = tuple(int(v) for v in row)
            if len(set(t)) != len(t) or list(t) != sorted(t):
                problems.append(f"simplex {t} is not strictly sorted")
                continue
            if t in seen:
                problems.append(f"duplicate simplex {t}")
            seen.add(t)
            if t[0] < 0 or t[-1] >= n:
                problems.append(f"simplex {t} has a vertex index out of range [0, {n})")
        listed |= seen

    for k, arr in enumerate(complex.simplices):
        if k == 0:
            continue
        for row in arr:
            t = tuple(int(v) for v in row)
            for i in range(k + 1):
                face = t[:i] + t[i + 1:]
                if face not in listed:
                    problems.append(f"face {face} of {t} absent")
    return ValidationReport(ok=not problems, problems=tuple(problems))


class Subcomplex:
    """A face-closed selection of simplices of a parent complex, as a flat mask."""

    def __init__(self, parent: EmbeddedComplex, simplex_mask):
        mask = np.asarray(simplex_mask, dtype=bool)
        if mask.shape != (parent.n_simplices,):
            raise ComplexError(f"mask length {mask.shape} does not match parent simplex count {parent.n_simplices}")
        mask = mask.copy()
        mask.flags.writeable = False
        self.parent = parent
        self.mask = mask

    @staticmethod
    def from_simplices(parent: EmbeddedComplex, simplices: Iterable[Sequence[int]]) -> "Subcomplex":
        """Mask the face closure of the given simplices of the parent."""
        idx = parent.index()
        mask = np.zeros(parent.n_simplices, dtype=bool)
        for s in simplices:
            t = tuple(sorted(map(int, s)))
            if t not in idx:
                raise ComplexError(f"simplex {t} not in parent")
            for r in range(1, len(t) + 1):
                for face in itertools.combinations(t, r):
                    mask[idx[face]] = True
        return Subcomplex(parent, mask)

    def is_face_closed(self) -> bool:
        facet_ids = self.parent.facet_ids()
        offsets = self.parent._offsets
        for k in range(1, len(self.parent.simplices)):
            rows = self.mask[offsets[k]:offsets[k + 1]]
            if not rows.any():
                continue
            present = facet_ids[k][rows]
            if not self.mask[present].all():
                return False
        return True

    def n_active(self) -> int:
        return int(self.mask.sum())

    def is_empty(self) -> bool:
        return not self.mask.any()

    def active_gids(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    def active_of_dim(self, k: int) -> np.ndarray:
        """Global ids of the active k-simplices."""
        if k >= len(self.parent.simplices):
            return np.empty(0, dtype=np.int64)
        o = self.parent._offsets
        return o[k] + np.flatnonzero(self.mask[o[k]:o[k + 1]])

    def vertex_ids(self) -> np.ndarray:
        """Vertex indices of the active 0-simplices."""
        a = self.active_of_dim(0)
        return self.parent.simplices[0][a - self.parent._offsets[0]][:, 0] if a.size else np.empty(0, dtype=np.int64)

    def simplex_counts(self) -> list[int]:
        return [int(self.active_of_dim(k).size) for k in range(len(self.parent.simplices))]

    def same_parent(self, other: "Subcomplex") -> bool:
        return self.parent is other.parent

    def to_complex(self) -> tuple[EmbeddedComplex, np.ndarray]:
        """Extract a standalone complex; returns it with the old->new vertex map inverse.

        The second value maps new vertex index -> parent vertex index.
        """
        verts = self.vertex_ids()
        remap = {int(v): i for i, v in enumerate(verts)}
        per_dim = []
        for k in range(len(self.parent.simplices)):
            gids = self.active_of_dim(k)
            rows = self.parent.simplices[k][gids - self.parent._offsets[k]] if gids.size else np.empty((0, k + 1), dtype=np.int64)
            per_dim.append([[remap[int(v)] for v in row] for row in rows])
        sub = EmbeddedComplex(self.parent.dimension, self.parent.vertices[verts] if verts.size else np.empty((0, self.parent.dimension)), per_dim)
        return sub, verts

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subcomplex):
            return NotImplemented
        return self.parent is other.parent and np.array_equal(self.mask, other.mask)

    def __repr__(self) -> str:
        return f"Subcomplex({self.n_active()}/{self.parent.n_simplices} simplices)"


@dataclass(frozen=True)
class Cover:
    """A finite closed cover of a complex by subcomplexes of one parent."""

    elements: tuple

    def __init__(self, elements: Sequence[Subcomplex]):
        elements = tuple(elements)
        if not elements:
            raise ComplexError("a cover needs at least one element")
        parent = elements[0].parent
        for e in elements[1:]:
            if e.parent is not parent:
                raise ComplexError("cover elements must share one parent complex")
        union = np.zeros(parent.n_simplices, dtype=bool)
        for e in elements:
            union |= e.mask
        if not union.all():
            missing = parent.simplex(int(np.flatnonzero(~union)[0]))
            raise ComplexError(f"cover does not reach simplex {missing}")
        object.__setattr__(self, "elements", elements)

    @property
    def parent(self) -> EmbeddedComplex:
        return self.elements[0].parent

    def __len__(self) -> int:
        return len(self.elements)


def intersect(elements: Sequence[Subcomplex]) -> Subcomplex:
    """Simplex-set intersection of subcomplexes sharing a parent; face-closed."""
    if not elements:
        raise ComplexError("nothing to intersect")
    parent = elements[0].parent
    mask = elements[0].mask.copy()
    for e in elements[1:]:
        if e.parent is not parent:
            raise ComplexError("cannot intersect subcomplexes of different parents")
        mask &= e.mask
    return Subcomplex(parent, mask)


def height(complex: EmbeddedComplex, simplex: Sequence[int], v) -> float:
    """Max over the simplex's vertices of coordinate . v (exact for linear cells)."""
    t = tuple(sorted(map(int, simplex)))
    if t not in complex.index():
        raise ComplexError(f"simplex {t} not in complex")
    hv = complex.vertex_heights(v)
    return float(hv[list(t)].max())


def sublevel(sub: Subcomplex, v, t: float) -> Subcomplex:
    """Simplices of sub with height <= t (closed half-space); face-closed."""
    h = sub.parent.heights(v)
    return Subcomplex(sub.parent, sub.mask & (h <= t))


class _UnionFind:
    __slots__ = ("parent",)

    def __init__(self):
        self.parent: dict[int, int] = {}

    def add(self, x: int):
        if x not in self.parent:
            self.parent[x] = x

    def find(self, x: int) -> int:
        p = self.parent
        root = x
        while p[root] != root:
            root = p[root]
        while p[x] != root:
            p[x], x = root, p[x]
        return root

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # keep the smaller vertex index as the root so labels are canonical
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


def components(sub: Subcomplex) -> tuple[dict[int, int], int]:
    """Connected components of the 1-skeleton of sub.

    Returns (vertex -> component id, count); each component's id is its
    minimal vertex index, which makes downstream Cech differentials
    reproducible.
    """
    uf = _UnionFind()
    for v in sub.vertex_ids():
        uf.add(int(v))
    edges = sub.active_of_dim(1)
    if edges.size:
        o = sub.parent._offsets
        rows = sub.parent.simplices[1][edges - o[1]]
        for a, b in rows:
            uf.union(int(a), int(b))
    labels = {x: uf.find(x) for x in sorted(uf.parent)}
    return labels, len(set(labels.values()))
