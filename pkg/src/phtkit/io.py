"""Reading and writing complexes and covers: OFF meshes and a JSON schema.

JSON schema (field names are fixed):
  complex: {"dimension": d, "vertices": [[x, ...], ...],
            "simplices": [per-dimension list of sorted vertex tuples]}
  cover:   {"cover": [element, ...]} where each element is a flat list of
           simplices (sorted vertex tuples, mixed dimensions allowed).

OFF covers triangle meshes: vertices plus triangular faces, edges inferred
and closed. save/load round-trips are bit-exact (floats serialized via
repr). Parse errors carry the offending line number.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .complexes import Cover, EmbeddedComplex, Subcomplex, validate

__all__ = [
    "ParseError",
    "load_complex",
    "save_complex",
    "load_cover",
    "save_cover",
]


class ParseError(ValueError):
    def __init__(self, path: str, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line


def _load_off(path: str) -> EmbeddedComplex:
    with open(path) as fh:
        raw = fh.read().splitlines()
    lines = []
    for num, text in enumerate(raw, start=1):
        stripped = text.split("#", 1)[0].strip()
        if stripped:
            lines.append((num, stripped))
    if not lines:
        raise ParseError(path, 1, "empty OFF file")
    pos = 0
    num, first = lines[pos]
    if first.startswith("OFF"):
        rest = first[3:].strip()
        pos += 1
        if rest:
            lines.insert(pos, (num, rest))
    try:
        num, counts = lines[pos]
    except IndexError:
        raise ParseError(path, num, "missing count line") from None
    parts = counts.split()
    if len(parts) < 2:
        raise ParseError(path, num, f"expected 'nv nf [ne]', got {counts!r}")
    try:
        nv, nf = int(parts[0]), int(parts[1])
    except ValueError:
        raise ParseError(path, num, f"bad counts {counts!r}") from None
    pos += 1

    verts = []
    for i in range(nv):
        if pos >= len(lines):
            raise ParseError(path, lines[-1][0], f"truncated: expected {nv} vertices, got {i}")
        num, text = lines[pos]
        try:
            coords = [float(x) for x in text.split()]
        except ValueError:
            raise ParseError(path, num, f"bad vertex line {text!r}") from None
        if len(coords) != 3:
            raise ParseError(path, num, f"expected 3 coordinates, got {len(coords)}")
        verts.append(coords)
        pos += 1

    faces = []
    for i in range(nf):
        if pos >= len(lines):
            raise ParseError(path, lines[-1][0], f"truncated: expected {nf} faces, got {i}")
        num, text = lines[pos]
        try:
            fields = [int(x) for x in text.split()[: 1 + 3]]
        except ValueError:
            raise ParseError(path, num, f"bad face line {text!r}") from None
        if not fields or fields[0] != 3:
            raise ParseError(path, num, "only triangular faces are supported")
        if len(fields) != 4:
            raise ParseError(path, num, f"face line has {len(fields) - 1} indices, expected 3")
        tri = fields[1:]
        if any(v < 0 or v >= nv for v in tri):
            raise ParseError(path, num, f"vertex index out of range in {text!r}")
        faces.append(tuple(tri))
        pos += 1

    top = faces + [(i,) for i in range(nv)]  # keep isolated vertices
    cx = EmbeddedComplex.from_simplices(3, np.asarray(verts, dtype=float), top)
    report = validate(cx)
    if not report.ok:
        raise ParseError(path, 1, f"closure violation: {report.problems[0]}")
    return cx


def _save_off(cx: EmbeddedComplex, path: str):
    if cx.dimension != 3:
        raise ValueError("OFF output needs a 3D complex")
    if cx.top_dimension != 2:
        raise ValueError("OFF output needs a triangle mesh")
    cofaces = cx.coface_ids()
    for gid in range(cx.n_simplices):
        if cx.simplex_dim(gid) < 2 and cofaces[gid].size == 0:
            raise ValueError(
                f"simplex {cx.simplex(gid)} is maximal but not a triangle; OFF cannot represent it"
            )
    tris = cx.simplices[2]
    with open(path, "w") as fh:
        fh.write("OFF\n")
        fh.write(f"{cx.n_vertices} {tris.shape[0]} 0\n")
        for row in cx.vertices:
            fh.write(" ".join(repr(float(x)) for x in row) + "\n")
        for row in tris:
            fh.write("3 " + " ".join(str(int(v)) for v in row) + "\n")


def _load_json_complex(path: str) -> EmbeddedComplex:
    with open(path) as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as e:
            raise ParseError(path, e.lineno, e.msg) from None
    for key in ("dimension", "vertices", "simplices"):
        if key not in payload:
            raise ParseError(path, 1, f"missing field {key!r}")
    cx = EmbeddedComplex(int(payload["dimension"]), payload["vertices"], payload["simplices"])
    report = validate(cx)
    if not report.ok:
        raise ParseError(path, 1, f"invalid complex: {report.problems[0]}")
    return cx


def _save_json_complex(cx: EmbeddedComplex, path: str):
    with open(path, "w") as fh:
        json.dump(cx.canonical_payload(), fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def _format_of(path: str, format: str | None) -> str:
    if format:
        return format
    ext = os.path.splitext(path)[1].lower()
    if ext == ".off":
        return "off"
    if ext == ".json":
        return "json"
    raise ValueError(f"cannot infer format from {path!r}; pass format='off' or 'json'")


def load_complex(path: str, format: str | None = None) -> EmbeddedComplex:
    fmt = _format_of(path, format)
    return _load_off(path) if fmt == "off" else _load_json_complex(path)


def save_complex(cx: EmbeddedComplex, path: str, format: str | None = None):
    fmt = _format_of(path, format)
    if fmt == "off":
        _save_off(cx, path)
    else:
        _save_json_complex(cx, path)


def load_cover(path: str, parent: EmbeddedComplex) -> Cover:
    with open(path) as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as e:
            raise ParseError(path, e.lineno, e.msg) from None
    if "cover" not in payload or not isinstance(payload["cover"], list):
        raise ParseError(path, 1, "missing 'cover' list")
    elements = []
    for simplices in payload["cover"]:
        elements.append(Subcomplex.from_simplices(parent, simplices))
    return Cover(elements)


def save_cover(cover: Cover, path: str):
    payload = {
        "cover": [
            [[int(v) for v in cover.parent.simplex(int(g))] for g in el.active_gids()]
            for el in cover.elements
        ]
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")
