"""Command-line interface: pht, glue, verify, sample, distance, render.

Exit codes: 0 success (and, for verify/glue, all stalks agree);
1 verification mismatch; 2 usage error; 3 I/O or parse error.

Every run that writes into an output directory also writes manifest.json
(config hash, input hashes, package version) so outputs are attributable
and byte-reproducible: nothing in any artifact depends on time or host.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

import numpy as np

from . import __version__
from .complexes import ComplexError, Cover
from .glue import build_nerve, convexity_check, critical_t_grid, stalk_report, verify_descent
from .io import ParseError, load_complex, load_cover
from .parallel import available_jobs
from .sampling import ManifoldSpec, approximation_report, sample_points
from .transform import (
    compute_pht,
    make_grid,
    pht_distance,
    render_heatmap,
    sample_from_json,
    sample_to_json,
)

OUT_ENV = "PHTKIT_OUT"


class CliError(Exception):
    def __init__(self, message: str, status: int):
        super().__init__(message)
        self.status = status


def _sha256_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(out_dir: str, config: dict, inputs: list[str]):
    config = {k: v for k, v in sorted(config.items()) if k not in ("func",)}
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    manifest = {
        "config": json.loads(blob),
        "config_sha256": hashlib.sha256(blob.encode()).hexdigest(),
        "inputs": {p: _sha256_file(p) for p in sorted(set(inputs))},
        "package": {"name": "phtkit", "version": __version__},
    }
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _resolve_out(args) -> str | None:
    out = getattr(args, "out", None)
    if out is None:
        out = os.environ.get(OUT_ENV)
    if out:
        os.makedirs(out, exist_ok=True)
    return out


def _load_inputs(args, need_cover: bool = False):
    cx = load_complex(args.complex)
    cover = load_cover(args.cover, cx) if need_cover else None
    return cx, cover


def _grid_for(args, d: int):
    return make_grid(d, args.directions)


def _t_grid_arg(args):
    if getattr(args, "t_grid", None):
        return np.array([float(x) for x in args.t_grid.split(",")])
    return None


def _cmd_pht(args) -> int:
    cx, _ = _load_inputs(args)
    grid = _grid_for(args, cx.dimension)
    sample = compute_pht(cx, grid, max_degree=args.max_degree, jobs=args.jobs)
    text = sample_to_json(sample)
    out = _resolve_out(args)
    if out:
        path = os.path.join(out, args.name + ".json")
        with open(path, "w") as fh:
            fh.write(text + "\n")
        _write_manifest(out, vars(args), [args.complex])
        print(path)
    else:
        print(text)
    return 0


def _cmd_glue(args) -> int:
    cx, cover = _load_inputs(args, need_cover=True)
    nerve = build_nerve(cover)
    vectors = make_grid(cx.dimension, args.directions).directions
    t_grid = _t_grid_arg(args)
    out = _resolve_out(args)
    stream = open(os.path.join(out, "stalks.jsonl"), "w") if out else sys.stdout
    agree = 0
    total = 0
    try:
        for v in vectors:
            ts = critical_t_grid(cx, v) if t_grid is None else t_grid
            for t in ts:
                report = stalk_report(nerve, v, float(t))
                total += 1
                ok = report.total_agrees if args.mode == "total" else report.fast_agrees
                agree += ok
                stream.write(json.dumps(report.to_dict(), sort_keys=True) + "\n")
    finally:
        if out:
            stream.close()
            _write_manifest(out, vars(args), [args.complex, args.cover])
    print(f"stalks={total} agree={agree} disagree={total - agree} mode={args.mode}", file=sys.stderr)
    return 0 if agree == total else 1


def _cmd_verify(args) -> int:
    cx, cover = _load_inputs(args, need_cover=True)
    mode = "total" if args.mode == "total" else "fastH0"
    grid = _grid_for(args, cx.dimension)
    report = verify_descent(cover, grid, mode=mode, t_grid=_t_grid_arg(args), jobs=args.jobs)
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(f"stalks={report.n_stalks} mismatches={report.n_mismatches} mode={report.mode}")
    for k, v, t, glued, direct in report.mismatches[:20]:
        print(f"  mismatch at v={list(v)} t={t}: glued={glued} direct={direct}")
    return 0 if report.ok else 1


def _cmd_sample(args) -> int:
    spec = ManifoldSpec(args.manifold, radius=args.r, major_radius=args.R)
    grid = make_grid(spec.ambient_d, args.directions)
    report = approximation_report(spec, args.n, args.eps, args.seed, grid=grid, jobs=args.jobs)
    text = json.dumps(report, sort_keys=True, indent=2)
    out = _resolve_out(args)
    if args.points_csv:
        cloud = sample_points(spec, args.n, args.seed)
        with open(args.points_csv, "w") as fh:
            fh.write(",".join(f"x{i}" for i in range(spec.ambient_d)) + "\n")
            for row in cloud.points:
                fh.write(",".join(repr(float(x)) for x in row) + "\n")
    if out:
        path = os.path.join(out, "report.json")
        with open(path, "w") as fh:
            fh.write(text + "\n")
        _write_manifest(out, vars(args), [])
        print(path)
    else:
        print(text)
    return 0


def _cmd_distance(args) -> int:
    with open(args.a) as fh:
        sample_a = sample_from_json(fh.read())
    with open(args.b) as fh:
        sample_b = sample_from_json(fh.read())
    print(repr(pht_distance(sample_a, sample_b)))
    return 0


def _cmd_render(args) -> int:
    with open(args.sample) as fh:
        sample = sample_from_json(fh.read())
    render_heatmap(sample, args.degree, args.out)
    print(args.out)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phtkit",
        description="Persistent homology transforms: compute, glue over covers, verify, sample manifolds.",
    )
    parser.add_argument("--config", help="key = value file of defaults (flags win)")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, cover=False):
        p.add_argument("--complex", required=True, help="complex file (.json or .off)")
        if cover:
            p.add_argument("--cover", required=True, help="cover file (.json)")
        p.add_argument("--directions", type=int, default=16)
        p.add_argument("--jobs", type=int, default=available_jobs())
        p.add_argument("--out", help=f"output directory (or ${OUT_ENV})")

    p = sub.add_parser("pht", help="compute the transform of a complex")
    common(p)
    p.add_argument("--max-degree", type=int, default=None)
    p.add_argument("--name", default="pht_sample")
    p.set_defaults(func=_cmd_pht)

    p = sub.add_parser("glue", help="stream per-stalk gluing reports")
    common(p, cover=True)
    p.add_argument("--mode", choices=["fast", "total"], default="total")
    p.add_argument("--t-grid", help="comma-separated levels (default: critical values)")
    p.set_defaults(func=_cmd_glue)

    p = sub.add_parser("verify", help="check glued-vs-direct equivalence (exit 0 iff all agree)")
    common(p, cover=True)
    p.add_argument("--mode", choices=["fast", "total"], default="total")
    p.add_argument("--t-grid", help="comma-separated levels (default: critical values)")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("sample", help="sample a manifold and test the approximation bound")
    p.add_argument("--manifold", choices=["circle", "sphere", "torus"], required=True)
    p.add_argument("--r", type=float, default=1.0, help="radius (torus: minor radius)")
    p.add_argument("--R", type=float, default=0.0, help="torus major radius")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--directions", type=int, default=8)
    p.add_argument("--jobs", type=int, default=available_jobs())
    p.add_argument("--points-csv", help="also export the point cloud as CSV")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("distance", help="weighted bottleneck distance between two samples")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.set_defaults(func=_cmd_distance)

    p = sub.add_parser("render", help="render a polar Betti-curve heatmap (d=2)")
    p.add_argument("--sample", required=True)
    p.add_argument("--degree", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_render)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    """Pull --config out of argv and splice its keys in as leading defaults."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    try:
        path = argv[i + 1]
    except IndexError:
        raise CliError("--config needs a file argument", 2) from None
    rest = argv[:i] + argv[i + 2:]
    known = {"directions", "jobs", "mode", "max_degree", "out", "t_grid", "name"}
    extra: list[str] = []
    try:
        with open(path) as fh:
            for num, line in enumerate(fh, start=1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise CliError(f"{path}:{num}: expected 'key = value'", 2)
                key, value = (part.strip() for part in line.split("=", 1))
                key = key.replace("-", "_")
                if key not in known:
                    raise CliError(f"{path}:{num}: unknown config key {key!r}", 2)
                extra.extend([f"--{key.replace('_', '-')}", value])
    except OSError as e:
        raise CliError(f"cannot read config {path!r}: {e}", 3) from None
    # flags given on the command line win: argparse keeps the last occurrence
    return rest[:1] + extra + rest[1:]


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        argv = _apply_config(parser, argv)
        try:
            args = parser.parse_args(argv)
        except SystemExit as e:
            return int(e.code or 0)
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.status
    except (ParseError, ComplexError, OSError, json.JSONDecodeError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3


def entry():  # console script
    sys.exit(main())


if __name__ == "__main__":
    entry()
