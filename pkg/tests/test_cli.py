import json
import os

import numpy as np
import pytest

from phtkit import shapes
from phtkit.cli import main
from phtkit.io import save_complex, save_cover


@pytest.fixture()
def circle_files(tmp_path):
    ngon = shapes.regular_ngon(8)
    cover = shapes.half_circle_cover(ngon)
    cpath = tmp_path / "circle8.json"
    vpath = tmp_path / "halves.json"
    save_complex(ngon, str(cpath))
    save_cover(cover, str(vpath))
    return str(cpath), str(vpath)


@pytest.fixture()
def sphere_files(tmp_path):
    sphere, tags = shapes.subdivided_octahedron_sphere(1)
    cover = shapes.octant_cover(sphere, tags)
    cpath = tmp_path / "sphere.json"
    vpath = tmp_path / "octants.json"
    save_complex(sphere, str(cpath))
    save_cover(cover, str(vpath))
    return str(cpath), str(vpath)


def test_verify_circle_total_exits_zero(circle_files, capsys):
    cpath, vpath = circle_files
    status = main(["verify", "--complex", cpath, "--cover", vpath, "--mode", "total",
                   "--directions", "8", "--jobs", "1"])
    assert status == 0
    out = capsys.readouterr().out
    assert "mismatches=0" in out


def test_verify_fast_circle_agrees(circle_files):
    cpath, vpath = circle_files
    assert main(["verify", "--complex", cpath, "--cover", vpath, "--mode", "fast",
                 "--directions", "8", "--jobs", "1"]) == 0


def test_verify_fast_sphere_octants_exits_one(tmp_path, capsys):
    sphere, tags = shapes.subdivided_octahedron_sphere(2)
    cover = shapes.octant_cover(sphere, tags)
    cpath, vpath = tmp_path / "s.json", tmp_path / "c.json"
    save_complex(sphere, str(cpath))
    save_cover(cover, str(vpath))
    status = main(["verify", "--complex", str(cpath), "--cover", str(vpath),
                   "--mode", "fast", "--directions", "16", "--jobs", "1"])
    assert status == 1
    captured = capsys.readouterr()
    assert "mismatch at" in captured.out
    assert "fast path unsound" in captured.err


def test_missing_input_exits_three(capsys):
    assert main(["pht", "--complex", "missing.off"]) == 3
    assert "error:" in capsys.readouterr().err


def test_usage_error_exits_two(capsys):
    assert main(["pht"]) == 2
    assert main(["frobnicate"]) == 2


def test_pht_writes_sample_and_manifest(tmp_path, circle_files):
    cpath, _ = circle_files
    out = tmp_path / "out"
    status = main(["pht", "--complex", cpath, "--directions", "8", "--jobs", "1",
                   "--out", str(out), "--name", "circle"])
    assert status == 0
    sample = json.loads((out / "circle.json").read_text())
    assert sample["format"] == "phtkit-pht-sample"
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["package"]["name"] == "phtkit"
    assert cpath in manifest["inputs"]
    assert "config_sha256" in manifest


def test_pht_deterministic_across_runs(tmp_path, circle_files):
    cpath, _ = circle_files
    out = tmp_path / "a"
    argv = ["pht", "--complex", cpath, "--directions", "8", "--jobs", "1",
            "--out", str(out), "--name", "s"]
    assert main(argv) == 0
    first = ((out / "s.json").read_bytes(), (out / "manifest.json").read_bytes())
    assert main(argv) == 0
    second = ((out / "s.json").read_bytes(), (out / "manifest.json").read_bytes())
    assert first == second


def test_glue_stream_and_exit(tmp_path, circle_files, capsys):
    cpath, vpath = circle_files
    out = tmp_path / "glue_out"
    status = main(["glue", "--complex", cpath, "--cover", vpath, "--mode", "total",
                   "--directions", "4", "--jobs", "1", "--out", str(out)])
    assert status == 0
    lines = (out / "stalks.jsonl").read_text().strip().split("\n")
    first = json.loads(lines[0])
    assert set(first) == {"v", "t", "e1", "fast_dims", "total_dims", "direct_betti",
                          "fast_agrees", "total_agrees"}
    assert all(json.loads(l)["total_agrees"] for l in lines)


def test_distance_command(tmp_path, circle_files, capsys):
    cpath, _ = circle_files
    for name in ("x", "y"):
        main(["pht", "--complex", cpath, "--directions", "8", "--jobs", "1",
              "--out", str(tmp_path), "--name", name])
    capsys.readouterr()
    status = main(["distance", "--a", str(tmp_path / "x.json"), "--b", str(tmp_path / "y.json")])
    assert status == 0
    assert float(capsys.readouterr().out.strip()) == 0.0


def test_render_command(tmp_path, circle_files):
    cpath, _ = circle_files
    main(["pht", "--complex", cpath, "--directions", "8", "--jobs", "1",
          "--out", str(tmp_path), "--name", "s"])
    svg = tmp_path / "plot.svg"
    assert main(["render", "--sample", str(tmp_path / "s.json"), "--degree", "0",
                 "--out", str(svg)]) == 0
    assert svg.read_text().startswith("<svg")


def test_sample_command(tmp_path, capsys):
    out = tmp_path / "sample_out"
    csv = tmp_path / "cloud.csv"
    status = main(["sample", "--manifold", "circle", "--r", "1", "--n", "120",
                   "--eps", "0.3", "--seed", "5", "--directions", "4", "--jobs", "1",
                   "--out", str(out), "--points-csv", str(csv)])
    assert status == 0
    report = json.loads((out / "report.json").read_text())
    assert report["seed"] == 5 and "distance" in report
    lines = csv.read_text().strip().split("\n")
    assert lines[0] == "x0,x1" and len(lines) == 121


def test_config_file_defaults(tmp_path, circle_files, capsys):
    cpath, vpath = circle_files
    cfg = tmp_path / "run.cfg"
    cfg.write_text("directions = 4\njobs = 1\n# comment\nmode = total\n")
    status = main(["--config", str(cfg), "verify", "--complex", cpath, "--cover", vpath])
    assert status == 0


def test_config_rejects_unknown_keys(tmp_path, circle_files, capsys):
    cpath, vpath = circle_files
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("warp_drive = on\n")
    status = main(["--config", str(cfg), "verify", "--complex", cpath, "--cover", vpath])
    assert status == 2
    assert "unknown config key" in capsys.readouterr().err


def test_out_env_override(tmp_path, circle_files, monkeypatch):
    cpath, _ = circle_files
    env_out = tmp_path / "env_out"
    monkeypatch.setenv("PHTKIT_OUT", str(env_out))
    assert main(["pht", "--complex", cpath, "--directions", "4", "--jobs", "1",
                 "--name", "s"]) == 0
    assert (env_out / "s.json").exists()
