import json

import numpy as np
import pytest

from phtkit import shapes
from phtkit.complexes import Cover, EmbeddedComplex, Subcomplex
from phtkit.homology import euler_characteristic
from phtkit.io import ParseError, load_complex, load_cover, save_complex, save_cover


def test_off_roundtrip_sphere(tmp_path, sphere_and_tags):
    sphere, _ = sphere_and_tags
    path = tmp_path / "sphere.off"
    save_complex(sphere, str(path))
    loaded = load_complex(str(path))
    assert euler_characteristic(loaded) == 2
    assert loaded == sphere
    # a second save/load cycle is bit-stable
    path2 = tmp_path / "sphere2.off"
    save_complex(loaded, str(path2))
    assert path.read_bytes() == path2.read_bytes()


def test_off_header_variants(tmp_path):
    body = "4 1 0\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n3 0 1 2\n"
    for header in ("OFF\n" + body, "OFF " + body):
        p = tmp_path / "t.off"
        p.write_text(header)
        cx = load_complex(str(p))
        assert cx.simplex_counts() == [4, 3, 1]


def test_off_truncated_reports_line(tmp_path):
    p = tmp_path / "trunc.off"
    p.write_text("OFF\n5 2 0\n0 0 0\n1 0 0\n")
    with pytest.raises(ParseError) as err:
        load_complex(str(p))
    assert "trunc.off:" in str(err.value)
    assert "truncated" in str(err.value)


def test_off_rejects_polygons(tmp_path):
    p = tmp_path / "quad.off"
    p.write_text("OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n")
    with pytest.raises(ParseError):
        load_complex(str(p))


def test_off_save_requires_pure_triangle_mesh(tmp_path, ngon8):
    with pytest.raises(ValueError):
        save_complex(ngon8, str(tmp_path / "bad.off"), format="off")


def test_json_roundtrip(tmp_path, ngon8):
    path = tmp_path / "ngon.json"
    save_complex(ngon8, str(path))
    loaded = load_complex(str(path))
    assert loaded == ngon8
    save_complex(loaded, str(tmp_path / "ngon2.json"))
    assert path.read_bytes() == (tmp_path / "ngon2.json").read_bytes()


def test_json_fixed_field_names(tmp_path, ngon8):
    path = tmp_path / "ngon.json"
    save_complex(ngon8, str(path))
    payload = json.loads(path.read_text())
    assert set(payload) == {"dimension", "vertices", "simplices"}


def test_json_missing_field(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"dimension": 2, "vertices": []}')
    with pytest.raises(ParseError):
        load_complex(str(p))


def test_json_closure_violation(tmp_path):
    p = tmp_path / "open.json"
    p.write_text(json.dumps({
        "dimension": 2,
        "vertices": [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
        "simplices": [[[0], [1], [2]], [[0, 1], [0, 2]], [[0, 1, 2]]],
    }))
    with pytest.raises(ParseError) as err:
        load_complex(str(p))
    assert "absent" in str(err.value)


def test_json_syntax_error_line(tmp_path):
    p = tmp_path / "syntax.json"
    p.write_text('{"dimension": 2,\n  "vertices": [[0, 0]\n}')
    with pytest.raises(ParseError) as err:
        load_complex(str(p))
    assert "syntax.json:" in str(err.value)


def test_cover_roundtrip(tmp_path, ngon8, arc_cover):
    path = tmp_path / "cover.json"
    save_cover(arc_cover, str(path))
    loaded = load_cover(str(path), ngon8)
    assert len(loaded) == 2
    for a, b in zip(loaded.elements, arc_cover.elements):
        assert a == b
    save_cover(loaded, str(tmp_path / "cover2.json"))
    assert path.read_bytes() == (tmp_path / "cover2.json").read_bytes()


def test_format_inference(tmp_path, ngon8):
    with pytest.raises(ValueError):
        save_complex(ngon8, str(tmp_path / "x.dat"))
