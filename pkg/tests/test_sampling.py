import math

import numpy as np
import pytest

import oracles
from phtkit.complexes import ComplexError
from phtkit.homology import betti_numbers
from phtkit.miniball import ball_through, smallest_enclosing_ball
from phtkit.sampling import (
    CechParams,
    ManifoldSpec,
    approximation_report,
    cech_complex,
    density_check,
    reference_complex,
    sample_points,
)
from phtkit.transform import make_grid

CIRCLE = ManifoldSpec("circle", radius=1.0)


# -- manifold specs ---------------------------------------------------------------


def test_spec_validation():
    with pytest.raises(ComplexError):
        ManifoldSpec("klein")
    with pytest.raises(ComplexError):
        ManifoldSpec("circle", radius=-1.0)
    with pytest.raises(ComplexError):
        ManifoldSpec("torus", radius=2.0, major_radius=1.0)
    torus = ManifoldSpec("torus", radius=1.0, major_radius=2.0)
    assert torus.tau == 1.0 and torus.ambient_d == 3


# -- sampling ----------------------------------------------------------------------


def test_samples_lie_on_manifold():
    for spec in (CIRCLE, ManifoldSpec("sphere", 2.0), ManifoldSpec("torus", 0.5, 2.0)):
        cloud = sample_points(spec, 500, seed=3)
        assert spec.residual(cloud.points).max() <= 1e-12


def test_sample_reproducible_per_seed():
    a = sample_points(CIRCLE, 100, seed=7)
    b = sample_points(CIRCLE, 100, seed=7)
    c = sample_points(CIRCLE, 100, seed=8)
    assert np.array_equal(a.points, b.points)
    assert not np.array_equal(a.points, c.points)
    assert a.provenance == {"kind": "circle", "radius": 1.0, "major_radius": 0.0, "n": 100, "seed": 7}


def test_circle_mean_concentrates():
    """CLT check: |mean| < 3/sqrt(n) for essentially every seed."""
    n = 400
    hits = 0
    for seed in range(20):
        cloud = sample_points(CIRCLE, n, seed)
        if np.linalg.norm(cloud.points.mean(axis=0)) < 3.0 / math.sqrt(n):
            hits += 1
    assert hits == 20


def test_torus_minor_angle_density():
    """Outer half of the tube carries more than half the samples."""
    spec = ManifoldSpec("torus", radius=1.0, major_radius=3.0)
    cloud = sample_points(spec, 4000, seed=1)
    rho = np.linalg.norm(cloud.points[:, :2], axis=1)
    outer = np.count_nonzero(rho > spec.major_radius)
    assert outer / len(cloud) > 0.55


# -- density -----------------------------------------------------------------------


def test_density_single_point_fails():
    cloud = sample_points(CIRCLE, 1, seed=0)
    report = density_check(cloud, CIRCLE, 0.05)
    assert not report.ok
    assert report.max_gap == pytest.approx(2.0, abs=0.01)  # roughly the diameter


def test_density_regular_sample_passes():
    m = 64
    theta = 2 * math.pi * np.arange(m) / m
    from phtkit.sampling import PointCloud

    cloud = PointCloud(np.column_stack([np.cos(theta), np.sin(theta)]), {})
    spacing = 2 * math.pi / m
    report = density_check(cloud, CIRCLE, 2 * spacing)
    assert report.ok


def test_density_rate_small_monte_carlo():
    passes = sum(
        density_check(sample_points(CIRCLE, 200, seed), CIRCLE, 0.15).ok for seed in range(20)
    )
    assert passes >= 19


# -- enclosing balls ----------------------------------------------------------------


def test_welzl_matches_brute_force():
    rng = np.random.default_rng(77)
    for trial in range(60):
        d = 2 if trial % 2 == 0 else 3
        pts = rng.normal(size=(int(rng.integers(1, d + 3)), d))
        _, r = smallest_enclosing_ball(pts)
        assert r == pytest.approx(oracles.brute_force_meb(pts), abs=1e-9)


def test_ball_through_pair_and_triple():
    c, r = ball_through(np.array([[0.0, 0.0], [2.0, 0.0]]))
    assert np.allclose(c, [1.0, 0.0]) and r == pytest.approx(1.0)
    c, r = ball_through(np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0]]))
    assert np.allclose(c, [0.0, 0.0], atol=1e-12) and r == pytest.approx(1.0)


def test_collinear_points_handled():
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
    _, r = smallest_enclosing_ball(pts)
    assert r == pytest.approx(1.0, abs=1e-12)


# -- the ball-nerve complex -----------------------------------------------------------


def _count(cx, k):
    sc = cx.simplex_counts()
    return sc[k] if k < len(sc) else 0


def test_pair_radius_rule():
    from phtkit.sampling import PointCloud

    eps, delta = 0.3, 1e-6
    near = PointCloud(np.array([[0.0, 0.0], [2 * eps - delta, 0.0]]), {})
    far = PointCloud(np.array([[0.0, 0.0], [2 * eps + delta, 0.0]]), {})
    assert _count(cech_complex(near, CechParams(eps)), 1) == 1
    assert _count(cech_complex(far, CechParams(eps)), 1) == 0


def test_equilateral_triangle_circumradius_rule():
    from phtkit.sampling import PointCloud

    for s, eps in ((1.0, 0.58), (1.0, 0.57), (0.9, 0.1)):
        pts = s * np.array([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3) / 2]])
        cx = cech_complex(PointCloud(pts, {}), CechParams(eps))
        expected = (s / math.sqrt(3.0)) <= eps
        brute = oracles.brute_force_meb(pts) <= eps
        assert expected == brute
        assert bool(_count(cx, 2)) == expected


def test_single_point_cloud():
    from phtkit.sampling import PointCloud

    cx = cech_complex(PointCloud(np.array([[1.0, 2.0]]), {}), CechParams(0.5))
    assert cx.simplex_counts() == [1]


def test_cech_monotone_in_radius():
    cloud = sample_points(CIRCLE, 40, seed=5)
    small = cech_complex(cloud, CechParams(0.2))
    large = cech_complex(cloud, CechParams(0.35))
    small_set = {small.simplex(g) for g in range(small.n_simplices)}
    large_set = {large.simplex(g) for g in range(large.n_simplices)}
    assert small_set <= large_set


def test_cech_triangles_match_meb_oracle():
    import itertools

    cloud = sample_points(CIRCLE, 14, seed=9)
    eps = 0.45
    cx = cech_complex(cloud, CechParams(eps))
    got = {cx.simplex(int(g)) for g in cx.full_subcomplex().active_of_dim(2)}
    expected = {
        (i, j, k)
        for i, j, k in itertools.combinations(range(len(cloud)), 3)
        if oracles.brute_force_meb(cloud.points[[i, j, k]]) <= eps
    }
    assert got == expected


def test_cech_dimension_cap():
    from phtkit.sampling import PointCloud

    pts = 0.01 * np.random.default_rng(0).normal(size=(6, 2))
    cx = cech_complex(PointCloud(pts, {}), CechParams(1.0, max_dim=1))
    assert cx.top_dimension == 1


# -- reference complexes ---------------------------------------------------------------


def test_reference_circle_betti():
    cx = reference_complex(CIRCLE, 256)
    assert betti_numbers(cx) == [1, 1]


def test_reference_sphere_betti():
    cx = reference_complex(ManifoldSpec("sphere", 1.0), 3)
    assert betti_numbers(cx) == [1, 0, 1]
    assert np.allclose(np.linalg.norm(cx.vertices, axis=1), 1.0)


def test_reference_torus_betti():
    cx = reference_complex(ManifoldSpec("torus", 1.0, 2.0), 32)
    assert betti_numbers(cx) == [1, 2, 1]


# -- the report -------------------------------------------------------------------------


def test_report_rejects_large_eps():
    with pytest.raises(ComplexError):
        approximation_report(CIRCLE, 50, 0.5, seed=0)
    with pytest.raises(ComplexError):
        approximation_report(CIRCLE, 50, 0.0, seed=0)


def test_report_single_run():
    rep = approximation_report(CIRCLE, 300, 0.3, seed=0, grid=make_grid(2, 8))
    assert rep["pass"]
    assert rep["betti_complex"] == [1, 1] == rep["betti_reference"]
    assert rep["distance"] <= rep["bound_two_eps_vol"] + 1e-9
    assert rep["bound_two_eps_vol"] == pytest.approx(2 * 0.3 * 2 * math.pi)
    assert rep["compared_degrees"] == [0, 1]
    assert rep["eps_below_tau_over_vol"] == (0.3 < 1.0 / (2 * math.pi))


def test_report_betti_agrees_with_rank_route():
    """Essential-bar Betti in the report equals the boundary-rank computation."""
    cloud = sample_points(CIRCLE, 200, seed=4)
    K = cech_complex(cloud, CechParams(0.3))
    rep = approximation_report(CIRCLE, 200, 0.3, seed=4, grid=make_grid(2, 4))
    assert rep["betti_complex"] == betti_numbers(K, max_degree=1)
