import math

import numpy as np
import pytest

import oracles
from phtkit.persistence import Barcode, bottleneck


def make_barcode(finite, essential=()):
    births = [iv[0] for iv in finite] + list(essential)
    deaths = [iv[1] for iv in finite] + [math.inf] * len(essential)
    return Barcode([births], [deaths])


def random_barcode(rng: np.random.Generator, max_finite=6, max_essential=2):
    n = int(rng.integers(0, max_finite + 1))
    births = rng.uniform(-2.0, 2.0, size=n)
    lengths = rng.uniform(0.0, 2.0, size=n)
    finite = list(zip(births, births + lengths))
    essential = list(rng.uniform(-2.0, 2.0, size=int(rng.integers(0, max_essential + 1))))
    return make_barcode(finite, essential), finite, essential


def test_identical_barcodes_zero():
    bc, *_ = random_barcode(np.random.default_rng(0))
    assert bottleneck(bc, bc, 0) == 0.0


def test_two_interval_example():
    a = make_barcode([(0.0, 4.0)])
    b = make_barcode([(1.0, 3.0)])
    # matching costs max(1,1)=1; deleting both costs max(2,1)=2
    assert bottleneck(a, b, 0) == pytest.approx(1.0, abs=1e-12)


def test_essential_count_mismatch_infinite():
    a = make_barcode([], essential=[0.0])
    b = make_barcode([])
    assert bottleneck(a, b, 0) == math.inf


def test_essential_matched_by_birth_difference():
    a = make_barcode([], essential=[0.0, 5.0])
    b = make_barcode([], essential=[0.5, 5.2])
    assert bottleneck(a, b, 0) == pytest.approx(0.5, abs=1e-12)


def test_missing_degree_treated_as_empty():
    a = make_barcode([(0.0, 1.0)])
    b = make_barcode([])
    assert bottleneck(a, b, 5) == 0.0


def test_matches_exhaustive_oracle():
    rng = np.random.default_rng(123)
    worst = 0.0
    for _ in range(220):
        a, fa, ea = random_barcode(rng)
        b, fb, eb = random_barcode(rng)
        got = bottleneck(a, b, 0)
        want = oracles.exhaustive_bottleneck(fa, fb, ea, eb)
        if math.isinf(want):
            assert math.isinf(got)
        else:
            worst = max(worst, abs(got - want))
            assert got == pytest.approx(want, abs=1e-9)
    assert worst <= 1e-9


def test_symmetry_and_identity():
    rng = np.random.default_rng(5)
    for _ in range(40):
        a, *_ = random_barcode(rng)
        b, *_ = random_barcode(rng)
        d_ab = bottleneck(a, b, 0)
        d_ba = bottleneck(b, a, 0)
        if math.isinf(d_ab):
            assert math.isinf(d_ba)
        else:
            assert d_ab == pytest.approx(d_ba, abs=1e-12)
        assert bottleneck(a, a, 0) == 0.0


def test_triangle_inequality_spot_checks():
    rng = np.random.default_rng(17)
    for _ in range(60):
        a, *_ = random_barcode(rng, max_essential=1)
        b, *_ = random_barcode(rng, max_essential=1)
        c, *_ = random_barcode(rng, max_essential=1)
        d_ac = bottleneck(a, c, 0)
        d_ab = bottleneck(a, b, 0)
        d_bc = bottleneck(b, c, 0)
        if math.isinf(d_ab) or math.isinf(d_bc):
            continue
        assert d_ac <= d_ab + d_bc + 1e-9


def test_stability_under_height_perturbation():
    """Perturbing all filtration values by <= delta moves bottleneck by <= delta."""
    import phtkit as pk
    from phtkit import shapes

    rng = np.random.default_rng(29)
    cx = shapes.random_polyhedron(1, d=2)
    full = cx.full_subcomplex()
    for _ in range(6):
        theta = rng.uniform(0, 2 * math.pi)
        v = np.array([math.cos(theta), math.sin(theta)])
        delta = float(rng.uniform(0.01, 0.2))
        base = pk.compute_barcode(pk.lower_star_filtration(full, v))

        bump = rng.uniform(-delta, delta, size=cx.n_vertices)
        moved = pk.EmbeddedComplex(
            2,
            cx.vertices + bump[:, None] * v[None, :],
            [[list(map(int, r)) for r in arr] for arr in cx.simplices],
        )
        perturbed = pk.compute_barcode(pk.lower_star_filtration(moved.full_subcomplex(), v))
        for n in (0, 1):
            d = bottleneck(base, perturbed, n)
            assert d <= delta + 1e-9
