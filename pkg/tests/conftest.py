import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from phtkit import shapes
from phtkit.complexes import EmbeddedComplex


UP = np.array([0.0, 1.0])


@pytest.fixture(scope="session")
def ngon8():
    return shapes.regular_ngon(8)


@pytest.fixture(scope="session")
def arc_cover(ngon8):
    return shapes.half_circle_cover(ngon8)


@pytest.fixture(scope="session")
def sphere_and_tags():
    return shapes.subdivided_octahedron_sphere(2)


@pytest.fixture(scope="session")
def octant_sphere_cover(sphere_and_tags):
    sphere, tags = sphere_and_tags
    return shapes.octant_cover(sphere, tags)


@pytest.fixture
def triangle():
    return EmbeddedComplex.from_simplices(
        2, [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], [(0, 1, 2)]
    )
