import numpy as np
import pytest

from hrgm import ColoredGraph


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def fig5_coloring():
    """Five-vertex, six-edge, three-class fixture: two triangles joined at a hub.

    Classes: {01, 34}, {02, 12}, {23, 24}.
    """
    edges = [(0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4)]
    colors = [0, 1, 1, 2, 2, 0]
    return ColoredGraph(5, edges, colors)


@pytest.fixture
def path3_gamma():
    """Population variogram of the 3-vertex path with unit edge values."""
    return np.array([[0.0, 1.0, 2.0], [1.0, 0.0, 1.0], [2.0, 1.0, 0.0]])
