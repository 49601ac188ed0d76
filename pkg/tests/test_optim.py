import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from locdisc._optim import golden_max, golden_min, grid_refine_max


@given(st.floats(-3, 3))
def test_golden_min_quadratic(c):
    x, f = golden_min(lambda t: (t - c) ** 2, -5.0, 5.0)
    assert x == pytest.approx(c, abs=1e-6) and f == pytest.approx(0, abs=1e-12)


def test_vectorized_and_endpoint():
    c = np.array([0.2, 0.5, 2.0])
    x, _ = golden_max(lambda t: -(t - c) ** 2, np.zeros(3), np.ones(3))
    assert np.allclose(x, [0.2, 0.5, 1.0], atol=1e-6)


def test_grid_refine_finds_global_maximum():
    f = lambda t: np.cos(3 * t) + 0.3 * t
    x, v = grid_refine_max(f, 0.0, 2 * np.pi)
    grid = np.linspace(0, 2 * np.pi, 200001)
    assert v == pytest.approx(f(grid).max(), abs=1e-8)
