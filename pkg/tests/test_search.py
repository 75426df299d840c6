import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from segprice.search import bisect_decreasing, dense_grid, golden_max, pick_lowest_tie


@given(st.floats(-5, 5), st.floats(0.1, 3))
def test_golden_finds_parabola_peak(center, width):
    x, fx = golden_max(lambda t: -(t - center) ** 2, center - width, center + 2 * width, rtol=1e-12)
    assert x == pytest.approx(center, abs=1e-6)
    assert fx <= 0


def test_golden_on_monotone_function_goes_to_the_edge():
    x, _ = golden_max(math.log, 1.0, 2.0, rtol=1e-12)
    assert x == pytest.approx(2.0, abs=1e-9)


@given(st.floats(0.01, 0.99))
def test_bisect_decreasing_locates_root(r):
    x = bisect_decreasing(lambda t: r - t, 0.0, 1.0)
    assert x == pytest.approx(r, abs=1e-15)


def test_bisect_on_step_returns_the_jump():
    x = bisect_decreasing(lambda t: 1.0 if t < 0.3 else -1.0, 0.0, 1.0)
    assert x == pytest.approx(0.3, abs=1e-15) and x < 0.3


def test_lowest_tie_wins():
    assert pick_lowest_tie([3.0, 1.0, 2.0], [5.0, 5.0, 4.0]) == 1
    assert pick_lowest_tie([1.0, 2.0], [1.0, 1.0 + 1e-13]) == 0
    assert pick_lowest_tie([1.0, 2.0], [1.0, 1.0 + 1e-9]) == 1


def test_exact_candidates_beat_grid_noise():
    # a grid point just below a kink ties numerically with the kink itself
    assert pick_lowest_tie([0.19999999999, 0.2], [1.0, 1.0], exact=[False, True]) == 1
    assert pick_lowest_tie([0.1, 0.2], [1.0, 0.5], exact=[False, True]) == 0


def test_dense_grid():
    g = dense_grid(0.0, 1.0, 11, [(0.25, 0.35), (-1.0, 0.05), (2.0, 3.0)], 5, extra=[0.123, 7.0])
    assert g[0] == 0.0 and g[-1] == 1.0
    assert np.all(np.diff(g) > 0)
    assert 0.123 in g and 0.3 in g and 0.275 in g and 7.0 not in g
