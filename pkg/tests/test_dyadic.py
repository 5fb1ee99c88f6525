import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mixholder.dyadic import (DyadicBox, GeneralBox, box_count, boxes_of_shape, cell_centers,
                              estimate_mixed_holder_constant, level_vectors, locate_box,
                              mixed_difference, shape_count, validate_points)


def brute_shapes(d, m):
    return [v for v in itertools.product(range(m + 1), repeat=d) if sum(v) == m]


def test_locate_box_examples():
    assert locate_box((0.3, 0.6), (1, 2)) == DyadicBox((1, 2), (0, 2))
    assert locate_box((0.0, 0.0, 0.0), (0, 0, 3)) == DyadicBox((0, 0, 3), (0, 0, 0))


def test_locate_box_clamps_one_into_last_interval():
    box = locate_box((1.0, 1.0), (3, 0))
    assert box.offsets == (7, 0)
    assert box.contains((1.0, 1.0))


def test_locate_box_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension mismatch"):
        locate_box((0.5, 0.5), (1, 1, 1))


def test_validate_points_rejects_outside_cube():
    with pytest.raises(ValueError):
        validate_points([[0.5, 1.5]])
    with pytest.raises(ValueError):
        validate_points([[np.nan, 0.5]])


def test_box_invalid_offset():
    with pytest.raises(ValueError):
        DyadicBox((2,), (4,))


def test_box_geometry():
    box = DyadicBox((1, 2), (1, 3))
    assert box.measure == 2.0**-3
    assert box.intervals == [(0.5, 1.0), (0.75, 1.0)]
    assert np.allclose(box.center, [0.75, 0.875])


@pytest.mark.parametrize("d,m", [(1, 0), (1, 5), (2, 3), (3, 3), (4, 4), (5, 2)])
def test_counts_match_brute_force(d, m):
    shapes = brute_shapes(d, m)
    assert shape_count(d, m) == len(shapes)
    assert box_count(d, m) == sum(1 << sum(s) for s in shapes)
    assert list(level_vectors(m, d)) == sorted(shapes)


def test_figure_counts():
    assert box_count(3, 3) == 80
    assert shape_count(3, 3) == 10


def test_counts_overflow():
    with pytest.raises(OverflowError):
        box_count(2, 200)
    with pytest.raises(OverflowError):
        shape_count(400, 400)


def test_count_invariants():
    for d in range(1, 9):
        for m in range(0, 21):
            assert box_count(d, m) == (1 << m) * shape_count(d, m)
            assert shape_count(d, m) == math.comb(m + d - 1, d - 1)


def test_boxes_of_shape_partition_the_cube():
    boxes = list(boxes_of_shape((1, 2)))
    assert len(boxes) == 8
    assert sum(b.measure for b in boxes) == 1.0
    assert boxes[1].offsets == (0, 1)


def test_cell_centers_row_major():
    C = cell_centers(2, 1)
    assert np.allclose(C, [[0.25, 0.25], [0.25, 0.75], [0.75, 0.25], [0.75, 0.75]])


def test_mixed_difference_examples():
    f = lambda X: X[:, 0] * X[:, 1]
    assert mixed_difference(f, GeneralBox((0.2, 0.3), (0.5, 0.25))) == pytest.approx(0.125)
    # a single live axis is an ordinary forward difference
    assert mixed_difference(f, GeneralBox((0.2, 0.3), (0.5, None))) == pytest.approx(0.15)
    # sum of one-variable functions has zero mixed difference
    g = lambda X: np.sin(X[:, 0]) + X[:, 1] ** 2
    assert mixed_difference(g, GeneralBox((0.1, 0.1), (0.4, 0.7))) == pytest.approx(0.0, abs=1e-15)


unit = st.floats(0.0, 0.5)
side = st.floats(0.01, 0.5)


@settings(max_examples=100, deadline=None)
@given(a=unit, b=unit, h=side, k=side)
def test_mixed_difference_of_product_factors(a, b, h, k):
    g1, g2 = np.cos, np.exp
    f = lambda X: g1(X[:, 0]) * g2(X[:, 1])
    expected = (g1(a + h) - g1(a)) * (g2(b + k) - g2(b))
    assert mixed_difference(f, GeneralBox((a, b), (h, k))) == pytest.approx(expected, abs=1e-12)


def test_estimate_constant_examples():
    assert estimate_mixed_holder_constant(lambda X: np.full(len(X), 3.0), 2, 0.5, seed=0) == 0.0
    c = estimate_mixed_holder_constant(lambda X: X[:, 0], 1, 1.0, trials=200, seed=0)
    assert c == pytest.approx(1.0)
    c = estimate_mixed_holder_constant(lambda X: X[:, 0] * X[:, 1], 2, 1.0, trials=2000, seed=0)
    assert 0.9 <= c <= 1.0 + 1e-6  # rounding in differences over tiny sides


def test_estimate_constant_arguments():
    with pytest.raises(ValueError):
        estimate_mixed_holder_constant(lambda X: X[:, 0], 1, 0.0)
    with pytest.raises(ValueError):
        estimate_mixed_holder_constant(lambda X: X[:, 0], 1, 0.5, trials=0)
