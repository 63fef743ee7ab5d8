import numpy as np
import pytest
from hypothesis import given, strategies as st

from conetda.complex import (
    CUBICAL,
    Cell,
    Complex,
    FilteredComplex,
    cycle_graph,
    filtration_order,
    grid_to_cubical,
    lower_star_filtration,
    simplicial_complex,
    subdivide_cubical,
)
from conetda.errors import InputError, InvariantError
from conetda.generators import random_complex
from conetda.persistence import betti_numbers, reduce

from .strategies import filtered_complexes, seeds


def test_edge_lower_star():
    cx = simplicial_complex([(0, 1)])
    fc = lower_star_filtration(cx, [0.0, 1.0])
    assert fc.values.tolist() == [0.0, 1.0, 1.0]


def test_constant_function():
    cx = simplicial_complex([(0, 1, 2), (2, 3)])
    fc = lower_star_filtration(cx, np.full(4, 2.5))
    assert (fc.values == 2.5).all()


def test_square_grid_lower_star():
    cx, vals = grid_to_cubical(np.array([[0.0, 1.0], [2.0, 3.0]]))
    fc = lower_star_filtration(cx, vals)
    by_vertices = {c.vertices: fc.values[c.id] for c in cx.cells}
    assert by_vertices[(0, 1, 2, 3)] == 3
    # edges: top (0,1), left (0,2), right (1,3), bottom (2,3)
    assert by_vertices[(0, 1)] == 1
    assert by_vertices[(0, 2)] == 2
    assert by_vertices[(1, 3)] == 3
    assert by_vertices[(2, 3)] == 3


def test_missing_vertex_value():
    with pytest.raises(InputError):
        lower_star_filtration(simplicial_complex([(0, 1)]), [0.0])


def test_not_face_closed():
    with pytest.raises(InputError, match="face-closed"):
        simplicial_complex([(0,), (1,), (2,), (0, 1, 2)], close=False)


@pytest.mark.parametrize(
    "shape, mask, counts",
    [
        ((1, 2), None, [2, 1]),
        ((2, 2), None, [4, 4, 1]),
        ((3, 3), (1, 1), [8, 8]),
    ],
)
def test_grid_cell_counts(shape, mask, counts):
    img = np.arange(np.prod(shape), dtype=float).reshape(shape)
    m = None
    if mask is not None:
        m = np.zeros(shape, dtype=bool)
        m[mask] = True
    cx, vals = grid_to_cubical(img, m)
    assert cx.kind == CUBICAL
    assert cx.cell_counts() == counts
    assert len(vals) == counts[0]


def test_fully_masked_grid():
    with pytest.raises(InputError):
        grid_to_cubical(np.zeros((2, 2)), np.ones((2, 2)))


def test_mask_shape_mismatch():
    with pytest.raises(InputError):
        grid_to_cubical(np.zeros((2, 2)), np.zeros((3, 3)))


@given(seeds, st.integers(1, 5), st.integers(1, 5))
def test_mask_complement_equals_subimage(seed, h, w):
    """Masking everything outside a window gives the window's own complex."""
    rng = np.random.default_rng(seed)
    img = rng.random((6, 6))
    r0, c0 = rng.integers(0, 6 - h + 1), rng.integers(0, 6 - w + 1)
    mask = np.ones_like(img, dtype=bool)
    mask[r0 : r0 + h, c0 : c0 + w] = False
    a, va = grid_to_cubical(img, mask)
    b, vb = grid_to_cubical(img[r0 : r0 + h, c0 : c0 + w])
    assert np.array_equal(va, vb)
    assert [(c.dim, c.vertices, c.boundary) for c in a.cells] == [(c.dim, c.vertices, c.boundary) for c in b.cells]


def test_filtration_order_ties():
    cx = simplicial_complex([(0, 1)])
    assert filtration_order(lower_star_filtration(cx, [0.0, 1.0])).tolist() == [0, 1, 2]
    assert filtration_order(lower_star_filtration(simplicial_complex([(0,), (1,)]), [0.0, 0.0])).tolist() == [0, 1]


def test_monotonicity_violation_names_cells():
    cx = simplicial_complex([(0, 1)])
    fc = FilteredComplex(cx, [0.0, 2.0, 1.0])
    with pytest.raises(InvariantError, match="cell 2.*face 1"):
        filtration_order(fc)


@given(filtered_complexes(max_cells=60))
def test_order_refines_faces(fc):
    order = filtration_order(fc)
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    for c in fc.cells:
        for b in c.boundary:
            assert rank[b] < rank[c.id]


@given(seeds)
def test_lower_star_is_monotone(seed):
    rng = np.random.default_rng(seed)
    cx = random_complex(rng)
    fc = lower_star_filtration(cx, rng.normal(size=cx.n_vertices))
    fc.check_monotone()


def test_cell_invariants_rejected():
    cells = (Cell(0, 0, (), (0,)), Cell(1, 0, (), (1,)), Cell(2, 1, (0,), (0, 1)))
    with pytest.raises(InputError):
        Complex(cells)


def test_cubical_subdivision_keeps_homotopy():
    img = np.array([[0, 1, 2], [3, 9, 4], [5, 6, 7]], dtype=float)
    mask = np.zeros_like(img, dtype=bool)
    mask[1, 1] = True
    cx, vals = grid_to_cubical(img, mask)
    fc = lower_star_filtration(cx, vals)
    sub = subdivide_cubical(fc)
    assert sub.complex.euler_characteristic() == cx.euler_characteristic() == 0
    assert reduce(sub)[1].pairs == reduce(fc)[1].pairs


def test_cycle_graph_betti():
    assert betti_numbers(reduce(lower_star_filtration(cycle_graph(5), np.zeros(5)))) == [1, 1]
