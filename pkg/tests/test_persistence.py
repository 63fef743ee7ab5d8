import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conetda.complex import (
    FilteredComplex,
    cycle_graph,
    grid_to_cubical,
    lower_star_filtration,
    simplicial_complex,
)
from conetda.errors import InvariantError
from conetda.oracles import diagrams_bruteforce
from conetda.persistence import (
    INF,
    PersistenceDiagram,
    barcode,
    betti_numbers,
    diagrams_equal,
    interleaving_distance,
    reduce,
    reduced_diagram,
)
from conetda.transport import bottleneck

from .strategies import diagram_pairs, filtered_complexes, seeds


def test_zero_length_bar_dropped():
    fc = lower_star_filtration(simplicial_complex([(0, 1)]), [0.0, 1.0])
    d = reduce(fc)
    assert d[0].pairs == ((0.0, INF),)


def test_cycle_at_constant_value():
    fc = lower_star_filtration(cycle_graph(4), np.full(4, 3.0))
    d = reduce(fc)
    assert d[0].pairs == ((3.0, INF),)
    assert d[1].pairs == ((3.0, INF),)


def test_annulus_hand_reduction():
    # edge midpoints at 1, corners at 2; the ring closes once the corners arrive
    img = np.array([[2.0, 1.0, 2.0], [1.0, 0.0, 1.0], [2.0, 1.0, 2.0]])
    mask = np.zeros_like(img, dtype=bool)
    mask[1, 1] = True
    cx, vals = grid_to_cubical(img, mask)
    d = reduce(lower_star_filtration(cx, vals))
    assert d[1].pairs == ((2.0, INF),)
    assert d[0].pairs == ((1.0, 2.0),) * 3 + ((1.0, INF),)


def test_pairs_sorted_and_strict():
    d = PersistenceDiagram(0, ((1.0, 2.0), (0.0, INF), (3.0, 3.0)))
    assert d.pairs == ((0.0, INF), (1.0, 2.0))
    assert d.essential_births == [0.0]


def test_non_monotone_input_rejected():
    fc = FilteredComplex(simplicial_complex([(0, 1)]), [0.0, 2.0, 1.0])
    with pytest.raises(InvariantError):
        reduce(fc)


@pytest.mark.parametrize(
    "h0, expect",
    [
        (((0.0, INF),), ()),
        (((0.0, INF), (1.0, INF)), ((1.0, INF),)),
    ],
)
def test_reduced_diagram(h0, expect):
    out = reduced_diagram({0: PersistenceDiagram(0, h0)}, 0.0)
    assert out[0].pairs == expect


def test_reduced_circle():
    d = reduce(lower_star_filtration(cycle_graph(6), np.full(6, 2.0)))
    r = reduced_diagram(d, 2.0)
    assert r[0].pairs == ()
    assert r[1].pairs == ((2.0, INF),)


def test_reduced_diagram_inconsistent_min():
    with pytest.raises(InvariantError):
        reduced_diagram({0: PersistenceDiagram(0, ((0.0, INF),))}, 1.0)


def test_barcode_flavors_differ_by_one_bar():
    fc = lower_star_filtration(simplicial_complex([(0, 1), (2,)]), [0.0, 1.0, 0.5])
    un, red = barcode(fc, "unreduced"), barcode(fc, "reduced")
    assert len(un.diagrams[0]) == len(red.diagrams[0]) + 1


@pytest.mark.parametrize(
    "a, b, expect",
    [
        (((0.0, 1.0),), ((0.0, 1.0),), 0.0),
        (((0.0, 4.0),), (), 2.0),
        (((0.0, INF),), (), INF),
    ],
)
def test_interleaving_examples(a, b, expect):
    assert interleaving_distance(PersistenceDiagram(0, a), PersistenceDiagram(0, b)) == expect


@given(diagram_pairs(), diagram_pairs())
def test_interleaving_delegates(a, b):
    da, db = PersistenceDiagram(1, tuple(a)), PersistenceDiagram(1, tuple(b))
    assert interleaving_distance(da, db) == bottleneck(da, db)


@given(filtered_complexes(max_cells=30))
def test_matches_persistent_betti_oracle(fc):
    dims = range(fc.complex.max_dim + 1)
    assert diagrams_equal(reduce(fc), diagrams_bruteforce(fc), dims)


@given(filtered_complexes(max_cells=60))
def test_euler_characteristic(fc):
    betti = betti_numbers(reduce(fc))
    assert sum((-1) ** i * b for i, b in enumerate(betti)) == fc.complex.euler_characteristic()


@given(filtered_complexes(max_cells=60))
def test_births_deaths_are_filtration_values(fc):
    values = set(fc.values.tolist())
    for d in reduce(fc).values():
        for b, q in d.pairs:
            assert b in values and (q == INF or q in values)


@given(filtered_complexes(max_cells=40), seeds)
def test_invariant_under_order_respecting_relabelling(fc, seed):
    """Relabel cells within each (value, dim) block; diagrams must not change."""
    rng = np.random.default_rng(seed)
    cx = fc.complex
    nv = cx.n_vertices
    perm = rng.permutation(nv)  # relabel vertices, then rebuild
    simplices = [tuple(sorted(perm[v] for v in c.vertices)) for c in cx.cells]
    cx2 = simplicial_complex(simplices, close=False)
    index = {c.vertices: c.id for c in cx2.cells}
    vals = np.empty(len(cx2))
    for c, s in zip(cx.cells, simplices):
        vals[index[s]] = fc.values[c.id]
    assert diagrams_equal(reduce(fc), reduce(FilteredComplex(cx2, vals)))


@given(filtered_complexes(max_cells=50), st.floats(-5, 5, allow_nan=False))
def test_constant_filtration_gives_betti(fc, c):
    d = reduce(FilteredComplex(fc.complex, np.full(len(fc.complex), c)))
    for k, dg in d.items():
        assert all(q == INF for _, q in dg.pairs)
        assert all(b == c for b, _ in dg.pairs)


def test_unreduced_dim0_has_infinite_bar():
    fc = lower_star_filtration(simplicial_complex([(0,)]), [math.pi])
    assert reduce(fc)[0].pairs == ((math.pi, INF),)
