import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.linalg import expm

from conetda.diffusion import (
    WeightedGraph,
    barbell_graph,
    compose,
    cycle,
    diagram_path,
    diffusion_mm,
    diffusion_distance,
    heat_kernel,
    laplacian,
    lipschitz_constant,
    scale_stability_bound,
    spectrum,
)
from conetda.errors import InputError
from conetda.experiments import heat_kernel_errors, two_vertex_errors
from conetda.generators import random_connected_graph, random_measure
from conetda.mmspace import centrality_function
from conetda.persistence import INF

from .strategies import seeds

TS = [0.01, 0.1, 0.5, 1.0, 3.0]


@pytest.mark.parametrize("t", TS)
def test_two_vertex_closed_form(t):
    G = WeightedGraph.from_edges(2, [(0, 1)])
    K = heat_kernel(G, t)
    e = np.exp(-2 * t)
    assert np.abs(K - np.array([[1 + e, 1 - e], [1 - e, 1 + e]]) / 2).max() <= 1e-10
    assert abs(diffusion_distance(G, t, 2.0)[0, 1] - np.sqrt(2) * e) <= 1e-10
    assert abs(diffusion_distance(G, t, 1.0)[0, 1] - 2 * e) <= 1e-10


def test_two_vertex_helper():
    assert two_vertex_errors() <= 1e-10


@given(seeds, st.floats(0.01, 5.0))
def test_kernel_matches_matrix_exponential(seed, t):
    G = random_connected_graph(np.random.default_rng(seed))
    ref = expm(-t * laplacian(G)) / G.volumes[None, :]
    assert np.abs(heat_kernel(G, t) - ref).max() <= 1e-9


@given(seeds)
def test_mass_semigroup_triangle(seed):
    e = heat_kernel_errors(random_connected_graph(np.random.default_rng(seed)))
    assert e["mass"] <= 1e-8
    assert e["semigroup"] <= 1e-7
    assert e["triangle"] <= 1e-9


@given(seeds)
def test_kernel_symmetric_positive(seed):
    G = random_connected_graph(np.random.default_rng(seed))
    K = heat_kernel(G, 0.3)
    assert np.array_equal(K, K.T)
    assert (K > -1e-12).all()


def test_spectral_certificates():
    spec = spectrum(barbell_graph())
    assert spec.residual <= 1e-8 and spec.orthonormality_error <= 1e-8
    assert spec.eigenvalues[0] == 0.0
    assert (spec.eigenvalues[1:] > 0).all()


def test_large_t_constant_projector():
    G = cycle(12)
    K = heat_kernel(G, 200.0)
    assert np.abs(K - 1.0 / G.volumes.sum()).max() <= 1e-12
    assert diffusion_distance(G, 200.0).max() <= 1e-12


def test_compose_with_volumes():
    G = WeightedGraph.from_edges(3, [(0, 1), (1, 2)], volumes=[1.0, 2.0, 0.5])
    A, B = heat_kernel(G, 0.2), heat_kernel(G, 0.7)
    assert np.abs(compose(G, A, B) - heat_kernel(G, 0.9)).max() <= 1e-12


def test_cycle_uniform_centrality_constant():
    G = cycle(12)
    alpha = np.full(12, 1 / 12)
    path = diagram_path(G, alpha, 2.0, np.geomspace(0.01, 10, 8))
    for t, dg in zip(path.t_grid, path.diagrams):
        sigma = centrality_function(diffusion_mm(G, t, 2.0, alpha), 2.0)
        assert np.ptp(sigma) <= 1e-9
        assert [q for _, q in dg[0].pairs].count(INF) == 1
        # any finite bars come from round-off in a constant function
        assert all(q - b <= 1e-9 for b, q in dg[0].pairs if q < INF)
    assert path.holds


def test_barbell_finite_bar():
    G = barbell_graph()
    alpha = np.full(G.n, 1 / G.n)
    path = diagram_path(G, alpha, 2.0, np.geomspace(0.01, 10, 16))
    first, last = path.diagrams[0][0], path.diagrams[-1][0]
    assert len([q for _, q in first.pairs if q < INF]) == 1
    assert all(q - b <= 1e-6 for b, q in last.pairs if q < INF)
    assert path.holds


def test_path_steps_shrink_under_refinement():
    G = cycle(12)
    rng = np.random.default_rng(3)
    alpha = random_measure(rng, 12, sparse=False)
    coarse = diagram_path(G, alpha, 2.0, np.geomspace(0.1, 10, 6))
    fine = diagram_path(G, alpha, 2.0, np.geomspace(0.1, 10, 11))
    worst = lambda path: max(s.delta_bound for s in path.steps)
    assert worst(fine) * 1.2 <= worst(coarse)
    assert fine.holds and coarse.holds


def test_scale_bound_zero_for_equal_measures():
    G = cycle(12)
    alpha = np.full(12, 1 / 12)
    assert scale_stability_bound(G, 1.0, 2.0, alpha, alpha).value == pytest.approx(0.0, abs=1e-9)


@given(seeds, st.sampled_from([0.1, 1.0, 10.0]))
def test_scale_bound_dominates_distance(seed, t):
    from conetda.diffusion import coned_centrality_diagrams
    from conetda.transport import diagram_distance

    rng = np.random.default_rng(seed)
    G = cycle(12)
    spec = spectrum(G)
    a, b = random_measure(rng, 12), random_measure(rng, 12)
    cx = G.one_skeleton()
    da = coned_centrality_diagrams(diffusion_mm(spec, t, 2.0, a), cx, 2.0)
    db = coned_centrality_diagrams(diffusion_mm(spec, t, 2.0, b), cx, 2.0)
    assert diagram_distance(da, db, (0, 1)) <= scale_stability_bound(spec, t, 2.0, a, b).value + 1e-9


def test_lipschitz_two_vertex():
    spec = spectrum(WeightedGraph.from_edges(2, [(0, 1)]))
    assert lipschitz_constant(spec, 0.5) == pytest.approx(np.exp(-1.0), abs=1e-12)


def test_input_errors():
    with pytest.raises(InputError, match="disconnected"):
        WeightedGraph.from_edges(4, [(0, 1), (2, 3)])
    with pytest.raises(InputError):
        heat_kernel(cycle(4), 0.0)
    with pytest.raises(InputError):
        WeightedGraph(np.array([[0.0, 1.0], [2.0, 0.0]]))
    with pytest.raises(InputError):
        WeightedGraph.from_edges(2, [(0, 1)], volumes=[1.0, 0.0])
    with pytest.raises(InputError):
        diffusion_distance(cycle(4), 1.0, 0.5)
    with pytest.raises(InputError):
        diagram_path(cycle(4), np.full(4, 0.25), 2.0, [1.0, 0.5])
