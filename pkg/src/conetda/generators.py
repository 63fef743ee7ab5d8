"""Seeded random instances for property suites (shared by ``tda verify`` and the tests)."""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .complex import Complex, FilteredComplex, lower_star_filtration, simplicial_complex
from .diffusion import WeightedGraph
from .mmspace import Coupling, FiniteMMSpace
from .persistence import INF, PersistenceDiagram


def random_complex(rng: np.random.Generator, max_cells: int = 60, max_vertices: int = 8) -> Complex:
    """Union of random simplices (dimension <= 3), grown while under ``max_cells``."""
    nv = int(rng.integers(1, max_vertices + 1))
    cells = {(i,) for i in range(nv)}
    for _ in range(int(rng.integers(0, 3 * nv + 1))):
        k = min(int(rng.integers(2, 5)), nv)
        s = tuple(sorted(rng.choice(nv, k, replace=False).tolist()))
        grown = set(cells)
        for r in range(1, len(s) + 1):
            grown.update(combinations(s, r))
        if len(grown) <= max_cells:
            cells = grown
    return simplicial_complex(cells)


def random_filtered_complex(rng: np.random.Generator, max_cells: int = 60, levels: int = 5) -> FilteredComplex:
    """Either a lower-star filtration or a general monotone one, with frequent ties."""
    cx = random_complex(rng, max_cells)
    if rng.random() < 0.5:
        return lower_star_filtration(cx, rng.integers(0, levels, cx.n_vertices).astype(float))
    vals = rng.integers(0, levels + 2, len(cx)).astype(float)
    for c in cx.cells:  # cells are ordered by dimension, so faces are final
        for b in c.boundary:
            vals[c.id] = max(vals[c.id], vals[b])
    return FilteredComplex(cx, vals)


def random_measure(rng: np.random.Generator, n: int, sparse: bool = True) -> np.ndarray:
    w = rng.dirichlet(np.full(n, 0.7))
    if sparse and n > 1 and rng.random() < 0.3:
        w[rng.random(n) < 0.3] = 0.0
        if w.sum() == 0:
            w[int(rng.integers(n))] = 1.0
    return w / w.sum()


def random_mm_space(rng: np.random.Generator, n: int | None = None, weights=None) -> FiniteMMSpace:
    n = int(rng.integers(1, 8)) if n is None else n
    pts = rng.normal(size=(n, int(rng.integers(1, 4))))
    X = FiniteMMSpace.from_points(pts)
    return X.with_weights(random_measure(rng, n) if weights is None else weights)


def _northwest(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """North-west corner coupling: a vertex of the transport polytope."""
    a, b = a.copy(), b.copy()
    m = np.zeros((a.size, b.size))
    i = j = 0
    while i < a.size and j < b.size:
        t = min(a[i], b[j])
        m[i, j] = t
        a[i] -= t
        b[j] -= t
        if a[i] <= b[j]:
            i += 1
        else:
            j += 1
    return m


def random_coupling(rng: np.random.Generator, alpha, beta) -> Coupling:
    """Random convex combination of the product coupling and permuted corner couplings."""
    a, b = np.asarray(alpha, dtype=float), np.asarray(beta, dtype=float)
    mats = [np.outer(a, b)]
    for _ in range(int(rng.integers(1, 4))):
        pa, pb = rng.permutation(a.size), rng.permutation(b.size)
        nw = _northwest(a[pa], b[pb])
        m = np.zeros_like(nw)
        m[np.ix_(pa, pb)] = nw
        mats.append(m)
    lam = rng.dirichlet(np.ones(len(mats)))
    m = sum(l * x for l, x in zip(lam, mats))
    # rebalance the last column/row so marginals hold to round-off
    m[:, -1] += a - m.sum(1)
    m[-1, :] += b - m.sum(0)
    return Coupling(np.maximum(m, 0.0))


def random_connected_graph(rng: np.random.Generator, n_max: int = 20) -> WeightedGraph:
    n = int(rng.integers(2, n_max + 1))
    edges = {(int(rng.integers(v)), v) for v in range(1, n)}  # random tree
    for _ in range(int(rng.integers(0, n))):
        u, v = sorted(rng.choice(n, 2, replace=False).tolist())
        edges.add((u, v))
    edges = sorted(edges)
    w = rng.uniform(0.1, 2.0, len(edges))
    return WeightedGraph.from_edges(n, edges, w, rng.uniform(0.5, 2.0, n))


def random_diagram(rng: np.random.Generator, n_points: int, dim: int = 0, grid: int = 6) -> PersistenceDiagram:
    """Points on a coarse grid so ties and equal distances are common; some bars infinite."""
    pairs = []
    for _ in range(n_points):
        b = int(rng.integers(0, grid))
        if rng.random() < 0.25:
            pairs.append((float(b), INF))
        else:
            pairs.append((float(b), float(b + rng.integers(1, grid))))
    return PersistenceDiagram(dim, tuple(pairs))


def circle_space(n: int = 24, weights=None) -> FiniteMMSpace:
    """``n`` equally spaced points on the unit circle with the arc-length metric."""
    k = np.arange(n)
    hops = np.abs(k[:, None] - k[None, :])
    dist = np.minimum(hops, n - hops) * (2 * np.pi / n)
    return FiniteMMSpace(dist, np.full(n, 1.0 / n) if weights is None else weights)
