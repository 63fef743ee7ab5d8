"""Heat kernels and diffusion distances on weighted graphs.

A graph with edge weights ``W`` and vertex volumes ``nu`` stands in for a
Riemannian manifold. Its Laplacian ``L = D_nu^{-1} (diag(W 1) - W)`` is
self-adjoint in the nu-weighted inner product, so it has a nu-orthonormal
eigenbasis, and the heat kernel is the density (with respect to ``nu``) of
``exp(-tL)``. Diffusion distances are L_p(nu) distances between rows of the
kernel.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components, shortest_path

from .complex import FilteredComplex, Complex, lower_star_filtration
from .cone import cone_diagram
from .errors import InputError, InvariantError
from .mmspace import (
    Coupling,
    FiniteMMSpace,
    PairingCertificate,
    centrality_function,
    delta_p_upper_bound,
)
from .persistence import Diagrams
from .transport import bottleneck, wasserstein

SPECTRAL_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Symmetric non-negative edge weights plus positive vertex volumes.

    ``lengths`` are the edge lengths used for the geodesic graph metric;
    they default to 1 per edge (hop distance).
    """

    weights: np.ndarray
    volumes: np.ndarray | None = None
    lengths: np.ndarray | None = None

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        n = w.shape[0]
        if w.ndim != 2 or w.shape != (n, n) or n == 0:
            raise InputError("weight matrix must be square and non-empty")
        if not np.array_equal(w, w.T) or (w < 0).any() or not np.all(np.isfinite(w)):
            raise InputError("edge weights must be symmetric, finite and non-negative")
        if np.any(np.diag(w) != 0):
            raise InputError("self-loops are not allowed")
        nu = np.ones(n) if self.volumes is None else np.array(self.volumes, dtype=float)
        if nu.shape != (n,) or not (nu > 0).all():
            raise InputError("vertex volumes must be positive, one per vertex")
        if n > 1 and connected_components(w > 0, directed=False)[0] != 1:
            raise InputError("graph is disconnected")
        if self.lengths is None:
            ln = (w > 0).astype(float)
        else:
            ln = np.array(self.lengths, dtype=float)
            if ln.shape != w.shape or ((w > 0) & ~(ln > 0)).any():
                raise InputError("every edge needs a positive length")
            ln = np.where(w > 0, ln, 0.0)
        for a in (w, nu, ln):
            a.flags.writeable = False
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "volumes", nu)
        object.__setattr__(self, "lengths", ln)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @classmethod
    def from_edges(cls, n: int, edges, weights=None, volumes=None, lengths=None) -> "WeightedGraph":
        w = np.zeros((n, n))
        ln = None if lengths is None else np.zeros((n, n))
        for k, (u, v) in enumerate(edges):
            if u == v:
                raise InputError("self-loops are not allowed")
            w[u, v] = w[v, u] = 1.0 if weights is None else weights[k]
            if ln is not None:
                ln[u, v] = ln[v, u] = lengths[k]
        return cls(w, volumes, ln)

    def edges(self) -> list[tuple[int, int]]:
        iu, ju = np.nonzero(np.triu(self.weights))
        return list(zip(iu.tolist(), ju.tolist()))

    def geodesic(self) -> np.ndarray:
        """Shortest-path distances with respect to the edge lengths."""
        return shortest_path(self.lengths, directed=False)

    def one_skeleton(self) -> Complex:
        from .complex import simplicial_complex

        return simplicial_complex([(i,) for i in range(self.n)] + self.edges())


@dataclass(frozen=True, eq=False)
class SpectralKernel:
    graph: WeightedGraph
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns, nu-orthonormal
    residual: float = field(default=0.0)
    orthonormality_error: float = field(default=0.0)

    def heat_kernel(self, t: float) -> np.ndarray:
        if not t > 0:
            raise InputError(f"scale t must be positive, got {t}")
        phi = self.eigenvectors
        k = (phi * np.exp(-self.eigenvalues * t)) @ phi.T
        return (k + k.T) / 2


def laplacian(G: WeightedGraph) -> np.ndarray:
    deg = G.weights.sum(1)
    return (np.diag(deg) - G.weights) / G.volumes[:, None]


def spectrum(G: WeightedGraph) -> SpectralKernel:
    """Full eigendecomposition with residual and orthonormality certificates."""
    nu = G.volumes
    s = 1.0 / np.sqrt(nu)
    sym = s[:, None] * (np.diag(G.weights.sum(1)) - G.weights) * s[None, :]
    lam, u = np.linalg.eigh((sym + sym.T) / 2)
    lam[0] = 0.0 if abs(lam[0]) < SPECTRAL_TOL else lam[0]
    phi = u * s[:, None]
    # pin the constant eigenvector exactly (the graph is connected)
    phi[:, 0] = 1.0 / np.sqrt(nu.sum())
    L = laplacian(G)
    residual = float(np.abs(L @ phi - phi * lam).max())
    gram = phi.T @ (phi * nu[:, None])
    ortho = float(np.abs(gram - np.eye(G.n)).max())
    if residual > SPECTRAL_TOL or ortho > SPECTRAL_TOL or abs(lam[0]) > SPECTRAL_TOL:
        raise InvariantError(
            f"spectral certificate failed: residual {residual:.2e}, orthonormality {ortho:.2e}, lambda0 {lam[0]:.2e}"
        )
    return SpectralKernel(G, lam, phi, residual, ortho)


def heat_kernel(G: WeightedGraph | SpectralKernel, t: float) -> np.ndarray:
    """``K_t(x, y) = sum_j exp(-lambda_j t) phi_j(x) phi_j(y)``."""
    spec = G if isinstance(G, SpectralKernel) else spectrum(G)
    return spec.heat_kernel(t)


def compose(G: WeightedGraph, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """nu-weighted kernel composition ``(A o B)(x, y) = sum_z A(x,z) B(z,y) nu_z``."""
    return (A * G.volumes[None, :]) @ B


def _check_p(p: float) -> float:
    if not p >= 1:
        raise InputError(f"order p must be >= 1, got {p}")
    return float(p)


def diffusion_distance(G: WeightedGraph | SpectralKernel, t: float, p: float = 2.0) -> np.ndarray:
    """``d_t(x, x') = (sum_z |K_t(x,z) - K_t(x',z)|^p nu_z)^(1/p)``."""
    p = _check_p(p)
    spec = G if isinstance(G, SpectralKernel) else spectrum(G)
    K = spec.heat_kernel(t)
    nu = spec.graph.volumes
    n = K.shape[0]
    d = np.zeros((n, n))
    for i in range(n):
        d[i, i + 1 :] = ((np.abs(K[i + 1 :] - K[i]) ** p) @ nu) ** (1.0 / p)
    return d + d.T


def diffusion_mm(G: WeightedGraph | SpectralKernel, t: float, p: float, alpha) -> FiniteMMSpace:
    return FiniteMMSpace(diffusion_distance(G, t, p), alpha)


def lipschitz_constant(spec: SpectralKernel, t: float) -> float:
    """``max |K_t(x,z) - K_t(x',z)| / d_G(x,x')`` over x != x' and all z."""
    K = spec.heat_kernel(t)
    dG = spec.graph.geodesic()
    n = K.shape[0]
    best = 0.0
    for i in range(n - 1):
        gaps = np.abs(K[i + 1 :] - K[i]).max(1) / dG[i, i + 1 :]
        best = max(best, float(gaps.max()))
    return best


@dataclass(frozen=True)
class ScaleBound:
    value: float
    lipschitz: float
    total_volume: float
    wasserstein: float


def scale_stability_bound(
    G: WeightedGraph | SpectralKernel, t: float, p: float, alpha, beta, lipschitz: float | None = None
) -> ScaleBound:
    """Discrete bound ``C_t * vol^(1/p) * w_p(alpha, beta)`` on the matching distance at scale t.

    ``w_p`` is taken in the geodesic graph metric. Pass ``lipschitz`` to reuse
    a constant already computed for this t.
    """
    p = _check_p(p)
    spec = G if isinstance(G, SpectralKernel) else spectrum(G)
    c_t = lipschitz_constant(spec, t) if lipschitz is None else lipschitz
    vol = float(spec.graph.volumes.sum())
    w = wasserstein(spec.graph.geodesic(), alpha, beta, p).value
    return ScaleBound(c_t * vol ** (1.0 / p) * w, c_t, vol, w)


def coned_centrality_diagrams(X: FiniteMMSpace, carrier: Complex, p: float) -> Diagrams:
    """Coned sublevel diagrams of the p-centrality of X on a carrier complex."""
    if carrier.n_vertices != X.n:
        raise InputError(f"carrier has {carrier.n_vertices} vertices but the space has {X.n} points")
    return cone_diagram(lower_star_filtration(carrier, centrality_function(X, p)))


@dataclass(frozen=True)
class PathStep:
    s: float
    t: float
    bottleneck: dict[int, float]
    delta_bound: float

    @property
    def holds(self) -> bool:
        return all(v <= self.delta_bound for v in self.bottleneck.values())


@dataclass(frozen=True, eq=False)
class DiagramPath:
    t_grid: np.ndarray
    diagrams: list[Diagrams]
    steps: list[PathStep]
    carrier: Complex
    dims: tuple[int, ...]

    @property
    def holds(self) -> bool:
        return all(s.holds for s in self.steps)


def geometric_grid(lo: float = 0.01, hi: float = 10.0, num: int = 16) -> np.ndarray:
    return np.geomspace(lo, hi, num)


def diagram_path(
    G: WeightedGraph | SpectralKernel,
    alpha,
    p: float = 2.0,
    t_grid: Sequence[float] | None = None,
    carrier: Complex | FilteredComplex | None = None,
    dims: Sequence[int] = (0, 1),
) -> DiagramPath:
    """Coned centrality diagrams of ``(V, d_t, alpha)`` along a grid of scales.

    For each adjacent pair of scales the bottleneck distance is compared with
    the certified distortion of the identity pairing under the diagonal
    coupling of ``alpha``.
    """
    spec = G if isinstance(G, SpectralKernel) else spectrum(G)
    cx = spec.graph.one_skeleton() if carrier is None else getattr(carrier, "complex", carrier)
    if cx.n_vertices != spec.graph.n:
        raise InputError("carrier vertices must be the graph vertices")
    ts = np.asarray(geometric_grid() if t_grid is None else t_grid, dtype=float)
    if ts.ndim != 1 or (ts <= 0).any() or (np.diff(ts) <= 0).any():
        raise InputError("t-grid must be positive and strictly increasing")
    spaces = [diffusion_mm(spec, t, p, alpha) for t in ts]
    diagrams = [coned_centrality_diagrams(X, cx, p) for X in spaces]
    cert = PairingCertificate.identity(Coupling.diagonal(spaces[0].weights))
    steps = []
    for k in range(len(ts) - 1):
        bound = delta_p_upper_bound(spaces[k], spaces[k + 1], cert, p)
        d_b = {i: bottleneck(diagrams[k][i], diagrams[k + 1][i]) for i in dims}
        steps.append(PathStep(float(ts[k]), float(ts[k + 1]), d_b, bound.value))
    return DiagramPath(ts, diagrams, steps, cx, tuple(dims))


def barbell_graph(clique: int = 4, path: int = 2) -> WeightedGraph:
    """Two ``clique``-cliques joined through a path of ``path`` extra vertices."""
    edges = [(i, j) for i in range(clique) for j in range(i + 1, clique)]
    off = clique + path
    edges += [(off + i, off + j) for i in range(clique) for j in range(i + 1, clique)]
    chain = [clique - 1] + list(range(clique, clique + path)) + [off]
    edges += list(zip(chain[:-1], chain[1:]))
    return WeightedGraph.from_edges(2 * clique + path, edges)


def cycle(n: int) -> WeightedGraph:
    return WeightedGraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])
