"""Finite metric-measure spaces, centrality functions and coupling distortions."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .complex import Complex, FilteredComplex
from .errors import InputError

METRIC_TOL = 1e-9
MASS_TOL = 1e-12
MARGINAL_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class FiniteMMSpace:
    dist: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        d = np.array(self.dist, dtype=float)
        w = np.array(self.weights, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] == 0:
            raise InputError(f"distance matrix must be square and non-empty, got {d.shape}")
        if w.shape != (d.shape[0],):
            raise InputError(f"need {d.shape[0]} weights, got shape {w.shape}")
        if not np.all(np.isfinite(d)) or (d < 0).any():
            raise InputError("distances must be finite and non-negative")
        if not np.array_equal(d, d.T):
            raise InputError("distance matrix is not symmetric")
        if np.any(np.diag(d) != 0):
            raise InputError("distance matrix has a non-zero diagonal")
        # d[i,j] <= d[i,k] + d[k,j] for all k, checked one pivot at a time
        for k in range(d.shape[0]):
            if (d > d[:, k : k + 1] + d[k : k + 1, :] + METRIC_TOL).any():
                raise InputError("distance matrix violates the triangle inequality")
        if (w < 0).any() or abs(w.sum() - 1.0) > MASS_TOL:
            raise InputError("weights must be a probability vector")
        d.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "dist", d)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    def with_weights(self, weights) -> "FiniteMMSpace":
        return FiniteMMSpace(self.dist, weights)

    @classmethod
    def from_points(cls, points, weights=None) -> "FiniteMMSpace":
        """Euclidean mm-space of a point cloud; uniform weights by default."""
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        diff = pts[:, None, :] - pts[None, :, :]
        d = np.sqrt((diff**2).sum(-1))
        n = len(pts)
        return cls(d, np.full(n, 1.0 / n) if weights is None else weights)


def _check_p(p: float) -> float:
    if not p >= 1:
        raise InputError(f"order p must be >= 1, got {p}")
    return float(p)


def frechet_function(X: FiniteMMSpace, p: float = 2.0) -> np.ndarray:
    """``V_p(x_i) = sum_j w_j d(x_i, x_j)^p``."""
    p = _check_p(p)
    return (X.dist**p) @ X.weights


def centrality_function(X: FiniteMMSpace, p: float = 2.0) -> np.ndarray:
    """``sigma_p = V_p^(1/p)``; 1-Lipschitz with respect to the metric."""
    return frechet_function(X, p) ** (1.0 / _check_p(p))


def theta_p(X: FiniteMMSpace, p: float = 2.0, carrier: Complex | FilteredComplex | None = None) -> np.ndarray:
    """Centrality values as a vertex function on ``carrier`` (whose vertices are X's points)."""
    if carrier is not None:
        cx = carrier.complex if isinstance(carrier, FilteredComplex) else carrier
        if cx.n_vertices != X.n:
            raise InputError(f"carrier has {cx.n_vertices} vertices but the space has {X.n} points")
    return centrality_function(X, p)


def dp_alpha(X: FiniteMMSpace, p: float, i: int, j: int) -> float:
    """L_p(alpha) distance between the distance profiles of points i and j."""
    p = _check_p(p)
    diff = np.abs(X.dist[i] - X.dist[j]) ** p
    return float(diff @ X.weights) ** (1.0 / p)


@dataclass(frozen=True, eq=False)
class Coupling:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or not np.all(np.isfinite(m)) or (m < 0).any():
            raise InputError("coupling must be a finite non-negative matrix")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    def check(self, X: FiniteMMSpace, Y: FiniteMMSpace) -> None:
        m = self.matrix
        if m.shape != (X.n, Y.n):
            raise InputError(f"coupling shape {m.shape} != ({X.n}, {Y.n})")
        if np.abs(m.sum(1) - X.weights).max() > MARGINAL_TOL:
            raise InputError("coupling row sums do not match the first measure")
        if np.abs(m.sum(0) - Y.weights).max() > MARGINAL_TOL:
            raise InputError("coupling column sums do not match the second measure")

    @classmethod
    def diagonal(cls, weights) -> "Coupling":
        return cls(np.diag(np.asarray(weights, dtype=float)))

    @classmethod
    def product(cls, a, b) -> "Coupling":
        return cls(np.outer(a, b))


def dp_mu(X: FiniteMMSpace, Y: FiniteMMSpace, mu: Coupling, p: float, x: int, y: int) -> float:
    """Distance between ``x in X`` and ``y in Y`` induced by the coupling."""
    p = _check_p(p)
    mu.check(X, Y)
    diff = np.abs(X.dist[x][:, None] - Y.dist[y][None, :]) ** p
    return float((diff * mu.matrix).sum()) ** (1.0 / p)


def _profiles(X: FiniteMMSpace, Y: FiniteMMSpace, mu: Coupling):
    """Distance profiles of all points of X and Y over the support of mu."""
    rows, cols = np.nonzero(mu.matrix)
    w = mu.matrix[rows, cols]
    prof = np.vstack([X.dist[:, rows], Y.dist[:, cols]])
    return prof, w


def union_distance_matrix(
    X: FiniteMMSpace, Y: FiniteMMSpace, mu: Coupling, p: float, zero_diagonal: bool = True
) -> np.ndarray:
    """All pairwise ``d_{p,mu}`` distances on the disjoint union, X's points first.

    For p = 2 the Gram expansion is used, which leaves round-off on the
    diagonal; ``zero_diagonal`` removes it and clips negative squares.
    """
    p = _check_p(p)
    mu.check(X, Y)
    prof, w = _profiles(X, Y, mu)
    if p == 2.0:
        g = (prof * w) @ prof.T
        sq = (prof**2) @ w
        d2 = sq[:, None] + sq[None, :] - 2 * g
        # cancellation makes small entries inaccurate; recompute those directly
        fuzzy = d2 < 1e-6 * (sq[:, None] + sq[None, :])
        np.fill_diagonal(fuzzy, False)
        for i, j in zip(*np.nonzero(fuzzy)):
            d2[i, j] = ((prof[i] - prof[j]) ** 2) @ w
        if zero_diagonal:
            d2 = np.maximum(d2, 0.0)
            np.fill_diagonal(d2, 0.0)
        with np.errstate(invalid="ignore"):
            return np.sqrt(d2)
    diff = np.abs(prof[:, None, :] - prof[None, :, :]) ** p
    return (diff @ w) ** (1.0 / p)


@dataclass(frozen=True)
class PairingDistortion:
    phi: float
    psi: float

    @property
    def total(self) -> float:
        return max(self.phi, self.psi)

    def __iter__(self):
        return iter((self.phi, self.psi, self.total))


def pairing_distortion(
    X: FiniteMMSpace, Y: FiniteMMSpace, phi: Sequence[int], psi: Sequence[int], mu: Coupling, p: float
) -> PairingDistortion:
    """Worst ``d_{p,mu}(x, phi(x))`` and ``d_{p,mu}(psi(y), y)``; unpacks as (D_phi, D_psi, D_total)."""
    p = _check_p(p)
    mu.check(X, Y)
    phi = _index_map(phi, X.n, Y.n)
    psi = _index_map(psi, Y.n, X.n)
    prof, w = _profiles(X, Y, mu)
    px, py = prof[: X.n], prof[X.n :]
    d_phi = (np.abs(px - py[phi]) ** p) @ w
    d_psi = (np.abs(px[psi] - py) ** p) @ w
    return PairingDistortion(float(d_phi.max()) ** (1 / p), float(d_psi.max()) ** (1 / p))


def _index_map(m, n_from: int, n_to: int) -> np.ndarray:
    m = np.asarray(m, dtype=np.int64)
    if m.shape != (n_from,):
        raise InputError(f"map must have {n_from} entries, got shape {m.shape}")
    if m.size and (m.min() < 0 or m.max() >= n_to):
        raise InputError("map sends a point outside its codomain")
    return m


def coupling_distortion(X: FiniteMMSpace, Y: FiniteMMSpace, mu: Coupling, p: float) -> float:
    """Gromov-Wasserstein p-distortion of a given coupling."""
    p = _check_p(p)
    mu.check(X, Y)
    rows, cols = np.nonzero(mu.matrix)
    w = mu.matrix[rows, cols]
    gap = np.abs(X.dist[np.ix_(rows, rows)] - Y.dist[np.ix_(cols, cols)]) ** p
    return float(w @ gap @ w) ** (1.0 / p)


def correspondence_distortion(dX, dY, relation: Sequence[tuple[int, int]]) -> float:
    """``sup |dX(x,x') - dY(y,y')|`` over pairs of related pairs; half of it bounds d_GH."""
    dX, dY = np.asarray(dX, dtype=float), np.asarray(dY, dtype=float)
    rel = np.asarray(relation, dtype=np.int64).reshape(-1, 2)
    if set(rel[:, 0].tolist()) != set(range(len(dX))) or set(rel[:, 1].tolist()) != set(range(len(dY))):
        raise InputError("relation is not a correspondence: it must cover both spaces")
    xs, ys = rel[:, 0], rel[:, 1]
    return float(np.abs(dX[np.ix_(xs, xs)] - dY[np.ix_(ys, ys)]).max())


class Attestation(enum.Enum):
    """How the homotopy conditions of a matching certificate are known to hold."""

    TRIVIAL_IDENTITY = "trivial-identity"
    CONE_LINE = "cone-line"
    EXTERNAL_UNVERIFIED = "external-unverified"


@dataclass(frozen=True, eq=False)
class PairingCertificate:
    phi: np.ndarray
    psi: np.ndarray
    mu: Coupling
    eps: float
    attestation: Attestation = Attestation.EXTERNAL_UNVERIFIED

    def __post_init__(self):
        if not self.eps >= 0:
            raise InputError("certificate scale must be non-negative")
        object.__setattr__(self, "phi", np.asarray(self.phi, dtype=np.int64))
        object.__setattr__(self, "psi", np.asarray(self.psi, dtype=np.int64))
        object.__setattr__(self, "attestation", Attestation(self.attestation))

    @classmethod
    def identity(cls, mu: Coupling, eps: float = 0.0) -> "PairingCertificate":
        n = mu.matrix.shape[0]
        if mu.matrix.shape != (n, n):
            raise InputError("identity pairing needs a square coupling")
        ident = np.arange(n)
        return cls(ident, ident, mu, eps, Attestation.TRIVIAL_IDENTITY)


@dataclass(frozen=True)
class DeltaBound:
    value: float
    certified: bool
    attestation: Attestation


def delta_p_upper_bound(X: FiniteMMSpace, Y: FiniteMMSpace, cert: PairingCertificate, p: float) -> DeltaBound:
    """Upper bound for the matching distance between X and Y from a certificate.

    The bound is the pairing distortion. It is certified only when the
    homotopy conditions are known to hold by construction (identity
    pairings and cone-line retractions).
    """
    if cert.attestation is Attestation.TRIVIAL_IDENTITY:
        ident_x, ident_y = np.arange(X.n), np.arange(Y.n)
        if X.n != Y.n or not (np.array_equal(cert.phi, ident_x) and np.array_equal(cert.psi, ident_y)):
            raise InputError("trivial-identity attestation on a non-identity pairing")
    value = pairing_distortion(X, Y, cert.phi, cert.psi, cert.mu, p).total
    certified = cert.attestation is not Attestation.EXTERNAL_UNVERIFIED
    return DeltaBound(value, certified, cert.attestation)


def empirical_weights(samples: Sequence[int], n: int) -> np.ndarray:
    """Empirical measure of point indices, as a weight vector over all ``n`` points."""
    s = np.asarray(samples, dtype=np.int64)
    if s.size == 0:
        raise InputError("need at least one sample")
    if s.min() < 0 or s.max() >= n:
        raise InputError("sample refers to an unknown point")
    return np.bincount(s, minlength=n) / s.size


def empirical_mm(samples: Sequence[int], base: FiniteMMSpace | np.ndarray, restrict: bool = True) -> FiniteMMSpace:
    """mm-space of the empirical measure of ``samples`` (indices into ``base``).

    With ``restrict`` the result lives on the support only; otherwise it keeps
    every base point, with zero weight off the support.
    """
    dist = base.dist if isinstance(base, FiniteMMSpace) else np.asarray(base, dtype=float)
    w = empirical_weights(samples, dist.shape[0])
    if not restrict:
        return FiniteMMSpace(dist, w)
    support = np.flatnonzero(w)
    return FiniteMMSpace(dist[np.ix_(support, support)], w[support])

