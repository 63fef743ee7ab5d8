"""Exact p-Wasserstein distances and bottleneck distances between diagrams."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import coo_matrix, csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .errors import InputError, InvariantError
from .mmspace import MARGINAL_TOL, MASS_TOL, Coupling, FiniteMMSpace
from .persistence import INF, PersistenceDiagram

DUALITY_GAP_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class TransportProblem:
    cost: np.ndarray
    supply: np.ndarray
    demand: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.cost, dtype=float)
        a = np.asarray(self.supply, dtype=float)
        b = np.asarray(self.demand, dtype=float)
        if c.shape != (a.size, b.size):
            raise InputError(f"cost shape {c.shape} does not match marginals ({a.size}, {b.size})")
        if (c < 0).any() or not np.all(np.isfinite(c)):
            raise InputError("costs must be finite and non-negative")
        for name, m in (("supply", a), ("demand", b)):
            if (m < 0).any() or abs(m.sum() - 1.0) > MASS_TOL:
                raise InputError(f"{name} must be a probability vector")
        object.__setattr__(self, "cost", c)
        object.__setattr__(self, "supply", a)
        object.__setattr__(self, "demand", b)


@dataclass(frozen=True, eq=False)
class TransportSolution:
    value: float
    coupling: Coupling
    primal: float
    dual: float
    potentials: tuple[np.ndarray, np.ndarray]

    def __iter__(self):
        return iter((self.value, self.coupling))


def solve_transport(prob: TransportProblem) -> tuple[np.ndarray, float, float, np.ndarray, np.ndarray]:
    """Optimal plan of a transport LP, with dual potentials.

    Only rows/columns with positive mass enter the LP. The returned plan is
    polished so its marginals are exact up to round-off, and optimality is
    certified by recomputing the dual objective from the potentials after
    restoring dual feasibility.
    """
    a, b, c = prob.supply, prob.demand, prob.cost
    rows, cols = np.flatnonzero(a > 0), np.flatnonzero(b > 0)
    cs = c[np.ix_(rows, cols)]
    n, m = rows.size, cols.size
    i_idx = np.repeat(np.arange(n), m)
    j_idx = np.tile(np.arange(m), n)
    k = np.arange(n * m)
    A = coo_matrix(
        (np.ones(2 * n * m), (np.concatenate([i_idx, n + j_idx]), np.concatenate([k, k]))),
        shape=(n + m, n * m),
    ).tocsr()
    rhs = np.concatenate([a[rows], b[cols]])
    res = linprog(
        cs.ravel(),
        A_eq=A,
        b_eq=rhs,
        bounds=(0, None),
        method="highs-ds",
        options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10},
    )
    if res.status != 0:
        raise InvariantError(f"transport LP failed: {res.message}")
    plan = np.maximum(res.x.reshape(n, m), 0.0)
    plan = _polish(plan, a[rows], b[cols])
    y = res.eqlin.marginals
    u, v = y[:n].copy(), y[n:].copy()
    # make the potentials exactly feasible: u_i + v_j <= c_ij
    v = np.minimum(v, (cs - u[:, None]).min(0))
    full = np.zeros(c.shape)
    full[np.ix_(rows, cols)] = plan
    primal = float((plan * cs).sum())
    dual = float(u @ a[rows] + v @ b[cols])
    uu, vv = np.zeros(a.size), np.zeros(b.size)
    uu[rows], vv[cols] = u, v
    return full, primal, dual, uu, vv


def _polish(plan: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Re-solve the marginal equations on the plan's support (a forest for basic plans)."""
    support = plan > 0
    if not support.any():
        return plan
    # peel leaves: a row or column with exactly one unresolved support cell is forced
    out = np.zeros_like(plan)
    ra, cb = a.copy(), b.copy()
    live = support.copy()
    row_deg, col_deg = live.sum(1), live.sum(0)
    stack = [("r", i) for i in np.flatnonzero(row_deg == 1)] + [("c", j) for j in np.flatnonzero(col_deg == 1)]
    while stack:
        kind, idx = stack.pop()
        if kind == "r":
            if row_deg[idx] != 1:
                continue
            j = int(np.flatnonzero(live[idx])[0])
            i = idx
            amount = ra[i]
        else:
            if col_deg[idx] != 1:
                continue
            i = int(np.flatnonzero(live[:, idx])[0])
            j = idx
            amount = cb[j]
        amount = max(amount, 0.0)
        out[i, j] = amount
        ra[i] -= amount
        cb[j] -= amount
        live[i, j] = False
        row_deg[i] -= 1
        col_deg[j] -= 1
        if row_deg[i] == 1:
            stack.append(("r", i))
        if col_deg[j] == 1:
            stack.append(("c", j))
    if live.any():
        # support had a cycle (degenerate non-basic plan); keep the solver's values
        return plan
    return out


def wasserstein(X: FiniteMMSpace | np.ndarray, alpha, beta, p: float = 1.0) -> TransportSolution:
    """Exact ``w_p(alpha, beta)`` for two measures on the points of X.

    ``X`` may be a FiniteMMSpace (its own weights are ignored) or a distance
    matrix. Unpacks as ``(value, coupling)``.
    """
    if not p >= 1:
        raise InputError(f"order p must be >= 1, got {p}")
    dist = X.dist if isinstance(X, FiniteMMSpace) else np.asarray(X, dtype=float)
    prob = TransportProblem(dist**p, alpha, beta)
    plan, primal, dual, u, v = solve_transport(prob)
    coupling = Coupling(plan)
    if (
        np.abs(plan.sum(1) - prob.supply).max() > MARGINAL_TOL
        or np.abs(plan.sum(0) - prob.demand).max() > MARGINAL_TOL
    ):
        raise InvariantError("optimal plan violates its marginals")
    if primal - dual > DUALITY_GAP_TOL:
        raise InvariantError(f"duality gap {primal - dual:.3e} exceeds {DUALITY_GAP_TOL}")
    return TransportSolution(max(primal, 0.0) ** (1.0 / p), coupling, primal, dual, (u, v))


# -- bottleneck ---------------------------------------------------------------


def _linf(p, q) -> float:
    return max(abs(p[0] - q[0]), abs(p[1] - q[1]))


def _half_persistence(p) -> float:
    return (p[1] - p[0]) / 2


def _essential_distance(a: list[float], b: list[float]) -> float:
    if len(a) != len(b):
        return INF
    if not a:
        return 0.0
    # sorted matching minimises the largest displacement on the line
    return max(abs(x - y) for x, y in zip(sorted(a), sorted(b)))


def _finite_feasible(A, B, r: float) -> bool:
    """Is there a perfect matching of A + diag(B) with B + diag(A) at scale r?"""
    na, nb = len(A), len(B)
    n = na + nb
    rows, cols = [], []
    for i, p in enumerate(A):
        for j, q in enumerate(B):
            if _linf(p, q) <= r:
                rows.append(i)
                cols.append(j)
        if _half_persistence(p) <= r:
            rows.append(i)
            cols.append(nb + i)
    for j, q in enumerate(B):
        if _half_persistence(q) <= r:
            rows.append(na + j)
            cols.append(j)
        for i in range(na):
            rows.append(na + j)
            cols.append(nb + i)
    if n == 0:
        return True
    g = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    match = maximum_bipartite_matching(g, perm_type="column")
    return bool((match >= 0).all())


def _finite_bottleneck(A, B) -> float:
    cands = {0.0}
    cands.update(_half_persistence(p) for p in A)
    cands.update(_half_persistence(q) for q in B)
    cands.update(_linf(p, q) for p in A for q in B)
    cands = sorted(cands)
    lo, hi = 0, len(cands) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _finite_feasible(A, B, cands[mid]):
            hi = mid
        else:
            lo = mid + 1
    return cands[lo]


def _check_same_dim(a: PersistenceDiagram, b: PersistenceDiagram) -> None:
    if a.dim != b.dim:
        raise InputError(f"diagrams live in different dimensions ({a.dim} vs {b.dim})")


def bottleneck(a: PersistenceDiagram, b: PersistenceDiagram) -> float:
    """Bottleneck distance (l-infinity ground metric, diagonal absorbs finite points).

    Essential bars only match essential bars, by birth; differing essential
    counts give ``inf``.
    """
    _check_same_dim(a, b)
    ess = _essential_distance(a.essential_births, b.essential_births)
    if ess == INF:
        return INF
    return max(ess, _finite_bottleneck(a.finite, b.finite))


def bottleneck_bruteforce(a: PersistenceDiagram, b: PersistenceDiagram, max_points: int = 6) -> float:
    """Bottleneck distance by enumerating every partial matching (tiny inputs only)."""
    _check_same_dim(a, b)
    A, B = list(a.pairs), list(b.pairs)
    if len(A) + len(B) > max_points:
        raise InputError(f"{len(A) + len(B)} points exceeds the brute-force limit of {max_points}")

    def cost(p, q):
        if (p[1] == INF) != (q[1] == INF):
            return INF
        if p[1] == INF:
            return abs(p[0] - q[0])
        return _linf(p, q)

    def diag(p):
        return INF if p[1] == INF else _half_persistence(p)

    best = INF
    # slots: each point of A goes to a point of B or to the diagonal (None)
    slots = list(range(len(B))) + [None] * len(A)
    seen = set()
    for assign in permutations(slots, len(A)):
        if assign in seen:
            continue
        seen.add(assign)
        worst = 0.0
        used = set()
        for p, j in zip(A, assign):
            if j is None:
                worst = max(worst, diag(p))
            else:
                used.add(j)
                worst = max(worst, cost(p, B[j]))
        for j, q in enumerate(B):
            if j not in used:
                worst = max(worst, diag(q))
        best = min(best, worst)
    return best


def diagram_distance(a: dict[int, PersistenceDiagram], b: dict[int, PersistenceDiagram], dims=None) -> float:
    """Largest bottleneck distance over the requested dimensions."""
    keys = sorted(set(a) | set(b)) if dims is None else list(dims)
    empty = PersistenceDiagram
    return max(
        (bottleneck(a.get(k, empty(k)), b.get(k, empty(k))) for k in keys),
        default=0.0,
    )

