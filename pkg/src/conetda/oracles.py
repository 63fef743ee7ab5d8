"""Slow, independent reference computations used to cross-check the fast paths.

Nothing here shares code with the implementations it checks: persistence is
recovered from ranks of inclusion-induced maps, Wasserstein distances on the
line from quantile functions, and Gromov-Hausdorff distances by enumerating
correspondences.
"""

from __future__ import annotations

from itertools import product

import numpy as np

from .complex import FilteredComplex
from .errors import InputError
from .persistence import INF, Diagrams, PersistenceDiagram

# -- linear algebra over the two-element field ----------------------------------


def gf2_rank(m: np.ndarray) -> int:
    a = (np.asarray(m) % 2).astype(np.uint8)
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        piv = np.flatnonzero(a[r:, c])
        if piv.size == 0:
            continue
        p = r + piv[0]
        a[[r, p]] = a[[p, r]]
        hit = np.flatnonzero(a[:, c])
        hit = hit[hit != r]
        a[hit] ^= a[r]
        r += 1
        if r == rows:
            break
    return r


def gf2_nullspace(m: np.ndarray) -> np.ndarray:
    """Basis of the right null space, one vector per row."""
    a = (np.asarray(m) % 2).astype(np.uint8)
    rows, cols = a.shape
    pivots, r = [], 0
    for c in range(cols):
        if r == rows:
            break
        piv = np.flatnonzero(a[r:, c])
        if piv.size == 0:
            continue
        p = r + piv[0]
        a[[r, p]] = a[[p, r]]
        hit = np.flatnonzero(a[:, c])
        hit = hit[hit != r]
        a[hit] ^= a[r]
        pivots.append(c)
        r += 1
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.uint8)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for i, pc in enumerate(pivots):
            basis[k, pc] = a[i, f]
    return basis


# -- persistence from persistent Betti numbers ------------------------------------


def persistent_betti(fc: FilteredComplex, k: int, a: float, b: float) -> int:
    """Rank of ``H_k(K_a) -> H_k(K_b)`` for sublevel complexes, ``a <= b``."""
    cells = fc.complex.cells
    vals = fc.values
    kb = [c.id for c in cells if c.dim == k and vals[c.id] <= b]
    ka = [c.id for c in cells if c.dim == k and vals[c.id] <= a]
    pos = {cid: i for i, cid in enumerate(kb)}
    if not ka:
        return 0
    faces = [c.id for c in cells if c.dim == k - 1]
    fpos = {cid: i for i, cid in enumerate(faces)}
    bd = np.zeros((len(faces), len(ka)), dtype=np.uint8)
    for j, cid in enumerate(ka):
        for f in cells[cid].boundary:
            bd[fpos[f], j] = 1
    z = gf2_nullspace(bd) if faces else np.eye(len(ka), dtype=np.uint8)
    if len(z) == 0:
        return 0
    # cycles of K_a written in the k-chains of K_b
    za = np.zeros((len(z), len(kb)), dtype=np.uint8)
    for j, cid in enumerate(ka):
        za[:, pos[cid]] = z[:, j]
    cofaces = [c.id for c in cells if c.dim == k + 1 and vals[c.id] <= b]
    bb = np.zeros((len(cofaces), len(kb)), dtype=np.uint8)
    for i, cid in enumerate(cofaces):
        for f in cells[cid].boundary:
            bb[i, pos[f]] = 1
    rank_b = gf2_rank(bb) if len(cofaces) else 0
    rank_both = gf2_rank(np.vstack([za, bb])) if len(cofaces) else len(z)
    # dim(Z_a + B_b) - dim B_b = dim Z_a - dim(Z_a ∩ B_b) = rank of the map
    return rank_both - rank_b


def diagrams_bruteforce(fc: FilteredComplex, max_cells: int = 40) -> Diagrams:
    """Diagrams by inclusion-exclusion over persistent Betti numbers."""
    if len(fc.complex) > max_cells:
        raise InputError(f"{len(fc.complex)} cells exceeds the brute-force limit of {max_cells}")
    fc.check_monotone()
    levels = sorted(set(fc.values.tolist()))
    m = len(levels)
    out: Diagrams = {}
    for k in range(fc.complex.max_dim + 1):
        beta = np.zeros((m + 1, m), dtype=np.int64)  # row i+1 <-> level i, row 0 is "before"
        for i in range(m):
            for j in range(i, m):
                beta[i + 1, j] = persistent_betti(fc, k, levels[i], levels[j])
        pairs = []
        for i in range(m):
            for j in range(i + 1, m):
                mult = beta[i + 1, j - 1] - beta[i + 1, j] - beta[i, j - 1] + beta[i, j]
                pairs += [(levels[i], levels[j])] * int(mult)
            ess = beta[i + 1, m - 1] - beta[i, m - 1]
            pairs += [(levels[i], INF)] * int(ess)
        out[k] = PersistenceDiagram(k, tuple(pairs))
    return out


# -- transport on the line --------------------------------------------------------


def wasserstein_line(x, alpha, beta, p: float = 1.0) -> float:
    """``w_p`` between two measures on points ``x`` of the real line via quantile functions."""
    x = np.asarray(x, dtype=float)
    order = np.argsort(x, kind="stable")
    x = x[order]
    ca = np.cumsum(np.asarray(alpha, dtype=float)[order])
    cb = np.cumsum(np.asarray(beta, dtype=float)[order])
    ca[-1] = cb[-1] = 1.0
    cuts = np.unique(np.concatenate([[0.0], ca, cb]))
    cuts = cuts[cuts <= 1.0]
    total = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        mid = (lo + hi) / 2
        qa = x[min(np.searchsorted(ca, mid), len(x) - 1)]
        qb = x[min(np.searchsorted(cb, mid), len(x) - 1)]
        total += (hi - lo) * abs(qa - qb) ** p
    return total ** (1.0 / p)


# -- Gromov-Hausdorff by enumeration ----------------------------------------------


def gromov_hausdorff_bruteforce(dX, dY, max_pairs: int = 12) -> float:
    """``min_R dis(R) / 2`` over every correspondence between two tiny metric spaces."""
    dX, dY = np.asarray(dX, dtype=float), np.asarray(dY, dtype=float)
    nx, ny = len(dX), len(dY)
    if nx * ny > max_pairs:
        raise InputError(f"{nx}x{ny} pairs exceeds the brute-force limit of {max_pairs}")
    pairs = [(i, j) for i in range(nx) for j in range(ny)]
    best = INF
    for keep in product((0, 1), repeat=len(pairs)):
        rel = [pq for pq, k in zip(pairs, keep) if k]
        if {i for i, _ in rel} != set(range(nx)) or {j for _, j in rel} != set(range(ny)):
            continue
        dis = max(abs(dX[i, k] - dY[j, l]) for i, j in rel for k, l in rel)
        best = min(best, dis)
    return best / 2
