"""Boundary-matrix reduction over GF(2) and persistence diagrams.

Dimension 0 is handled with a union-find pass (elder rule); higher
dimensions use standard column reduction with clearing, processing the top
dimension first so that pivots of dimension-(k+1) columns clear the
corresponding dimension-k columns. Columns are stored as Python integers
used as bitsets over filtration positions, so the pivot of a column is its
highest set bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .complex import FilteredComplex, filtration_order
from .errors import InputError, InvariantError

INF = math.inf

Diagrams = dict[int, "PersistenceDiagram"]


@dataclass(frozen=True)
class PersistenceDiagram:
    """Multiset of (birth, death) pairs in one homology dimension.

    Pairs are stored sorted, so ``==`` is multiset equality. Zero-length pairs
    are dropped on construction; a death of ``inf`` marks an essential class.
    """

    dim: int
    pairs: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        kept = []
        for b, d in self.pairs:
            b, d = float(b), float(d)
            if math.isnan(b) or math.isnan(d) or math.isinf(b):
                raise InputError(f"invalid pair ({b}, {d})")
            if d < b:
                raise InputError(f"death {d} precedes birth {b}")
            if d > b:
                kept.append((b, d))
        object.__setattr__(self, "pairs", tuple(sorted(kept)))

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    @property
    def finite(self) -> list[tuple[float, float]]:
        return [p for p in self.pairs if p[1] != INF]

    @property
    def essential_births(self) -> list[float]:
        return [b for b, d in self.pairs if d == INF]

    def persistence(self) -> np.ndarray:
        return np.array([d - b for b, d in self.pairs], dtype=float)


@dataclass(frozen=True)
class Barcode:
    """Interval decomposition of a homology persistence module, per dimension."""

    diagrams: Diagrams
    flavor: str = "unreduced"

    def __post_init__(self):
        if self.flavor not in ("reduced", "unreduced"):
            raise InputError(f"unknown flavor {self.flavor!r}")


def empty_diagrams(max_dim: int) -> Diagrams:
    return {k: PersistenceDiagram(k) for k in range(max_dim + 1)}


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root


def reduce(fc: FilteredComplex) -> Diagrams:
    """Persistence diagrams of the sublevel filtration, unreduced homology over GF(2).

    Returns one diagram per dimension ``0..max_dim``.
    """
    order = filtration_order(fc)
    cx = fc.complex
    n = len(cx)
    max_dim = cx.max_dim
    out: dict[int, list[tuple[float, float]]] = {k: [] for k in range(max_dim + 1)}
    if n == 0:
        return empty_diagrams(max_dim)

    pos = np.empty(n, dtype=np.int64)
    pos[order] = np.arange(n)
    pos_l = pos.tolist()
    order_l = order.tolist()
    sval = fc.values[order].tolist()
    cells = cx.cells
    dim_at = [cells[i].dim for i in order_l]

    # columns of dim >= 2, top dimension first, with clearing
    paired: set[int] = set()  # positions that are positive and killed
    negative: set[int] = set()
    by_dim: dict[int, list[int]] = {}
    for p, cid in enumerate(order_l):
        by_dim.setdefault(dim_at[p], []).append(p)
    for k in range(max_dim, 1, -1):
        pivot_of: dict[int, int] = {}
        reduced: dict[int, int] = {}
        for p in by_dim.get(k, ()):
            if p in paired:
                continue
            col = 0
            for b in cells[order_l[p]].boundary:
                col ^= 1 << pos_l[b]
            while col:
                low = col.bit_length() - 1
                q = pivot_of.get(low)
                if q is None:
                    pivot_of[low] = p
                    reduced[p] = col
                    break
                col ^= reduced[q]
            if col:
                low = col.bit_length() - 1
                paired.add(low)
                negative.add(p)
                out[k - 1].append((sval[low], sval[p]))

    # dimension 0 via union-find; edges that merge nothing are cycle creators
    uf = _UnionFind(n)
    for p in range(n):
        if dim_at[p] != 1:
            continue
        u, v = (pos_l[b] for b in cells[order_l[p]].boundary)
        ru, rv = uf.find(u), uf.find(v)
        if ru == rv:
            continue
        young, old = (ru, rv) if ru > rv else (rv, ru)
        uf.parent[young] = old
        negative.add(p)
        paired.add(young)
        out[0].append((sval[young], sval[p]))

    for p in range(n):
        if p not in paired and p not in negative:
            out[dim_at[p]].append((sval[p], INF))
    return {k: PersistenceDiagram(k, tuple(v)) for k, v in out.items()}


def betti_numbers(diagrams: Diagrams) -> list[int]:
    """Betti numbers of the whole complex: counts of essential bars."""
    return [len(diagrams[k].essential_births) for k in sorted(diagrams)]


def reduced_diagram(diagrams: Diagrams, min_value: float) -> Diagrams:
    """Remove one essential ``[min_value, inf)`` bar from dimension 0."""
    h0 = list(diagrams[0].pairs)
    try:
        h0.remove((float(min_value), INF))
    except ValueError:
        raise InvariantError(f"no essential dim-0 bar born at {min_value}") from None
    out = dict(diagrams)
    out[0] = PersistenceDiagram(0, tuple(h0))
    return out


def barcode(fc: FilteredComplex, flavor: str = "unreduced") -> Barcode:
    dgms = reduce(fc)
    if flavor == "reduced" and len(fc.complex):
        dgms = reduced_diagram(dgms, float(fc.values.min()))
    return Barcode(dgms, flavor)


def interleaving_distance(a: PersistenceDiagram, b: PersistenceDiagram) -> float:
    """Interleaving distance of the underlying modules, computed as bottleneck distance."""
    from .transport import bottleneck

    return bottleneck(a, b)


def diagrams_equal(a: Diagrams, b: Diagrams, dims: Iterable[int] | None = None) -> bool:
    keys = set(a) | set(b) if dims is None else set(dims)
    return all(a.get(k, PersistenceDiagram(k)) == b.get(k, PersistenceDiagram(k)) for k in keys)
