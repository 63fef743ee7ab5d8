"""Coning filtered complexes and truncating diagrams.

The cone over a filtered simplicial complex adds one apex vertex and, for
each base simplex s, the simplex s + apex. Every new cell enters at the
maximum vertex value ``m_f``: below ``m_f`` the coned sublevel sets equal the
base ones, and from ``m_f`` on they are cones, hence contractible. This is
why the cone diagram equals the reduced base diagram truncated at ``m_f``
plus one essential dim-0 bar at ``min f``; :func:`cone_diagram` computes both
routes and insists they agree.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .complex import (
    CUBICAL,
    Cell,
    Complex,
    FilteredComplex,
    SIMPLICIAL,
    subdivide_cubical,
)
from .errors import InputError, InvariantError
from .persistence import (
    INF,
    Diagrams,
    PersistenceDiagram,
    diagrams_equal,
    reduce,
    reduced_diagram,
)


@dataclass(frozen=True, eq=False)
class ConedComplex:
    base: FilteredComplex
    filtered: FilteredComplex
    apex: int
    m_f: float


def cone_complex(fc: FilteredComplex) -> ConedComplex:
    """Cone over ``fc``; cubical inputs are subdivided into triangles first.

    In the result, base vertices keep their labels, the apex is vertex
    ``n_vertices`` and the remaining cells are renumbered.
    """
    if len(fc.complex) == 0:
        raise InputError("cannot cone an empty complex")
    if fc.kind == CUBICAL:
        fc = subdivide_cubical(fc)
    base = fc.complex
    nv = base.n_vertices
    m_f = float(fc.vertex_values().max())
    apex = nv

    # new id of base cell c: c for vertices, c + 1 otherwise; cone cells follow
    shift = [c.id if c.dim == 0 else c.id + 1 for c in base.cells]
    n_base = len(base) + 1
    cone_id = [n_base + c.id for c in base.cells]
    cells: list[Cell] = []
    for c in base.cells[:nv]:
        cells.append(c)
    cells.append(Cell(apex, 0, (), (apex,)))
    for c in base.cells[nv:]:
        cells.append(Cell(shift[c.id], c.dim, tuple(shift[b] for b in c.boundary), c.vertices))
    for c in base.cells:
        if c.dim == 0:
            bnd = (c.id, apex)
        else:
            # faces of s*apex: s itself, then cones over the faces of s
            bnd = (shift[c.id],) + tuple(cone_id[b] for b in c.boundary)
        cells.append(Cell(cone_id[c.id], c.dim + 1, bnd, c.vertices + (apex,)))
    cx = Complex(tuple(cells), SIMPLICIAL)

    vals = np.empty(len(cx))
    vals[:nv] = fc.values[:nv]
    vals[apex] = m_f
    vals[nv + 1 : n_base] = fc.values[nv:]
    vals[n_base:] = np.maximum(fc.values, m_f)
    return ConedComplex(fc, FilteredComplex(cx, vals), apex, m_f)


def truncate_diagram(d: PersistenceDiagram, r: float) -> PersistenceDiagram:
    """Clip every bar at ``r``; bars born at or after ``r`` disappear."""
    return PersistenceDiagram(d.dim, tuple((b, min(dd, r)) for b, dd in d.pairs if b < r))


def truncate_diagrams(dgms: Diagrams, r: float) -> Diagrams:
    return {k: truncate_diagram(d, r) for k, d in dgms.items()}


@dataclass(frozen=True)
class ConeRoutes:
    cone: Diagrams
    truncated: Diagrams
    m_f: float
    min_f: float

    @property
    def agree(self) -> bool:
        return diagrams_equal(self.cone, self.truncated)


def cone_routes(fc: FilteredComplex) -> ConeRoutes:
    """Both routes to the coned diagram, without checking agreement."""
    coned = cone_complex(fc)
    base = coned.base
    route_a = reduce(coned.filtered)
    min_f = float(base.values.min())
    tilde = reduced_diagram(reduce(base), min_f)
    route_b = truncate_diagrams(tilde, coned.m_f)
    route_b[0] = PersistenceDiagram(0, route_b[0].pairs + ((min_f, INF),))
    top = coned.filtered.complex.max_dim
    for k in range(top + 1):
        route_a.setdefault(k, PersistenceDiagram(k))
        route_b.setdefault(k, PersistenceDiagram(k))
    return ConeRoutes(route_a, route_b, coned.m_f, min_f)


def cone_diagram(fc: FilteredComplex) -> Diagrams:
    """Diagrams of the coned sublevel filtration, cross-checked by truncation."""
    routes = cone_routes(fc)
    if not routes.agree:
        raise InvariantError(
            f"cone route {routes.cone} disagrees with truncation route {routes.truncated}"
        )
    return routes.cone


def cone_vertex_function(f, m: float | None = None) -> np.ndarray:
    """Append the apex value (the maximum of ``f`` unless given) to a vertex function."""
    f = np.asarray(f, dtype=float)
    return np.append(f, f.max() if m is None else m)


def _check_simplicial_map(phi: np.ndarray, source: Complex, target: Complex) -> None:
    if phi.shape != (source.n_vertices,):
        raise InputError(f"vertex map needs {source.n_vertices} entries, got {phi.shape}")
    if phi.size and (phi.min() < 0 or phi.max() >= target.n_vertices):
        raise InputError("vertex map sends a vertex outside the target")
    if target.kind != SIMPLICIAL or source.kind != SIMPLICIAL:
        raise InputError("simplicial maps need simplicial complexes")
    simplices = target.simplex_index()
    for c in source.cells:
        image = tuple(sorted(set(int(phi[v]) for v in c.vertices)))
        if image not in simplices:
            raise InputError(f"map is not simplicial: {c.vertices} -> {image}")


def cone_map(phi: Sequence[int], source: Complex, target: Complex) -> np.ndarray:
    """Extend a simplicial vertex map to the cones, sending apex to apex.

    Apexes are labelled as in :func:`cone_complex`: ``source.n_vertices`` and
    ``target.n_vertices``.
    """
    phi = np.asarray(phi, dtype=np.int64)
    _check_simplicial_map(phi, source, target)
    return np.append(phi, target.n_vertices)


@dataclass(frozen=True)
class PairingCheck:
    holds: bool
    side: str | None = None
    vertex: int | None = None
    margin: float = 0.0

    def __bool__(self) -> bool:
        return self.holds


def verify_strong_pairing(fX, fY, phi, psi, eps: float) -> PairingCheck:
    """Check ``|fY(phi(x)) - fX(x)| <= eps`` and ``|fX(psi(y)) - fY(y)| <= eps`` everywhere.

    ``margin`` is ``eps`` minus the worst deviation, negative on failure; on
    failure ``side``/``vertex`` name a worst offender.
    """
    fX, fY = np.asarray(fX, dtype=float), np.asarray(fY, dtype=float)
    phi, psi = np.asarray(phi, dtype=np.int64), np.asarray(psi, dtype=np.int64)
    if phi.shape != fX.shape or psi.shape != fY.shape:
        raise InputError("maps must be defined on every vertex of their domain")
    if (phi.size and (phi.min() < 0 or phi.max() >= fY.size)) or (
        psi.size and (psi.min() < 0 or psi.max() >= fX.size)
    ):
        raise InputError("map sends a vertex outside its codomain")
    dev_x = np.abs(fY[phi] - fX)
    dev_y = np.abs(fX[psi] - fY)
    worst_x = float(dev_x.max(initial=0.0))
    worst_y = float(dev_y.max(initial=0.0))
    if worst_x >= worst_y:
        side, vertex, worst = "phi", int(np.argmax(dev_x)) if dev_x.size else None, worst_x
    else:
        side, vertex, worst = "psi", int(np.argmax(dev_y)), worst_y
    margin = eps - worst
    if margin >= 0:
        return PairingCheck(True, margin=margin)
    return PairingCheck(False, side, vertex, margin)
