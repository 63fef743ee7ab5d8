"""Finite filtered simplicial and cubical complexes.

Conventions used throughout the package:

* Cell ids are dense and equal to the cell's position in ``Complex.cells``.
* Vertices come first: the vertex labelled ``v`` is the cell with id ``v``,
  so a vertex function is simply an array indexed by vertex label.
* Cubical complexes follow the vertex (V-) construction, where pixels are
  vertices and an edge/square is present iff all of its pixels are.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError, InvariantError

SIMPLICIAL = "simplicial"
CUBICAL = "cubical"


@dataclass(frozen=True)
class Cell:
    id: int
    dim: int
    boundary: tuple[int, ...]
    vertices: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class Complex:
    """An unfiltered finite complex."""

    cells: tuple[Cell, ...]
    kind: str = SIMPLICIAL
    n_vertices: int = field(init=False)

    def __post_init__(self):
        if self.kind not in (SIMPLICIAL, CUBICAL):
            raise InputError(f"unknown complex kind {self.kind!r}")
        nv = 0
        for pos, c in enumerate(self.cells):
            if c.id != pos:
                raise InputError(f"cell at position {pos} has id {c.id}; ids must be dense")
            if c.dim == 0:
                if pos != nv or c.vertices != (pos,) or c.boundary:
                    raise InputError("vertex cells must come first with vertices == (id,)")
                nv += 1
        object.__setattr__(self, "n_vertices", nv)
        for c in self.cells[nv:]:
            self._check_cell(c)

    def _check_cell(self, c: Cell) -> None:
        n = len(self.cells)
        if c.dim < 1:
            raise InputError(f"cell {c.id}: vertices must precede higher cells")
        if list(c.vertices) != sorted(set(c.vertices)):
            raise InputError(f"cell {c.id}: vertex list must be sorted and distinct")
        if self.kind == SIMPLICIAL:
            if len(c.vertices) != c.dim + 1 or len(c.boundary) != c.dim + 1:
                raise InputError(f"cell {c.id}: a {c.dim}-simplex needs {c.dim + 1} vertices and faces")
        elif len(c.vertices) != 2 ** c.dim or len(c.boundary) != 2 * c.dim:
            raise InputError(f"cell {c.id}: a {c.dim}-cube needs {2 ** c.dim} vertices and {2 * c.dim} faces")
        for b in c.boundary:
            if not 0 <= b < n:
                raise InputError(f"cell {c.id}: boundary id {b} does not exist")
            face = self.cells[b]
            if face.dim != c.dim - 1 or not set(face.vertices) <= set(c.vertices):
                raise InputError(f"cell {c.id}: {b} is not a codimension-1 face")
        if len(set(c.boundary)) != len(c.boundary):
            raise InputError(f"cell {c.id}: repeated boundary face")

    def __len__(self) -> int:
        return len(self.cells)

    @property
    def dims(self) -> np.ndarray:
        return np.fromiter((c.dim for c in self.cells), dtype=np.int64, count=len(self.cells))

    @property
    def max_dim(self) -> int:
        return max((c.dim for c in self.cells), default=-1)

    def cell_counts(self) -> list[int]:
        counts = [0] * (self.max_dim + 1)
        for c in self.cells:
            counts[c.dim] += 1
        return counts

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * k for d, k in enumerate(self.cell_counts()))

    def simplex_index(self) -> dict[tuple[int, ...], int]:
        """Map from sorted vertex tuple to cell id."""
        return {c.vertices: c.id for c in self.cells}


@dataclass(frozen=True, eq=False)
class FilteredComplex:
    """A complex with one finite real value per cell.

    Monotonicity is checked lazily by :func:`filtration_order`, so an invalid
    filtration can still be built and inspected.
    """

    complex: Complex
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (len(self.complex),):
            raise InputError(f"need {len(self.complex)} filtration values, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise InputError("filtration values must be finite")
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def cells(self) -> tuple[Cell, ...]:
        return self.complex.cells

    @property
    def kind(self) -> str:
        return self.complex.kind

    @property
    def n_vertices(self) -> int:
        return self.complex.n_vertices

    def vertex_values(self) -> np.ndarray:
        return np.asarray(self.values[: self.n_vertices])

    def check_monotone(self) -> None:
        vals = self.values
        for c in self.complex.cells:
            for b in c.boundary:
                if vals[b] > vals[c.id]:
                    raise InvariantError(
                        f"filtration not monotone: cell {c.id} (value {vals[c.id]}) "
                        f"has face {b} with larger value {vals[b]}"
                    )


def simplicial_complex(simplices: Iterable[Sequence[int]], close: bool = True) -> Complex:
    """Build a simplicial complex from vertex tuples.

    Vertex labels must be exactly ``0..n-1``. With ``close=True`` every face of
    every listed simplex is added; otherwise the list must already be closed.
    """
    given = {tuple(sorted(set(int(v) for v in s))) for s in simplices}
    given.discard(())
    if close:
        full: set[tuple[int, ...]] = set()
        for s in given:
            for k in range(1, len(s) + 1):
                full.update(combinations(s, k))
    else:
        full = given
        for s in given:
            if len(s) > 1:
                for face in combinations(s, len(s) - 1):
                    if face not in given:
                        raise InputError(f"complex not face-closed: {s} lacks face {face}")
    verts = sorted(s[0] for s in full if len(s) == 1)
    if verts != list(range(len(verts))):
        raise InputError("vertex labels must be 0..n-1")
    ordered = sorted(full, key=lambda s: (len(s), s))
    index = {s: i for i, s in enumerate(ordered)}
    cells = []
    for i, s in enumerate(ordered):
        bnd = () if len(s) == 1 else tuple(index[f] for f in combinations(s, len(s) - 1))
        cells.append(Cell(i, len(s) - 1, bnd, s))
    return Complex(tuple(cells), SIMPLICIAL)


def _vertex_function(cx: Complex, f) -> np.ndarray:
    vals = np.asarray(f, dtype=float)
    if vals.ndim != 1 or vals.shape[0] != cx.n_vertices:
        raise InputError(f"vertex function needs {cx.n_vertices} values, got shape {vals.shape}")
    if not np.all(np.isfinite(vals)):
        raise InputError("vertex function values must be finite")
    return vals


def lower_star_filtration(cx: Complex, f) -> FilteredComplex:
    """Filtration value of each cell = max of ``f`` over its vertices."""
    vals = _vertex_function(cx, f)
    out = np.empty(len(cx))
    out[: cx.n_vertices] = vals
    for c in cx.cells[cx.n_vertices:]:
        out[c.id] = max(vals[v] for v in c.vertices)
    return FilteredComplex(cx, out)


def grid_to_cubical(image, mask=None) -> tuple[Complex, np.ndarray]:
    """Cubical complex of a 2-D image; ``mask`` marks excluded pixels (truthy = excluded).

    Returns the complex and the pixel values as its vertex function. Vertex ids
    run over unmasked pixels in row-major order.
    """
    img = np.asarray(image, dtype=float)
    if img.ndim != 2 or img.size == 0:
        raise InputError("image must be a non-empty 2-D array")
    keep = np.ones(img.shape, dtype=bool)
    if mask is not None:
        m = np.asarray(mask)
        if m.shape != img.shape:
            raise InputError(f"mask shape {m.shape} != image shape {img.shape}")
        keep = ~m.astype(bool)
    if not keep.any():
        raise InputError("every pixel is masked")
    rows, cols = img.shape
    ids = np.full(img.shape, -1, dtype=np.int64)
    ids[keep] = np.arange(int(keep.sum()))
    vid = ids.tolist()

    cells = [Cell(i, 0, (), (i,)) for i in range(int(keep.sum()))]
    edge_id: dict[tuple[int, int], int] = {}

    def add_edge(a, b):
        key = (min(a, b), max(a, b))
        edge_id[key] = len(cells)
        cells.append(Cell(len(cells), 1, key, key))

    for i in range(rows):
        for j in range(cols):
            if not keep[i, j]:
                continue
            if j + 1 < cols and keep[i, j + 1]:
                add_edge(vid[i][j], vid[i][j + 1])
            if i + 1 < rows and keep[i + 1, j]:
                add_edge(vid[i][j], vid[i + 1][j])
    for i in range(rows - 1):
        for j in range(cols - 1):
            if keep[i:i + 2, j:j + 2].all():
                a, b, c, d = vid[i][j], vid[i][j + 1], vid[i + 1][j], vid[i + 1][j + 1]
                bnd = (edge_id[(a, b)], edge_id[(a, c)], edge_id[(b, d)], edge_id[(c, d)])
                cells.append(Cell(len(cells), 2, tuple(sorted(bnd)), tuple(sorted((a, b, c, d)))))
    return Complex(tuple(cells), CUBICAL), img[keep].copy()


def filtration_order(fc: FilteredComplex) -> np.ndarray:
    """Cell ids sorted by (value, dim, id); validates monotonicity first."""
    fc.check_monotone()
    ids = np.arange(len(fc.complex))
    return np.lexsort((ids, fc.complex.dims, fc.values))


def subdivide_cubical(fc: FilteredComplex) -> FilteredComplex:
    """Triangulate a filtered cubical complex of dimension <= 2.

    Each square Q gets a centre vertex; the centre, its four spokes and four
    triangles all take the value of Q. Sublevel sets are homotopy equivalent
    to the cubical ones at every level. Centre vertices are appended after
    the original vertices, in square order.
    """
    cx = fc.complex
    if cx.kind == SIMPLICIAL:
        return fc
    if cx.max_dim > 2:
        raise InputError("only cubical complexes of dimension <= 2 can be subdivided")
    nv = cx.n_vertices
    squares = [c for c in cx.cells if c.dim == 2]
    simplices: list[tuple[int, ...]] = []
    value_of: dict[tuple[int, ...], float] = {}
    for c in cx.cells:
        if c.dim < 2:
            simplices.append(c.vertices)
            value_of[c.vertices] = float(fc.values[c.id])
    for k, q in enumerate(squares):
        centre = nv + k
        val = float(fc.values[q.id])
        value_of[(centre,)] = val
        for b in q.boundary:
            u, v = cx.cells[b].vertices
            for s in ((u, centre), (v, centre), (u, v, centre)):
                value_of[s] = val
                simplices.append(s)
        simplices.append((centre,))
    sc = simplicial_complex(simplices, close=False)
    vals = np.array([value_of[c.vertices] for c in sc.cells])
    return FilteredComplex(sc, vals)


def cycle_graph(n: int) -> Complex:
    """The n-cycle as a 1-dimensional simplicial complex (n >= 3)."""
    if n < 3:
        raise InputError("a cycle needs at least 3 vertices")
    return simplicial_complex([(i, (i + 1) % n) for i in range(n)])
