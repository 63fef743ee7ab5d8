"""Readers and writers for the file formats the CLI consumes and emits."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable

import numpy as np

from .complex import Complex, FilteredComplex, simplicial_complex
from .errors import InputError
from .persistence import INF, Diagrams, PersistenceDiagram

# -- images --------------------------------------------------------------------


def read_grid_csv(path) -> np.ndarray:
    arr = np.loadtxt(path, delimiter=",", ndmin=2)
    if arr.size == 0:
        raise InputError(f"{path}: empty grid")
    return arr


def read_mask_csv(path) -> np.ndarray:
    arr = read_grid_csv(path)
    if not np.isin(arr, (0, 1)).all():
        raise InputError(f"{path}: mask entries must be 0 or 1")
    return arr.astype(bool)


def _pgm_tokens(data: bytes, count: int, start: int = 0):
    """Yield ``count`` whitespace-separated header tokens, skipping comments."""
    tokens, i = [], start
    while len(tokens) < count:
        while i < len(data) and data[i : i + 1].isspace():
            i += 1
        if data[i : i + 1] == b"#":
            while i < len(data) and data[i : i + 1] not in (b"\n", b"\r"):
                i += 1
            continue
        j = i
        while j < len(data) and not data[j : j + 1].isspace():
            j += 1
        tokens.append(data[i:j])
        i = j
    return tokens, i


def read_pgm(path) -> np.ndarray:
    """Read an ASCII (P2) or binary (P5) PGM, 8 or 16 bit, rescaled to [0, 1]."""
    data = Path(path).read_bytes()
    (magic, w, h, maxval), end = _pgm_tokens(data, 4)
    w, h, maxval = int(w), int(h), int(maxval)
    if not 0 < maxval < 65536:
        raise InputError(f"{path}: bad maxval {maxval}")
    if magic == b"P5":
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype(np.uint8)
        body = data[end + 1 : end + 1 + w * h * dtype.itemsize]
        raw = np.frombuffer(body, dtype=dtype, count=len(body) // dtype.itemsize)
    elif magic == b"P2":
        raw = np.array(data[end:].split()[: w * h], dtype=np.int64)
    else:
        raise InputError(f"{path}: not a PGM file")
    if raw.size != w * h:
        raise InputError(f"{path}: truncated pixel data")
    return raw.reshape(h, w).astype(float) / maxval


def write_pgm(path, image: np.ndarray, maxval: int = 255) -> None:
    """Binary PGM of an image with values in [0, 1]."""
    img = np.clip(np.asarray(image, dtype=float), 0, 1)
    h, w = img.shape
    dtype = np.dtype(">u2") if maxval > 255 else np.uint8
    body = np.round(img * maxval).astype(dtype).tobytes()
    Path(path).write_bytes(f"P5\n{w} {h}\n{maxval}\n".encode() + body)


def read_image(path) -> np.ndarray:
    return read_pgm(path) if str(path).lower().endswith(".pgm") else read_grid_csv(path)


# -- complexes -----------------------------------------------------------------


def write_complex_csv(path, fc: FilteredComplex) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "dim", "value", "vertices"])
        for c in fc.cells:
            w.writerow([c.id, c.dim, repr(float(fc.values[c.id])), " ".join(map(str, c.vertices))])


# -- diagrams ------------------------------------------------------------------


def _death_json(d: float):
    return None if d == INF else d


def diagrams_to_json(dgms: Diagrams) -> list[dict]:
    return [
        {"dim": k, "pairs": [[b, _death_json(d)] for b, d in dgms[k].pairs]}
        for k in sorted(dgms)
    ]


def diagrams_from_json(obj) -> Diagrams:
    if isinstance(obj, dict):
        obj = obj.get("diagrams", [obj])
    out = {}
    for entry in obj:
        k = int(entry["dim"])
        pairs = tuple((float(b), INF if d is None else float(d)) for b, d in entry["pairs"])
        out[k] = PersistenceDiagram(k, pairs)
    return out


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n")


def write_diagrams_json(path, dgms: Diagrams) -> None:
    write_json(path, {"diagrams": diagrams_to_json(dgms)})


def read_diagrams_json(path) -> Diagrams:
    return diagrams_from_json(json.loads(Path(path).read_text()))


def write_diagrams_csv(path, dgms: Diagrams) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["dim", "birth", "death"])
        for k in sorted(dgms):
            for b, d in dgms[k].pairs:
                w.writerow([k, repr(b), "inf" if d == INF else repr(d)])


def read_diagrams_csv(path) -> Diagrams:
    rows: dict[int, list] = {}
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            d = rec["death"].strip()
            rows.setdefault(int(rec["dim"]), []).append((float(rec["birth"]), INF if d == "inf" else float(d)))
    return {k: PersistenceDiagram(k, tuple(v)) for k, v in rows.items()}


def barcode_svg(
    dgm: PersistenceDiagram,
    min_f: float,
    max_f: float,
    title: str = "",
    width: int = 360,
    bar_height: int = 10,
) -> str:
    """Barcode plot with dashed guides at ``min_f`` and ``max_f``; arrows mark infinite bars."""
    pad, top = 30, 28
    span = max_f - min_f or 1.0
    lo, hi = min_f - 0.1 * span, max_f + 0.25 * span
    inner = width - 2 * pad

    def x(v: float) -> float:
        return pad + (v - lo) / (hi - lo) * inner

    n = max(len(dgm), 1)
    height = top + n * (bar_height + 4) + 30
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{pad}" y="16" font-family="sans-serif" font-size="12">{title}</text>',
    ]
    for v, label in ((min_f, "min f"), (max_f, "max f")):
        parts.append(
            f'<line x1="{x(v):.2f}" y1="{top - 6}" x2="{x(v):.2f}" y2="{height - 22}" '
            f'stroke="gray" stroke-dasharray="4,3"/>'
        )
        parts.append(
            f'<text x="{x(v):.2f}" y="{height - 8}" font-family="sans-serif" font-size="10" '
            f'text-anchor="middle">{label}={v:.3g}</text>'
        )
    for k, (b, d) in enumerate(dgm.pairs):
        y = top + k * (bar_height + 4)
        end = x(hi) - 8 if d == INF else x(d)
        parts.append(
            f'<rect x="{x(b):.2f}" y="{y}" width="{max(end - x(b), 1):.2f}" height="{bar_height}" fill="steelblue"/>'
        )
        if d == INF:
            ym = y + bar_height / 2
            parts.append(
                f'<polygon points="{end:.2f},{y - 2} {end + 8:.2f},{ym:.1f} {end:.2f},{y + bar_height + 2}" '
                f'fill="steelblue"/>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def diagram_svg(dgm: PersistenceDiagram, min_f: float, max_f: float, title: str = "", size: int = 300) -> str:
    """Birth/death scatter with the diagonal, dashed min/max guides and infinite points on top."""
    pad = 30
    span = max_f - min_f or 1.0
    lo, hi = min_f - 0.1 * span, max_f + 0.2 * span
    inner = size - 2 * pad

    def sx(v: float) -> float:
        return pad + (v - lo) / (hi - lo) * inner

    def sy(v: float) -> float:
        return size - pad - (v - lo) / (hi - lo) * inner

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
        f'<text x="{pad}" y="16" font-family="sans-serif" font-size="12">{title}</text>',
        f'<line x1="{sx(lo):.2f}" y1="{sy(lo):.2f}" x2="{sx(hi):.2f}" y2="{sy(hi):.2f}" stroke="black"/>',
    ]
    for v in (min_f, max_f):
        parts.append(f'<line x1="{sx(v):.2f}" y1="{sy(lo):.2f}" x2="{sx(v):.2f}" y2="{sy(hi):.2f}" '
                     f'stroke="gray" stroke-dasharray="4,3"/>')
        parts.append(f'<line x1="{sx(lo):.2f}" y1="{sy(v):.2f}" x2="{sx(hi):.2f}" y2="{sy(v):.2f}" '
                     f'stroke="gray" stroke-dasharray="4,3"/>')
    for b, d in dgm.pairs:
        y = sy(hi) + 4 if d == INF else sy(d)
        parts.append(f'<circle cx="{sx(b):.2f}" cy="{y:.2f}" r="3" fill="crimson"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# -- graphs, meshes, mm-spaces ---------------------------------------------------


def read_edge_csv(path) -> tuple[int, list[tuple[int, int]], list[float]]:
    """Edge list with columns ``u, v, weight`` (header optional)."""
    edges, weights = [], []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                u, v = int(row[0]), int(row[1])
            except ValueError:
                continue  # header
            edges.append((u, v))
            weights.append(float(row[2]) if len(row) > 2 and row[2].strip() else 1.0)
    if not edges:
        raise InputError(f"{path}: no edges")
    n = max(max(e) for e in edges) + 1
    return n, edges, weights


def read_vector_csv(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", ndmin=1).ravel()


def read_off(path) -> tuple[np.ndarray, list[tuple[int, int, int]]]:
    """Vertices and triangles of an OFF mesh."""
    lines = [ln.split("#")[0].strip() for ln in Path(path).read_text().splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or not lines[0].startswith("OFF"):
        raise InputError(f"{path}: missing OFF header")
    head = lines[0][3:].split() or lines.pop(1).split()
    nv, nf = int(head[0]), int(head[1])
    body = lines[1:]
    verts = np.array([[float(t) for t in body[i].split()[:3]] for i in range(nv)])
    faces = []
    for ln in body[nv : nv + nf]:
        toks = [int(t) for t in ln.split()]
        k, idx = toks[0], toks[1 : 1 + toks[0]]
        if k < 3:
            raise InputError(f"{path}: face with {k} vertices")
        faces += [(idx[0], idx[j], idx[j + 1]) for j in range(1, k - 1)]
    return verts, faces


def mesh_graph(verts: np.ndarray, faces, weighting: str = "unit"):
    """Weighted graph, vertex volumes and edge lengths of a triangle mesh.

    ``weighting`` is ``unit`` or ``cotangent``; volumes are barycentric areas
    (a third of the incident triangle areas). Edge lengths are Euclidean.
    """
    from .diffusion import WeightedGraph

    n = len(verts)
    w = np.zeros((n, n))
    ln = np.zeros((n, n))
    vol = np.zeros(n)
    for tri in faces:
        p = verts[list(tri)]
        area = 0.5 * np.linalg.norm(np.cross(p[1] - p[0], p[2] - p[0]))
        vol[list(tri)] += area / 3
        for k in range(3):
            i, j, o = tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]
            ln[i, j] = ln[j, i] = np.linalg.norm(verts[i] - verts[j])
            if weighting == "unit":
                w[i, j] = w[j, i] = 1.0
            elif weighting == "cotangent":
                a, b = verts[i] - verts[o], verts[j] - verts[o]
                cot = float(a @ b) / max(np.linalg.norm(np.cross(a, b)), 1e-300)
                w[i, j] += cot / 2
                w[j, i] = w[i, j]
            else:
                raise InputError(f"unknown weighting {weighting!r}")
    if weighting == "cotangent" and (w[ln > 0] <= 0).any():
        raise InputError("cotangent weights are not positive (mesh is not Delaunay)")
    if (vol <= 0).any():
        raise InputError("mesh has vertices without incident triangles")
    return WeightedGraph(w, vol, ln)


def mesh_complex(n_vertices: int, faces) -> Complex:
    return simplicial_complex([(i,) for i in range(n_vertices)] + [tuple(f) for f in faces])


def read_mm_space(dist_path=None, weights_path=None, points_path=None, metric: str = "euclidean", k: int = 8):
    """Load a finite mm-space from a distance matrix or a point cloud.

    Point clouds use ``metric`` ``euclidean`` or ``graph-shortest-path``; the
    latter measures along the symmetric k-nearest-neighbour graph.
    """
    from scipy.sparse.csgraph import shortest_path

    from .mmspace import FiniteMMSpace

    if dist_path is not None:
        d = read_grid_csv(dist_path)
    elif points_path is not None:
        pts = read_grid_csv(points_path)
        d = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))
        if metric == "graph-shortest-path":
            n = len(d)
            graph = np.zeros_like(d)
            nearest = np.argsort(d, axis=1)[:, 1 : k + 1]
            for i in range(n):
                graph[i, nearest[i]] = d[i, nearest[i]]
            graph = np.maximum(graph, graph.T)
            d = shortest_path(graph, directed=False)
            if not np.all(np.isfinite(d)):
                raise InputError("k-nearest-neighbour graph is disconnected; raise k")
            d = (d + d.T) / 2
        elif metric != "euclidean":
            raise InputError(f"unknown metric {metric!r}")
    else:
        raise InputError("need a distance matrix or a point cloud")
    n = len(d)
    w = np.full(n, 1.0 / n) if weights_path is None else read_vector_csv(weights_path)
    return FiniteMMSpace(d, w)


def write_matrix_csv(path, m: np.ndarray) -> None:
    np.savetxt(path, np.asarray(m), delimiter=",", fmt="%.17g")


def write_rows_csv(path, header: Iterable[str], rows: Iterable[Iterable]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(header))
        for r in rows:
            w.writerow([_fmt(v) for v in r])


def _fmt(v):
    if isinstance(v, float):
        if math.isinf(v):
            return "inf"
        return repr(v)
    return v
