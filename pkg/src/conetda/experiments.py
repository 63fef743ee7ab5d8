"""Experiment drivers behind ``tda fig1|consistency|multiscale|verify``.

Each driver returns a :class:`RunReport` and, given an output directory,
writes its artifacts there. Every inequality is recorded with both sides.
"""

from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from . import io
from .complex import cycle_graph, grid_to_cubical, lower_star_filtration
from .cone import cone_diagram, cone_map, cone_routes, cone_vertex_function, verify_strong_pairing
from .config import ExperimentConfig, Fig1Params, RunReport, digest
from .diffusion import (
    WeightedGraph,
    barbell_graph,
    coned_centrality_diagrams,
    compose,
    cycle,
    diagram_path,
    diffusion_distance,
    lipschitz_constant,
    scale_stability_bound,
    spectrum,
)
from .errors import InputError
from .generators import (
    circle_space,
    random_complex,
    random_connected_graph,
    random_coupling,
    random_diagram,
    random_filtered_complex,
    random_measure,
    random_mm_space,
)
from .mmspace import (
    Coupling,
    FiniteMMSpace,
    PairingCertificate,
    centrality_function,
    delta_p_upper_bound,
    dp_alpha,
    empirical_weights,
    pairing_distortion,
    union_distance_matrix,
)
from .oracles import diagrams_bruteforce, wasserstein_line
from .persistence import INF, betti_numbers, diagrams_equal, reduce
from .transport import bottleneck, bottleneck_bruteforce, diagram_distance, wasserstein

FAULTS = ("skip-diagonal-zeroing",)


@contextmanager
def _timed(report: RunReport, stage: str):
    t0 = time.perf_counter()
    yield
    report.timings[stage] = time.perf_counter() - t0


def _new_report(cfg: ExperimentConfig, files=()) -> RunReport:
    return RunReport(cfg.experiment, cfg.to_dict(), digest(cfg, files))


# -- Fig. 1 -------------------------------------------------------------------------


def fig1_images(prm: Fig1Params) -> tuple[np.ndarray, dict[str, np.ndarray | None]]:
    """Radial well with a zero-valued ring and value 1 at the centre and far away.

    Variant (ii) masks a disc at the centre; variant (iii) masks three single
    pixels in the high-value region outside the ring.
    """
    n = prm.grid
    c = (n - 1) / 2
    yy, xx = np.mgrid[0:n, 0:n]
    r = np.hypot(yy - c, xx - c)
    ramp = np.clip((np.abs(r - prm.well_radius) - prm.band) / (prm.well_radius - prm.band - 1.0), 0, 1)
    image = (1 - np.cos(np.pi * ramp)) / 2
    holes = np.zeros((n, n), dtype=bool)
    for a in np.deg2rad(prm.noise_angles):
        i = int(round(c + prm.noise_radius * np.sin(a)))
        j = int(round(c + prm.noise_radius * np.cos(a)))
        holes[i, j] = True
    return image, {"i": None, "ii": r < prm.disc_radius, "iii": holes}


def run_fig1(cfg: ExperimentConfig, out: Path | None = None) -> RunReport:
    report = _new_report(cfg)
    prm = cfg.fig1
    image, masks = fig1_images(prm)
    raw, coned, fcs = {}, {}, {}
    for name, mask in masks.items():
        with _timed(report, f"diagrams_{name}"):
            cx, vals = grid_to_cubical(image, mask)
            fc = lower_star_filtration(cx, vals)
            raw[name] = reduce(fc)[1]
            coned[name] = cone_diagram(fc)[1]
            fcs[name] = fc
    b, d = float(image.min()), float(image.max())
    band = prm.near_band * (d - b)

    report.require("raw (i) is {(b, d)}", raw["i"].pairs == ((b, d),))
    report.require("raw (ii) is {(b, inf)}", raw["ii"].pairs == ((b, INF),))
    noise = [p for p in raw["iii"].pairs if p != (b, d)]
    report.require("raw (iii) is {(b, d)} plus three extra bars", len(raw["iii"]) == 4 and len(noise) == 3)
    report.require("noise bars in (iii) are infinite", all(q == INF for _, q in noise))
    for k, (nb, _) in enumerate(noise):
        report.check(f"noise bar {k} born within the band below d", d - nb, band)
    eps_noise = max((d - nb for nb, _ in noise), default=0.0)

    names = list(masks)
    raw_dist, trunc_dist = {}, {}
    for i, x in enumerate(names):
        for y in names[i + 1 :]:
            raw_dist[f"{x}-{y}"] = bottleneck(raw[x], raw[y])
            trunc_dist[f"{x}-{y}"] = bottleneck(coned[x], coned[y])
            report.check(f"truncated d_B ({x}) vs ({y}) <= noise scale", trunc_dist[f"{x}-{y}"], eps_noise)
    report.check("raw d_B (i) vs (ii) is infinite", raw_dist["i-ii"], INF, relation="==")
    report.check("truncated d_B (i) vs (i) is zero", bottleneck(coned["i"], coned["i"]), 0.0, relation="==")

    report.stages = {
        "image": {"min": b, "max": d, "shape": list(image.shape), "masked_pixels": {
            k: 0 if m is None else int(m.sum()) for k, m in masks.items()}},
        "near_band": band,
        "noise_scale": eps_noise,
        "raw_dim1": {k: io.diagrams_to_json({1: v})[0]["pairs"] for k, v in raw.items()},
        "truncated_dim1": {k: io.diagrams_to_json({1: v})[0]["pairs"] for k, v in coned.items()},
        "raw_bottleneck": raw_dist,
        "truncated_bottleneck": trunc_dist,
    }
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        io.write_pgm(out / "image.pgm", image)
        for name, mask in masks.items():
            if mask is not None:
                io.write_matrix_csv(out / f"mask_{name}.csv", mask.astype(int))
            io.write_diagrams_json(out / f"raw_{name}.json", {1: raw[name]})
            io.write_diagrams_json(out / f"truncated_{name}.json", {1: coned[name]})
            (out / f"raw_{name}.svg").write_text(io.barcode_svg(raw[name], b, d, f"raw H1 ({name})"))
            (out / f"truncated_{name}.svg").write_text(io.barcode_svg(coned[name], b, d, f"coned H1 ({name})"))
    return report


# -- consistency -----------------------------------------------------------------------


def ground_truth_measure(n: int) -> np.ndarray:
    """Two von Mises bumps of different heights on the circle, plus a floor."""
    theta = 2 * np.pi * np.arange(n) / n
    w = 0.1 + np.exp(3 * np.cos(theta - 0.5)) + 0.6 * np.exp(4 * np.cos(theta - 3.6))
    return w / w.sum()


def run_consistency(cfg: ExperimentConfig, out: Path | None = None) -> RunReport:
    report = _new_report(cfg, [cfg.alpha])
    n_pts = cfg.circle_size
    alpha = io.read_vector_csv(cfg.alpha) if cfg.alpha else ground_truth_measure(n_pts)
    circle = circle_space(n_pts, alpha)
    carrier = cycle_graph(n_pts)
    truth = coned_centrality_diagrams(circle, carrier, cfg.p)
    rows, table = [], []
    with _timed(report, "replicates"):
        for n in cfg.sample_sizes:
            dbs, wps = [], []
            for k in range(cfg.replicates):
                rng = np.random.default_rng([cfg.seed, n, k])
                a_n = empirical_weights(rng.choice(n_pts, size=n, p=alpha), n_pts)
                dgm = coned_centrality_diagrams(circle.with_weights(a_n), carrier, cfg.p)
                d_b = diagram_distance(dgm, truth, cfg.dims)
                w_p = wasserstein(circle, a_n, alpha, cfg.p).value
                report.check(f"n={n} replicate {k}: d_B <= w_p", d_b, w_p, cfg.tol)
                dbs.append(d_b)
                wps.append(w_p)
                rows.append((n, k, d_b, w_p))
            table.append((n, float(np.median(dbs)), float(np.median(wps)), float(np.mean(dbs))))
    med = np.array([t[1] for t in table])
    ns = np.array(cfg.sample_sizes, dtype=float)
    inversions = int((np.diff(med) > 0).sum())
    report.check("median d_B non-increasing in n (inversions)", inversions, 1)
    if len(ns) > 1:
        report.check("median d_B drops at least 2x over the sweep", 2 * med[-1], med[0])
    positive = med > 0
    slope = float(np.polyfit(np.log(ns[positive]), np.log(med[positive]), 1)[0]) if positive.sum() > 1 else float("nan")
    report.stages = {
        "ground_truth": {"alpha": alpha, "diagrams": io.diagrams_to_json(truth)},
        "rate_table": [dict(zip(("n", "median_dB", "median_wp", "mean_dB"), t)) for t in table],
        "loglog_slope": slope,
        "reference_slope": -1.0 / cfg.rate_s,
    }
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        io.write_rows_csv(out / "replicates.csv", ("n", "replicate", "d_B", "w_p"), rows)
        io.write_rows_csv(out / "rate_table.csv", ("n", "median_dB", "median_wp", "mean_dB"), table)
        io.write_diagrams_json(out / "ground_truth.json", truth)
    return report


# -- multi-scale ----------------------------------------------------------------------


def load_graph(cfg: ExperimentConfig):
    """The configured graph and its carrier complex (1-skeleton, or the mesh triangles)."""
    if cfg.graph == "barbell":
        G = barbell_graph()
        return G, G.one_skeleton()
    if cfg.graph == "cycle":
        G = cycle(12)
        return G, G.one_skeleton()
    path = Path(cfg.graph)
    if path.suffix.lower() == ".off":
        verts, faces = io.read_off(path)
        G = io.mesh_graph(verts, faces, cfg.weighting)
        return G, io.mesh_complex(len(verts), faces)
    n, edges, weights = io.read_edge_csv(path)
    vol = io.read_vector_csv(cfg.volumes) if cfg.volumes else None
    G = WeightedGraph.from_edges(n, edges, weights, vol)
    return G, G.one_skeleton()


def run_multiscale(cfg: ExperimentConfig, out: Path | None = None) -> RunReport:
    graph_file = None if cfg.graph in ("barbell", "cycle") else cfg.graph
    report = _new_report(cfg, [graph_file, cfg.volumes, cfg.alpha])
    G, carrier = load_graph(cfg)
    alpha = io.read_vector_csv(cfg.alpha) if cfg.alpha else np.full(G.n, 1.0 / G.n)
    with _timed(report, "spectrum"):
        spec = spectrum(G)
    with _timed(report, "diagram_path"):
        path = diagram_path(spec, alpha, cfg.p, cfg.t_grid, carrier, cfg.dims)
    step_rows = []
    for st in path.steps:
        for i, d_b in st.bottleneck.items():
            report.check(f"path s={st.s:.6g} t={st.t:.6g} dim {i}: d_B <= delta bound", d_b, st.delta_bound, cfg.tol)
            step_rows.append((st.s, st.t, i, d_b, st.delta_bound))

    finite0 = []
    for dg in path.diagrams:
        pers = [q - b for b, q in dg[0].finite]
        finite0.append(max(pers, default=0.0))
    if cfg.graph == "barbell":
        report.require("barbell: one finite dim-0 bar at the smallest t", len(path.diagrams[0][0].finite) == 1)
        report.check("barbell: finite dim-0 persistence at the largest t", finite0[-1], 1e-6)

    pert_rows = []
    with _timed(report, "measure_perturbations"):
        for ti, t in enumerate(cfg.t_checks):
            c_t = lipschitz_constant(spec, t)
            base = coned_centrality_diagrams(FiniteMMSpace(diffusion_distance(spec, t, cfg.p), alpha), carrier, cfg.p)
            for k in range(cfg.perturbations):
                rng = np.random.default_rng([cfg.seed, ti, k])
                eta = rng.uniform(0.05, 0.5)
                beta = (1 - eta) * alpha
                beta[int(rng.integers(G.n))] += eta
                beta /= beta.sum()
                X_b = FiniteMMSpace(diffusion_distance(spec, t, cfg.p), beta)
                d_b = diagram_distance(base, coned_centrality_diagrams(X_b, carrier, cfg.p), cfg.dims)
                bound = scale_stability_bound(spec, t, cfg.p, alpha, beta, lipschitz=c_t)
                report.check(f"t={t:g} perturbation {k}: d_B <= C_t vol^(1/p) w_p", d_b, bound.value, cfg.tol)
                pert_rows.append((t, k, eta, d_b, bound.value, c_t, bound.wasserstein))

    report.stages = {
        "graph": {"n": G.n, "edges": len(G.edges()), "lambda_1": float(spec.eigenvalues[1]),
                  "spectral_residual": spec.residual, "orthonormality_error": spec.orthonormality_error},
        "t_grid": list(path.t_grid),
        "max_finite_dim0_persistence": finite0,
        "diagrams": [{"t": float(t), "diagrams": io.diagrams_to_json(dg)} for t, dg in zip(path.t_grid, path.diagrams)],
    }
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        io.write_json(out / "diagram_bundle.json", report.to_dict()["stages"]["diagrams"])
        io.write_rows_csv(out / "adjacent_scales.csv", ("s", "t", "dim", "d_B", "delta_bound"), step_rows)
        io.write_rows_csv(
            out / "perturbations.csv", ("t", "k", "eta", "d_B", "bound", "lipschitz", "w_p"), pert_rows
        )
    return report


# -- verify -------------------------------------------------------------------------


@dataclass
class PropertyResult:
    name: str
    trials: int = 0
    failures: int = 0
    worst_margin: float = INF
    first_failure: str | None = None

    def record(self, margin: float, tol: float = 0.0, detail: str = "") -> None:
        self.trials += 1
        margin = float(margin) if np.isfinite(margin) or margin == INF else -INF
        self.worst_margin = min(self.worst_margin, margin)
        if not margin >= -tol:
            self.failures += 1
            if self.first_failure is None:
                self.first_failure = detail or f"trial {self.trials - 1}"

    @property
    def passed(self) -> bool:
        return self.trials > 0 and self.failures == 0


def _rng(seed: int, suite: int, k: int) -> np.random.Generator:
    return np.random.default_rng([seed, suite, k])


def prop_route_agreement(seed: int, trials: int = 100) -> PropertyResult:
    res = PropertyResult("cone route agreement")
    for k in range(trials):
        fc = random_filtered_complex(_rng(seed, 1, k), max_cells=60)
        res.record(0.0 if cone_routes(fc).agree else -1.0, detail=f"complex {k}")
    return res


def prop_persistence_oracle(seed: int, trials: int = 100) -> PropertyResult:
    res = PropertyResult("reduction vs persistent-Betti oracle")
    for k in range(trials):
        fc = random_filtered_complex(_rng(seed, 2, k), max_cells=30)
        ok = diagrams_equal(reduce(fc), diagrams_bruteforce(fc), dims=range(fc.complex.max_dim + 1))
        res.record(0.0 if ok else -1.0, detail=f"complex {k}")
    return res


def prop_euler(seed: int, trials: int = 100) -> PropertyResult:
    res = PropertyResult("Euler characteristic from Betti numbers")
    for k in range(trials):
        fc = random_filtered_complex(_rng(seed, 3, k))
        betti = betti_numbers(reduce(fc))
        chi = sum((-1) ** i * b for i, b in enumerate(betti))
        res.record(-abs(chi - fc.complex.euler_characteristic()), detail=f"complex {k}")
    return res


def prop_cone_contractible(seed: int, trials: int = 100) -> PropertyResult:
    from .cone import cone_complex

    res = PropertyResult("coned complex is acyclic")
    for k in range(trials):
        fc = random_filtered_complex(_rng(seed, 4, k))
        betti = betti_numbers(reduce(cone_complex(fc).filtered))
        res.record(0.0 if betti[0] == 1 and not any(betti[1:]) else -1.0, detail=f"complex {k}")
    return res


def _random_pairing(rng):
    """Random X, a full simplex Y, and a simplicial pairing phi: X -> Y, psi: Y -> X."""
    X = random_complex(rng, max_cells=30)
    m = int(rng.integers(1, 5))
    from .complex import simplicial_complex

    Y = simplicial_complex([tuple(range(m))])
    target = X.cells[int(rng.integers(len(X)))].vertices  # psi lands in one simplex of X
    phi = rng.integers(0, m, X.n_vertices)
    psi = rng.choice(np.array(target), m)
    fX = rng.normal(size=X.n_vertices)
    fY = rng.normal(size=m)
    eps = max(np.abs(fY[phi] - fX).max(), np.abs(fX[psi] - fY).max()) + rng.choice([0.0, rng.uniform(0, 0.5)])
    return X, Y, phi, psi, fX, fY, float(eps)


def prop_pairing_max_gap(seed: int, trials: int = 200, tol: float = 1e-9) -> PropertyResult:
    res = PropertyResult("strong pairing bounds the gap of maxima")
    for k in range(trials):
        _, _, phi, psi, fX, fY, eps = _random_pairing(_rng(seed, 5, k))
        if not verify_strong_pairing(fX, fY, phi, psi, eps):
            res.record(-1.0, detail=f"instance {k}: pairing not verified")
            continue
        res.record(eps - abs(fX.max() - fY.max()), tol, f"instance {k}")
    return res


def prop_cone_pairing(seed: int, trials: int = 200, tol: float = 1e-9) -> PropertyResult:
    res = PropertyResult("cone maps of a strong pairing form a strong pairing")
    for k in range(trials):
        X, Y, phi, psi, fX, fY, eps = _random_pairing(_rng(seed, 6, k))
        phi_c, psi_c = cone_map(phi, X, Y), cone_map(psi, Y, X)
        check = verify_strong_pairing(cone_vertex_function(fX), cone_vertex_function(fY), phi_c, psi_c, eps)
        res.record(check.margin, tol, f"instance {k}")
    return res


def _mm_pair(rng):
    X = random_mm_space(rng, int(rng.integers(1, 7)))
    Y = random_mm_space(rng, int(rng.integers(1, 7)))
    return X, Y, random_coupling(rng, X.weights, Y.weights)


def prop_minkowski(seed: int, trials: int = 200, tol: float = 1e-9) -> PropertyResult:
    res = PropertyResult("centrality moves by at most d_{p,mu}(x, phi(x))")
    for k in range(trials):
        rng = _rng(seed, 7, k)
        X, Y, mu = _mm_pair(rng)
        p = float(rng.choice([1.0, 1.5, 2.0, 3.0]))
        phi = rng.integers(0, Y.n, X.n)
        sx, sy = centrality_function(X, p), centrality_function(Y, p)
        D = union_distance_matrix(X, Y, mu, p)
        gap = D[np.arange(X.n), X.n + phi] - np.abs(sy[phi] - sx)
        res.record(gap.min(), tol, f"instance {k}")
    return res


def prop_coupling_bound(seed: int, trials: int = 200, tol: float = 1e-9) -> PropertyResult:
    res = PropertyResult("identity pairing with an optimal coupling is bounded by w_p")
    for k in range(trials):
        rng = _rng(seed, 8, k)
        X = random_mm_space(rng, int(rng.integers(1, 8)))
        a, b = random_measure(rng, X.n), random_measure(rng, X.n)
        p = float(rng.choice([1.0, 2.0, 3.0]))
        sol = wasserstein(X, a, b, p)
        bound = delta_p_upper_bound(X.with_weights(a), X.with_weights(b), PairingCertificate.identity(sol.coupling), p)
        res.record(sol.value - bound.value, tol, f"instance {k}")
    return res


def prop_dpmu_axioms(seed: int, trials: int = 200, tol: float = 1e-9, fault: str | None = None) -> PropertyResult:
    res = PropertyResult("d_{p,mu} is a pseudo-metric on the disjoint union")
    for k in range(trials):
        rng = _rng(seed, 9, k)
        X, Y, mu = _mm_pair(rng)
        p = (1.0, 2.0, 3.0)[k % 3]
        D = union_distance_matrix(X, Y, mu, p, zero_diagonal=fault != "skip-diagonal-zeroing")
        with np.errstate(invalid="ignore"):
            if not (np.diag(D) == 0).all():
                res.record(-INF, tol, f"instance {k} (p={p}): nonzero diagonal")
                continue
            asym = np.abs(D - D.T).max()
            tri = (D[:, None, :] + D[None, :, :] - D[:, :, None]).min()  # d(i,j)+d(j,k)-d(i,k)
        worst = min(-asym, tri)
        res.record(worst, tol, f"instance {k} (p={p})")
    return res


def prop_marginal(seed: int, trials: int = 200, tol: float = 1e-9) -> PropertyResult:
    res = PropertyResult("d_{p,alpha} equals the coupling norm of profile differences")
    for k in range(trials):
        rng = _rng(seed, 10, k)
        X, Y, mu = _mm_pair(rng)
        p = float(rng.choice([1.0, 2.0, 3.0]))
        D = union_distance_matrix(X, Y, mu, p)
        worst = 0.0
        for i in range(X.n):
            for j in range(X.n):
                worst = max(worst, abs(D[i, j] - dp_alpha(X, p, i, j)))
        res.record(-worst, tol, f"instance {k}")
    return res


def prop_bottleneck_oracle(seed: int, trials: int = 500) -> PropertyResult:
    res = PropertyResult("bottleneck equals exhaustive matching")
    for k in range(trials):
        rng = _rng(seed, 11, k)
        na = int(rng.integers(0, 5))
        nb = int(rng.integers(0, 7 - na))
        a, b = random_diagram(rng, na), random_diagram(rng, nb)
        fast, slow = bottleneck(a, b), bottleneck_bruteforce(a, b)
        res.record(0.0 if fast == slow else -1.0, detail=f"{a.pairs} vs {b.pairs}: {fast} != {slow}")
    return res


def prop_wasserstein_line(seed: int, trials: int = 200, tol: float = 1e-9) -> PropertyResult:
    res = PropertyResult("w_p on the line equals the quantile formula")
    for k in range(trials):
        rng = _rng(seed, 12, k)
        n = int(rng.integers(1, 9))
        x = rng.uniform(-3, 3, n)
        a, b = random_measure(rng, n), random_measure(rng, n)
        p = float(rng.choice([1.0, 1.5, 2.0, 3.0]))
        lp = wasserstein(np.abs(x[:, None] - x[None, :]), a, b, p).value
        res.record(-abs(lp - wasserstein_line(x, a, b, p)), tol, f"instance {k}")
    return res


def heat_kernel_errors(G: WeightedGraph, ts=(0.05, 0.5, 2.0)) -> dict[str, float]:
    """Worst mass-conservation, semigroup and d_t triangle errors over a few scales."""
    spec = spectrum(G)
    nu = G.volumes
    mass = semi = tri = 0.0
    for s in ts:
        K = spec.heat_kernel(s)
        mass = max(mass, float(np.abs(K @ nu - 1).max()))
        for t in ts:
            semi = max(semi, float(np.abs(compose(G, K, spec.heat_kernel(t)) - spec.heat_kernel(s + t)).max()))
        for p in (1.0, 2.0):
            D = diffusion_distance(spec, s, p)
            tri = max(tri, float(-(D[:, None, :] + D[None, :, :] - D[:, :, None]).min()))
    return {"mass": mass, "semigroup": semi, "triangle": tri}


def two_vertex_errors(ts=(0.01, 0.1, 0.5, 1.0, 3.0)) -> float:
    G = WeightedGraph.from_edges(2, [(0, 1)])
    spec = spectrum(G)
    worst = 0.0
    for t in ts:
        K = spec.heat_kernel(t)
        D = diffusion_distance(spec, t, 2.0)
        worst = max(
            worst,
            abs(K[0, 1] - (1 - np.exp(-2 * t)) / 2),
            abs(K[0, 0] - (1 + np.exp(-2 * t)) / 2),
            abs(D[0, 1] - np.sqrt(2) * np.exp(-2 * t)),
        )
    return worst


def prop_heat_kernel(seed: int, trials: int = 50) -> PropertyResult:
    res = PropertyResult("heat kernel mass, semigroup and triangle inequality")
    for k in range(trials):
        e = heat_kernel_errors(random_connected_graph(_rng(seed, 13, k)))
        res.record(min(1e-8 - e["mass"], 1e-7 - e["semigroup"], 1e-9 - e["triangle"]), detail=f"graph {k}: {e}")
    res.record(1e-10 - two_vertex_errors(), detail="two-vertex closed forms")
    return res


def prop_diagram_stability(seed: int, trials: int = 200, tol: float = 1e-9, ps=(1.0, 2.0), n: int = 24) -> PropertyResult:
    res = PropertyResult("coned centrality diagrams move by at most w_p")
    carrier = cycle_graph(n)
    base = circle_space(n)
    for p in ps:
        for k in range(trials):
            rng = _rng(seed, 14 + int(p * 10), k)
            a, b = random_measure(rng, n), random_measure(rng, n)
            da = coned_centrality_diagrams(base.with_weights(a), carrier, p)
            db = coned_centrality_diagrams(base.with_weights(b), carrier, p)
            res.record(wasserstein(base, a, b, p).value - diagram_distance(da, db, (0, 1)), tol, f"p={p} pair {k}")
    return res


SUITES: dict[str, Callable[..., PropertyResult]] = {
    "route_agreement": prop_route_agreement,
    "persistence_oracle": prop_persistence_oracle,
    "euler_characteristic": prop_euler,
    "cone_contractible": prop_cone_contractible,
    "pairing_max_gap": prop_pairing_max_gap,
    "cone_pairing": prop_cone_pairing,
    "minkowski": prop_minkowski,
    "coupling_bound": prop_coupling_bound,
    "dpmu_axioms": prop_dpmu_axioms,
    "marginal": prop_marginal,
    "bottleneck_oracle": prop_bottleneck_oracle,
    "wasserstein_line": prop_wasserstein_line,
    "heat_kernel": prop_heat_kernel,
    "diagram_stability": prop_diagram_stability,
}


def run_verify(cfg: ExperimentConfig, out: Path | None = None) -> RunReport:
    if cfg.fault is not None and cfg.fault not in FAULTS:
        raise InputError(f"unknown fault {cfg.fault!r}; known: {FAULTS}")
    report = _new_report(cfg)
    s, n = cfg.seed, cfg.trials
    plan = {
        "route_agreement": dict(trials=cfg.complexes),
        "persistence_oracle": dict(trials=cfg.complexes),
        "euler_characteristic": dict(trials=cfg.complexes),
        "cone_contractible": dict(trials=cfg.complexes),
        "pairing_max_gap": dict(trials=n, tol=cfg.tol),
        "cone_pairing": dict(trials=n, tol=cfg.tol),
        "minkowski": dict(trials=n, tol=cfg.tol),
        "coupling_bound": dict(trials=n, tol=cfg.tol),
        "dpmu_axioms": dict(trials=n, tol=cfg.tol, fault=cfg.fault),
        "marginal": dict(trials=n, tol=cfg.tol),
        "bottleneck_oracle": dict(trials=500),
        "wasserstein_line": dict(trials=n, tol=cfg.tol),
        "heat_kernel": dict(trials=50),
        "diagram_stability": dict(trials=n, tol=cfg.tol),
    }
    results = []
    for key, kw in plan.items():
        with _timed(report, key):
            r = SUITES[key](s, **kw)
        results.append(r)
        report.check(f"{r.name}: failures out of {r.trials}", r.failures, 0)
    report.stages = {
        "properties": [
            {"suite": key, "name": r.name, "trials": r.trials, "failures": r.failures,
             "passed": r.passed, "worst_margin": r.worst_margin, "first_failure": r.first_failure}
            for key, r in zip(plan, results)
        ]
    }
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        io.write_rows_csv(
            out / "properties.csv",
            ("suite", "trials", "failures", "passed", "worst_margin"),
            [(k, r.trials, r.failures, r.passed, r.worst_margin) for k, r in zip(plan, results)],
        )
    return report


RUNNERS = {"fig1": run_fig1, "consistency": run_consistency, "multiscale": run_multiscale, "verify": run_verify}


def run(cfg: ExperimentConfig, out: Path | None = None) -> RunReport:
    t0 = time.perf_counter()
    report = RUNNERS[cfg.experiment](cfg, out)
    report.timings["total"] = time.perf_counter() - t0
    if out is not None:
        report.write(out)
    return report
