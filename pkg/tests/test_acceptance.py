"""One test per acceptance criterion; each records a PASS/FAIL line for the session summary."""

import time

import numpy as np
import pytest

from conetda.cone import cone_routes
from conetda.config import ExperimentConfig
from conetda.experiments import (
    prop_bottleneck_oracle,
    prop_diagram_stability,
    prop_heat_kernel,
    prop_cone_pairing,
    prop_pairing_max_gap,
    prop_minkowski,
    prop_wasserstein_line,
    run,
)
from conetda.generators import random_filtered_complex
from conetda.persistence import INF

from .conftest import ACCEPTANCE


def record(key: str, ok: bool, detail: str) -> None:
    ACCEPTANCE[key] = (bool(ok), detail)
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {key}: {detail}")
    assert ok, detail


def _failed(report) -> str:
    return "; ".join(f"{v.name} (margin {v.margin:.3g})" for v in report.failures()[:3])


def test_criterion_1_fig1(tmp_path):
    t0 = time.perf_counter()
    report = run(ExperimentConfig(experiment="fig1"), tmp_path)
    elapsed = time.perf_counter() - t0
    st = report.stages
    raw = st["raw_dim1"]
    b, d = st["image"]["min"], st["image"]["max"]
    shapes = (
        raw["i"] == [[b, d]]
        and raw["ii"] == [[b, None]]
        and len(raw["iii"]) == 4
        and [b, d] in raw["iii"]
        and sum(q is None and d - nb <= st["near_band"] for nb, q in raw["iii"]) == 3
    )
    trunc_ok = max(st["truncated_bottleneck"].values()) <= st["noise_scale"]
    ok = report.ok and shapes and st["raw_bottleneck"]["i-ii"] == INF and trunc_ok and elapsed <= 30
    record(
        "1 fig1",
        ok,
        f"shapes {'ok' if shapes else 'WRONG'}, raw (i)-(ii)={st['raw_bottleneck']['i-ii']}, "
        f"max truncated d_B={max(st['truncated_bottleneck'].values()):.4g} <= noise {st['noise_scale']:.4g}, "
        f"{elapsed:.1f}s {_failed(report)}",
    )


def test_criterion_2_route_agreement():
    n, bad, max_dim = 150, [], 0
    for k in range(n):
        fc = random_filtered_complex(np.random.default_rng([2, k]), max_cells=60)
        assert len(fc.complex) <= 60
        max_dim = max(max_dim, fc.complex.max_dim)
        routes = cone_routes(fc)
        if not routes.agree:
            bad.append(k)
    record("2 route agreement", not bad and max_dim >= 2,
           f"{n - len(bad)}/{n} complexes agree exactly (max cell dim {max_dim})")


def test_criterion_3_diagram_inequality():
    res = prop_diagram_stability(0, trials=200, ps=(1.0, 2.0), n=24)
    record("3 diagram inequality", res.trials == 400 and res.passed,
           f"{res.trials - res.failures}/{res.trials} (200 per p in {{1,2}}), worst margin {res.worst_margin:.3g}")


def test_criterion_4_consistency(tmp_path):
    t0 = time.perf_counter()
    report = run(ExperimentConfig(experiment="consistency"), tmp_path)
    elapsed = time.perf_counter() - t0
    table = report.stages["rate_table"]
    med = [r["median_dB"] for r in table]
    per_rep = [v for v in report.verdicts if "replicate" in v.name]
    ok = report.ok and len(per_rep) == 100 and med[0] >= 2 * med[-1] and elapsed <= 120
    record("4 consistency", ok,
           f"median d_B {med[0]:.4f} -> {med[-1]:.4f} ({med[0] / med[-1]:.2f}x), "
           f"{sum(v.holds for v in per_rep)}/{len(per_rep)} replicates bounded, {elapsed:.1f}s")


def test_criterion_5_transport_oracles():
    bn = prop_bottleneck_oracle(0, trials=500)
    wl = prop_wasserstein_line(0, trials=200)
    record("5 transport oracles", bn.passed and bn.trials == 500 and wl.passed and wl.trials == 200,
           f"bottleneck {bn.trials - bn.failures}/500 exact; "
           f"line w_p {wl.trials - wl.failures}/200 within 1e-9 (worst {-wl.worst_margin:.2e})")


def test_criterion_6_heat_kernel():
    res = prop_heat_kernel(0, trials=50)
    record("6 heat kernel", res.passed and res.trials == 51,
           f"{res.trials - res.failures}/{res.trials} checks (50 graphs + two-vertex closed forms)")


@pytest.mark.parametrize("graph", ["barbell", "cycle"])
def test_criterion_7_multiscale(graph, tmp_path):
    report = run(ExperimentConfig(experiment="multiscale", graph=graph), tmp_path)
    path = [v for v in report.verdicts if v.name.startswith("path")]
    pert = [v for v in report.verdicts if "perturbation" in v.name]
    ok = report.ok and len(report.stages["t_grid"]) == 16 and len(path) == 15 * 2 and len(pert) == 150
    record(f"7 multiscale ({graph})", ok,
           f"{sum(v.holds for v in path)}/{len(path)} adjacent-scale steps, "
           f"{sum(v.holds for v in pert)}/{len(pert)} perturbations bounded {_failed(report)}")


def test_criterion_8_pairing_suites():
    suites = {"max": prop_pairing_max_gap(0, 200), "cone": prop_cone_pairing(0, 200), "minkowski": prop_minkowski(0, 200)}
    ok = all(r.passed and r.trials == 200 for r in suites.values())
    record("8 pairing and centrality suites", ok,
           ", ".join(f"{k} {r.trials - r.failures}/{r.trials}" for k, r in suites.items()))
