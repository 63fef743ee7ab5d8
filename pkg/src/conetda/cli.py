"""``tda`` command line.

Experiments:  tda fig1|consistency|multiscale|verify [--config FILE] [--seed N] [--out DIR]
Transport:    tda transport wasserstein --p P --dist D.csv --alpha A.csv --beta B.csv
              tda transport bottleneck --a A.json --b B.json [--dim K]
Diagrams:     tda diagram --image IMG [--mask M.csv] [--cone] [--out DIR]
              tda cone --image IMG [--mask M.csv]

Exit status is 0 when every asserted inequality holds, 1 when one fails and
2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io
from .config import load_config, output_dir
from .errors import InputError, InvariantError


def _add_experiment(sub, name: str, help_: str) -> None:
    p = sub.add_parser(name, help=help_)
    p.add_argument("--config", help="TOML or JSON experiment config")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output directory (default: $TDA_OUT_DIR or runs/<experiment>)")
    p.add_argument("--fault", help="verify only: inject a known fault (negative control)")
    p.set_defaults(handler=_cmd_experiment, experiment=name)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tda", description="Cone-truncated persistence and stability checks.")
    sub = ap.add_subparsers(dest="command", required=True)
    _add_experiment(sub, "fig1", "synthetic well images: raw vs coned barcodes")
    _add_experiment(sub, "consistency", "empirical measures on a circle: d_B vs w_p and the rate table")
    _add_experiment(sub, "multiscale", "diffusion-distance diagram path on a graph or mesh")
    _add_experiment(sub, "verify", "run every seeded property suite")

    tr = sub.add_parser("transport", help="Wasserstein and bottleneck distances").add_subparsers(
        dest="kind", required=True
    )
    w = tr.add_parser("wasserstein")
    w.add_argument("--p", type=float, default=1.0)
    w.add_argument("--dist", required=True)
    w.add_argument("--alpha", required=True)
    w.add_argument("--beta", required=True)
    w.add_argument("--coupling-out", help="write the optimal coupling as a CSV matrix")
    w.set_defaults(handler=_cmd_wasserstein)
    b = tr.add_parser("bottleneck")
    b.add_argument("--a", required=True)
    b.add_argument("--b", required=True)
    b.add_argument("--dim", type=int, action="append", help="restrict to these dimensions")
    b.set_defaults(handler=_cmd_bottleneck)

    for name, helper in (("diagram", _cmd_diagram), ("cone", _cmd_cone)):
        d = sub.add_parser(name, help="persistence of an image (CSV grid or PGM)" if name == "diagram"
                           else "coned diagrams by both routes, with a verdict")
        d.add_argument("--image", required=True)
        d.add_argument("--mask")
        d.add_argument("--out")
        if name == "diagram":
            d.add_argument("--cone", action="store_true", help="emit coned (truncated) diagrams")
            d.add_argument("--format", choices=("json", "csv"), default="json")
        d.set_defaults(handler=helper)
    return ap


def _cmd_experiment(args) -> int:
    from .experiments import run

    cfg = load_config(args.config, experiment=args.experiment, seed=args.seed, fault=args.fault)
    out = output_dir(args.out, f"runs/{cfg.experiment}")
    report = run(cfg, out)
    for v in report.verdicts if not report.ok else []:
        if not v.holds:
            print(f"VIOLATED  {v.name}: {v.lhs} {v.relation} {v.rhs} (margin {v.margin:.3g})")
    n_ok = sum(v.holds for v in report.verdicts)
    print(f"{cfg.experiment}: {n_ok}/{len(report.verdicts)} assertions hold; report in {out}/report.json")
    return 0 if report.ok else 1


def _cmd_wasserstein(args) -> int:
    from .transport import wasserstein

    sol = wasserstein(io.read_grid_csv(args.dist), io.read_vector_csv(args.alpha), io.read_vector_csv(args.beta), args.p)
    if args.coupling_out:
        io.write_matrix_csv(args.coupling_out, sol.coupling.matrix)
    print(json.dumps({"value": sol.value, "primal": sol.primal, "dual": sol.dual, "p": args.p}))
    return 0


def _cmd_bottleneck(args) -> int:
    from .config import jsonable
    from .transport import bottleneck
    from .persistence import PersistenceDiagram

    a, b = io.read_diagrams_json(args.a), io.read_diagrams_json(args.b)
    dims = args.dim or sorted(set(a) | set(b))
    per = {k: bottleneck(a.get(k, PersistenceDiagram(k)), b.get(k, PersistenceDiagram(k))) for k in dims}
    print(json.dumps(jsonable({"value": max(per.values(), default=0.0), "per_dim": per})))
    return 0


def _load_image_filtration(args):
    from .complex import grid_to_cubical, lower_star_filtration

    image = io.read_image(args.image)
    mask = io.read_mask_csv(args.mask) if args.mask else None
    cx, vals = grid_to_cubical(image, mask)
    return lower_star_filtration(cx, vals)


def _cmd_diagram(args) -> int:
    from .cone import cone_diagram
    from .persistence import reduce

    fc = _load_image_filtration(args)
    dgms = cone_diagram(fc) if args.cone else reduce(fc)
    lo, hi = float(fc.values.min()), float(fc.vertex_values().max())
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        if args.format == "json":
            io.write_diagrams_json(out / "diagrams.json", dgms)
        else:
            io.write_diagrams_csv(out / "diagrams.csv", dgms)
        for k, d in dgms.items():
            (out / f"barcode_dim{k}.svg").write_text(io.barcode_svg(d, lo, hi, f"H{k}"))
            (out / f"diagram_dim{k}.svg").write_text(io.diagram_svg(d, lo, hi, f"H{k}"))
    print(json.dumps({"diagrams": io.diagrams_to_json(dgms)}))
    return 0


def _cmd_cone(args) -> int:
    from .cone import cone_routes

    routes = cone_routes(_load_image_filtration(args))
    result = {
        "m_f": routes.m_f,
        "min_f": routes.min_f,
        "cone_route": io.diagrams_to_json(routes.cone),
        "truncation_route": io.diagrams_to_json(routes.truncated),
        "agree": routes.agree,
    }
    if args.out:
        io.write_json(Path(args.out), result)
    print(json.dumps(result))
    return 0 if routes.agree else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (InputError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InvariantError as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
