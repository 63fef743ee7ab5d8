"""Run every seeded property suite and write properties.csv.

Usage: python scripts/run_verify.py [--config FILE] [--seed N] [--out DIR]
"""

import argparse
import sys

from conetda.config import load_config, output_dir
from conetda.experiments import run


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--out")
    ap.add_argument("--fault", help="inject a known fault (negative control)")
    args = ap.parse_args()
    cfg = load_config(args.config, experiment="verify", seed=args.seed, fault=args.fault)
    out = output_dir(args.out, "runs/verify")
    report = run(cfg, out)
    for v in report.failures():
        print(f"VIOLATED  {v.name}: margin {v.margin:.3g}")
    print(f"verify: {sum(v.holds for v in report.verdicts)}/{len(report.verdicts)} assertions hold")
    print(f"wrote {out}/report.json ({report.timings['total']:.1f}s)")
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
