#!/usr/bin/env python3
"""Two-phase run on the two-frequency problem du/dx = omega1 cos(omega1 x)
+ omega2 cos(omega2 x): a small global network first fits the solution
alone (it identifies the low-frequency component), then it is frozen and
the local subdomain networks learn the remainder around it.

Writes the usual run artifacts plus coarse_solution.csv splitting the
prediction into coarse and local parts on the evaluation grid.
"""

import argparse
import json
from pathlib import Path

from fbpinn.cli import main as cli_main


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--omega1", type=float, default=1.0)
    ap.add_argument("--omega2", type=float, default=15.0)
    ap.add_argument("--subdomains", type=int, default=30)
    ap.add_argument("--coarse-epochs", type=int, default=3000)
    ap.add_argument("--coarse-points", type=int, default=500)
    ap.add_argument("--steps", type=int, default=12000,
                    help="local-phase optimizer steps")
    ap.add_argument("--lr", type=float, default=3e-4)
    ap.add_argument("--points", type=int, default=3000)
    ap.add_argument("--record-interval", type=int, default=100)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--out", default="runs/coarse_correction")
    args = ap.parse_args()

    cfg = {
        "problem": {"kind": "two_frequency",
                    "omega1": args.omega1, "omega2": args.omega2},
        "decomposition": {"subdomains": args.subdomains,
                          "overlap_fraction": 0.7},
        "training": {"steps": args.steps,
                     "learning_rate": args.lr,
                     "collocation_points": args.points,
                     "record_interval": args.record_interval,
                     "seed": args.seed},
        "coarse": {"enabled": True,
                   "points": args.coarse_points,
                   "epochs": args.coarse_epochs},
    }
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg_path = out / "config.json"
    cfg_path.write_text(json.dumps(cfg, indent=2) + "\n")
    return cli_main(["coarse", str(cfg_path), "--out", str(out)])


if __name__ == "__main__":
    raise SystemExit(main())
