#!/usr/bin/env python3
"""Grid over subdomain counts and communication intervals on the
single-frequency problem. Writes one artifact directory per cell plus
sweep_summary.csv and trends.json (flagging cells where more subdomains
reached a lower final loss).

Full default grid (3 x 4 cells at 20k steps each) takes on the order of
an hour; pass --steps 3000 --points 1500 for a quick look.
"""

import argparse
import json
from pathlib import Path

from fbpinn.cli import main as cli_main


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--subdomains", type=int, nargs="+", default=[8, 16, 32])
    ap.add_argument("--intervals", type=int, nargs="+",
                    default=[1, 10, 100, 1000],
                    help="optimizer steps between overlap refreshes")
    ap.add_argument("--omega", type=float, default=15.0)
    ap.add_argument("--steps", type=int, default=20000)
    ap.add_argument("--lr", type=float, default=1e-3)
    ap.add_argument("--points", type=int, default=3000)
    ap.add_argument("--record-interval", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="runs/p_sweep")
    args = ap.parse_args()

    cfg = {
        "problem": {"omega": args.omega},
        "decomposition": {"overlap_fraction": 0.7},
        "training": {"steps": args.steps,
                     "learning_rate": args.lr,
                     "collocation_points": args.points,
                     "record_interval": args.record_interval,
                     "seed": args.seed},
        "sweep": {"subdomains": args.subdomains,
                  "communication_intervals": args.intervals},
    }
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg_path = out / "config.json"
    cfg_path.write_text(json.dumps(cfg, indent=2) + "\n")
    return cli_main(["sweep", str(cfg_path), "--out", str(out)])


if __name__ == "__main__":
    raise SystemExit(main())
