#!/usr/bin/env python3
"""Single-frequency convergence run: J overlapping subdomains fitting
du/dx = cos(omega x), u(0) = 0 on [-2pi, 2pi].

Defaults reproduce the 16-subdomain reference regime (20k Adam steps,
3000 collocation points); takes a few minutes on a CPU. The effective
config is written next to the artifacts as config.json.
"""

import argparse
import json
from pathlib import Path

from fbpinn.cli import main as cli_main


def build_config(args):
    return {
        "problem": {"omega": args.omega},
        "decomposition": {"subdomains": args.subdomains,
                          "overlap_fraction": args.overlap},
        "network": {"hidden_layers": 2, "hidden_width": args.width},
        "training": {"steps": args.steps,
                     "learning_rate": args.lr,
                     "communication_interval": args.interval,
                     "collocation_points": args.points,
                     "record_interval": args.record_interval,
                     "seed": args.seed},
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--subdomains", type=int, default=16)
    ap.add_argument("--overlap", type=float, default=0.7)
    ap.add_argument("--omega", type=float, default=15.0)
    ap.add_argument("--width", type=int, default=16)
    ap.add_argument("--steps", type=int, default=20000)
    ap.add_argument("--lr", type=float, default=1e-3)
    ap.add_argument("--interval", type=int, default=1,
                    help="optimizer steps between overlap refreshes")
    ap.add_argument("--points", type=int, default=3000)
    ap.add_argument("--record-interval", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="runs/convergence")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg_path = out / "config.json"
    cfg_path.write_text(json.dumps(build_config(args), indent=2) + "\n")
    return cli_main(["run", str(cfg_path), "--out", str(out)])


if __name__ == "__main__":
    raise SystemExit(main())
