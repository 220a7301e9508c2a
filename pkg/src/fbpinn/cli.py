"""Command line interface.

    fbpinn run    config.json [--out DIR]   single training run
    fbpinn sweep  config.json [--out DIR]   grid over subdomain counts and
                                            communication intervals
    fbpinn coarse config.json [--out DIR]   two-phase coarse-plus-local run

Outputs land in --out when given, else in the config's output_dir (joined
under $FBPINN_OUTPUT_ROOT when that is set and the path is relative).
All outputs are CSV/JSON; nothing is plotted.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import ConfigError, build_problem, build_schedule, load_config
from .decomposition import build_decomposition, sample_collocation
from .networks import NumericalFailureError, eval_batch
from .reporting import (scalability_trends, write_coarse_solution,
                        write_run_artifacts, write_sweep_summary, write_trends)
from .training import (create_state, train, train_coarse_then_local)


def resolve_outdir(cli_out, cfg):
    if cli_out:
        return Path(cli_out)
    out = Path(cfg.output_dir)
    root = os.environ.get("FBPINN_OUTPUT_ROOT")
    if root and not out.is_absolute():
        return Path(root) / out
    return out


def _build_state(cfg, with_coarse):
    problem = build_problem(cfg)
    decomposition = build_decomposition(problem.domain,
                                        cfg.decomposition.subdomains,
                                        cfg.decomposition.overlap_fraction)
    points = sample_collocation(problem.domain, cfg.training.collocation_points)
    return create_state(
        problem, decomposition, points,
        layer_sizes=cfg.network.layer_sizes(),
        communication_interval=cfg.training.communication_interval,
        optimizer=cfg.training.optimizer,
        learning_rate=cfg.training.learning_rate,
        master_seed=cfg.training.seed,
        coarse_layer_sizes=cfg.coarse.layer_sizes() if with_coarse else None)


def _rounds(cfg):
    return math.ceil(cfg.training.steps / cfg.training.communication_interval)


def run_single(cfg, outdir):
    """One training run; returns (state, report) and writes artifacts."""
    state = _build_state(cfg, with_coarse=False)
    schedule = build_schedule(cfg, state.n_subdomains)
    try:
        report = train(state, schedule, _rounds(cfg),
                       record_interval=cfg.training.record_interval)
    except NumericalFailureError as err:
        if getattr(err, "report", None) is not None:
            err.report.config = cfg.to_echo()
            write_run_artifacts(outdir, err.report, state)
        raise
    report.config = cfg.to_echo()
    write_run_artifacts(outdir, report, state)
    return state, report


def run_sweep(cfg, outdir):
    """Cartesian grid over sweep.subdomains x sweep.communication_intervals,
    one subdirectory per cell, same seed everywhere. A failing cell is
    recorded in the aggregate and the remaining cells still run."""
    rows = []
    for J in cfg.sweep.subdomains:
        for p in cfg.sweep.communication_intervals:
            cell_cfg = replace(
                cfg,
                decomposition=replace(cfg.decomposition, subdomains=J),
                training=replace(cfg.training, communication_interval=p))
            cell_dir = Path(outdir) / "cells" / f"J{J:02d}_p{p:04d}"
            try:
                _, report = run_single(cell_cfg, cell_dir)
                rows.append((J, p, report.final_loss.total, report.final_l2,
                             _rounds(cell_cfg) * p, "ok"))
            except NumericalFailureError as err:
                print(f"cell J={J} p={p} failed: {err}", file=sys.stderr)
                rows.append((J, p, None, None,
                             getattr(err, "step", None) or 0, "failed"))
    Path(outdir).mkdir(parents=True, exist_ok=True)
    write_sweep_summary(Path(outdir) / "sweep_summary.csv", rows)
    write_trends(Path(outdir) / "trends.json", scalability_trends(rows))
    return rows


def run_coarse(cfg, outdir):
    """Two-phase coarse-plus-local run with the extra solution-decomposition
    artifact sampling the coarse part, local sum, combination, and exact
    solution on the evaluation grid."""
    if not cfg.coarse.enabled:
        raise ConfigError("coarse.enabled must be true for the coarse subcommand")
    state = _build_state(cfg, with_coarse=True)
    schedule = build_schedule(cfg, state.n_subdomains)
    try:
        report = train_coarse_then_local(
            state, cfg.coarse.epochs, cfg.coarse.points, _rounds(cfg), schedule,
            record_interval=cfg.training.record_interval)
    except NumericalFailureError as err:
        if getattr(err, "report", None) is not None:
            err.report.config = cfg.to_echo()
            write_run_artifacts(outdir, err.report, state)
        raise
    report.config = cfg.to_echo()
    out = write_run_artifacts(outdir, report, state)

    x = report.solution_x
    cons = np.asarray(state.problem.constraint.multiplier(x), dtype=float) \
        if state.problem.constraint.kind == "hard" else np.ones_like(x)
    center, halfwidth = state.coarse_norm
    ug, _ = eval_batch(state.coarse_params, (x - center) / halfwidth)
    coarse_part = cons * ug
    local_part = report.solution_pred - coarse_part
    write_coarse_solution(out / "coarse_solution.csv", x, coarse_part,
                          local_part, report.solution_pred,
                          report.solution_exact)
    return state, report


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="fbpinn",
        description="Train window-weighted local networks on 1D ODEs with "
                    "Schwarz-style subdomain scheduling.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (("run", "single training run"),
                       ("sweep", "grid over subdomain counts and communication intervals"),
                       ("coarse", "two-phase coarse correction run")):
        p = sub.add_parser(name, help=text)
        p.add_argument("config", help="path to a JSON config file")
        p.add_argument("--out", default=None, help="output directory override")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
        if args.command == "coarse" and not cfg.coarse.enabled:
            raise ConfigError("coarse.enabled must be true for the coarse subcommand")
    except (ConfigError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2

    outdir = resolve_outdir(args.out, cfg)
    try:
        if args.command == "run":
            _, report = run_single(cfg, outdir)
        elif args.command == "sweep":
            rows = run_sweep(cfg, outdir)
            print(f"wrote {len(rows)} sweep cells to {outdir}")
            return 0
        else:
            _, report = run_coarse(cfg, outdir)
    except NumericalFailureError as err:
        where = f" (step {err.step}, subdomain {err.subdomain})" \
            if err.step is not None else ""
        print(f"error: numerical failure{where}: {err}", file=sys.stderr)
        return 3
    print(f"final loss {report.final_loss.total:.6g}, "
          f"relative L2 error {report.final_l2:.6g}, wrote {outdir}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
