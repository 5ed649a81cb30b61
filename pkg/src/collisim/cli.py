"""Command-line entry point.

Subcommands: sweep | ising2 | xy | analyze | crosscheck.  Each loads the
kind's default configuration, merges an optional config file and
``--override`` pairs, runs the experiment, and writes delimited output
(CSV, or an indented text report for analyze).  With ``--svg`` a figure
is rendered next to the output file.

Exit codes: 0 success, 2 configuration error, 3 numerical-validation
abort.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import experiments, plotting
from .config import (
    ConfigError,
    apply_overrides,
    default_config,
    parse_config_file,
)
from .lindblad import NumericalValidationError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="collisim",
        description="Collision-model thermalization experiments for finite spin systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, desc in (
        ("sweep", "fidelity over an ancilla-frequency grid (two-level system)"),
        ("ising2", "two-spin chain panel, sequential and simultaneous collisions"),
        ("xy", "anisotropic-XY panel over initial states"),
        ("analyze", "transition structure and steady-state uniqueness report"),
        ("crosscheck", "trace distance between the exact and master-equation engines"),
    ):
        p = sub.add_parser(name, help=desc)
        p.add_argument("--config", metavar="PATH", help="config file (key = value sections)")
        p.add_argument("--out", metavar="PATH", help="output file path")
        p.add_argument("--svg", action="store_true", help="also render a figure next to the output")
        p.add_argument("--threads", type=int, default=1, metavar="N", help="parallel workers")
        p.add_argument(
            "--override",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override a config value, e.g. schedule.count=80 (repeatable)",
        )
    return parser


def load_config(args) -> "ExperimentConfig":
    cfg = default_config(args.command)
    if args.config:
        cfg = parse_config_file(args.config, base=cfg)
        if cfg.kind != args.command:
            raise ConfigError(
                f"config file is for kind {cfg.kind!r} but the {args.command!r} "
                f"subcommand was invoked"
            )
    if args.override:
        cfg = apply_overrides(cfg, args.override)
    return cfg


def _write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    try:
        os.makedirs(directory, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise ConfigError(f"cannot write output {path}: {exc}") from exc


def _figure_path(out_path: str) -> str:
    base, _ = os.path.splitext(out_path)
    return base + ".svg"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        out_path = args.out or cfg.out_path or f"{args.command}.csv"
        if args.command == "sweep":
            result = experiments.run_sweep(cfg, threads=max(1, args.threads))
            _write(out_path, result.to_csv())
            if args.svg:
                plotting.render_sweep(result, _figure_path(out_path))
            print(f"sweep: {len(result.h_b)} grid points x {cfg.count} collisions -> {out_path}")
        elif args.command == "ising2":
            result = experiments.run_ising2(cfg)
            _write(out_path, result.to_csv())
            if args.svg:
                plotting.render_panel(result, _figure_path(out_path), title="two-spin chain")
            finals = ", ".join(
                f"{lab}: F={traj.fidelity[-1]:.4f}"
                for lab, traj in zip(result.labels, result.trajectories)
            )
            print(f"ising2: {finals} -> {out_path}")
        elif args.command == "xy":
            result = experiments.run_xy(cfg, threads=max(1, args.threads))
            _write(out_path, result.to_csv())
            if args.svg:
                plotting.render_panel(result, _figure_path(out_path), title="anisotropic XY")
            print(f"xy: {len(result.labels)} curves -> {out_path}")
        elif args.command == "analyze":
            result = experiments.run_analyze(cfg)
            text = result.to_text()
            _write(out_path, text)
            sys.stdout.write(text)
        elif args.command == "crosscheck":
            result = experiments.run_crosscheck(cfg)
            _write(out_path, result.to_csv())
            if args.svg:
                plotting.render_crosscheck(result, _figure_path(out_path))
            print(f"crosscheck: max trace distance {result.max_deviation:.3e} -> {out_path}")
        else:  # pragma: no cover - argparse restricts the choices
            raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalValidationError as exc:
        print(f"numerical validation abort: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
