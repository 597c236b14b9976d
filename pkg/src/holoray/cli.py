"""Command line entry point: synth, recover, convergence, plane."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import runner
from .config import ConfigError, parse_config

_COMMANDS = {
    "synth": (runner.run_synth, runner.SYNTH_COLUMNS, "synth"),
    "recover": (runner.run_recovery, runner.RESULT_COLUMNS, "report"),
    "convergence": (runner.run_convergence, runner.RESULT_COLUMNS, "report"),
    "plane": (runner.run_plane_demo, runner.PLANE_COLUMNS, "plane"),
}

_HELP = {
    "synth": "tabulate field values and measured intensities along the configured ray",
    "recover": "recover far-field coefficients along the configured ray",
    "convergence": "measure per-level error decay over the radius grid",
    "plane": "reconstruct the radiated field at the configured plane targets",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="holoray",
        description="Recover radiated wave fields from intensity-only ray measurements.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name, help=_HELP[name])
        p.add_argument("--config", required=True, help="path to the YAML experiment document")
        p.add_argument("--out", help="override the output directory")
        p.add_argument("--seed", type=int, help="override the noise seed")
        p.add_argument("--quiet", action="store_true", help="suppress the summary echo")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        config = parse_config(text)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    notes = []
    if args.out:
        config = replace(config, output=replace(config.output, directory=args.out))
    if args.seed is not None:
        if config.noise is None:
            notes.append("note: --seed ignored because the config has no noise section")
        else:
            config = replace(config, noise=replace(config.noise, seed=args.seed))

    run, columns, basename = _COMMANDS[args.command]
    try:
        rows, summary, ok = run(config)
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    summary = summary + notes
    paths = runner.write_report(
        rows, summary, config.output.directory, config.output.format,
        basename=basename, columns=columns,
    )
    if not args.quiet:
        print("\n".join(summary))
        print("written: " + ", ".join(paths))
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
