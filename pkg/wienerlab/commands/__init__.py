# -*- coding: utf-8 -*-
# License: GNU General Public License v3

"""
wienerlab Command Line

    wienerlab <command> --config FILE [--out-dir DIR] [--workers N] [--seed S]
              [--svg] [--refine] [--verbose | --quiet]

Exit codes: 0 every enabled check passed, 1 a check failed or its
precondition was violated, 2 invalid or inconsistent configuration,
3 numerical failure (non-convergence). A ``manifest.json`` is written on
every exit.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from wienerlab import __version__
from wienerlab.commands.handlers import COMMANDS, EXIT_PASS, CommandContext
from wienerlab.commands.manifest import RunManifest
from wienerlab.exceptions import (
    ConfigError,
    GeometryError,
    NumericalError,
    PreconditionError,
    ValidationError,
    WienerLabError,
)
from wienerlab.logger import log_error
from wienerlab.utils.config import ConfigDocument, load_config
from wienerlab.utils.logging import RunContext, configure, get_logger
from wienerlab.utils.metrics import metrics

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

logger = get_logger("wienerlab.commands")


def exit_code_for(error: WienerLabError) -> int:
    if isinstance(error, PreconditionError):
        return 1
    if isinstance(error, (ConfigError, ValidationError, GeometryError)):
        return EXIT_CONFIG
    if isinstance(error, NumericalError):
        return EXIT_NUMERICAL
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wienerlab", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--version", action="version", version=f"wienerlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, _, help_text) in COMMANDS.items():
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, type=Path, help="run configuration file")
        cmd.add_argument("--out-dir", type=Path, default=Path("out"), help="output directory (default: out)")
        cmd.add_argument("--workers", type=int, default=None, help="parallel workers for independent solves")
        cmd.add_argument("--seed", type=int, default=0, help="seed for sampled quantities")
        cmd.add_argument("--svg", action="store_true", help="also write SVG plots")
        cmd.add_argument("--refine", action="store_true", help="repeat the fit at grid_n / 2 and compare")
        noise = cmd.add_mutually_exclusive_group()
        noise.add_argument("--verbose", action="store_true", help="debug logging")
        noise.add_argument("--quiet", action="store_true", help="warnings and errors only")
    return parser


def _check_kind(command: str, doc: ConfigDocument):
    kinds = COMMANDS[command][0]
    kind = doc.kind
    if kind not in kinds:
        entry = doc.section("").get("kind")
        raise ConfigError(f"config kind {kind!r} does not match command {command!r} (expected "
                          f"{' or '.join(kinds)})", field="kind", line=entry.line if entry else None)


def _stopped(command: str, error: WienerLabError) -> int:
    code = exit_code_for(error)
    log_error(f"{command} stopped", data={"exit_code": code}, exc=error)
    print(f"wienerlab {command}: {error.message}", file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    configure(level, sys.stderr)
    RunContext.clear()
    metrics.reset()
    logger.info("Command started", command=args.command, config=str(args.config))

    out_dir: Path = args.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(args.command, {}, workers=args.workers, seed=args.seed, run_id=RunContext.get_id())
    try:
        doc = load_config(args.config)
        manifest = RunManifest.start(args.command, doc, args.workers, args.seed)
        _check_kind(args.command, doc)
        if args.workers is not None and args.workers < 1:
            raise ConfigError("--workers must be at least 1", field="--workers")
        ctx = CommandContext(out_dir, manifest, args.config, args.workers, args.seed, args.svg, args.refine)
        handler = COMMANDS[args.command][1]
        code = handler(doc, ctx)
    except WienerLabError as e:
        code = _stopped(args.command, e)
    except ValueError as e:
        code = _stopped(args.command, ValidationError(str(e), errors=[type(e).__name__]))
    manifest.exit_code = code
    manifest.write(out_dir)

    if code in (0, 1):
        verdict = "PASS" if code == EXIT_PASS else "FAIL"
        print(f"{args.command}: {verdict} ({out_dir})")
    return code


if __name__ == "__main__":
    sys.exit(main())
