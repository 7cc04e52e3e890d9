"""
Command-line entry point.

    pasim <experiment> [--config FILE] [--out DIR] [--seed N] [--jobs N] [--mc]
                       [--<config-key> VALUE ...]

Every configuration key can be overridden on the command line; values are
parsed as JSON, and list-valued keys also accept ``a,b,c``. Exit codes:
0 success, 2 invalid configuration, 3 throughput target unreachable.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields

from .experiments import (
    EXIT_CONFIG,
    EXIT_OK,
    EXIT_UNREACHABLE,
    FILES,
    ConfigError,
    ScenarioConfig,
    has_unreachable,
    run_experiment,
    write_outputs,
)
from .specfun import DomainError

COMMANDS = tuple(FILES) + ("reproduce-all",)
_LIST_KEYS = {
    f.name for f in fields(ScenarioConfig) if isinstance(f.default, tuple)
}


def _parse_value(key, text):
    try:
        value = json.loads(text)
    except json.JSONDecodeError:
        value = text
    if key in _LIST_KEYS and isinstance(value, str) and "," in value:
        value = [_parse_value("", part) for part in value.split(",")]
    elif key in _LIST_KEYS and not isinstance(value, list):
        value = [value]
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pasim", description="Predictor-antenna link experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON file with scenario keys")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--jobs", type=int, default=1, help="worker processes")
        p.add_argument("--mc", action="store_const", const="true", default=argparse.SUPPRESS,
                       help="Monte Carlo instead of quadrature for selection scores")
        group = p.add_argument_group("scenario overrides")
        for f in fields(ScenarioConfig):
            if f.name == "mc":
                continue
            flags = [f"--{f.name}"]
            if "_" in f.name:
                flags.append(f"--{f.name.replace('_', '-')}")
            group.add_argument(*flags, dest=f.name, default=argparse.SUPPRESS, metavar="VALUE")
    return parser


def resolve_config(args) -> ScenarioConfig:
    data = {}
    if args.config:
        data = ScenarioConfig.load(args.config).to_dict()
    for f in fields(ScenarioConfig):
        if hasattr(args, f.name):
            data[f.name] = _parse_value(f.name, getattr(args, f.name))
    return ScenarioConfig.from_dict(data)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.jobs < 1:
        print("pasim: --jobs must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = resolve_config(args)
        records = run_experiment(args.command, cfg, jobs=args.jobs)
    except (ConfigError, DomainError) as exc:
        print(f"pasim: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    manifest = write_outputs(records, cfg, args.out, args.command)
    for name in manifest["files"]:
        print(name)
    if has_unreachable(records):
        print("pasim: throughput target unreachable at some speeds", file=sys.stderr)
        return EXIT_UNREACHABLE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
