"""Command line: ``gl run``, ``gl validate``, ``gl report``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import load_config, parse_epsilons
from .errors import ConfigurationError
from .runner import EXIT_CONFIG, EXIT_OK, report, run


def _load(args) -> tuple:
    overrides = {
        "epsilons": parse_epsilons(args.epsilons) if getattr(args, "epsilons", None) else None,
        "resolution": getattr(args, "resolution", None),
        "output": getattr(args, "out", None),
    }
    return load_config(args.config, overrides)


def _print_verdicts(verdicts: dict) -> None:
    for key in sorted(verdicts):
        v = verdicts[key]
        if isinstance(v, dict):
            branch = v.get("branch", "")
            extra = f" ({v['note']})" if v.get("note") else ""
            print(f"{key:24s} {branch:14s} {v.get('verdict')}{extra}")


def cmd_run(args) -> int:
    try:
        cfg = _load(args)
    except (ConfigurationError, OSError) as exc:
        print(f"{args.config}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    result = run(cfg)
    for msg in result.messages:
        print(msg, file=sys.stderr)
    if result.verdicts:
        _print_verdicts(result.verdicts)
    if result.out_dir is not None and result.out_dir.exists():
        print(f"outputs: {result.out_dir}")
    return result.exit_code


def cmd_validate(args) -> int:
    try:
        cfg = _load(args)
    except (ConfigurationError, OSError) as exc:
        print(f"{args.config}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(json.dumps(cfg.as_dict(), indent=2))
    return EXIT_OK


def cmd_report(args) -> int:
    try:
        code, verdicts = report(args.run_dir)
    except ConfigurationError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CONFIG
    if args.json:
        print(json.dumps(verdicts, indent=2, sort_keys=True))
    else:
        _print_verdicts(verdicts)
    return code


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gl", description="Ginzburg-Landau epsilon-sweep laboratory")
    p.add_argument("-v", "--verbose", action="store_true", help="log per-level progress")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a configuration and write artifacts")
    r.add_argument("config", type=Path)
    r.add_argument("--epsilons", help="comma-separated, strictly decreasing")
    r.add_argument("--resolution", type=int)
    r.add_argument("--out", help="output directory")
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("validate", help="validate a configuration and print it fully defaulted")
    v.add_argument("config", type=Path)
    v.add_argument("--epsilons")
    v.add_argument("--resolution", type=int)
    v.add_argument("--out")
    v.set_defaults(func=cmd_validate)

    rep = sub.add_parser("report", help="re-derive verdicts from a run directory")
    rep.add_argument("run_dir", type=Path)
    rep.add_argument("--json", action="store_true", help="print full verdict records")
    rep.set_defaults(func=cmd_report)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
