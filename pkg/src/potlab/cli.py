"""Command-line front end: run scenario batches, list the catalog, validate
configs.

Exit codes: 0 when every scenario completes and all hard assertions pass,
1 when a scenario fails numerically (the offending id and diagnostic are
printed), 2 for config/schema problems (the dotted field path is printed).
Structured inputs live in JSON configs; flags cover only paths, parallelism,
and catalog selection.  ``POTLAB_SEED`` overrides the config seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .errors import PotlabError, ValidationError
from .scenarios import builtin_batch, list_builtin_scenarios, run_batch, validate_config


def _load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as err:
        raise ValidationError(f"cannot read config: {err}",
                              field_path="<config>") from err
    except json.JSONDecodeError as err:
        raise ValidationError(f"config is not valid JSON: {err}",
                              field_path="<config>") from err


def _resolve_config(args) -> dict:
    if args.config is not None:
        config = _load_config(args.config)
    else:
        config = builtin_batch(args.scenario or None)
    validate_config(config)
    return config


def _seed_override() -> int | None:
    raw = os.environ.get("POTLAB_SEED")
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError as err:
        raise ValidationError(f"POTLAB_SEED must be an integer, got {raw!r}",
                              field_path="<env:POTLAB_SEED>") from err


def _cmd_run(args) -> int:
    config = _resolve_config(args)
    summary = run_batch(config, args.out, jobs=args.jobs,
                        seed_override=_seed_override())
    for entry in summary["scenarios"]:
        print(f"{entry['status']:>6}  {entry['id']}")
    if summary["failures"]:
        for entry in summary["scenarios"]:
            if entry["status"] != "ok":
                print(f"scenario {entry['id']} failed: "
                      f"{entry.get('diagnostic', 'unknown error')}",
                      file=sys.stderr)
        return 1
    print(f"wrote {Path(args.out) / 'summary.json'}")
    return 0


def _cmd_list(args) -> int:
    for entry in list_builtin_scenarios():
        print(f"{entry['id']:28s} [{entry['task']}] {entry['description']}")
    return 0


def _cmd_validate(args) -> int:
    config = _load_config(args.config)
    validate_config(config)
    print(f"ok: {len(config['scenarios'])} scenario(s)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="potlab",
        description="scenario-driven checks for growth functions, potentials,"
                    " solves, and estimate verification")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute a scenario batch")
    run_p.add_argument("--config", help="path to a JSON batch config")
    run_p.add_argument("--scenario", action="append",
                       help="catalog id to run (repeatable; default: all "
                            "builtin scenarios when --config is absent)")
    run_p.add_argument("--jobs", type=int, default=1,
                       help="parallel scenario workers (default 1)")
    run_p.add_argument("--out", default="potlab-out",
                       help="output directory (default ./potlab-out)")
    run_p.set_defaults(func=_cmd_run)

    list_p = sub.add_parser("list", help="print the builtin scenario catalog")
    list_p.set_defaults(func=_cmd_list)

    val_p = sub.add_parser("validate", help="check a config against the schema")
    val_p.add_argument("--config", required=True,
                       help="path to a JSON batch config")
    val_p.set_defaults(func=_cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as err:
        where = err.field_path or "<config>"
        print(f"config error at {where}: {err}", file=sys.stderr)
        return 2
    except PotlabError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
