"""Command-line interface.

Subcommands::

    kawafd run --preset table1 [--set key=value ...] [--output-dir DIR]
    kawafd run --config run.json [--no-plot]
    kawafd convergence --schemes uk,jmo --meshes 4000,8000,12000,16000 \\
        --preset table1
    kawafd check

Exit codes: 0 success, 1 numerical failure (divergence, solver residual,
ledger violation), 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .checks import run_checks
from .errors import KawafdError, NumericalError
from .runner import (PRESET_NAMES, parse_config, preset_config,
                     run_convergence, run_snapshots)

__all__ = ["main"]


def _load_document(args) -> dict:
    if args.config is not None:
        text = Path(args.config).read_text()
        doc = json.loads(text)
    else:
        doc = preset_config(args.preset)
    for item in args.set or []:
        _apply_override(doc, item)
    if args.output_dir is not None:
        doc["output_dir"] = str(args.output_dir)
    return doc


def _apply_override(doc: dict, item: str) -> None:
    key, sep, raw = item.partition("=")
    if not sep:
        raise SystemExit(f"--set expects key=value, got {item!r}")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    parts = key.split(".")
    node = doc
    for part in parts[:-1]:
        child = node.get(part)
        if isinstance(child, str):
            # expand shorthand ("scheme": "uk") before drilling in
            child = {"kind": child} if part == "scheme" else {"id": child}
            node[part] = child
        elif child is None:
            child = {}
            node[part] = child
        node = child
    node[parts[-1]] = value


def _cmd_run(args) -> int:
    config = parse_config(_load_document(args))
    result = run_snapshots(config, plot=not args.no_plot)
    print(f"scheme={config.scheme.kind} n={config.n} "
          f"steps={len(result.diagnostics)} t_end={config.t_end:g} "
          f"wall={result.duration_seconds:.2f}s")
    if result.final_l2_error is not None:
        print(f"l2 error vs exact at t={config.t_end:g}: "
              f"{result.final_l2_error:.6e}")
    print(f"outputs written to {config.output_dir}")
    return 0


def _cmd_convergence(args) -> int:
    config = parse_config(_load_document(args))
    schemes = [s.strip() for s in args.schemes.split(",") if s.strip()]
    meshes = [int(m) for m in args.meshes.split(",") if m.strip()]
    rows = run_convergence(schemes, meshes, config, plot=not args.no_plot)
    print("scheme      n     l2_error      ratio   observed_order")
    for r in rows:
        ratio = "" if r["ratio"] is None else f"{r['ratio']:7.3f}"
        order = ("" if r["observed_order"] is None
                 else f"{r['observed_order']:7.3f}")
        print(f"{r['scheme']:<6} {r['n']:>6}  {r['l2_error']:.5e}  "
              f"{ratio:>7}  {order:>7}")
    print(f"outputs written to {config.output_dir}")
    return 0


def _cmd_check(args) -> int:
    results = run_checks(n=args.n)
    failed = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"[{status}] {r.name}: {r.detail}")
        failed += not r.passed
    if failed:
        print(f"{failed} check(s) failed")
        return 1
    print(f"all {len(results)} checks passed at n={args.n}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kawafd",
        description="Finite-difference solvers for the periodic Kawahara "
                    "equation with soliton benchmarks.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_args(p):
        grp = p.add_mutually_exclusive_group(required=True)
        grp.add_argument("--config", help="path to a JSON run document")
        grp.add_argument("--preset", choices=PRESET_NAMES,
                         help="built-in experiment preset")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a document field, e.g. n=2000 or "
                            "scheme.kind=jmo (repeatable)")
        p.add_argument("--output-dir", help="directory for report files")
        p.add_argument("--no-plot", action="store_true",
                       help="skip figure rendering")

    run_p = sub.add_parser("run", help="evolve one configuration and write "
                                       "snapshots + diagnostics")
    add_config_args(run_p)
    run_p.set_defaults(func=_cmd_run)

    conv_p = sub.add_parser("convergence",
                            help="grid-refinement error table")
    add_config_args(conv_p)
    conv_p.add_argument("--schemes", default="uk,jmo",
                        help="comma-separated scheme list (default uk,jmo)")
    conv_p.add_argument("--meshes", default="4000,8000,12000,16000",
                        help="comma-separated, strictly increasing mesh "
                             "sizes")
    conv_p.set_defaults(func=_cmd_convergence)

    check_p = sub.add_parser("check", help="run the operator/ledger "
                                           "property suite")
    check_p.add_argument("--n", type=int, default=64,
                         help="grid size for the property suite")
    check_p.set_defaults(func=_cmd_check)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    except KawafdError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
