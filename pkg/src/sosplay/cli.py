"""Command-line entry point: run feature files against a registered engine.

Exit status: 0 when every scenario passed, 1 when any failed or is pending,
2 on usage errors, unreadable files or Gherkin parse errors.
"""

from __future__ import annotations

import argparse
import importlib
import sys

from . import emobility  # noqa: F401  registers the bundled engines
from .gherkin import GherkinParseError, TagExpressionError, generate_skeletons, load_feature
from .report import FORMATS, write_report
from .runner import RunConfig, collect_feature_paths, engine_names, get_engine, run_suite


def _positive(value):
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="sosplay",
        description="Run Gherkin features against behavioral scenario programs.",
    )
    p.add_argument("--features", nargs="+", metavar="PATH", required=True,
                   help="feature files or directories (searched recursively)")
    p.add_argument("--tags", metavar="EXPR", default=None,
                   help="comma-separated tags, e.g. @RpsSystem (any tag matches)")
    p.add_argument("--engine", default="composed", metavar="NAME",
                   help="registered engine factory (default: composed)")
    p.add_argument("--max-steps", type=_positive, default=10_000, metavar="N",
                   help="step bound per scenario (default: 10000)")
    p.add_argument("--trace", action="store_true", help="print each scenario's event trace")
    p.add_argument("--format", choices=FORMATS, default="pretty")
    p.add_argument("--load", action="append", default=[], metavar="MODULE",
                   help="import MODULE first (to register more engines)")
    p.add_argument("--skeletons", action="store_true",
                   help="print step-definition skeletons for the features and exit")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        for module in args.load:
            importlib.import_module(module)
        paths = collect_feature_paths(args.features)
        specs = [load_feature(p) for p in paths]
        if args.skeletons:
            sys.stdout.write(generate_skeletons(*specs))
            return 0
        suite = get_engine(args.engine)
        config = RunConfig(paths, args.tags, args.max_steps, args.trace, args.format, args.engine)
        report = run_suite(specs, config, factory=suite.factory, steps=suite.steps)
    except KeyError as exc:
        print(f"sosplay: {exc.args[0]}", file=sys.stderr)
        print(f"available engines: {', '.join(engine_names())}", file=sys.stderr)
        return 2
    except (OSError, GherkinParseError, TagExpressionError, ImportError) as exc:
        print(f"sosplay: {exc}", file=sys.stderr)
        return 2

    sys.stdout.write(write_report(report, args.format, trace=args.trace))
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
