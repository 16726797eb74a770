"""Command-line rendering: render-all over a results directory, or one figure."""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from .render import FIGURES, PlotError, default_spec, render, render_all


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semcom-plots",
        description="Render experiment CSVs as vector line charts")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render-all", help="render all six figures")
    p.add_argument("--results", required=True,
                   help="directory holding fig5.csv .. fig10.csv")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(command="render-all")

    p = sub.add_parser("render", help="render one figure with overrides")
    p.add_argument("--figure", required=True, choices=sorted(FIGURES))
    p.add_argument("--csv", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--x-column")
    p.add_argument("--series", help="comma-separated column names")
    p.add_argument("--x-label")
    p.add_argument("--y-label")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--log-y", dest="log_y", action="store_true",
                       default=None)
    group.add_argument("--linear-y", dest="log_y", action="store_false")
    p.set_defaults(command="render")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "render-all":
            written = render_all(args.results, args.out)
            for path in written:
                print(path)
            return 0
        overrides = {}
        if args.x_column:
            overrides["x_column"] = args.x_column
        if args.series:
            overrides["series"] = tuple(args.series.split(","))
        if args.x_label:
            overrides["x_label"] = args.x_label
        if args.y_label:
            overrides["y_label"] = args.y_label
        if args.log_y is not None:
            overrides["log_y"] = args.log_y
        print(render(default_spec(args.figure, args.csv, args.out,
                                  **overrides)))
        return 0
    except (PlotError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:  # pragma: no cover - console-script shim
    sys.exit(main())
