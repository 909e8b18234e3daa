"""Command line entry point: `plots render --spec spec.json`."""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .figures import FigureSpec, render
from .io import read_json


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plots", description="Render figures from simulation artifacts"
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render the figure described by a spec file")
    p.add_argument("--spec", required=True, help="FigureSpec JSON path")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = FigureSpec.from_dict(read_json(args.spec), args.spec)
        result = render(spec)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(json.dumps(result, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
