"""Command line: plotgen <figure-id> --in <dir> --out <dir>."""

from __future__ import annotations

import argparse
import sys

from .errors import MissingFile, SchemaError
from .figures import FIGURE_IDS, discover
from .render import render

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SCHEMA = 3
EXIT_IO = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plotgen",
        description="Render converter-sim CSV outputs as static figures",
    )
    parser.add_argument("figure_id", metavar="figure-id",
                        help=f"one of: {', '.join(FIGURE_IDS)}, or 'all'")
    parser.add_argument("--in", dest="in_dir", required=True,
                        help="directory holding the simulator CSVs")
    parser.add_argument("--out", dest="out_dir", required=True,
                        help="directory to write PNGs into")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    targets = list(FIGURE_IDS) if args.figure_id == "all" else [args.figure_id]
    try:
        for figure_id in targets:
            spec = discover(figure_id, args.in_dir)
            out_path = render(spec, args.out_dir)
            print(f"{figure_id}: wrote {out_path}")
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except (MissingFile, OSError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def entry():
    sys.exit(main())
