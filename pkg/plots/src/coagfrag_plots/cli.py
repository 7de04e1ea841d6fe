"""Command line: ``plots RUN_DIR [--panels ...] [--crop-n K] [--format ...]``.

Exit codes: 0 on success, 1 on missing or malformed run data (the message
names the file and line) or invalid options.  No output file is written
unless all inputs validate.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .data import RunDataError
from .render import FORMATS, PANELS, FigureRequest, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plots",
        description="render figures from a simulation run directory",
    )
    parser.add_argument("run_dir", help="directory holding trajectory.csv and moments.csv")
    parser.add_argument(
        "--panels",
        nargs="+",
        choices=PANELS,
        default=list(PANELS),
        help="panels to render (default: all)",
    )
    parser.add_argument("--crop-n", type=int, default=None, help="largest cluster size shown")
    parser.add_argument("--format", choices=FORMATS, default="png")
    parser.add_argument("--out", default=".", help="output directory (default: current)")
    parser.add_argument(
        "--color-scale",
        choices=("log", "linear"),
        default="log",
        help="colour scale of the surface panels",
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        req = FigureRequest(
            run_dir=Path(args.run_dir),
            panels=tuple(args.panels),
            crop_n=args.crop_n,
            format=args.format,
            out_dir=Path(args.out),
            color_scale=args.color_scale,
        )
        written = render(req)
    except (RunDataError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
