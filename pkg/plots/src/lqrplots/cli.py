"""CLI: render --kind {trajectory|sweep|bounds} --in <csv> --out <img>.

Exit codes: 0 success, 2 schema mismatch / missing input / write failure.
"""

from __future__ import annotations

import argparse
import sys

from .render import KINDS, FigureSpec, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="render",
        description="Render a control-experiment CSV to a figure.",
    )
    parser.add_argument("--kind", required=True, choices=KINDS,
                        help="figure kind, fixing the expected CSV schema")
    parser.add_argument("--in", dest="csv_path", required=True,
                        help="input CSV path")
    parser.add_argument("--out", required=True,
                        help="output image path; extension picks the format "
                        "(.svg vector default, .png/.pdf also work)")
    parser.add_argument("--title", help="figure title (default: the kind)")
    parser.add_argument("--logx", action="store_true", help="log-scale x axis")
    parser.add_argument("--logy", action="store_true", help="log-scale y axis")
    parser.add_argument("--dpi", type=int, default=150,
                        help="raster resolution (ignored for vector output)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = FigureSpec(
            kind=args.kind, csv_path=args.csv_path, out_path=args.out,
            title=args.title, logx=args.logx, logy=args.logy, dpi=args.dpi,
        )
        path = render(spec)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
