"""Command line for regenerating figures from solver CSV records.

Usage::

    figscripts heatmap RECORD --species I --out IMG.png
    figscripts profile RECORD --species I --out IMG.png
    figscripts overlay RECORD_A RECORD_B --species I --out IMG.png
               [--diff-out FILE]

overlay prints the alignment-corrected relative L2 difference (17
significant digits) and optionally writes it to --diff-out.
"""

from __future__ import annotations

import argparse
import sys

from .plots import plot_heatmap, plot_overlay, plot_profile
from .records import read_record


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="figscripts",
                                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("heatmap", "profile"):
        p = sub.add_parser(name)
        p.add_argument("record")
        p.add_argument("--species", type=int, default=0)
        p.add_argument("--out", required=True)

    p = sub.add_parser("overlay")
    p.add_argument("record_a")
    p.add_argument("record_b")
    p.add_argument("--species", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--diff-out", default=None,
                   help="also write the relative L2 difference to this file")
    return parser


def cli_main(argv) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "heatmap":
        plot_heatmap(read_record(args.record), args.species, args.out)
        print(f"wrote {args.out}")
    elif args.command == "profile":
        plot_profile(read_record(args.record), args.species, args.out)
        print(f"wrote {args.out}")
    else:
        rel = plot_overlay(read_record(args.record_a), read_record(args.record_b),
                           args.species, args.out)
        print(f"relative_l2_difference={rel:.17g}")
        if args.diff_out:
            with open(args.diff_out, "w", encoding="utf-8") as fh:
                fh.write(f"{rel:.17g}\n")
        print(f"wrote {args.out}")
    return 0


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))
