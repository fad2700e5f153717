"""Command line: render --figure <id> --in <dir> --out <file.png>."""

from __future__ import annotations

import argparse
import sys

from .figures import FIGURES, SchemaError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="render",
        description="Render a figure from experiment CSV outputs.",
    )
    parser.add_argument("--figure", type=int, required=True,
                        help="figure id, one of: " + ", ".join(map(str, sorted(FIGURES))))
    parser.add_argument("--in", dest="in_dir", required=True,
                        help="directory holding the experiment CSVs")
    parser.add_argument("--out", required=True, help="output image path (.png)")
    args = parser.parse_args(argv)
    try:
        path = render(args.figure, args.in_dir, args.out)
    except SchemaError as exc:
        print(f"render: {exc}", file=sys.stderr)
        return 2
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
