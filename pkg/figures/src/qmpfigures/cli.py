"""make-figures: render plots from a directory of sweep CSVs.

Expects <input>/sweep.csv for fig2/fig3/fig5/fig6 and
<input>/sparse.csv for fig8; kinds whose CSV is absent are skipped
unless requested explicitly.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import FIGURE_KINDS, FigureSpec, render

_SOURCES = {"fig2": "sweep.csv", "fig3": "sweep.csv", "fig5": "sweep.csv",
            "fig6": "sweep.csv", "fig8": "sparse.csv"}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="make-figures")
    parser.add_argument("--input", required=True,
                        help="directory holding sweep.csv / sparse.csv")
    parser.add_argument("--out", required=True,
                        help="directory for rendered images")
    parser.add_argument("--kind", action="append", choices=FIGURE_KINDS,
                        help="render only these kinds (repeatable)")
    args = parser.parse_args(argv)

    kinds = tuple(args.kind) if args.kind else FIGURE_KINDS
    explicit = args.kind is not None
    in_dir, out_dir = Path(args.input), Path(args.out)
    written = []
    for kind in kinds:
        csv_path = in_dir / _SOURCES[kind]
        if not csv_path.exists():
            if explicit:
                print(f"make-figures: missing {csv_path}", file=sys.stderr)
                return 1
            continue
        spec = FigureSpec(csv_path=str(csv_path), kind=kind,
                          out_base=str(out_dir / kind))
        try:
            written.extend(render(spec))
        except ValueError as exc:
            print(f"make-figures: {exc}", file=sys.stderr)
            return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
