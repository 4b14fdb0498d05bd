"""Command line entry point: decay / functionals / envelope.

Exit codes: 0 success, 1 usage error, 2 malformed series data.
"""

from __future__ import annotations

import argparse
import sys

from .figures import plot_decay, plot_envelope, plot_functionals
from .series import MalformedSeriesError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

_FIGURES = {
    "decay": plot_decay,
    "functionals": plot_functionals,
    "envelope": plot_envelope,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plotcompanion",
        description="Render figures from a flow run's series.csv.")
    sub = parser.add_subparsers(dest="figure", required=True)
    for name, help_text in (
            ("decay", "semilog oscillation decay with fitted rate"),
            ("functionals", "J and I traces"),
            ("envelope", "trace extremes against the initial envelope")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("csv_path", help="series.csv from a run")
        p.add_argument("out_path", help="output figure (.png or .svg)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_USAGE if err.code not in (0, None) else EXIT_OK
    render = _FIGURES[args.figure]
    try:
        render(args.csv_path, args.out_path)
    except MalformedSeriesError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
