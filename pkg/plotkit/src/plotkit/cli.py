import argparse
import sys

from .csvdata import DataError
from .render import PlotSpec, render_fidelity_plot


def _parse_xrange(text: str):
    parts = text.split(",")
    if len(parts) != 2:
        raise DataError(f"--xrange wants 'lo,hi', got {text!r}")
    return float(parts[0]), float(parts[1])


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plotkit", description="Render sweep CSV files as SVG line charts."
    )
    parser.add_argument("--csv", required=True, help="sweep CSV input")
    parser.add_argument("--out", required=True, help="SVG output path")
    parser.add_argument("--targets", help="comma-separated k-labels, e.g. k0,k2 (default: all)")
    parser.add_argument("--xrange", help="drive-frequency window in GHz, e.g. 6.40,6.62")
    args = parser.parse_args(argv)

    try:
        spec = PlotSpec(
            input_csv=args.csv,
            output=args.out,
            targets=args.targets.split(",") if args.targets else None,
            x_range=_parse_xrange(args.xrange) if args.xrange else None,
        )
        out = render_fidelity_plot(spec)
    except (DataError, ValueError) as exc:
        print(f"plotkit: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
