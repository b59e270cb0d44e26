"""Command-line front end.

    fso-ber run --preset case1 --methods exact,approx-new,mc --out results/
    fso-ber run --config link.cfg --sweep -4:16:0.5 --fec-threshold 3.84e-3
"""

from __future__ import annotations

import argparse
import sys

from .config import load_config, parse_methods, parse_sweep, with_overrides
from .errors import ConfigError
from .runner import run


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fso-ber",
        description="Average BER of an OOK free-space-optical link under weak "
                    "turbulence, pointing errors, and atmospheric loss.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="Sweep BER curves, locate FEC crossings, write CSV + report.")
    src = p_run.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=("case1", "case2", "case3"),
                     help="Built-in operating point (shared bench parameters).")
    src.add_argument("--config", metavar="PATH", help="Key-value config file.")
    p_run.add_argument("--methods", metavar="LIST",
                       help="Comma list of exact,approx-new,approx-prev,mc "
                            "(default: exact,approx-new).")
    p_run.add_argument("--sweep", metavar="LO:HI:STEP", help="Power grid in dBm (default -4:16:0.5).")
    p_run.add_argument("--mc-trials", type=int, metavar="N", help="Monte Carlo trials per grid point.")
    p_run.add_argument("--seed", type=int, metavar="S", help="Master random seed.")
    p_run.add_argument("--fec-threshold", type=float, metavar="X", help="BER threshold for crossings.")
    p_run.add_argument("--out", metavar="DIR", help="Output directory (default fso-ber-out).")
    p_run.add_argument("--workers", type=int, metavar="N",
                       help="Parallel evaluation width; results are identical for any value.")
    return parser


def _merge_negative_sweep(argv: list[str]) -> list[str]:
    """Join '--sweep -4:16:0.5' into '--sweep=-4:16:0.5' so argparse does not
    mistake the negative lower bound for an option."""
    out = []
    i = 0
    while i < len(argv):
        arg = argv[i]
        if arg == "--sweep" and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"--sweep={argv[i + 1]}")
            i += 2
            continue
        out.append(arg)
        i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    args = build_parser().parse_args(_merge_negative_sweep(argv))
    try:
        config = load_config(args.preset or args.config)
        config = with_overrides(
            config,
            methods=parse_methods(args.methods) if args.methods else None,
            sweep=parse_sweep(args.sweep) if args.sweep else None,
            mc_trials=args.mc_trials,
            seed=args.seed,
            fec_threshold=args.fec_threshold,
            output_path=args.out,
            workers=args.workers,
        )
    except (ConfigError, ValueError) as exc:
        print(f"fso-ber: {exc}", file=sys.stderr)
        return 2

    try:
        artifacts = run(config)
    except Exception as exc:
        print(f"fso-ber: run failed: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {artifacts.csv_path}")
    print(f"wrote {artifacts.report_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
