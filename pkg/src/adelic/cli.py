"""Command-line interface.

Exit status: 0 when the run succeeds with every audit passing, 2 when an
audit fails, 1 on input errors.
"""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, load_config
from .experiments import run_convergence, run_measure, run_quasitile, run_spectral
from .matrices import matrix_from_csv, smith_normal_form
from .quasitiling import QuasitilingError
from .sofic import SampleError


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adelic",
        description="Adelic ideal measures of group-ring operators on sofic samples",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("converge", "convergence sweep of adelic measures"),
        ("spectral", "spectral moment table with bound audits"),
        ("quasitile", "quasitiling run with verification"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", help="TOML config file")
        p.add_argument("--plot", action="store_true", help="also render PNG figures")

    p = sub.add_parser("snf", help="Smith normal form of a CSV matrix")
    p.add_argument("matrix", help="CSV matrix file")

    p = sub.add_parser("measure", help="adelic measure at one schedule point")
    p.add_argument("config", help="TOML config file")
    p.add_argument("--n", type=int, required=True, help="schedule value")
    return parser


def _run_snf(path: str) -> int:
    with open(path, "r", encoding="utf-8") as fh:
        A = matrix_from_csv(fh.read())
    snf = smith_normal_form(A)
    print("divisor," + ",".join(str(d) for d in snf.divisors))
    print(f"free_count,{snf.free_count}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "snf":
            return _run_snf(args.matrix)
        config = load_config(args.config)
        if args.command == "measure":
            print(run_measure(config, args.n))
            return 0
        runner = {
            "converge": run_convergence,
            "spectral": run_spectral,
            "quasitile": run_quasitile,
        }[args.command]
        result = runner(config, plot=args.plot)
        print(f"wrote {result.path} ({len(result.rows) - 1} rows)")
        if not result.audits_ok:
            print("audit failure: at least one bound or identity check failed", file=sys.stderr)
            return 2
        return 0
    except (ConfigError, SampleError, QuasitilingError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
