"""
Command-Line Interface

Subcommands:
    info FILE                          spectral summary of a chain spec
    bound --variant V --n N --eps E    closed-form tail bound
    mgf FILE --n N --t T               exact MGF vs envelopes
    verify {tail,mgf,variance,envelopes} FILE ...
    kato FILE --order N                Kato coefficients and their bounds
    compare --lambda L --lambda-plus Lp --sigma2 S --c C
    conjugate --eps E --sigma2 S --c C --lambda L

Exit codes: 0 success, 1 input error, 2 numerical failure, 3 a bound was
violated during verification.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd
from pydantic import ValidationError

from src.bounds.conjugates import (
    chernoff_optimize,
    conjugate_closed_forms,
    infimal_convolution,
    infimal_lower_bound,
)
from src.bounds.inequalities import classical_bound, proxy_table, tail_bound
from src.bounds.schemas import BoundQuery
from src.cli.chain_spec import load_chain_spec
from src.config import (
    FIXTURES_PATH,
    LOG_FORMAT,
    LOG_LEVEL,
    OUTPUT_CONFIG,
    SIMULATION_CONFIG,
    validate_config,
)
from src.markov.chain import stationary
from src.markov.errors import InputError, MarkovBoundsError, NegativeLambdaPlus
from src.markov.kato import coefficient_bound, kato_coefficients
from src.markov.spectral import l2_gap, right_gap, spectral_report
from src.verification.verifier import BoundVerifier

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 3


class UsageError(InputError):
    """Malformed command line."""


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------
def _format_float(value) -> str:
    return OUTPUT_CONFIG["float_format"] % value


def emit_table(table: pd.DataFrame, csv_path: Optional[str] = None):
    """Print a table to stdout and optionally duplicate it as CSV."""
    print(table.to_string(index=False, float_format=_format_float))
    if csv_path:
        path = Path(csv_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        table.to_csv(path, index=False, float_format=OUTPUT_CONFIG["float_format"])
        logger.info(f"Table written to {path}")


def _format_value(value) -> str:
    if isinstance(value, (bool, np.bool_)) or not isinstance(value, (float, int, np.floating, np.integer)):
        return str(value)
    return _format_float(value)


def _key_value_table(rows) -> pd.DataFrame:
    return pd.DataFrame([(k, _format_value(v)) for k, v in rows], columns=["quantity", "value"])


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------
def resolve_chain_file(name: str) -> Path:
    """Return NAME as given if it exists, else the same name under FIXTURES_PATH."""
    path = Path(name)
    if not path.exists() and (FIXTURES_PATH / path.name).exists():
        return FIXTURES_PATH / path.name
    return path


def _load(name: str):
    return load_chain_spec(resolve_chain_file(name))


def cmd_info(args) -> int:
    chain, f = _load(args.file)
    pi = stationary(chain)
    report = spectral_report(chain, f, pi)
    rows = [(f"pi[{i}]", float(p)) for i, p in enumerate(pi.pi)]
    rows += [
        ("lambda", report.lam),
        ("lambda_plus", report.lam_plus),
        ("reversible", report.reversible),
        ("c", f.c),
        ("sigma2", report.sigma2),
        ("sigma2_asy", report.sigma2_asy if report.sigma2_asy is not None else float("nan")),
    ]
    emit_table(_key_value_table(rows), args.csv)
    return EXIT_OK


def _query_from_args(args) -> BoundQuery:
    if args.file:
        chain, f = _load(args.file)
        pi = stationary(chain)
        return BoundQuery(
            n=args.n,
            eps=args.eps,
            sigma2=f.sigma2,
            c=f.c,
            lam=min(l2_gap(chain, pi), 1.0),
            lam_plus=max(min(right_gap(chain, pi), 1.0), -1.0),
        )
    if args.sigma2 is None or args.c is None:
        raise UsageError("bound needs FILE or --sigma2 and --c")
    return BoundQuery(
        n=args.n,
        eps=args.eps,
        sigma2=args.sigma2,
        c=args.c,
        lam=args.lam,
        lam_plus=args.lam_plus,
    )


def cmd_bound(args) -> int:
    query = _query_from_args(args)
    if args.variant in ("thm11", "thm12"):
        value = tail_bound(query, args.variant)
    else:
        value = classical_bound(args.variant, query.n, query.eps, query.sigma2, query.c)
    table = pd.DataFrame(
        [{
            "variant": value.kind,
            "n": query.n,
            "eps": query.eps,
            "probability_bound": value.probability_bound,
            "exponent": value.exponent,
        }]
    )
    emit_table(table, args.csv)
    return EXIT_OK


def _verifier(args) -> BoundVerifier:
    chain, f = _load(args.file)
    return BoundVerifier(chain, f, n_jobs=getattr(args, "jobs", None))


def _emit_report(report: dict, csv_path: Optional[str]) -> int:
    rows = [
        (key, value)
        for key, value in report.items()
        if key not in ("check", "failures")
    ]
    emit_table(_key_value_table([(k, "" if v is None else v) for k, v in rows]), csv_path)
    for failure in report["failures"]:
        print(f"FAIL: {failure}")
    return EXIT_OK if report["status"] == "PASS" else EXIT_VERIFICATION_FAILED


def cmd_mgf(args) -> int:
    return _emit_report(_verifier(args).verify_mgf(args.n, args.t), args.csv)


def cmd_verify(args) -> int:
    verifier = _verifier(args)
    if args.check == "tail":
        if args.eps is None:
            raise UsageError("verify tail needs --eps")
        report = verifier.verify_tail(args.n, args.eps, args.trials, args.seed)
    elif args.check == "mgf":
        if args.t is None:
            raise UsageError("verify mgf needs --t")
        report = verifier.verify_mgf(args.n, args.t)
    elif args.check == "variance":
        report = verifier.verify_variance(args.n, args.trials, args.seed)
    else:
        report = verifier.verify_lemma_envelopes()
    code = _emit_report(report, args.csv)
    verifier.summary()
    return code


def cmd_kato(args) -> int:
    chain, f = _load(args.file)
    pi = stationary(chain)
    series = kato_coefficients(chain, f, args.order, pi)
    rows = []
    for n, beta in enumerate(series.coefficients):
        bound = float("nan")
        if n >= 2:
            try:
                bound = coefficient_bound(chain, f, n, pi)
            except NegativeLambdaPlus:
                logger.info("lambda_plus < 0: coefficient bounds not available")
        rows.append({"n": n, "beta": beta, "coefficient_bound": bound})
    table = pd.DataFrame(rows)
    emit_table(table, args.csv)
    print(f"t0_lower = {_format_float(series.t0_lower)}")
    return EXIT_OK


def cmd_compare(args) -> int:
    if args.lam is None and args.lam_plus is None:
        raise UsageError("compare needs --lambda or --lambda-plus")
    # lambda_+ <= lambda always holds, so each defaults to the other's tightest value
    lam = args.lam if args.lam is not None else max(args.lam_plus, 0.0)
    lam_plus = args.lam_plus if args.lam_plus is not None else lam
    table = proxy_table(args.sigma2, args.c, lam, lam_plus)
    emit_table(table, args.csv)
    return EXIT_OK


def cmd_conjugate(args) -> int:
    query = BoundQuery(n=1, eps=args.eps, sigma2=args.sigma2, c=args.c, lam=args.lam)
    rows = [("bennett_exponent", classical_bound("bennett", 1, args.eps, args.sigma2, args.c).exponent)]
    rows.append(("chernoff_exponent", chernoff_optimize(query, "thm11").exponent))
    rows.append(("tail_bound_exponent", tail_bound(query, "thm11").exponent))
    rows.append(("infimal_lower_bound", infimal_lower_bound(args.eps, args.sigma2, args.c, args.lam)))
    g1_star, g2_star = conjugate_closed_forms(args.eps, args.eps, args.sigma2, args.c, args.lam)
    rows.append(("g1_star", g1_star))
    rows.append(("g2_star", g2_star))
    rows.append(("infimal_convolution", infimal_convolution(args.eps, args.sigma2, args.c, args.lam)))
    emit_table(_key_value_table(rows), args.csv)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="markov_bounds", description="Bernstein-type bounds for Markov chains")
    common = _ArgumentParser(add_help=False)
    common.add_argument("--csv", type=str, default=None, help="Also write the table as CSV to PATH")
    common.add_argument("--verbose", action="store_true", help="Log progress at INFO level")

    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    p = sub.add_parser("info", parents=[common], help="Spectral summary of a chain")
    p.add_argument("file")
    p.set_defaults(handler=cmd_info)

    p = sub.add_parser("bound", parents=[common], help="Closed-form tail bound")
    p.add_argument("file", nargs="?", default=None)
    p.add_argument("--variant", required=True, choices=["thm11", "thm12", "bernstein", "bennett", "hoeffding"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--sigma2", type=float, default=None)
    p.add_argument("--c", type=float, default=None)
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--lambda-plus", dest="lam_plus", type=float, default=None)
    p.set_defaults(handler=cmd_bound)

    p = sub.add_parser("mgf", parents=[common], help="Exact MGF against its envelopes")
    p.add_argument("file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t", type=float, required=True)
    p.set_defaults(handler=cmd_mgf)

    p = sub.add_parser("verify", parents=[common], help="Check bounds against exact and simulated values")
    p.add_argument("check", choices=["tail", "mgf", "variance", "envelopes"])
    p.add_argument("file")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--trials", type=int, default=SIMULATION_CONFIG["trials"])
    p.add_argument("--seed", type=int, default=SIMULATION_CONFIG["base_seed"])
    p.add_argument("--jobs", type=int, default=SIMULATION_CONFIG["n_jobs"], help="joblib worker threads")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("kato", parents=[common], help="Kato series coefficients")
    p.add_argument("file")
    p.add_argument("--order", type=int, required=True)
    p.set_defaults(handler=cmd_kato)

    p = sub.add_parser("compare", parents=[common], help="Variance-proxy comparison table")
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--lambda-plus", dest="lam_plus", type=float, default=None)
    p.add_argument("--sigma2", type=float, required=True)
    p.add_argument("--c", type=float, required=True)
    p.set_defaults(handler=cmd_compare)

    p = sub.add_parser("conjugate", parents=[common], help="Fenchel conjugates and Chernoff exponents")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--sigma2", type=float, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.set_defaults(handler=cmd_conjugate)

    return parser


def _configure_logging(verbose: bool):
    logging.basicConfig(level=LOG_LEVEL, format=LOG_FORMAT, stream=sys.stderr)
    logging.getLogger().setLevel(logging.INFO if verbose else LOG_LEVEL)


def run_command(argv: List[str]) -> int:
    """
    Parse argv, run one subcommand and return its exit code.

    Errors are reported on stderr; stdout carries only the result table.
    """
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except SystemExit as e:
        # --help
        return int(e.code or 0)

    _configure_logging(args.verbose)
    if not validate_config():
        print("error: invalid configuration (see log)", file=sys.stderr)
        return InputError.exit_code
    try:
        return args.handler(args)
    except MarkovBoundsError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except ValidationError as e:
        print(f"error: invalid input: {e}", file=sys.stderr)
        return InputError.exit_code
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return InputError.exit_code


def main() -> int:
    return run_command(sys.argv[1:])
