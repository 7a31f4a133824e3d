"""``visserlab`` command line.

Machine-readable JSON goes to stdout, diagnostics to stderr.

Exit codes: 0 success (or an inequality that holds), 1 violation,
2 bad input or unmet hypothesis, 3 inconclusive numerics.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .campaign import CampaignConfig, ConfigError, any_failure, run_campaign, summarize, write_reports
from .circle_norms import DEFAULT_CONFIG, NormConsistencyError, norm_p, parse_exponent
from .extremal_search import SearchProblem, TheoremViolation, sharpness_search
from .poly_core import Polynomial, PolynomialError, binomial, two_term_selector
from .visser_checks import (
    INCONCLUSIVE,
    STATEMENTS,
    VIOLATED,
    check_composition_double_integral,
    check_corollary1,
    check_corollary2,
    check_lemma_phase_integral,
    check_lemma_pointwise,
    check_lemma_twoterm_lower,
    check_operator_norm_bound,
    check_theorem1,
    check_theorem2,
    check_theorem3,
    check_visser,
    phase_gamma,
)
from .zero_location import HypothesisError, RootFindingError, certify_zero_free

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_INCONCLUSIVE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj) + "\n")


def _die(msg: str, code: int = EXIT_INPUT) -> int:
    print(f"visserlab: {msg}", file=sys.stderr)
    return code


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load_poly(path: str | None) -> Polynomial:
    if path is None:
        raise UsageError("--poly is required")
    return Polynomial.loads(_read_text(path))


def _exponent(text: str) -> float:
    try:
        return parse_exponent(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def cmd_norm(args) -> int:
    P = _load_poly(args.poly)
    _emit(norm_p(P, args.p, DEFAULT_CONFIG).to_json())
    return EXIT_OK


def cmd_certify(args) -> int:
    P = _load_poly(args.poly)
    _emit(certify_zero_free(P, args.rho).to_json())
    return EXIT_OK


def _run_check(args, P: Polynomial):
    st, s, p, rho = args.statement, args.s, args.p, args.rho
    if st == "visser":
        return check_visser(P)
    if st == "cor1":
        return check_corollary1(P, s, rho)
    if st == "thm1":
        return check_theorem1(P, s, p)
    if st == "thm2":
        return check_theorem2(P, s, p)
    if st == "thm3":
        return check_theorem3(P, s, p, rho)
    if st == "cor2":
        return check_corollary2(P, s, p, rho)
    if st == "lemma_pointwise":
        return check_lemma_pointwise(P, s, rho)
    if st == "lemma_phase":
        return check_lemma_phase_integral(P, s, p, args.phi)
    if st == "lemma_twoterm":
        if args.alpha is not None and args.beta is not None:
            alpha, beta = args.alpha, args.beta
        else:
            n = P.degree
            if not 0 <= s < n:
                raise ValueError(f"need 0 <= s <= n-1, got s={s}")
            alpha, beta = P.leading, P.coeffs[s] / binomial(n, s)
        return check_lemma_twoterm_lower(alpha, beta, p)
    if st == "operator_bound":
        n = P.degree
        gamma = phase_gamma(n, s, args.phi) if args.family == "phase" else two_term_selector(n, s)
        return check_operator_norm_bound(gamma, P, p)
    if st == "composition_double":
        return check_composition_double_integral(s, P, p)
    raise UsageError(f"unknown statement {st!r}")


def cmd_check(args) -> int:
    P = _load_poly(args.poly)
    try:
        rep = _run_check(args, P)
    except HypothesisError as exc:
        return _die(f"hypothesis not met: {exc}")
    except NormConsistencyError as exc:
        return _die(f"inconsistent norm evaluation: {exc}", EXIT_INCONCLUSIVE)
    _emit(rep.to_json())
    if rep.verdict == VIOLATED:
        return EXIT_VIOLATION
    if rep.verdict == INCONCLUSIVE:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_campaign(args) -> int:
    try:
        obj = json.loads(_read_text(args.config))
    except json.JSONDecodeError as exc:
        raise UsageError(f"config is not valid JSON: {exc}") from None
    if isinstance(obj, dict) and args.seed is not None:
        obj = {**obj, "master_seed": args.seed}
    cfg = CampaignConfig.from_json(obj)
    out = args.out or cfg.out_dir
    if out is None:
        raise UsageError("no output directory: pass --out or set out_dir in the config")
    results = run_campaign(cfg, workers=args.workers)
    jsonl, csv_path = write_reports(results, out)
    for line in summarize(results):
        _emit(line)
    print(f"wrote {jsonl} and {csv_path}", file=sys.stderr)
    return EXIT_VIOLATION if any_failure(results) else EXIT_OK


def cmd_search(args) -> int:
    prob = SearchProblem(args.n, args.s, args.p, args.rho, args.restarts, args.iters,
                         args.seed if args.seed is not None else 0)
    try:
        res = sharpness_search(prob, workers=args.workers)
    except TheoremViolation as exc:
        _emit({"violation": json.loads(exc.dump())})
        return _die(str(exc), EXIT_VIOLATION)
    if args.trace:
        Path(args.trace).write_text(res.trace_csv(), encoding="utf-8")
    _emit(res.to_json())
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="visserlab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    norm = sub.add_parser("norm", help="L_p mean of a polynomial on the unit circle")
    norm.add_argument("--poly", required=True, metavar="FILE", help='JSON {"coeffs": ...}; "-" for stdin')
    norm.add_argument("--p", type=_exponent, default=2.0, metavar="VAL", help='exponent: 0, "inf" or a positive number')
    norm.set_defaults(func=cmd_norm)

    cert = sub.add_parser("certify", help="zero-free disk certificate")
    cert.add_argument("--poly", required=True, metavar="FILE")
    cert.add_argument("--rho", type=float, default=1.0, metavar="VAL")
    cert.set_defaults(func=cmd_certify)

    chk = sub.add_parser("check", help="check one inequality on one polynomial")
    chk.add_argument("statement", choices=STATEMENTS)
    chk.add_argument("--poly", required=True, metavar="FILE")
    chk.add_argument("--s", type=int, default=0, metavar="VAL", help="coefficient index (k for lemma_phase)")
    chk.add_argument("--p", type=_exponent, default=2.0, metavar="VAL")
    chk.add_argument("--rho", type=float, default=1.0, metavar="VAL")
    chk.add_argument("--phi", type=float, default=0.0, metavar="VAL", help="phase for lemma_phase and the phase operator")
    chk.add_argument("--family", choices=("selector", "phase"), default="selector", help="operator family for operator_bound")
    chk.add_argument("--alpha", type=_complex, help="lemma_twoterm: coefficient of z")
    chk.add_argument("--beta", type=_complex, help="lemma_twoterm: constant term")
    chk.set_defaults(func=cmd_check)

    camp = sub.add_parser("campaign", help="randomised campaign from a JSON config")
    camp.add_argument("--config", required=True, metavar="FILE")
    camp.add_argument("--out", metavar="DIR", help="report directory (overrides out_dir)")
    camp.add_argument("--workers", type=int, default=1, metavar="N")
    camp.add_argument("--seed", type=int, metavar="N", help="override master_seed")
    camp.set_defaults(func=cmd_campaign)

    srch = sub.add_parser("search", help="multistart sharpness search")
    srch.add_argument("--n", type=int, required=True, metavar="N")
    srch.add_argument("--s", type=int, default=0, metavar="VAL")
    srch.add_argument("--p", type=_exponent, default=2.0, metavar="VAL")
    srch.add_argument("--rho", type=float, default=1.0, metavar="VAL")
    srch.add_argument("--restarts", type=int, default=20, metavar="N")
    srch.add_argument("--iters", type=int, default=500, metavar="N")
    srch.add_argument("--seed", type=int, metavar="N")
    srch.add_argument("--workers", type=int, default=1, metavar="N")
    srch.add_argument("--trace", metavar="FILE", help="write per-restart progress as CSV")
    srch.set_defaults(func=cmd_search)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, PolynomialError, ConfigError, RootFindingError) as exc:
        return _die(str(exc))
    except (ValueError, OverflowError) as exc:
        return _die(str(exc))


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
