"""Command-line front end.

Exit codes: 0 success, 1 invalid input, 2 mathematical inconsistency,
3 corrupt cache entry (only with --strict-cache; otherwise the entry is
recomputed and replaced).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from importlib import resources
from typing import Sequence

from . import __version__
from .cache import CacheCorruption, ReportCache
from .etaquot import NotModularError, certify, format_expression, parse_expression
from .maxvanish import solve_max_vanish
from .numth import cusp_count, cusp_width, cusps, profile
from .planemodel import (
    FormTriple,
    ModelError,
    ModelReport,
    PlanePolynomial,
    conic_triple,
    gcd_birationality_check,
    model_report,
    relation_vanishes,
    standard_triple,
)

EXIT_OK, EXIT_INPUT, EXIT_MATH, EXIT_CACHE = 0, 1, 2, 3
TABLE1_LEVELS = (2, 3, 4, 5, 7, 9, 13)


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _level(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"level must be positive, got {n}")
    return n


def _emit(args, data: dict, text: str) -> None:
    if args.format == "json":
        print(json.dumps(data, indent=2, ensure_ascii=False))
    else:
        print(text)


# --- subcommands ----------------------------------------------------------------

def cmd_info(args) -> int:
    prof = profile(args.N)
    data = prof.to_dict()
    lines = [
        f"level   {prof.level}",
        f"index   {prof.index}",
        f"cusps   {prof.nu_inf}: {', '.join(str(c) for c in prof.cusps)}",
        f"nu2     {prof.nu2}",
        f"nu3     {prof.nu3}",
        f"genus   {prof.genus}",
        f"dimM12  {prof.dim_m12}",
    ]
    if args.N >= 2 and solve_max_vanish(args.N).exists:
        cert = gcd_birationality_check(standard_triple(args.N))
        data["standardTriple"] = cert.to_json()
        a, b = cert.pole_degrees
        lines.append(f"standard triple pole degrees {a}, {b} (gcd {cert.gcd})")
    _emit(args, data, "\n".join(lines))
    return EXIT_OK


def cmd_cusps(args) -> int:
    rows = [
        {"cusp": str(c), "denominator": c.d, "width": cusp_width(args.N, c.d), "classes": cusp_count(args.N, c.d)}
        for c in cusps(args.N)
    ]
    text = "\n".join(f"{r['cusp']:>8}  width {r['width']}" for r in rows)
    _emit(args, {"level": args.N, "cusps": rows}, text)
    return EXIT_OK


def cmd_eta_check(args) -> int:
    f = parse_expression(args.expr, args.N)
    cert = certify(f)
    data = cert.to_json()
    data["expression"] = format_expression(f)
    if cert.is_weakly_modular:
        data["orders"] = {str(d): str(v) for d, v in f.orders().items()}
    lines = [f"{format_expression(f)} on Gamma_0({args.N}), weight {cert.weight}"]
    lines += [f"  {k:<16} {'ok' if v else 'FAILS'}" for k, v in cert.conditions.items()]
    lines.append(f"weakly modular: {cert.is_weakly_modular}; modular form: {cert.is_modular_form}")
    _emit(args, data, "\n".join(lines))
    return EXIT_OK


def cmd_qexp(args) -> int:
    if args.terms < 1:
        raise InputError("--terms must be positive")
    f = parse_expression(args.expr, args.N)
    s = f.q_expansion(args.terms)
    data = {"expression": format_expression(f), **s.to_json()}
    _emit(args, data, s.format())
    return EXIT_OK


def cmd_maxvanish(args) -> int:
    if args.N < 2:
        raise InputError("maxvanish needs N >= 2")
    res = solve_max_vanish(args.N)
    text = f"{res.status.value}"
    if res.exists:
        text += f": {format_expression(res.eta_quotient)} (order {res.eta_quotient.order_at_infinity()} at infinity)"
    else:
        text += ": " + ", ".join(f"r_{d}={r}" for d, r in res.to_json()["exponents"].items())
    if args.text:
        print(text)
    else:
        print(json.dumps(res.to_json(), indent=2))
    return EXIT_OK


def _triple(args) -> FormTriple:
    n = args.N
    if args.triple == "standard":
        if n < 2 or not solve_max_vanish(n).exists:
            raise InputError(f"no eta-quotient of maximal vanishing at level {n}; use --triple custom")
        return standard_triple(n)
    if args.triple == "conic":
        return conic_triple(n)
    if not args.forms or len(args.forms) != 3:
        raise InputError("--triple custom needs --forms F G H")
    forms = tuple(parse_expression(t, n) for t in args.forms)
    triple = FormTriple(n, forms, "custom")
    # the standard triple under another spelling shares its cache entry
    if n >= 2 and solve_max_vanish(n).exists and standard_triple(n).key() == triple.key():
        return standard_triple(n)
    return triple


def compute_model(triple: FormTriple, cache: ReportCache | None, strict: bool = False, method: str = "auto") -> tuple[ModelReport, str]:
    """Report for the triple, and where it came from ("cache", "computed", "repaired")."""
    origin = "computed"
    if cache is not None:
        try:
            hit = cache.load(triple)
        except CacheCorruption as exc:
            if strict:
                raise
            logging.getLogger(__name__).warning("ignoring corrupt cache entry: %s", exc)
            hit, origin = None, "repaired"
        if hit is not None:
            return hit, "cache"
    report = model_report(triple, method=method)
    if cache is not None:
        cache.store(report)
    return report, origin


def cmd_model(args) -> int:
    if args.margin < 1:
        raise InputError("--margin can only raise the valence bound (must be >= 1)")
    triple = _triple(args)
    cache = None if args.no_cache else ReportCache(args.cache_dir)
    report, origin = compute_model(triple, cache, strict=args.strict_cache, method=args.method)
    if args.margin > 1 and not relation_vanishes(triple, report.curve, margin=args.margin):
        raise ModelError(f"relation fails beyond the valence bound (margin {args.margin})")
    data = report.to_json()
    data["source"] = origin
    _emit(args, data, report.text())
    return EXIT_OK


def _pinned_table1() -> dict[int, PlanePolynomial]:
    raw = json.loads(resources.files("etaplane").joinpath("data/table1.json").read_text(encoding="utf-8"))
    return {int(n): PlanePolynomial.parse(t) for n, t in raw["curves"].items()}


def cmd_table1(args) -> int:
    if args.expected:
        with open(args.expected, encoding="utf-8") as fh:
            raw = json.load(fh)
        expected = {int(n): PlanePolynomial.parse(t) for n, t in raw["curves"].items()}
    else:
        expected = _pinned_table1()
    cache = None if args.no_cache else ReportCache(args.cache_dir)
    rows, lines, clean = [], [], True
    for n in TABLE1_LEVELS:
        report, _ = compute_model(standard_triple(n), cache, strict=args.strict_cache)
        want = expected.get(n)
        match = want is not None and report.curve.equal_up_to_sign(want)
        clean &= match
        rows.append({"level": n, "polynomial": report.curve.format(), "match": match})
        lines.append(f"N={n:<3} {'ok  ' if match else 'DIFF'} {report.curve.format()}")
        if not match and want is not None:
            lines.append(f"      expected {want.format()}")
    _emit(args, {"rows": rows, "clean": clean}, "\n".join(lines))
    return EXIT_OK if clean else EXIT_MATH


# --- wiring -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--cache-dir", default=None, help="cache directory (default: $ETAQ_CACHE_DIR)")
    common.add_argument("--no-cache", action="store_true")
    common.add_argument("--strict-cache", action="store_true", help="exit 3 on a corrupt cache entry instead of recomputing")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="etaq", description="Eta-quotients and plane models of X_0(N).")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("info", parents=[common], help="index, cusps, genus and dim M_12 of Gamma_0(N)")
    s.add_argument("N", type=_level)
    s.set_defaults(run=cmd_info)

    s = sub.add_parser("cusps", parents=[common], help="cusp representatives a/d")
    s.add_argument("N", type=_level)
    s.set_defaults(run=cmd_cusps)

    s = sub.add_parser("eta-check", parents=[common], help="modularity conditions for an eta-quotient")
    s.add_argument("expr")
    s.add_argument("N", type=_level)
    s.set_defaults(run=cmd_eta_check)

    s = sub.add_parser("qexp", parents=[common], help="q-expansion of an eta-quotient")
    s.add_argument("expr")
    s.add_argument("N", type=_level)
    s.add_argument("--terms", type=int, default=10)
    s.set_defaults(run=cmd_qexp)

    s = sub.add_parser("maxvanish", parents=[common], help="weight-12 eta-quotient of maximal vanishing at infinity")
    s.add_argument("N", type=_level)
    s.add_argument("--text", action="store_true", help="one-line summary instead of JSON")
    s.set_defaults(run=cmd_maxvanish)

    s = sub.add_parser("model", parents=[common], help="plane model of X_0(N)")
    s.add_argument("N", type=_level)
    s.add_argument("--triple", choices=("standard", "conic", "custom"), default="standard")
    s.add_argument("--forms", nargs=3, metavar=("F", "G", "H"))
    s.add_argument("--method", choices=("auto", "bareiss", "modular", "trace"), default="auto")
    s.add_argument("--margin", type=int, default=1, help="re-check the relation to margin times the valence bound")
    s.set_defaults(run=cmd_model)

    s = sub.add_parser("table1", parents=[common], help="recompute the reference curves and diff them")
    s.add_argument("--expected", help="JSON file with the expected curves")
    s.set_defaults(run=cmd_table1)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors this way
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.run(args)
    except CacheCorruption as exc:
        print(f"error: corrupt cache entry: {exc}", file=sys.stderr)
        return EXIT_CACHE
    except (InputError, NotModularError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ModelError, ArithmeticError) as exc:
        print(f"error: inconsistency: {exc}", file=sys.stderr)
        return EXIT_MATH
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BrokenPipeError:  # e.g. piped into head
        sys.stdout = None
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
