"""Command-line entry point: ``isorank <command> ...``.

Exit status: 0 success, 1 usage, 2 data/fixture error, 3 budget exhausted
(factoring or precision budget, or a scan stopped before finishing).
"""

import argparse
from fractions import Fraction
import logging
import sys

from . import families, heuristics, mwrank, reports
from .arith import factorint
from .ec import WeierstrassModel, compute_invariants, minimal_model
from .errors import (FactorizationIncomplete, FixtureError, InsufficientTable, IsorankError,
                     ParseError, PrecisionUnreachable, ScanInterrupted, SnapshotMismatch)
from .modp import ap_table, reduction_type

USAGE, DATA, BUDGET = 1, 2, 3


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE, f"{self.prog}: error: {message}\n")


def _positive(text):
    """Positive integer, powers allowed: 100, 10^4, 5*10^3."""
    try:
        v = families.parse_rational(text)
    except ParseError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if v.denominator != 1 or v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return int(v)


def _range(text):
    try:
        lo, hi = (int(s) for s in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}") from None
    if not 1 <= lo <= hi:
        raise argparse.ArgumentTypeError("need 1 <= lo <= hi")
    return lo, hi


def _add_curve(p):
    g = p.add_argument_group("curve source (exactly one)")
    g.add_argument("--curve", help='bracket model "[a1,a2,a3,a4,a6]"')
    g.add_argument("--degree", type=int, help="isogeny degree n of an embedded table curve")
    g.add_argument("--entry", type=int, default=0, help="row among the curves of that degree")
    g.add_argument("--family", help="genus-zero family: built-in degree (13) or a family file")
    g.add_argument("--h", help="family parameter h (with --family)")


def _add_scan(p):
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--checkpoint", "--resume", dest="checkpoint", help="snapshot file to resume from and update")
    p.add_argument("--stop-after", type=int, help="compute at most this many chunks, then stop")


def build_parser():
    ap = Parser(prog="isorank", description="Isogeny-curve twist rank heuristics and rank lower bounds.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=Parser)

    p = sub.add_parser("invariants", help="print invariants, minimal model and bad reduction")
    _add_curve(p)

    p = sub.add_parser("aptable", help="write an a_p cache file")
    _add_curve(p)
    p.add_argument("--t", type=_positive, default=10**4, help="prime bound")
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("rogers", help="Rogers frequency scan over r of height <= H")
    _add_curve(p)
    p.add_argument("--H", type=_positive, default=100)
    p.add_argument("--top", type=int)
    p.add_argument("--witnesses", type=int, default=5, help="witnesses listed per D")
    p.add_argument("--out")
    _add_scan(p)

    p = sub.add_parser("mazur", help="Mazur sign-bias scan over quadratic twists")
    _add_curve(p)
    p.add_argument("--D-range", dest="D_range", type=_range, default=(1, 1000), help="lo:hi bounds on |D|")
    p.add_argument("--t", type=_positive, default=10**4)
    p.add_argument("--top", type=int)
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=0)
    _add_scan(p)

    p = sub.add_parser("nagao", help="Nagao scores of curves or of a genus-zero family")
    _add_curve(p)
    p.add_argument("--N", type=_positive, default=10**4)
    p.add_argument("--family-H", dest="family_H", type=_positive, help="score every h of height <= this")
    p.add_argument("--top", type=int)
    p.add_argument("--out")
    _add_scan(p)

    p = sub.add_parser("certify", help="certify a rank lower bound")
    _add_curve(p)
    p.add_argument("--points", nargs="*", default=[], help='points like "(-3,9)" or "(25/4,35/8)"')
    p.add_argument("--search", type=int, default=10, help="numerator bound of the point search")
    p.add_argument("--search-den", type=int, default=4, help="denominator bound of the point search")
    p.add_argument("--tol", type=float, default=mwrank.DEFAULT_TOL)
    p.add_argument("--eps", type=float)
    p.add_argument("--out")

    p = sub.add_parser("validate", help="self-check a CSV report")
    p.add_argument("kind", choices=sorted(reports.HEADERS))
    p.add_argument("path")
    return ap


# -- helpers --------------------------------------------------------------------


def resolve_curve(args):
    """(model, label) from exactly one of --curve / --degree / --family + --h."""
    given = [args.curve is not None, args.degree is not None, args.family is not None]
    if sum(given) != 1:
        raise UsageError("give exactly one of --curve, --degree, --family")
    if args.curve is not None:
        return WeierstrassModel.parse(args.curve), args.curve
    if args.degree is not None:
        if args.degree not in families.ISOGENY_DEGREES:
            raise UsageError(f"no rational {args.degree}-isogeny exists over Q")
        rows = families.curves_for_degree(args.degree)
        if not rows:
            raise FixtureError(f"no embedded curve for degree {args.degree}")
        if not 0 <= args.entry < len(rows):
            raise UsageError(f"--entry must be in 0..{len(rows) - 1}")
        return rows[args.entry].a_invariants, f"n={args.degree}#{args.entry}"
    if args.h is None:
        raise UsageError("--family needs --h")
    fam = load_family_arg(args.family)
    return families.family_curve(fam, Fraction(args.h)), f"j{fam.n}({args.h})"


def load_family_arg(text):
    if text.isdigit():
        try:
            return families.builtin_family(int(text))
        except KeyError as exc:
            raise UsageError(str(exc)) from None
    with open(text, encoding="utf-8") as fh:
        return families.load_family(fh.read())


def parse_point(text):
    inner = text.strip().strip("()")
    try:
        x, y = inner.split(",")
        return Fraction(x.strip()), Fraction(y.strip())
    except ValueError:
        raise UsageError(f"bad point {text!r}") from None


def emit(text, path):
    if path:
        reports.write_report(path, text)
    else:
        sys.stdout.write(text)


# -- commands -------------------------------------------------------------------


def cmd_invariants(args):
    model, label = resolve_curve(args)
    inv = compute_invariants(model)
    mini = minimal_model(model)
    minv = compute_invariants(mini)
    print(f"curve {label}")
    print(f"model {model}")
    for name in ("b2", "b4", "b6", "b8", "c4", "c6"):
        print(f"{name} {getattr(inv, name)}")
    print(f"disc {inv.disc}")
    print(f"j {inv.j}")
    print(f"minimal {mini}")
    print(f"minimal_disc {minv.disc}")
    try:
        bad = sorted(factorint(abs(minv.disc)))
        print("reduction " + " ".join(f"{p}:{reduction_type(mini, p, minv).code}" for p in bad))
    except FactorizationIncomplete:
        print("reduction unknown (discriminant not factored)")
    return 0


def cmd_aptable(args):
    model, _ = resolve_curve(args)
    table = ap_table(minimal_model(model), args.t, workers=args.workers, seed=args.seed)
    table.save(args.out)
    print(f"wrote {len(table.records)} primes to {args.out}", file=sys.stderr)
    return 0


def cmd_rogers(args):
    model, _ = resolve_curve(args)
    table = heuristics.rogers_scan(model, args.H, workers=args.workers,
                                   snapshot=args.checkpoint, stop_after=args.stop_after)
    emit(reports.rogers_csv(table, args.top, args.witnesses), args.out)
    if table.unresolved:
        print(f"{len(table.unresolved)} values of f(r) could not be factored; "
              "their D are missing from the report", file=sys.stderr)
        return BUDGET
    return 0


def cmd_mazur(args):
    model, _ = resolve_curve(args)
    base = ap_table(minimal_model(model), args.t, seed=args.seed)
    Ds = heuristics.twist_values(*args.D_range)
    recs = heuristics.mazur_twist_scan(base, Ds, args.t, workers=args.workers,
                                       snapshot=args.checkpoint, stop_after=args.stop_after)
    emit(reports.mazur_csv(recs, args.top), args.out)
    inexact = sum(not r.exact for r in recs)
    if inexact:
        print(f"{inexact} twists share an additive prime with E; their bias is approximate",
              file=sys.stderr)
    return 0


def cmd_nagao(args):
    if args.family_H is not None:
        if args.family is not None:
            fam = load_family_arg(args.family)
        elif args.degree is not None and args.curve is None:
            try:
                fam = families.builtin_family(args.degree)
            except KeyError as exc:
                raise UsageError(str(exc)) from None
        else:
            raise UsageError("--family-H needs --family or --degree")
        rows, failures = families.family_scan(fam, args.family_H, args.N, workers=args.workers,
                                              snapshot=args.checkpoint, stop_after=args.stop_after)
        for h, msg in failures:
            print(f"h={h}: {msg}", file=sys.stderr)
        emit(reports.nagao_csv([(r.h, r.score) for r in rows], args.N, args.top), args.out)
        return 0
    if args.degree is not None and args.curve is None and args.family is None:
        rows = families.curves_for_degree(args.degree)
        scored = []
        for e in rows:
            m = minimal_model(e.a_invariants)
            scored.append((str(m), heuristics.nagao_score(ap_table(m, args.N), args.N).value))
    else:
        model, _ = resolve_curve(args)
        m = minimal_model(model)
        scored = [(str(m), heuristics.nagao_score(ap_table(m, args.N), args.N).value)]
    emit(reports.nagao_csv(scored, args.N, args.top), args.out)
    return 0


def cmd_certify(args):
    model, _ = resolve_curve(args)
    pts = [parse_point(t) for t in args.points]
    if args.search > 0:
        pts += mwrank.point_search(model, mwrank.PointSearchConfig(args.search, max(1, args.search_den)))
    cert = mwrank.rank_lower_bound(model, pts, tol=args.tol, eps=args.eps)
    emit(cert.dumps(), args.out)
    print(f"rank >= {cert.lower_bound}", file=sys.stderr)
    return 0


def cmd_validate(args):
    with open(args.path, encoding="utf-8", newline="") as fh:
        text = fh.read()
    try:
        n = reports.validate_csv(args.kind, text)
    except ParseError as exc:
        print(f"invalid {args.kind} report {args.path}: {exc}", file=sys.stderr)
        return DATA
    print(f"ok: {n} rows")
    return 0


COMMANDS = {
    "invariants": cmd_invariants, "aptable": cmd_aptable, "rogers": cmd_rogers,
    "mazur": cmd_mazur, "nagao": cmd_nagao, "certify": cmd_certify, "validate": cmd_validate,
}


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # --help and usage errors
        return exc.code
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ScanInterrupted as exc:
        print(f"isorank: scan stopped after {exc.done}/{exc.total} chunks; "
              "rerun with the same --checkpoint to resume", file=sys.stderr)
        return BUDGET
    except (FactorizationIncomplete, PrecisionUnreachable) as exc:
        print(f"isorank: budget exhausted: {exc}", file=sys.stderr)
        return BUDGET
    except (FixtureError, SnapshotMismatch, InsufficientTable, OSError) as exc:
        print(f"isorank: data error: {exc}", file=sys.stderr)
        return DATA
    except (UsageError, ParseError, ValueError) as exc:
        print(f"isorank: {exc}", file=sys.stderr)
        return USAGE
    except IsorankError as exc:
        print(f"isorank: {type(exc).__name__}: {exc}", file=sys.stderr)
        return USAGE
    except KeyboardInterrupt:
        print("isorank: interrupted; checkpoint (if any) is up to date", file=sys.stderr)
        return BUDGET


if __name__ == "__main__":
    sys.exit(main())
