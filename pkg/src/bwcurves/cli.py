"""Command-line entry point.

Data goes to stdout, one record per line; progress and errors go to stderr.
Errors are a single line ``error: <kind>: <message>``.  Exit status is 0 on
success, 1 when the input is well formed but rejected, 2 on bad usage or
malformed files.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import cm, families, numtheory, search


class UsageError(Exception):
    pass


class Rejected(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load_family(path: str) -> families.Family:
    try:
        return families.read_family(_read_text(path))
    except families.FamilyError:
        raise
    except ValueError as exc:
        raise UsageError(f"malformed family file: {exc}") from None


def _records(arg: str) -> list[search.CurveParams]:
    text = arg if "=" in arg else _read_text(arg)
    out = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            try:
                out.append(search.parse_record(line))
            except ValueError as exc:
                raise UsageError(f"malformed record: {exc}") from None
    if not out:
        raise UsageError("no parameter records given")
    return out


def _config(args) -> search.SearchConfig:
    kw = {}
    for name in ("min_r_bits", "min_kp_bits", "max_cofactor", "n_min", "n_max"):
        val = getattr(args, name, None)
        if val is not None:
            kw["max_cofactor_r" if name == "max_cofactor" else name] = val
    try:
        return search.SearchConfig(**kw)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_family(args, out):
    if args.preset:
        fam = families.toy_family() if args.preset == "toy" else families.barreto_naehrig()
    else:
        missing = [f"--{n}" for n in ("D", "k", "e", "f") if getattr(args, n) is None]
        if missing:
            raise UsageError(f"family needs {' '.join(missing)} (or --preset)")
        fam = families.generic_construction(args.D, args.k, args.e, args.f, y_lift=args.y_lift)
    text = families.write_family(fam)
    if args.out:
        Path(args.out).write_text(text)
    else:
        out.write(text)
    print(f"rho = {fam.rho} ({float(fam.rho):.3f})", file=sys.stderr)


def cmd_search(args, out):
    fam = _load_family(args.family_file)
    cfg = _config(args)
    if args.x_from > args.x_to:
        raise UsageError("--from must not exceed --to")
    if args.workers > 1:
        hits = search.scan(fam, args.x_from, args.x_to, cfg, workers=args.workers)
    else:
        hits = search.iter_scan(fam, args.x_from, args.x_to, cfg)
    count = 0
    for params in hits:
        out.write(search.format_record(params) + "\n")
        out.flush()
        count += 1
    print(f"{count} records", file=sys.stderr)


def cmd_improve(args, out):
    cfg = _config(args)
    for params in _records(args.record):
        if args.n is not None:
            n = args.n
        else:
            try:
                n = search.select_n(params.y, cfg)[0]
            except search.NoCandidateError as exc:
                raise Rejected(f"no-candidate: {exc}") from None
        try:
            improved = search.apply_improvement(params, n)
        except ValueError as exc:
            raise Rejected(f"not-a-divisor: {exc}") from None
        out.write(search.format_record(improved) + "\n")


def cmd_verify(args, out):
    if bool(args.curve_file) == bool(args.records):
        raise UsageError("verify needs exactly one of --curve-file or --records")
    if args.samples < 1:
        raise UsageError("--samples must be at least 1")
    if args.records:
        failed = 0
        for params in _records(args.records):
            bad = search.check_params(params)
            out.write(f"x_seed={params.x_seed} {'ok' if not bad else 'FAIL: ' + '; '.join(bad)}\n")
            failed += bool(bad)
        if failed:
            raise Rejected(f"invalid-params: {failed} record(s) failed")
        return
    try:
        curve = cm.read_curve(_read_text(args.curve_file))
    except ValueError as exc:
        raise UsageError(f"malformed curve file: {exc}") from None
    verdict = cm.verify_curve(curve, args.samples)
    out.write(f"{'ok' if verdict else 'FAIL'}: {verdict.reason}\n")
    if not verdict:
        raise Rejected(f"curve-invalid: {verdict.reason}")


def cmd_build_curve(args, out):
    for params in _records(args.record):
        try:
            curve = cm.build_curve(params, cap=args.cap)
        except cm.CMError as exc:
            raise Rejected(f"cm: {exc}") from None
        out.write(cm.write_curve(curve))


def cmd_classnum(args, out):
    try:
        out.write(f"{numtheory.class_number(args.disc)}\n")
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_delta_table(args, out):
    if args.max < 1:
        raise UsageError("--max must be at least 1")
    table = families.delta_table(args.max, workers=args.workers)
    out.write("delta " + " ".join(f"{b / 10:.1f}" for b in range(11)) + "\n")
    out.write("count " + " ".join(str(c) for c in table.counts) + "\n")
    out.write(f"total {table.total}\n")
    out.write(f"share_at_least_0.8 {table.fraction_at_least(8):.4f}\n")


def cmd_cocks_pinch(args, out):
    try:
        res = families.cocks_pinch(args.D, args.k, args.r, args.seed, lifts=args.lifts)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if res is None:
        raise Rejected("p-composite: no lift gave a prime p")
    out.write(f"p={res.p} r={res.r} t={res.t} y={res.y} D={res.D} k={res.k}\n")


def cmd_density(args, out):
    fam = _load_family(args.family_file)
    h = families.hypothesis_h_check(fam.p, fam.r)
    est = families.family_density([fam.p, fam.r], args.x_from, args.N, prime_bound=args.prime_bound)
    independent = families.log_integral(max(args.x_from, 2), args.N, 2)
    out.write(f"hypothesis_h_gcd {h.gcd_value}\n")
    out.write(f"bateman_horn_constant {est.constant:.6f}\n")
    out.write(f"prime_bound {est.prime_bound}\n")
    out.write(f"expected_count {est.expected_count:.1f}\n")
    out.write(f"independent_pair_integral {independent:.1f}\n")


def build_parser() -> argparse.ArgumentParser:
    cpus = os.cpu_count() or 1
    parser = _Parser(prog="bwcurves", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("family", help="emit a Brezing-Weng family file")
    p.add_argument("--D", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--e", type=int)
    p.add_argument("--f", type=int)
    p.add_argument("--y-lift", type=int, default=0, help="multiple of r added to y (default 0)")
    p.add_argument("--preset", choices=("toy", "bn"))
    p.add_argument("--out")
    p.set_defaults(func=cmd_family)

    p = sub.add_parser("search", help="stream parameter records for x in a range")
    p.add_argument("--family-file", required=True)
    p.add_argument("--from", dest="x_from", type=int, required=True)
    p.add_argument("--to", dest="x_to", type=int, required=True)
    p.add_argument("--min-r-bits", type=int)
    p.add_argument("--min-kp-bits", type=int)
    p.add_argument("--max-cofactor", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("improve", help="divide y by n and multiply D by n^2")
    p.add_argument("--record", required=True, help="record text, a file of records, or -")
    p.add_argument("--n", type=int, help="divisor of y (default: largest prime in [n-min, n-max])")
    p.add_argument("--n-min", type=int)
    p.add_argument("--n-max", type=int)
    p.set_defaults(func=cmd_improve)

    p = sub.add_parser("verify", help="verify a curve file or re-check parameter records")
    p.add_argument("--curve-file")
    p.add_argument("--records", help="record text, a file of records, or -")
    p.add_argument("--samples", type=int, default=8)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("build-curve", help="CM construction for records with small class number")
    p.add_argument("--record", required=True)
    p.add_argument("--cap", type=int, default=cm.DEFAULT_CLASS_NUMBER_CAP)
    p.set_defaults(func=cmd_build_curve)

    p = sub.add_parser("classnum", help="class number of an imaginary quadratic order")
    p.add_argument("--disc", type=int, required=True)
    p.set_defaults(func=cmd_classnum)

    p = sub.add_parser("delta-table", help="histogram of the delta statistic")
    p.add_argument("--max", type=int, default=20)
    p.add_argument("--workers", type=int, default=cpus)
    p.set_defaults(func=cmd_delta_table)

    p = sub.add_parser("cocks-pinch", help="one Cocks-Pinch attempt")
    p.add_argument("--D", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lifts", type=int, default=0)
    p.set_defaults(func=cmd_cocks_pinch)

    p = sub.add_parser("density", help="hypothesis H and Bateman-Horn estimates for a family")
    p.add_argument("--family-file", required=True)
    p.add_argument("--prime-bound", type=int, default=10**4)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--from", dest="x_from", type=int, default=2)
    p.set_defaults(func=cmd_density)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        args.func(args, out)
    except UsageError as exc:
        print(f"error: usage: {exc}", file=sys.stderr)
        return 2
    except families.FamilyError as exc:
        print(f"error: precondition: {exc}", file=sys.stderr)
        return 1
    except Rejected as exc:
        print(f"error: rejected: {exc}", file=sys.stderr)
        return 1
    return 0
