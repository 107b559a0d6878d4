"""Command-line front end: ``singerlab {rplus,ext,tate-e2,verify}``.

Exit codes: 0 success, 1 verification failure, 2 parse error, 3 validation
failure, 4 insufficient window.
"""

from __future__ import annotations

import argparse
import re
import sys

from . import ext, fixtures, io, singer, tate_ss, verify
from .errors import DescriptionError, InsufficientWindow, ValidationError
from .fp import GradedVectorSpace
from .parallel import thread_count

EXIT_OK, EXIT_VERIFY, EXIT_PARSE, EXIT_VALIDATION, EXIT_WINDOW = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise DescriptionError(f"{self.prog}: {message}")


def _range(text: str, name: str, allow_step: bool = False) -> tuple:
    parts = text.split(":")
    if len(parts) not in ((2, 3) if allow_step else (2,)):
        raise DescriptionError(f"{name} must look like a:b" + ("[:step]" if allow_step else ""))
    try:
        return tuple(int(x) for x in parts)
    except ValueError:
        raise DescriptionError(f"{name}: {text!r} is not a range of integers") from None


def _emit(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


# --- commands -----------------------------------------------------------------------

def cmd_rplus(args) -> int:
    M = io.read_description(args.input)
    if args.prime is not None and args.prime != M.prime:
        raise DescriptionError(f"--prime {args.prime} disagrees with the file's prime {M.prime}")
    lo, hi = _range(args.degree_window, "--degree-window")
    T = singer.rplus_truncation(M, args.min_filtration, (lo, hi))
    _emit(io.rplus_text(T, M.prime), args.out)
    return EXIT_OK


def cmd_ext(args) -> int:
    M = io.read_description(args.input)
    if args.tower is None:
        chart = ext.ext_chart(M, args.max_s, args.max_t)
        _emit(io.chart_text(chart), args.out)
        return EXIT_OK
    n0, n1, *rest = _range(args.tower, "--tower", allow_step=True)
    step = rest[0] if rest else 1
    if step <= 0 or n1 > n0:
        raise DescriptionError("--tower runs downwards: n0 >= n1 and step > 0")
    ns, truncs, maps = ext.singer_tower(M, n0, n1, args.max_t, step)
    limit, report, _, _ = ext.inverse_limit_ext(
        [T.module for T in truncs], maps, ns, args.max_s, args.max_t,
        stems=(0, args.max_t), confirm=args.confirm,
    )
    lines = [f"tower n={n0}..{n1} step={step} confirm={args.confirm or 12 * M.prime}"] + report.lines()
    _emit(io.tower_chart_text(limit, ns, report.charts, lines), args.out)
    return EXIT_OK


def cmd_tate_e2(args) -> int:
    M = io.read_description(args.input)
    s_window = _range(args.s_window, "--s-window")
    t_window = _range(args.t_window, "--t-window")
    B = GradedVectorSpace.from_degrees(M.prime, {a: M.degree(a) for a in M.names()})
    page = tate_ss.e2_page(B, s_window, t_window)
    collapse = tate_ss.certify_collapse(B, s_window, t_window)
    reps = []
    for a in M.names():
        q = M.degree(a)
        for s in range(s_window[0], s_window[1] + 1):
            if not t_window[0] <= M.prime * q <= t_window[1]:
                continue
            for e in _elements_with_filtration(M, a, s):
                reps.append(tate_ss.representative(e, M))
    reps.sort(key=lambda r: (r.filtration, r.t, r.element))
    _emit(io.page_text(page, collapse, reps, M.prime), args.out)
    return EXIT_OK


def _elements_with_filtration(M, a, s):
    p = M.prime
    q = M.degree(a)
    if p == 2:
        return [singer.SingerBasis(0, s - 1 + q, a)]
    out = []
    for i in (0, 1):
        twice = s - 1 - i + (p - 1) * q
        if twice % 2 == 0:
            out.append(singer.SingerBasis(i, twice // 2, a))
    return out


def cmd_verify(args) -> int:
    kw = {}
    if args.suite == "adem" and (args.input or args.corrupt):
        if args.input:
            mods = [io.read_description(args.input, validate=False)]
        else:
            mods = [fixtures.random_module(args.prime, args.seed)]
        if args.corrupt:
            mods = [fixtures.corrupt(m, args.seed) for m in mods]
        kw["modules"] = mods
    elif args.input or args.corrupt:
        raise DescriptionError("--input and --corrupt apply to the adem suite only")
    res = verify.run_suite(args.suite, args.prime, args.seed, **kw)
    sys.stdout.write("\n".join(res.lines()) + "\n")
    return EXIT_OK if res.passed else EXIT_VERIFY


# --- entry point ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="singerlab", description="Exact computations with the algebraic Singer construction.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("rplus", help="basis and action table of F^n R_+(M) in a degree window")
    r.add_argument("--input", required=True)
    r.add_argument("--prime", type=int)
    r.add_argument("--min-filtration", type=int, required=True)
    r.add_argument("--degree-window", required=True, metavar="LO:HI")
    r.add_argument("--out")
    r.set_defaults(func=cmd_rplus)

    e = sub.add_parser("ext", help="Ext chart of M, or of the Singer tower with --tower")
    e.add_argument("--input", required=True)
    e.add_argument("--max-s", type=int, required=True)
    e.add_argument("--max-t", type=int, required=True)
    e.add_argument("--tower", metavar="N0:N1[:STEP]")
    e.add_argument("--confirm", type=int, help="confirmation depth in filtration units (default 12p)")
    e.add_argument("--out")
    e.set_defaults(func=cmd_ext)

    t = sub.add_parser("tate-e2", help="Tate E^2-page, collapse certificate and representatives")
    t.add_argument("--input", required=True)
    t.add_argument("--s-window", required=True, metavar="A:B")
    t.add_argument("--t-window", required=True, metavar="C:D")
    t.add_argument("--out")
    t.set_defaults(func=cmd_tate_e2)

    v = sub.add_parser("verify", help="run an invariant suite")
    v.add_argument("suite", choices=verify.SUITES)
    v.add_argument("--prime", type=int, default=2)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--input", help="module to check (adem suite)")
    v.add_argument("--corrupt", action="store_true", help="perturb the module before checking (adem suite)")
    v.set_defaults(func=cmd_verify)
    return ap


_RANGE_OPTS = ("--s-window", "--t-window", "--degree-window", "--tower")
_RANGE_VALUE = re.compile(r"^-?\d+:-?\d+(:-?\d+)?$")


def _glue_ranges(argv: list) -> list:
    """Let ranges such as ``--s-window -4:4`` through argparse, which reads -4:4 as an option."""
    out = []
    i = 0
    while i < len(argv):
        if argv[i] in _RANGE_OPTS and i + 1 < len(argv) and _RANGE_VALUE.match(argv[i + 1]):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None) -> int:
    argv = _glue_ranges(list(sys.argv[1:] if argv is None else argv))
    try:
        thread_count()
        args = build_parser().parse_args(argv)
        return args.func(args)
    except DescriptionError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValidationError as exc:
        print(f"validation failed: {exc}", file=sys.stderr)
        for v in exc.report:
            print(f"  {v.describe(exc.prime or 2)}", file=sys.stderr)
        return EXIT_VALIDATION
    except InsufficientWindow as exc:
        print(f"insufficient window: {exc} (horizon {exc.horizon})", file=sys.stderr)
        return EXIT_WINDOW
    except OSError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValueError as exc:
        if "SINGERLAB_THREADS" in str(exc):
            print(f"parse error: {exc}", file=sys.stderr)
            return EXIT_PARSE
        raise


if __name__ == "__main__":
    sys.exit(main())
