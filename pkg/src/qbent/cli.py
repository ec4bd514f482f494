"""Command-line front end.

Every command writes exactly one report document to stdout; diagnostics
and progress go to stderr.  Exit status: 0 when the computation succeeded
and any invoked claim held, 1 when a claim was refuted, 2 on usage or
capacity errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import __version__
from .anf import AnfSyntaxError
from .boolfn import BoolFunc, classify, is_bent, parse_anf, to_anf, walsh_spectrum, weight
from .gf2 import BitMatrix, CapacityError, DimensionError, NotInvertibleError, ZERO
from .qtransform import (
    PreconditionError,
    is_q_bent,
    is_q_nearly_bent,
    is_q_plateaued,
    q_coeff,
    q_spectrum,
    rho,
    second_moments,
    stabilizer,
)
from .verify import (
    CLAIMS,
    TABLE1,
    TABLE2,
    Kind,
    SearchConfig,
    UnknownClaimError,
    conjecture_scan,
    search_q_nearly_bent,
    table1,
    table2,
    verify_theorem,
)

SCHEMA_VERSION = "1"


class UsageError(Exception):
    pass


def _rational(x: Fraction) -> dict:
    return {"num": str(x.numerator), "den": str(x.denominator)}


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return _rational(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, BitMatrix):
        return x.to_text()
    if x is ZERO:
        return "0"
    if isinstance(x, Kind):
        return x.value
    return x


def _func_echo(f: BoolFunc) -> dict:
    return {"n": f.n, "tt_hex": f.hex, "anf": str(to_anf(f))}


def _read_func(args, prefix: str = "", required: bool = True) -> BoolFunc | None:
    expr = getattr(args, f"{prefix}anf")
    hexs = getattr(args, f"{prefix}tt_hex")
    flag = "--" + prefix.replace("_", "-")
    if expr is not None and hexs is not None:
        raise UsageError(f"give only one of {flag}anf and {flag}tt-hex")
    if expr is None and hexs is None:
        if required:
            raise UsageError(f"missing function: use {flag}anf EXPR or {flag}tt-hex HEX with --n")
        return None
    if args.n is None:
        raise UsageError("--n is required with a function input")
    if expr is not None:
        return parse_anf(expr, args.n)
    return BoolFunc.from_hex(hexs, args.n)


def _read_matrix(text: str, n: int) -> BitMatrix:
    A = BitMatrix.from_text(text)
    if A.n != n:
        raise UsageError(f"matrix {text!r} is {A.n}x{A.n}, expected n={n}")
    return A


def _cfg(args) -> SearchConfig:
    return SearchConfig(
        fix_zero=not getattr(args, "no_fix_zero", False),
        early_abort=not getattr(args, "no_early_abort", False),
        sample_q=None if getattr(args, "exhaustive", False) else getattr(args, "samples", None),
        sample_f=getattr(args, "sample_f", None),
        seed=args.seed,
        max_matrices=getattr(args, "max_matrices", None),
        threads=args.threads,
        orbit_reduce=getattr(args, "orbit_reduce", False),
        audit=getattr(args, "audit", False),
        progress=(lambda s: print(s, file=sys.stderr, flush=True)) if args.verbose else None,
    )


def _printed_cells(n: int, wt: int) -> list[str]:
    out = []
    for label, ns, w, prho, _, _ in TABLE1:
        if w == wt and n in ns and rho(n, wt).rho not in prho:
            out.append(f"table1 cell {label} wt={w}: printed rho {'/'.join(map(str, prho))}, "
                       f"computed {rho(n, wt).rho}")
    if wt == 1 << (n - 1) and n in TABLE2 and TABLE2[n][0] != rho(n, wt).rho:
        out.append(f"table2 cell n={n}: printed rho {TABLE2[n][0]}, computed {rho(n, wt).rho}")
    return out


# ---------------------------------------------------------------------------
# Commands: each returns (exit code, inputs, result, discrepancies)


def cmd_rho(args):
    rp = rho(args.n, args.wt)
    result = {
        "n": rp.n,
        "wt_q": rp.wt_q,
        "I_q": rp.I_q,
        "rho": rp.rho,
        "ratio": _rational(rp.ratio),
        "exact": rp.exact,
    }
    return 0, {"n": args.n, "wt": args.wt}, result, _printed_cells(args.n, args.wt)


def cmd_parse(args):
    f = _read_func(args)
    c = classify(f)
    result = {**_func_echo(f), "tt": f.tt.tolist(), "weight": weight(f), "degree": c.degree,
              "is_affine": c.is_affine, "is_balanced": c.is_balanced}
    return 0, {"f": _func_echo(f)}, result, []


def cmd_coeff(args):
    f = _read_func(args)
    q = _read_func(args, "q_")
    if args.matrix is None:
        raise UsageError("--matrix is required")
    A = _read_matrix(args.matrix, f.n)
    result = {"coefficient": q_coeff(f, q, A), "matrix": A.to_text()}
    return 0, {"f": _func_echo(f), "q": _func_echo(q), "matrix": A.to_text()}, result, []


def cmd_spectrum(args):
    f = _read_func(args)
    q = _read_func(args, "q_")
    sp = q_spectrum(f, q, samples=args.samples, seed=args.seed)
    result = {
        "mode": sp.mode,
        "samples": sp.samples,
        "seed": sp.seed,
        "histogram": {str(k): v for k, v in sp.histogram.items()},
        "magnitudes": {str(k): v for k, v in sp.magnitudes().items()},
        "total": sp.total,
        "max_abs": sp.max_abs,
        "witness_max": sp.witness_max,
        "rho": sp.rho,
        "witness_rho": sp.witness_rho,
        "zero_coeff": sp.zero_coeff,
    }
    inputs = {"f": _func_echo(f), "q": _func_echo(q), "samples": args.samples, "seed": args.seed}
    return 0, inputs, result, []


def cmd_check_bent(args):
    f = _read_func(args)
    W = walsh_spectrum(f)
    result = {"bent": is_bent(f), "max_abs_walsh": int(np.abs(W).max()),
              "parseval_sum": int(np.dot(W, W))}
    return 0, {"f": _func_echo(f)}, result, []


def _verdict_result(v) -> dict:
    return {"holds": v.holds, "witness": v.witness, "value": v.value, "reason": v.reason}


def cmd_check_q_bent(args):
    f, q = _read_func(args), _read_func(args, "q_")
    return 0, {"f": _func_echo(f), "q": _func_echo(q)}, _verdict_result(is_q_bent(f, q)), []


def cmd_check_nearly_bent(args):
    f, q = _read_func(args), _read_func(args, "q_")
    v = is_q_nearly_bent(f, q)
    result = _verdict_result(v)
    if f.n > 2 and 0 < weight(q) < 1 << f.n:
        result["rho"] = rho(f.n, weight(q)).rho
    return 0, {"f": _func_echo(f), "q": _func_echo(q)}, result, []


def cmd_check_plateaued(args):
    f, q = _read_func(args), _read_func(args, "q_")
    p = is_q_plateaued(f, q)
    result = {"plateaued": p.plateaued, "lambda": p.lam, "degenerate": p.degenerate,
              "magnitudes": list(p.magnitudes), "zero_coeff_fits": p.zero_coeff_fits}
    return 0, {"f": _func_echo(f), "q": _func_echo(q)}, result, []


def cmd_stabilizer(args):
    q = _read_func(args)
    st = stabilizer(q)
    result = {"order": st.order, "orbit_size": st.orbit_size, "closure_check": st.closure,
              "matrices": [m.to_text() for m in st.matrices]}
    return 0, {"q": _func_echo(q)}, result, []


def cmd_moments(args):
    f, q = _read_func(args), _read_func(args, "q_")
    m = second_moments(f, q)
    result = {"N": m.N, "sum_sq": m.sum_sq, "eq1_rhs": m.eq1_rhs, "eprime": m.eprime, "e": m.e,
              "eq1_holds": m.eq1_holds, "eq2_holds": m.eq2_holds}
    return (0 if m.eq1_holds and m.eq2_holds else 1), {"f": _func_echo(f), "q": _func_echo(q)}, result, []


def _report_result(rep) -> dict:
    return rep.to_dict(timing=False)


def cmd_search(args):
    q = _read_func(args)
    rep = search_q_nearly_bent(q, _cfg(args))
    return 0, {"q": _func_echo(q), "seed": args.seed}, _report_result(rep), []


_EXPECTED = {"thm3": Kind.FOUND_WITNESSES, "plateaued-n3": Kind.FOUND_WITNESSES}


def cmd_verify(args):
    q = _read_func(args, required=False)
    weights = [int(w) for w in args.weights.split(",")] if args.weights else None
    rep = verify_theorem(args.claim, n=args.n, cfg=_cfg(args), weights=weights, q=q)
    expected = _EXPECTED.get(args.claim, Kind.VERIFIED_NONE_EXIST)
    code = 0 if rep.verdict.kind is expected else 1
    inputs = {"claim": args.claim, "n": rep.parameters.get("n"), "seed": args.seed,
              "samples": args.samples, "weights": weights}
    if q is not None:
        inputs["q"] = _func_echo(q)
    return code, inputs, _report_result(rep), []


def _table_cells(rep, paper_values: bool) -> list[dict]:
    cells = []
    for c in rep.verdict.details["cells"]:
        c = dict(c)
        if not paper_values:
            c.pop("printed_rho", None)
            c.pop("printed_answer", None)
        cells.append(c)
    return cells


def cmd_table1(args):
    rep = table1(reverify=not args.no_reverify, samples=args.samples or 4, seed=args.seed)
    result = {"cells": _table_cells(rep, args.paper_values), "counts": rep.counts}
    inputs = {"reverify": not args.no_reverify, "samples": args.samples or 4, "seed": args.seed}
    return 0, inputs, result, rep.verdict.details["discrepancies"]


def cmd_table2(args):
    rep = table2(max_n=args.max_n, reverify=not args.no_reverify, seed=args.seed)
    result = {"cells": _table_cells(rep, args.paper_values), "counts": rep.counts}
    inputs = {"max_n": args.max_n, "reverify": not args.no_reverify, "seed": args.seed}
    return 0, inputs, result, rep.verdict.details["discrepancies"]


def cmd_conjecture(args):
    if args.n is None:
        raise UsageError("--n is required")
    hi = args.wt_max if args.wt_max is not None else 1 << (args.n - 1)
    rep = conjecture_scan(args.n, args.wt_min, hi, _cfg(args))
    code = 1 if rep.verdict.kind is Kind.REFUTED else 0
    inputs = {"n": args.n, "wt_min": args.wt_min, "wt_max": hi, "seed": args.seed, "samples": args.samples}
    return code, inputs, _report_result(rep), []


# ---------------------------------------------------------------------------
# Parser


def _add_func(p, prefix: str = "", what: str = "f"):
    flag = "--" + prefix.replace("_", "-")
    p.add_argument(f"{flag}anf", metavar="EXPR", help=f"{what} in algebraic normal form, e.g. 'x1*x2+x3'")
    p.add_argument(f"{flag}tt-hex", metavar="HEX", help=f"{what} as a big-endian hex truth table")


def _add_search(p):
    p.add_argument("--samples", type=int, help="seeded q sample size per weight")
    p.add_argument("--exhaustive", action="store_true", help="use the full q population")
    p.add_argument("--sample-f", type=int, help="seeded sample of balanced f instead of all of them")
    p.add_argument("--max-matrices", type=int, help="only test the first K matrices of the enumeration")
    p.add_argument("--no-fix-zero", action="store_true", help="also enumerate f with f(0)=1")
    p.add_argument("--no-early-abort", action="store_true", help="evaluate every matrix for every candidate")
    p.add_argument("--orbit-reduce", action="store_true", help="search one q per GL_n orbit")


COMMANDS = {
    "rho": (cmd_rho, "Compute the nearly-bent bound rho_q from n and wt(q) in exact arithmetic "
                     "and flag printed table values that disagree."),
    "spectrum": (cmd_spectrum, "Histogram of the q-transform coefficients W_q(f)(A) over GL_n "
                               "(full for n <= 5, or --samples seeded draws)."),
    "coeff": (cmd_coeff, "One q-transform coefficient W_q(f)(A) = W(f, q_A)."),
    "check-bent": (cmd_check_bent, "Classical bentness via the Walsh-Hadamard spectrum, with the Parseval sum."),
    "check-q-bent": (cmd_check_q_bent, "q-bentness for balanced q: |W| = 2^(n/2) on GL_n and at the zero matrix."),
    "check-nearly-bent": (cmd_check_nearly_bent, "q-nearly bentness: balanced f with |W_q(f)(A)| <= rho_q on GL_n; "
                                                 "reports a matrix attaining rho_q when it holds."),
    "check-plateaued": (cmd_check_plateaued, "q-plateaued test: all GL_n coefficients in {0, +-lambda}."),
    "stabilizer": (cmd_stabilizer, "Stabilizer of q in GL_n and its orbit size (e.g. 6 and 28 for x1*x2+x3)."),
    "moments": (cmd_moments, "Exact second moments of the q-transform for balanced q: the GL_n sum of W^2 "
                             "and the omega-weighted generalized Parseval identity."),
    "search": (cmd_search, "Classify every balanced f as q-nearly bent or not, listing witnesses by degree."),
    "verify": (cmd_verify, "Re-check a claim: " + "; ".join(f"{k}: {v}" for k, v in CLAIMS.items()) + "."),
    "table1": (cmd_table1, "Recompute the small-weight rho/existence table (wt(q) = 4..7)."),
    "table2": (cmd_table2, "Recompute the balanced-q rho/existence table for odd n."),
    "conjecture": (cmd_conjecture, "Scan weights 2..2^(n-1) for non-affine q-nearly bent functions "
                                   "(no such f is expected when 1 < wt(q) <= 2^(n-1))."),
    "anf": (cmd_parse, "Algebraic normal form of a truth table (also echoes the hex form)."),
    "parse": (cmd_parse, "Parse a function and print its truth table, weight and degree."),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qbent", description="q-transform toolkit for Boolean functions")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--n", type=int, help="dimension")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--threads", type=int, default=1, help="worker threads for searches")
        p.add_argument("--format", choices=["json", "csv", "text"], default="json")
        p.add_argument("--timing", action="store_true", help="include wall-clock timing in the report")
        p.add_argument("-v", "--verbose", action="store_true", help="progress lines on stderr")
        if name == "rho":
            p.add_argument("--wt", type=int, required=True, help="weight of q")
        elif name in ("table1", "table2"):
            p.add_argument("--paper-values", action="store_true", help="show printed cells beside computed ones")
            p.add_argument("--no-reverify", action="store_true", help="skip the search-based cells")
            if name == "table1":
                p.add_argument("--samples", type=int, help="q samples for sampled re-verification (default 4)")
            else:
                p.add_argument("--max-n", type=int, default=17)
        else:
            _add_func(p, "", "q" if name in ("stabilizer", "search", "verify") else "f")
        if name in ("coeff", "spectrum", "check-q-bent", "check-nearly-bent", "check-plateaued", "moments"):
            _add_func(p, "q_", "q")
        if name == "coeff":
            p.add_argument("--matrix", help="matrix rows as binary strings joined by ';', e.g. '110;010;001'")
        if name == "spectrum":
            p.add_argument("--samples", type=int, help="number of seeded GL_n samples")
        if name == "verify":
            p.add_argument("--claim", required=True, choices=sorted(CLAIMS))
            p.add_argument("--weights", help="comma-separated subset of the claim's weights")
            _add_search(p)
        if name == "search":
            _add_search(p)
        if name == "conjecture":
            p.add_argument("--wt-min", type=int, default=2)
            p.add_argument("--wt-max", type=int)
            p.add_argument("--audit", action="store_true", help="also search parity-screened weights")
            _add_search(p)
    return parser


def _render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    if fmt == "csv":
        cells = report["result"]["cells"]
        buf = io.StringIO()
        keys = [k for k in cells[0] if not isinstance(cells[0][k], dict)]
        w = csv.DictWriter(buf, fieldnames=keys, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        for c in cells:
            w.writerow({k: json.dumps(v) if isinstance(v, list) else v for k, v in c.items()})
        return buf.getvalue()
    lines = [f"command: {report['command']}"]
    for k, v in report["result"].items():
        lines.append(f"{k}: {json.dumps(v)}")
    for d in report["discrepancies"]:
        lines.append(f"discrepancy: {d}")
    return "\n".join(lines) + "\n"


def run(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2
    if args.format == "csv" and args.command not in ("table1", "table2"):
        print("qbent: csv output is only available for table1 and table2", file=sys.stderr)
        return 2
    t0 = time.perf_counter()
    try:
        code, inputs, result, disc = COMMANDS[args.command][0](args)
    except AnfSyntaxError as e:
        print(f"qbent: parse error: {e}", file=sys.stderr)
        return 2
    except (UsageError, ValueError, CapacityError, DimensionError, NotInvertibleError,
            PreconditionError, UnknownClaimError) as e:
        print(f"qbent: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": args.command,
        "inputs": inputs,
        "result": result,
        "discrepancies": disc,
        "timing": {"elapsed_ms": int((time.perf_counter() - t0) * 1000)} if args.timing else None,
    }
    out.write(_render(_jsonable(report), args.format))
    return code


def main() -> None:
    sys.exit(run())
