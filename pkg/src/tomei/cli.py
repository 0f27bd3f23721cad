"""Command line front end: ``tomei <command> ...``.

Exit status is 0 on success, 1 when an audit fails and 2 on bad input.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .complex import CellComplex, NotAnAction
from .homology import betti_mod2, check_theorems, homology_of, levi_betti
from .roots import DiagramError, WeylGroup, index_counts, parse_diagram, unstable_support
from .signs import enumerate_markings, parse_marking, signs_to_str
from .toda import (
    DELTA_MIN,
    MONOTONE_TOL,
    DegenerateSpectrum,
    Spectrum,
    StepTooLarge,
    convexity_audit,
    initial_state_with_spectrum,
    simulate,
)

log = logging.getLogger("tomei")

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _dumps(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True)


def _diagram(args, cap=None):
    text = args.diagram_opt or args.diagram
    if not text:
        raise InputError("no diagram given")
    return parse_diagram(text, max_rank=cap if cap is not None else args.max_rank)


def _markings(args, d):
    if getattr(args, "all_markings", False):
        return enumerate_markings(d)
    return [parse_marking(d, args.marking)]


def _word(W, k):
    return "".join(str(i + 1) for i in W.words[k]) or "e"


# ---------------------------------------------------------------- commands


def cmd_actions(args) -> int:
    d = _diagram(args, cap=max(args.max_rank, 8))
    rows = enumerate_markings(d)
    if args.format == "json":
        from .signs import classification_table

        _emit(_dumps(classification_table(d)), args.out)
        return EXIT_OK
    lines = [f"{d.to_text()}: {len(rows)} markings"]
    lines.append(f"{'marking':<16}{'trivial':>8}{'standard':>9}{'positive':>9}{'action':>8}")
    for m in rows:
        flags = [m.trivial, m.standard, m.positively_marked, m.is_action]
        lines.append(f"{m.to_text():<16}" + "".join(f"{'yes' if f else 'no':>{w}}" for f, w in zip(flags, (8, 9, 9, 8))))
    _emit("\n".join(lines), args.out)
    return EXIT_OK


def cmd_complex(args) -> int:
    d = _diagram(args)
    m = parse_marking(d, args.marking)
    cx = CellComplex(m)
    if args.format == "json":
        _emit(cx.dumps(), args.out)
    else:
        _emit(f"{m}\nf-vector {cx.f_vector}\neuler characteristic {cx.euler_characteristic()}", args.out)
    return EXIT_OK


def cmd_homology(args) -> int:
    d = _diagram(args)
    m = parse_marking(d, args.marking)
    cx = CellComplex(m)
    h = homology_of(cx)
    if args.format == "json":
        _emit(
            _dumps(
                {
                    "diagram": d.to_text(),
                    "marking": m.to_text(),
                    "f_vector": cx.f_vector,
                    "betti_mod2": h.mod2_rank,
                    "homology_Z": h.to_json(),
                    "e": index_counts(cx.W),
                }
            ),
            args.out,
        )
    else:
        _emit("\n".join([str(m), f"betti mod 2 {h.mod2_rank}", *h.describe()]), args.out)
    return EXIT_OK


def cmd_check(args) -> int:
    d = _diagram(args)
    markings = _markings(args, d)
    W = WeylGroup(d)
    with ThreadPoolExecutor(max_workers=max(1, min(len(markings), args.jobs))) as pool:
        reports = list(pool.map(lambda m: check_theorems(m, group=W), markings))
    if args.format == "json":
        body = [r.to_json() for r in reports]
        _emit(_dumps(body if len(body) > 1 else body[0]), args.out)
    else:
        text = "\n".join(r.table() for r in reports)
        passed = sum(r.passed for r in reports)
        _emit(text + f"\n{passed}/{len(reports)} audits pass", args.out)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_unstable(args) -> int:
    d = _diagram(args)
    m = parse_marking(d, args.marking)
    cx = CellComplex(m)
    W = cx.W
    if args.w is None:
        ws = range(W.order)
    else:
        word = [int(c) - 1 for c in args.w if c.isdigit()]
        if any(not 0 <= i < d.rank for i in word):
            raise InputError(f"word {args.w!r} uses a generator outside 1..{d.rank}")
        ws = [W.from_word(word)]
    rows = []
    cache: dict = {}
    for w in ws:
        pu = sorted(unstable_support(W, w))
        bd = cx.apply_boundary(cx.unstable_chain(w))
        levi = cx.levi_marking(w)
        sub = cx.unstable_closure(w)
        rows.append(
            {
                "w": _word(W, w),
                "unstable_roots": [i + 1 for i in pu],
                "levi_marking": levi.to_text() if levi else None,
                "cycle": not bd,
                "boundary_terms": len(bd),
                "closure_f_vector": sub.f_vector[: sub.top_dim + 1],
                "closure_betti_mod2": betti_mod2(sub)[: sub.top_dim + 1],
                "levi_betti_mod2": levi_betti(cx, w, cache),
            }
        )
    if args.format == "json":
        _emit(_dumps({"diagram": d.to_text(), "marking": m.to_text(), "unstable": rows}), args.out)
    else:
        lines = [str(m)]
        for r in rows:
            lines.append(
                f"w={r['w']:<10} Pi^u={r['unstable_roots']!s:<12} cycle={'yes' if r['cycle'] else 'no ':<4}"
                f" closure betti {r['closure_betti_mod2']}"
            )
        _emit("\n".join(lines), args.out)
    return EXIT_OK


def cmd_flow(args) -> int:
    try:
        lam = [float(x) for x in args.lam.split(",")]
    except ValueError:
        raise InputError(f"cannot parse --lambda {args.lam!r}") from None
    spec = Spectrum.of(lam, delta_min=args.delta_min)
    signs = args.signs or "+" * (len(lam) - 1)
    X0 = initial_state_with_spectrum(spec, signs, seed=args.seed)
    traj = simulate(X0, args.T, args.h)
    report = convexity_audit(traj, spec, tol=args.monotone_tol)
    summary = report.to_json()
    summary["signs"] = signs
    summary["seed"] = args.seed
    summary["final_offdiag_norm"] = float(np.linalg.norm(traj.b[-1]))
    if args.out:
        base = Path(args.out)
        base.with_suffix(".csv").write_text(traj.to_csv())
        base.with_suffix(".json").write_text(_dumps(summary) + "\n")
    elif args.format == "csv":
        sys.stdout.write(traj.to_csv())
    else:
        sys.stdout.write(_dumps(summary) + "\n")
    return EXIT_OK if report.ok else EXIT_FAIL


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tomei", description="Twisted Tomei manifolds and the Toda flow.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt=("text", "json"), default="text"):
        sp.add_argument("diagram", nargs="?", help="e.g. A2, B3, A1xA2")
        sp.add_argument("--diagram", dest="diagram_opt")
        sp.add_argument("--max-rank", type=int, default=4)
        sp.add_argument("--format", choices=fmt, default=default)
        sp.add_argument("--out")

    sp = sub.add_parser("actions", help="list the marked diagrams")
    common(sp)
    sp.set_defaults(func=cmd_actions)

    for name, func, helptext in (
        ("complex", cmd_complex, "dump the cell complex"),
        ("homology", cmd_homology, "homology over Z and Z/2"),
        ("unstable", cmd_unstable, "unstable chains and their closures"),
    ):
        sp = sub.add_parser(name, help=helptext)
        common(sp, default="json" if name == "complex" else "text")
        sp.add_argument("--marking", default="trivial")
        if name == "unstable":
            sp.add_argument("--w", help="Weyl word such as 121 (default: all)")
        sp.set_defaults(func=func)

    sp = sub.add_parser("check", help="audit the homology and orientability statements")
    common(sp)
    sp.add_argument("--marking", default="trivial")
    sp.add_argument("--all-markings", action="store_true")
    sp.add_argument("--jobs", type=int, default=4)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("flow", help="simulate the Toda flow")
    sp.add_argument("--lambda", dest="lam", required=True, help="eigenvalues, e.g. 1,0,-1")
    sp.add_argument("--signs", help="off-diagonal sign pattern, e.g. +-")
    sp.add_argument("--T", type=float, default=30.0)
    sp.add_argument("--h", type=float, default=0.05)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--delta-min", type=float, default=DELTA_MIN)
    sp.add_argument("--monotone-tol", type=float, default=MONOTONE_TOL)
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--out", help="path prefix for .csv and .json outputs")
    sp.set_defaults(func=cmd_flow)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (InputError, DiagramError, DegenerateSpectrum, StepTooLarge, NotAnAction, ValueError) as exc:
        print(f"tomei: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
