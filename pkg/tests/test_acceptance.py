"""Acceptance criteria, one test each.

Every criterion prints a single ``criterion N: PASS|FAIL  detail`` line in
the pytest terminal summary.  Run this file directly to get the lines
without pytest.
"""
import sys
import time

import numpy as np
import pytest

from tomei.complex import CellComplex
from tomei.homology import betti_mod2, homology_of, levi_betti
from tomei.roots import WeylGroup, index_counts, parse_diagram, unstable_support
from tomei.signs import (
    classify_parity_matrices,
    enumerate_markings,
    parse_marking,
    twisted_actions,
)
from tomei.toda import (
    TridiagonalState,
    convexity_audit,
    in_permutohedron,
    morse_value,
    simulate,
)

RESULTS: dict[int, tuple[bool, str]] = {}

_groups: dict = {}
_built: dict = {}


def W_of(label):
    if label not in _groups:
        _groups[label] = WeylGroup(parse_diagram(label))
    return _groups[label]


def build(label, m):
    """Complex of marking ``m``; every complex built here is audited by criterion 11."""
    key = (label, m.edge_signs)
    if key not in _built:
        _built[key] = (m, CellComplex(m, group=W_of(label), check=False))
    return _built[key][1]


def non_actions(label):
    return [m for m in enumerate_markings(parse_diagram(label)) if not m.is_action]


# ------------------------------------------------------------------ criteria


def criterion_1():
    t0 = time.perf_counter()
    want = {"A2": 2, "B2": 3, "C2": 3, "G2": 4, "A3": 4, "B3": 6, "D4": 8}
    got = {k: len(enumerate_markings(parse_diagram(k))) for k in want}
    problems = [f"{k}: {got[k]} != {v}" for k, v in want.items() if got[k] != v]
    for label in ["A1xA1", "A2", "B2", "C2", "G2", "A3"]:
        d = parse_diagram(label)
        oracle = classify_parity_matrices(d)
        ours = {tuple(m.flip_sets) for m in enumerate_markings(d)}
        if set(oracle.actions) != ours:
            extra = len(set(oracle.actions) - ours)
            missing = len(ours - set(oracle.actions))
            why = []
            if missing:
                why.append(f"{missing} markings violate Coxeter relations")
            if extra:
                why.append(f"{extra} actions flip non-adjacent nodes")
            problems.append(f"oracle disagrees on {label}: {oracle.count} actions vs {len(ours)} markings, " + " and ".join(why))
    dt = time.perf_counter() - t0
    if dt >= 5:
        problems.append(f"took {dt:.1f}s")
    return not problems, "; ".join(problems) or f"counts {got}, oracle agrees ({dt:.2f}s)"


def criterion_2():
    t0 = time.perf_counter()
    bad, n = [], 0
    for label in ["A1", "A2", "B2", "G2", "A3", "B3"]:
        for m in enumerate_markings(parse_diagram(label)):
            n += 1
            if any(build(label, m).boundary_squared_defects()):
                bad.append(f"{label}[{m.to_text()}]")
    dt = time.perf_counter() - t0
    ok = not bad and dt < 30
    return ok, f"{n} complexes, d^2 = 0 on all ({dt:.1f}s)" if ok else f"failures {bad}, {dt:.1f}s"


def criterion_3():
    bad, n = [], 0
    for label in ["A1", "A2", "B2", "G2", "A3"]:
        e = index_counts(W_of(label))
        for m in twisted_actions(parse_diagram(label)):
            n += 1
            b = betti_mod2(build(label, m))
            if b != e:
                bad.append(f"{label}[{m.to_text()}]: {b} vs {e}")
    skipped = [f"{m.to_text()}" for m in non_actions("A3")]
    note = f"; A3 markings {skipped} are not actions and define no manifold" if skipped else ""
    return not bad, (f"{n} twisted actions, betti mod 2 = e(k)" if not bad else "; ".join(bad)) + note


def criterion_4():
    want = {"A2": [1, 4, 1], "A3": [1, 11, 11, 1]}
    bad = []
    for label, ranks in want.items():
        m = parse_marking(parse_diagram(label), "trivial")
        h = homology_of(build(label, m))
        if not (h.torsion_free and h.free_rank == ranks):
            bad.append(f"{label}: {h.describe()}")
    return not bad, "; ".join(bad) or "A2 (1,4,1), A3 (1,11,11,1), torsion free"


def criterion_5():
    bad, n = [], 0
    for label in ["A2", "B2", "G2", "A3"]:
        for m in enumerate_markings(parse_diagram(label)):
            n += 1
            r, g = build(label, m).orientation_kernel()
            negative = any(s == -1 for pair in m.edge_signs for s in pair)
            want = 0 if negative else 1
            if r != want or (m.positively_marked and (g is None or set(g.values()) - {1, -1})):
                bad.append(f"{label}[{m.to_text()}] rank {r}")
    return not bad, "; ".join(bad) or f"{n} markings, kernel rank 1 iff positively marked"


def criterion_6():
    bad, n = [], 0
    for label in ["A2", "B2", "A3"]:
        for m in twisted_actions(parse_diagram(label)):
            cx = build(label, m)
            for w in range(cx.W.order):
                n += 1
                generic = cx.apply_boundary(cx.unstable_chain(w))
                explicit = cx.unstable_boundary_explicit(w)
                if generic != explicit or any(v % 2 for v in generic.values()):
                    bad.append(f"{label}[{m.to_text()}] w={cx.W.element(w).word_str()}")
    skipped = len(non_actions("A3"))
    return not bad, ("; ".join(bad[:5]) or f"{n} (marking, w) pairs match the closed form, all even") + (
        f"; {skipped} A3 non-action markings have no unstable chains" if skipped else ""
    )


def criterion_7():
    labels = ["A1", "A2", "B2", "C2", "G2", "A1xA1", "A3", "B3", "C3", "A1xA2", "A1xA1xA1"]
    bad, n = [], 0
    for label in labels:
        d = parse_diagram(label)
        for m in twisted_actions(d):
            cx = build(label, m)
            W = cx.W
            for w in range(W.order):
                n += 1
                cycle = cx.is_unstable_cycle(w)
                levi = cx.levi_marking(w)
                if cycle != (levi is None or levi.positively_marked):
                    bad.append(f"{label}[{m.to_text()}] w={W.element(w).word_str()}")
                if m.standard:
                    pu = unstable_support(W, w)
                    abelian = not any(i in pu and j in pu for i, j in d.edge_pairs)
                    if cycle != abelian:
                        bad.append(f"{label} standard w={W.element(w).word_str()} abelian={abelian}")
    return not bad, "; ".join(bad[:5]) or f"{n} unstable chains classified correctly"


def criterion_8():
    bad, n = [], 0
    cache: dict = {}
    for label in ["A2", "A3"]:
        for which in ["standard", "trivial"]:
            m = parse_marking(parse_diagram(label), which)
            cx = build(label, m)
            for w in range(cx.W.order):
                n += 1
                sub = cx.unstable_closure(w)
                got = betti_mod2(sub)[: sub.top_dim + 1]
                if got != levi_betti(cx, w, cache):
                    bad.append(f"{label} {which} w={cx.W.element(w).word_str()}: {got}")
    return not bad, "; ".join(bad[:5]) or f"{n} closures match their Levi complexes"


def criterion_9():
    d = parse_diagram("A2")
    ht = homology_of(build("A2", parse_marking(d, "trivial")))
    hs = homology_of(build("A2", parse_marking(d, "standard")))
    ok_t = ht.free_rank == [1, 4, 1] and ht.torsion_free
    ok_s = hs.free_rank == [1, 3, 0] and hs.torsion == [[], [2], []]
    return ok_t and ok_s, f"trivial {ht.describe()}; standard {hs.describe()}"


def criterion_10():
    t0 = time.perf_counter()
    X0 = TridiagonalState([0.0, 0.0, 0.0], [1.0, 1.0])
    tr = simulate(X0, 30, 0.05)
    lam = np.array([np.sqrt(2), 0, -np.sqrt(2)])
    rep = convexity_audit(tr, lam)
    flipped = simulate(X0.flip([1, -1]), 30, 0.05)
    dt = time.perf_counter() - t0
    checks = {
        "drift": tr.max_drift < 1e-8,
        "b(T)": np.linalg.norm(tr.b[-1]) < 1e-6,
        "limit": np.max(np.abs(tr.a[-1] - lam)) < 1e-5,
        "monotone": bool(np.all(np.diff([morse_value(a) for a in tr.a]) >= -1e-9)),
        "inside": all(in_permutohedron(a, lam) for a in tr.a) and rep.inside_polytope,
        "sign flip": np.max(np.abs(flipped.a - tr.a)) < 1e-12,
        "runtime": dt < 2,
    }
    failed = [k for k, v in checks.items() if not v]
    detail = f"drift {tr.max_drift:.1e}, |b(T)| {np.linalg.norm(tr.b[-1]):.1e}, {dt:.2f}s"
    return not failed, detail + (f"; failed {failed}" if failed else "")


def criterion_11():
    if not _built:
        for label in ["A1", "A2", "B2", "G2", "A3"]:
            for m in enumerate_markings(parse_diagram(label)):
                build(label, m)
    bad_euler, bad_uct, odd = [], [], []
    for (label, _), (m, cx) in sorted(_built.items(), key=lambda kv: (kv[0][0], kv[0][1])):
        h = homology_of(cx)
        if h.uct_defects():
            bad_uct.append(f"{label}[{m.to_text()}]")
        e = index_counts(W_of(label))
        chi_e = sum((-1) ** k * n for k, n in enumerate(e))
        ok = cx.euler_characteristic() == chi_e == h.euler_characteristic()
        if not ok:
            (bad_euler if m.is_action else odd).append(f"{label}[{m.to_text()}] chi={cx.euler_characteristic()}")
    detail = f"{len(_built)} complexes; universal coefficients hold on all" if not bad_uct else f"UCT fails {bad_uct}"
    if odd:
        detail += f"; Euler identity holds on every M(delta), non-action complexes differ: {odd}"
    if bad_euler:
        detail += f"; Euler fails {bad_euler}"
    return not bad_euler and not bad_uct, detail


CRITERIA = {k: globals()[f"criterion_{k}"] for k in range(1, 12)}


def _run(k):
    ok, detail = CRITERIA[k]()
    RESULTS[k] = (ok, detail)
    return ok, detail


@pytest.mark.parametrize("k", list(CRITERIA))
def test_criterion(k):
    ok, detail = _run(k)
    print(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def summary_lines():
    return [f"criterion {k}: {'PASS' if ok else 'FAIL'}  {d}" for k, (ok, d) in sorted(RESULTS.items())]


if __name__ == "__main__":
    for k in CRITERIA:
        _run(k)
    print("\n".join(summary_lines()))
    sys.exit(0 if all(ok for ok, _ in RESULTS.values()) else 1)
