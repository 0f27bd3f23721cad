"""Exact homology over Z/2 and Z, and the audit of the structural theorems.

Ranks mod 2 use packed XOR elimination; integral invariants come from a
unimodular diagonalization followed by a gcd/lcm pass that restores the
divisibility chain.  Boundary matrices of these complexes are very sparse
with mostly unit entries, so the sparse path eliminates +-1 pivots first
and only densifies what is left.
"""
from __future__ import annotations

import json
from collections import Counter
import logging
from dataclasses import dataclass, field
from math import gcd

import numpy as np
from scipy import sparse

from . import kernels
from .complex import CellComplex, FaceConventionFailure, MismatchWithGenericBoundary
from .roots import WeylGroup, index_counts, unstable_support
from .signs import MarkedDynkinDiagram

log = logging.getLogger(__name__)

__all__ = [
    "SmithDecomposition",
    "HomologyResult",
    "TheoremReport",
    "rank_mod2",
    "smith_invariants",
    "prime_power_torsion",
    "homology_of",
    "betti_mod2",
    "check_theorems",
]

FACTOR_LIMIT = 10**6


# ------------------------------------------------------------------ ranks


def _sparse_gf2_rank(M: sparse.spmatrix) -> int:
    M = sparse.csr_matrix(M)
    basis: dict[int, int] = {}
    for r in range(M.shape[0]):
        lo, hi = M.indptr[r], M.indptr[r + 1]
        x = 0
        for c, v in zip(M.indices[lo:hi].tolist(), M.data[lo:hi].tolist()):
            if v % 2:
                x ^= 1 << c
        while x:
            h = x.bit_length() - 1
            b = basis.get(h)
            if b is None:
                basis[h] = x
                break
            x ^= b
    return len(basis)


def rank_mod2(M) -> int:
    """Rank of an integer matrix reduced mod 2 (dense or scipy sparse)."""
    if sparse.issparse(M):
        m, n = M.shape
        if m == 0 or n == 0:
            return 0
        if m * n > kernels.DENSE_LIMIT:
            return _sparse_gf2_rank(M)
        M = M.toarray()
    M = np.asarray(M, dtype=np.int64)
    if M.ndim != 2 or M.size == 0:
        return 0
    return kernels.gf2_rank(M)


@dataclass(frozen=True)
class SmithDecomposition:
    invariant_factors: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    @property
    def torsion_factors(self) -> tuple[int, ...]:
        return tuple(d for d in self.invariant_factors if d > 1)


def _divisibility_chain(diag) -> tuple[int, ...]:
    """Invariant factors of ``diag(d_1, ..., d_r)`` (all nonzero)."""
    units = sum(1 for d in diag if abs(d) == 1)
    rest = [abs(int(d)) for d in diag if abs(d) != 1]
    n = len(rest)
    for i in range(n):
        for j in range(i + 1, n):
            a, b = rest[i], rest[j]
            g = gcd(a, b)
            rest[i], rest[j] = g, a // g * b
    rest.sort()
    return (1,) * units + tuple(d for d in rest)


def _sparse_rows(M) -> list[dict[int, int]]:
    M = sparse.csr_matrix(M)
    out = []
    for r in range(M.shape[0]):
        lo, hi = M.indptr[r], M.indptr[r + 1]
        out.append({c: int(v) for c, v in zip(M.indices[lo:hi].tolist(), M.data[lo:hi].tolist()) if v})
    return out


def smith_invariants(M) -> SmithDecomposition:
    """Invariant factors ``d_1 | d_2 | ...`` of an integer matrix, exactly."""
    if sparse.issparse(M):
        if M.shape[0] == 0 or M.shape[1] == 0 or M.nnz == 0:
            return SmithDecomposition(())
        if M.shape[0] * M.shape[1] <= kernels.DENSE_LIMIT and kernels.compiled_backend is not None:
            diag = kernels.int_diagonal(M.toarray().astype(np.int64, copy=False))
        else:
            diag = kernels.sparse_int_diagonal(_sparse_rows(M))
    else:
        A = np.asarray(M)
        if A.ndim != 2 or A.size == 0 or not A.any():
            return SmithDecomposition(())
        if A.dtype == object:
            diag = kernels.python_backend.dense_diagonal(A.tolist())
        else:
            diag = kernels.int_diagonal(A.astype(np.int64))
    return SmithDecomposition(_divisibility_chain(diag))


def prime_power_torsion(d: int) -> tuple[list[int], bool]:
    """Split ``d`` into prime powers; ``True`` flags a cofactor above the trial bound."""
    out = []
    p = 2
    while p * p <= d and p <= FACTOR_LIMIT:
        if d % p == 0:
            q = 1
            while d % p == 0:
                d //= p
                q *= p
            out.append(q)
        p += 1 if p == 2 else 2
    unfactored = False
    if d > 1:
        unfactored = d > FACTOR_LIMIT and p <= d // p
        out.append(d)
    return sorted(out), unfactored


# --------------------------------------------------------------- homology


@dataclass
class HomologyResult:
    free_rank: list[int]
    torsion: list[list[int]]
    mod2_rank: list[int]
    unfactored: bool = False

    def uct_defects(self) -> list[int]:
        """Degrees where ``b_k(Z/2) != free_k + #2-torsion_k + #2-torsion_{k-1}``."""
        bad = []
        for k, m2 in enumerate(self.mod2_rank):
            t = sum(1 for q in self.torsion[k] if q % 2 == 0)
            t1 = sum(1 for q in self.torsion[k - 1] if q % 2 == 0) if k else 0
            if m2 != self.free_rank[k] + t + t1:
                bad.append(k)
        return bad

    @property
    def torsion_free(self) -> bool:
        return not any(self.torsion)

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * b for k, b in enumerate(self.mod2_rank))

    def describe(self) -> list[str]:
        out = []
        for k, (r, t) in enumerate(zip(self.free_rank, self.torsion)):
            parts = []
            if r:
                parts.append("Z" if r == 1 else f"Z^{r}")
            for q, c in sorted(Counter(t).items()):
                parts.append(f"Z/{q}" if c == 1 else f"(Z/{q})^{c}")
            out.append(f"H_{k} = " + (" + ".join(parts) if parts else "0"))
        return out

    def to_json(self) -> list[dict]:
        return [{"free": r, "torsion": list(t)} for r, t in zip(self.free_rank, self.torsion)]


def _boundaries(cx) -> tuple[list[int], list]:
    return [len(c) for c in cx.cells], cx.boundaries


def betti_mod2(cx) -> list[int]:
    """Mod-2 Betti numbers of a ``CellComplex`` or ``SubComplex``."""
    f, D = _boundaries(cx)
    l = len(f) - 1
    r = [0] * (l + 2)
    for k in range(1, l + 1):
        r[k] = rank_mod2(D[k])
    return [f[k] - r[k] - r[k + 1] for k in range(l + 1)]


def homology_of(cx, integral: bool = True) -> HomologyResult:
    """Homology over Z and Z/2.  With ``integral=False`` only mod 2 is computed."""
    f, D = _boundaries(cx)
    l = len(f) - 1
    r2 = [0] * (l + 2)
    rq = [0] * (l + 2)
    tors: list[list[int]] = [[] for _ in range(l + 2)]
    unfactored = False
    for k in range(1, l + 1):
        r2[k] = rank_mod2(D[k])
        if integral:
            snf = smith_invariants(D[k])
            rq[k] = snf.rank
            for d in snf.torsion_factors:
                qs, flag = prime_power_torsion(d)
                tors[k - 1].extend(qs)
                unfactored |= flag
    mod2 = [f[k] - r2[k] - r2[k + 1] for k in range(l + 1)]
    if integral:
        free = [f[k] - rq[k] - rq[k + 1] for k in range(l + 1)]
    else:
        free = [None] * (l + 1)
    return HomologyResult(free, [sorted(t) for t in tors[: l + 1]], mod2, unfactored)


# ----------------------------------------------------------------- audits


@dataclass
class Clause:
    name: str
    ok: bool | None  # None: not applicable
    detail: str = ""
    witness: object = None

    def to_json(self) -> dict:
        d = {"pass": self.ok, "detail": self.detail}
        if self.witness is not None:
            d["witness"] = self.witness
        return d


@dataclass
class TheoremReport:
    delta: MarkedDynkinDiagram
    f_vector: list[int]
    e: list[int]
    homology: HomologyResult | None
    orientable: bool | None
    clauses: list[Clause] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.ok is not False for c in self.clauses)

    def failures(self) -> list[Clause]:
        return [c for c in self.clauses if c.ok is False]

    def to_json(self) -> dict:
        h = self.homology
        return {
            "diagram": self.delta.base.to_text(),
            "marking": self.delta.to_text(),
            "f_vector": self.f_vector,
            "e": self.e,
            "betti_mod2": h.mod2_rank if h else None,
            "homology_Z": h.to_json() if h and h.free_rank[0] is not None else None,
            "orientable": self.orientable,
            "passed": self.passed,
            "theorem_checks": {c.name: c.to_json() for c in self.clauses},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True)

    def table(self) -> str:
        tag = {True: "pass", False: "FAIL", None: "n/a "}
        lines = [f"{self.delta.base.to_text()}  marking {self.delta.to_text()}"]
        for c in self.clauses:
            lines.append(f"  [{tag[c.ok]}] {c.name}: {c.detail}")
        return "\n".join(lines)


def _word(W: WeylGroup, k: int) -> str:
    return "".join(str(i + 1) for i in W.words[k]) or "e"


def _has_internal_edge(delta: MarkedDynkinDiagram, nodes) -> bool:
    return any(i in nodes and j in nodes for i, j in delta.base.edge_pairs)


def check_theorems(
    delta: MarkedDynkinDiagram,
    group: WeylGroup | None = None,
    integral: bool = True,
    closures: bool | None = None,
) -> TheoremReport:
    """Build ``M(delta)`` and audit the homology and orientability statements.

    Clauses: ``relations`` (the marking defines an action), ``boundary``
    (``d^2 = 0``), ``euler``, ``uct``, ``a`` (mod-2 Betti numbers equal
    ``e(k)``), ``b`` (positively marked: free of rank ``e(k)``), ``c``
    (orientable iff positively marked), ``d`` (unstable chain is a cycle
    iff the Levi marking is positive), ``e`` (standard marking: cycle iff
    ``W^u(w)`` is abelian), ``lemma`` (closed-form boundary of the unstable
    chains, all coefficients even) and ``closure`` (closures of unstable
    cells have the mod-2 homology of the Levi complex).
    """
    W = group if group is not None else WeylGroup(delta.base)
    e = index_counts(W)
    rel = delta.relations
    clauses = [
        Clause(
            "relations",
            bool(rel),
            "generator maps satisfy the Coxeter relations" if rel else f"violates {rel.relation}",
            None if rel else {"relation": str(rel.relation), "eps": list(rel.witness or ())},
        )
    ]
    try:
        cx = CellComplex(delta, group=W)
    except FaceConventionFailure as exc:
        clauses.append(Clause("boundary", False, str(exc)))
        return TheoremReport(delta, [], e, None, None, clauses)
    clauses.append(Clause("boundary", True, "d_{k-1} d_k = 0"))

    f = cx.f_vector
    h = homology_of(cx, integral=integral)
    chi_f = cx.euler_characteristic()
    chi_e = sum((-1) ** k * n for k, n in enumerate(e))
    clauses.append(Clause("euler", chi_f == chi_e == h.euler_characteristic(), f"chi = {chi_f}, sum (-1)^k e(k) = {chi_e}"))
    if integral:
        bad = h.uct_defects()
        clauses.append(Clause("uct", not bad, "universal coefficients" + (f" fail in degrees {bad}" if bad else ""), bad or None))

    ok_a = h.mod2_rank == e
    clauses.append(Clause("a", ok_a, f"betti mod 2 {h.mod2_rank} vs e {e}", None if ok_a else h.mod2_rank))

    pos = delta.positively_marked
    if not integral:
        clauses.append(Clause("b", None, "integral homology not computed"))
    elif pos:
        ok_b = h.torsion_free and h.free_rank == e
        clauses.append(Clause("b", ok_b, f"free ranks {h.free_rank}, torsion {h.torsion}", None if ok_b else h.to_json()))
    else:
        clauses.append(Clause("b", None, "not positively marked"))

    krank, _ = cx.orientation_kernel()
    orientable = krank == 1
    clauses.append(Clause("c", orientable == pos, f"top kernel rank {krank}, positively marked {pos}"))

    if not cx.is_action:
        for name in ("d", "e", "lemma", "closure"):
            clauses.append(Clause(name, None, "marking is not an action"))
        return TheoremReport(delta, f, e, h, orientable, clauses)

    bad_d, bad_e, bad_lemma = [], [], []
    std = delta.standard
    for w in range(W.order):
        pu = unstable_support(W, w)
        try:
            bd = cx.check_unstable_boundary(w)
            if any(v % 2 for v in bd.values()):
                bad_lemma.append(_word(W, w))
        except MismatchWithGenericBoundary:
            bad_lemma.append(_word(W, w))
            bd = cx.apply_boundary(cx.unstable_chain(w))
        cycle = not bd
        levi = cx.levi_marking(w)
        expect = levi is None or levi.positively_marked
        if cycle != expect:
            bad_d.append(_word(W, w))
        if std and cycle != (not _has_internal_edge(delta, pu)):
            bad_e.append(_word(W, w))
    clauses.append(Clause("d", not bad_d, "cycle iff Levi marking positive", bad_d or None))
    if std:
        clauses.append(Clause("e", not bad_e, "cycle iff W^u(w) abelian", bad_e or None))
    else:
        clauses.append(Clause("e", None, "not the standard marking"))
    clauses.append(Clause("lemma", not bad_lemma, "boundary equals closed form, all even", bad_lemma or None))

    if closures is None:
        closures = delta.rank <= 3
    if closures:
        bad_cl = check_closures(cx)
        clauses.append(Clause("closure", not bad_cl, "unstable closures match Levi complexes", bad_cl or None))
    else:
        clauses.append(Clause("closure", None, "skipped above rank 3"))
    return TheoremReport(delta, f, e, h, orientable, clauses)


def levi_betti(cx: CellComplex, w, cache: dict | None = None) -> list[int]:
    levi = cx.levi_marking(w)
    if levi is None:
        return [1]
    key = (levi.base, levi.edge_signs)
    if cache is not None and key in cache:
        return cache[key]
    b = betti_mod2(CellComplex(levi))
    if cache is not None:
        cache[key] = b
    return b


def check_closures(cx: CellComplex) -> list[str]:
    """Words ``w`` whose unstable closure disagrees with the Levi complex mod 2."""
    cache: dict = {}
    bad = []
    for w in range(cx.W.order):
        sub = cx.unstable_closure(w)
        got = betti_mod2(sub)[: sub.top_dim + 1]
        if got != levi_betti(cx, w, cache):
            bad.append(_word(cx.W, w))
    return bad
