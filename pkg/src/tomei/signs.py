"""Twisted sign actions of a Weyl group on ``{+1, -1}^l`` and marked diagrams.

A marking assigns to each edge ``{i, j}`` (``i < j``) an ordered pair
``(s_ij, s_ji)``.  ``s_ij = -1`` means that ``s_i`` negates ``eps_j``
whenever ``eps_i = -1``; a generator never changes its own entry, and an
entry equal to ``0`` stays ``0``.

Sign vectors are plain tuples with entries in ``{1, -1, 0}``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .roots import DiagramError, DynkinDiagram, WeylElement, coxeter_order

__all__ = [
    "InvalidMarking",
    "MarkedDynkinDiagram",
    "RelationReport",
    "validate_marking",
    "act_generator",
    "act_word",
    "verify_relations",
    "enumerate_markings",
    "twisted_actions",
    "classify_parity_matrices",
    "parse_marking",
    "trivial_marking",
    "standard_marking",
    "all_sign_vectors",
    "signs_to_str",
    "classification_table",
]

PLUS, MINUS = 1, -1


class InvalidMarking(DiagramError):
    def __init__(self, message: str, edge: tuple[int, int] | None = None):
        super().__init__(message)
        self.edge = edge


def _sign_char(s: int) -> str:
    return {1: "+", -1: "-", 0: "0"}[s]


def signs_to_str(eps: Sequence[int]) -> str:
    return "".join(_sign_char(e) for e in eps)


def all_sign_vectors(l: int, zeros: Iterable[int] = ()) -> list[tuple[int, ...]]:
    """Every vector of ``E^A``, zeros exactly on ``A``; ``+`` before ``-``."""
    zeros = set(zeros)
    free = [k for k in range(l) if k not in zeros]
    out = []
    for combo in itertools.product((PLUS, MINUS), repeat=len(free)):
        v = [0] * l
        for k, s in zip(free, combo):
            v[k] = s
        out.append(tuple(v))
    return out


@dataclass(frozen=True)
class MarkedDynkinDiagram:
    base: DynkinDiagram
    edge_signs: tuple[tuple[int, int], ...]
    _flip: tuple[frozenset[int], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        flips = [set() for _ in range(self.base.rank)]
        for ((i, j), _, _), (sij, sji) in zip(self.base.edges, self.edge_signs):
            if sij == MINUS:
                flips[i].add(j)
            if sji == MINUS:
                flips[j].add(i)
        object.__setattr__(self, "_flip", tuple(frozenset(f) for f in flips))

    @property
    def rank(self) -> int:
        return self.base.rank

    @property
    def flip_sets(self) -> tuple[frozenset[int], ...]:
        """``T_i``: entries negated by ``s_i`` when ``eps_i = -1``."""
        return self._flip

    @property
    def positively_marked(self) -> bool:
        return all(s == PLUS for pair in self.edge_signs for s in pair)

    @property
    def trivial(self) -> bool:
        return not any(self._flip)

    @property
    def standard(self) -> bool:
        C = self.base.cartan
        for ((i, j), _, _), (sij, sji) in zip(self.base.edges, self.edge_signs):
            if sij != (-1) ** int(C[j, i]) or sji != (-1) ** int(C[i, j]):
                return False
        return True

    @cached_property
    def relations(self) -> "RelationReport":
        return verify_relations(self)

    @property
    def is_action(self) -> bool:
        return self.relations.ok

    def restrict(self, nodes: Iterable[int]) -> "MarkedDynkinDiagram":
        """Marking of the induced subdiagram on ``nodes`` (relabelled)."""
        nodes = sorted(set(nodes))
        sub = self.base.subdiagram(nodes)
        keep = set(nodes)
        signs = tuple(
            pair
            for ((i, j), _, _), pair in zip(self.base.edges, self.edge_signs)
            if i in keep and j in keep
        )
        return MarkedDynkinDiagram(sub, signs)

    def to_text(self) -> str:
        parts = []
        for k, ((_, m, _), (sij, sji)) in enumerate(zip(self.base.edges, self.edge_signs)):
            txt = _sign_char(sij) if m == 1 else _sign_char(sij) + _sign_char(sji)
            parts.append(f"e{k + 1}={txt}")
        return ";".join(parts) if parts else "trivial"

    def __str__(self):
        return f"{self.base}[{self.to_text()}]"


def validate_marking(d: DynkinDiagram, raw_signs: Sequence[Sequence[int] | int]) -> MarkedDynkinDiagram:
    """Check one sign pair per edge against the bond rules.

    Single bonds need ``s_ij = s_ji`` (a bare sign is accepted), double
    bonds may not carry ``(-, -)``, triple bonds take any pair.
    """
    if len(raw_signs) != len(d.edges):
        raise InvalidMarking(f"expected {len(d.edges)} edge signs, got {len(raw_signs)}")
    pairs = []
    for ((i, j), m, _), raw in zip(d.edges, raw_signs):
        pair = (raw, raw) if isinstance(raw, int) else tuple(raw)
        if len(pair) != 2 or any(s not in (PLUS, MINUS) for s in pair):
            raise InvalidMarking(f"edge {i + 1}-{j + 1}: bad signs {raw!r}", (i, j))
        if m == 1 and pair[0] != pair[1]:
            raise InvalidMarking(f"edge {i + 1}-{j + 1}: single bond needs equal signs", (i, j))
        if m == 2 and pair == (MINUS, MINUS):
            raise InvalidMarking(f"edge {i + 1}-{j + 1}: double bond cannot be marked (-,-)", (i, j))
        pairs.append(pair)
    return MarkedDynkinDiagram(d, tuple(pairs))


def trivial_marking(d: DynkinDiagram) -> MarkedDynkinDiagram:
    return MarkedDynkinDiagram(d, tuple((PLUS, PLUS) for _ in d.edges))


def standard_marking(d: DynkinDiagram) -> MarkedDynkinDiagram:
    """Signs ``s_ij = (-1)^{C[j, i]}`` read off the Cartan matrix."""
    C = d.cartan
    pairs = tuple(((-1) ** int(C[j, i]), (-1) ** int(C[i, j])) for (i, j), _, _ in d.edges)
    return MarkedDynkinDiagram(d, pairs)


def parse_marking(d: DynkinDiagram, text: str | None) -> MarkedDynkinDiagram:
    """Parse ``trivial``, ``standard``, ``e1=-;e2=+-`` or ``[-,+-]``.

    Edges are numbered in the diagram's canonical (sorted) order.  A single
    bond takes one sign, a multiple bond takes ``s_ij s_ji`` with ``i < j``.
    """
    if text is None or text.strip().lower() in ("", "trivial", "positive"):
        return trivial_marking(d)
    text = text.strip()
    if text.lower() == "standard":
        return standard_marking(d)
    tokens: list[str | None] = [None] * len(d.edges)
    if text.startswith("["):
        if not text.endswith("]"):
            raise InvalidMarking(f"unterminated marking {text!r}")
        items = [t.strip() for t in text[1:-1].split(",") if t.strip()]
        if len(items) != len(d.edges):
            raise InvalidMarking(f"expected {len(d.edges)} edge signs, got {len(items)}")
        tokens = items
    else:
        for part in filter(None, (p.strip() for p in text.split(";"))):
            if "=" not in part or not part.lower().startswith("e"):
                raise InvalidMarking(f"bad marking item {part!r} (expected e<k>=<signs>)")
            key, value = part.split("=", 1)
            try:
                k = int(key[1:]) - 1
            except ValueError:
                raise InvalidMarking(f"bad edge label {key!r}") from None
            if not 0 <= k < len(d.edges):
                raise InvalidMarking(f"edge label {key!r} out of range")
            tokens[k] = value.strip()
    raw = []
    for k, ((i, j), m, _) in enumerate(d.edges):
        tok = tokens[k]
        if tok is None:
            raise InvalidMarking(f"edge e{k + 1} ({i + 1}-{j + 1}) has no sign", (i, j))
        if any(c not in "+-" for c in tok) or not 1 <= len(tok) <= 2:
            raise InvalidMarking(f"edge e{k + 1}: bad signs {tok!r}", (i, j))
        vals = [PLUS if c == "+" else MINUS for c in tok]
        if len(vals) == 1:
            if m != 1:
                raise InvalidMarking(f"edge e{k + 1}: multiple bond needs two signs", (i, j))
            vals = vals * 2
        raw.append(tuple(vals))
    return validate_marking(d, raw)


# ------------------------------------------------------------------ actions


def act_generator(delta: MarkedDynkinDiagram, i: int, eps: Sequence[int]) -> tuple[int, ...]:
    if eps[i] != MINUS:
        return tuple(eps)
    flips = delta.flip_sets[i]
    return tuple(-e if k in flips else e for k, e in enumerate(eps))


def act_word(delta: MarkedDynkinDiagram, w, eps: Sequence[int]) -> tuple[int, ...]:
    """Apply ``w`` given as a ``WeylElement`` or a word ``(i1, ..., ik)``.

    The word is read as the product ``s_i1 ... s_ik``, so ``s_ik`` acts first.
    """
    word = w.reduced_word if isinstance(w, WeylElement) else tuple(w)
    out = tuple(eps)
    for i in reversed(word):
        out = act_generator(delta, i, out)
    return out


@dataclass(frozen=True)
class RelationReport:
    ok: bool
    checked: int
    relation: str | None = None
    witness: tuple[int, ...] | None = None

    def __bool__(self):
        return self.ok


def _induced_maps(l: int, flips: Sequence[frozenset[int]]):
    vectors = all_sign_vectors(l)
    pos = {v: k for k, v in enumerate(vectors)}
    maps = []
    for i in range(l):
        row = []
        for v in vectors:
            if v[i] == MINUS:
                v = tuple(-e if k in flips[i] else e for k, e in enumerate(v))
            row.append(pos[v])
        maps.append(tuple(row))
    return vectors, maps


def _first_relation_failure(d: DynkinDiagram, maps, vectors):
    l = d.rank
    for i in range(l):
        for k in range(len(vectors)):
            if maps[i][maps[i][k]] != k:
                return f"s{i + 1}^2", vectors[k]
    for i in range(l):
        for j in range(i + 1, l):
            m = coxeter_order(d.multiplicity(i, j))
            for k in range(len(vectors)):
                x = k
                for _ in range(m):
                    x = maps[i][maps[j][x]]
                if x != k:
                    return f"(s{i + 1} s{j + 1})^{m}", vectors[k]
    return None


def verify_relations(delta: MarkedDynkinDiagram) -> RelationReport:
    """Check the Coxeter relations and the automorphism property on all of ``E``."""
    l = delta.rank
    vectors, maps = _induced_maps(l, delta.flip_sets)
    failure = _first_relation_failure(delta.base, maps, vectors)
    checked = l * len(vectors) * (l + 1) // 2
    if failure:
        return RelationReport(False, checked, *failure)
    for i in range(l):
        for u in vectors:
            for v in vectors:
                prod = tuple(a * b for a, b in zip(u, v))
                lhs = act_generator(delta, i, prod)
                su, sv = act_generator(delta, i, u), act_generator(delta, i, v)
                if lhs != tuple(a * b for a, b in zip(su, sv)):
                    return RelationReport(False, checked, f"s{i + 1} automorphism", u + v)
    return RelationReport(True, checked)


def _edge_choices(m: int) -> list[tuple[int, int]]:
    if m == 1:
        return [(PLUS, PLUS), (MINUS, MINUS)]
    if m == 2:
        return [(PLUS, PLUS), (PLUS, MINUS), (MINUS, PLUS)]
    return [(PLUS, PLUS), (PLUS, MINUS), (MINUS, PLUS), (MINUS, MINUS)]


def enumerate_markings(d: DynkinDiagram) -> list[MarkedDynkinDiagram]:
    """Every marked diagram allowed by the bond rules, trivial marking first.

    The count is ``2^a 3^b`` (``a`` single, ``b`` double bonds) times ``4``
    per triple bond.  Whether a marking really defines a ``W`` action is a
    separate question answered by ``verify_relations``; see
    ``twisted_actions``.
    """
    choices = [_edge_choices(m) for _, m, _ in d.edges]
    return [MarkedDynkinDiagram(d, tuple(c)) for c in itertools.product(*choices)]


def twisted_actions(d: DynkinDiagram) -> list[MarkedDynkinDiagram]:
    """Markings whose generator maps satisfy all Coxeter relations."""
    return [m for m in enumerate_markings(d) if m.is_action]


@dataclass(frozen=True)
class ParityClassification:
    diagram: DynkinDiagram
    actions: frozenset[tuple[frozenset[int], ...]]

    @property
    def count(self) -> int:
        return len(self.actions)

    def edge_supported(self) -> bool:
        """True when every action only flips along diagram edges."""
        for flips in self.actions:
            for i, f in enumerate(flips):
                if any(self.diagram.multiplicity(i, j) == 0 for j in f):
                    return False
        return True


def classify_parity_matrices(d: DynkinDiagram, max_rank: int = 4) -> ParityClassification:
    """Brute force over all off-diagonal parity matrices ``a_ji mod 2``.

    Every parity pattern induces generator maps on ``E``; those satisfying
    all Coxeter relations are kept.  Distinct patterns give distinct maps,
    so the result is the set of twisted sign actions with no assumption
    about which pairs may interact.
    """
    l = d.rank
    if l > max_rank:
        raise ValueError(f"rank {l} exceeds brute-force cap {max_rank}")
    pairs = [(i, j) for i in range(l) for j in range(l) if i != j]
    found = set()
    for bits in itertools.product((0, 1), repeat=len(pairs)):
        flips = [set() for _ in range(l)]
        for (i, j), b in zip(pairs, bits):
            if b:
                flips[i].add(j)
        frozen = tuple(frozenset(f) for f in flips)
        vectors, maps = _induced_maps(l, frozen)
        if _first_relation_failure(d, maps, vectors) is None:
            found.add(frozen)
    return ParityClassification(d, frozenset(found))


def classification_table(d: DynkinDiagram) -> dict:
    rows = []
    for m in enumerate_markings(d):
        rows.append(
            {
                "marking": m.to_text(),
                "edge_signs": [[int(a), int(b)] for a, b in m.edge_signs],
                "trivial": m.trivial,
                "standard": m.standard,
                "positively_marked": m.positively_marked,
                "is_action": m.is_action,
                "failed_relation": m.relations.relation,
            }
        )
    return {
        "diagram": d.to_text(),
        "count": len(rows),
        "action_count": sum(r["is_action"] for r in rows),
        "markings": rows,
    }
