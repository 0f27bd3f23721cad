"""Finite root systems and Weyl groups in the simple-root basis.

Weyl group elements are stored as exact integer matrices acting on
simple-root coordinates.  The group is enumerated breadth first from the
identity by right multiplication with the simple reflections, so lengths
are BFS depths and reduced words come from BFS parents.  Generators are
numbered from 0 internally; text formats use 1-based labels.
"""
from __future__ import annotations

import math
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "DiagramError",
    "NonFiniteType",
    "GroupTooLarge",
    "DynkinDiagram",
    "WeylElement",
    "WeylGroup",
    "cartan_from_diagram",
    "enumerate_weyl",
    "parse_diagram",
    "simple_diagram",
    "unstable_support",
    "index_counts",
    "min_coset_rep",
    "coxeter_order",
    "classification_order",
]

DEFAULT_MAX_RANK = 6
DEFAULT_MAX_ELEMENTS = 10**6


class DiagramError(ValueError):
    """Malformed diagram text or inconsistent edge data."""


class NonFiniteType(DiagramError):
    """The Cartan matrix is not of finite type."""


class GroupTooLarge(RuntimeError):
    pass


@dataclass(frozen=True)
class DynkinDiagram:
    """Dynkin diagram on nodes ``0..rank-1``.

    ``edges`` maps a sorted pair ``(i, j)`` to ``(m, short)`` where ``m`` is
    the bond multiplicity and ``short`` is the node carrying the shorter
    root (``None`` for simple bonds).
    """

    rank: int
    edges: tuple[tuple[tuple[int, int], int, int | None], ...]
    type_label: str | None = None

    def __post_init__(self):
        if self.rank < 1:
            raise DiagramError("diagram must have rank >= 1")
        seen = set()
        for (i, j), m, short in self.edges:
            if not (0 <= i < j < self.rank):
                raise DiagramError(f"bad edge {i + 1}-{j + 1}")
            if (i, j) in seen:
                raise DiagramError(f"duplicate edge {i + 1}-{j + 1}")
            seen.add((i, j))
            if m not in (1, 2, 3):
                raise DiagramError(f"edge {i + 1}-{j + 1}: multiplicity {m} not in 1..3")
            if m == 1 and short is not None:
                raise DiagramError(f"edge {i + 1}-{j + 1}: simple bond cannot carry an arrow")
            if m > 1 and short not in (i, j):
                raise DiagramError(f"edge {i + 1}-{j + 1}: multiple bond needs an arrow")

    @property
    def edge_pairs(self) -> list[tuple[int, int]]:
        return [e for e, _, _ in self.edges]

    def multiplicity(self, i: int, j: int) -> int:
        key = (min(i, j), max(i, j))
        for e, m, _ in self.edges:
            if e == key:
                return m
        return 0

    def neighbors(self, i: int) -> list[int]:
        out = []
        for (a, b), _, _ in self.edges:
            if a == i:
                out.append(b)
            elif b == i:
                out.append(a)
        return sorted(out)

    def components(self) -> list[list[int]]:
        parent = list(range(self.rank))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for (i, j), _, _ in self.edges:
            parent[find(i)] = find(j)
        groups: dict[int, list[int]] = {}
        for v in range(self.rank):
            groups.setdefault(find(v), []).append(v)
        return sorted(groups.values())

    def subdiagram(self, nodes: Iterable[int]) -> "DynkinDiagram":
        """Induced subdiagram, nodes relabelled in increasing order."""
        nodes = sorted(set(nodes))
        if not nodes:
            raise DiagramError("empty subdiagram")
        pos = {v: k for k, v in enumerate(nodes)}
        edges = []
        for (i, j), m, short in self.edges:
            if i in pos and j in pos:
                edges.append(((pos[i], pos[j]), m, None if short is None else pos[short]))
        return DynkinDiagram(len(nodes), tuple(edges))

    @cached_property
    def cartan(self) -> np.ndarray:
        return cartan_from_diagram(self)

    def to_text(self) -> str:
        if self.type_label:
            return self.type_label
        parts = []
        for (i, j), m, short in self.edges:
            arrow = "" if short is None else (">" if short == j else "<")
            parts.append(f"{i + 1}-{j + 1}:{m}{arrow}")
        return f"rank={self.rank}; edges=" + ",".join(parts)

    def __str__(self):
        return self.to_text()


def cartan_from_diagram(d: DynkinDiagram) -> np.ndarray:
    """Cartan matrix ``C[i, j] = <alpha_i, alpha_j^vee>``.

    For a multiple bond the long root ``L`` and short root ``s`` get
    ``C[L, s] = -m`` and ``C[s, L] = -1``.

    Raises
    ------
    NonFiniteType
        If the symmetrized matrix is not positive definite.
    """
    n = d.rank
    C = 2 * np.eye(n, dtype=np.int64)
    for (i, j), m, short in d.edges:
        if m == 1:
            C[i, j] = C[j, i] = -1
        else:
            long_ = j if short == i else i
            C[long_, short] = -m
            C[short, long_] = -1
    sym = np.where(C < 0, -np.sqrt(np.abs(C * C.T)), C).astype(float)
    if np.linalg.eigvalsh(sym).min() <= 1e-9:
        raise NonFiniteType(f"{d.to_text()} is not of finite type")
    return C


def coxeter_order(m: int) -> int:
    """Order of ``s_i s_j`` for bond multiplicity ``m`` (0 = no edge)."""
    return {0: 2, 1: 3, 2: 4, 3: 6}[m]


# --------------------------------------------------------------------- parsing

_SIMPLE_RE = re.compile(r"^([ABCDEFG])(\d+)$")


def _chain(n: int) -> list[tuple[int, int]]:
    return [(k, k + 1) for k in range(n - 1)]


def simple_diagram(kind: str, n: int) -> DynkinDiagram:
    """Standard (Bourbaki-numbered) diagram of a simple type."""
    kind = kind.upper()
    label = f"{kind}{n}"
    edges: list[tuple[tuple[int, int], int, int | None]]
    if kind == "A" and n >= 1:
        edges = [(e, 1, None) for e in _chain(n)]
    elif kind == "B" and n >= 2:
        # alpha_n short
        edges = [(e, 1, None) for e in _chain(n - 1)] + [((n - 2, n - 1), 2, n - 1)]
    elif kind == "C" and n >= 2:
        # alpha_n long
        edges = [(e, 1, None) for e in _chain(n - 1)] + [((n - 2, n - 1), 2, n - 2)]
    elif kind == "D" and n >= 4:
        edges = [(e, 1, None) for e in _chain(n - 1)] + [((n - 3, n - 1), 1, None)]
    elif kind == "E" and n in (6, 7, 8):
        pairs = [(0, 2), (1, 3), (2, 3)] + [(k, k + 1) for k in range(3, n - 1)]
        edges = [(p, 1, None) for p in sorted(pairs)]
    elif kind == "F" and n == 4:
        edges = [((0, 1), 1, None), ((1, 2), 2, 2), ((2, 3), 1, None)]
    elif kind == "G" and n == 2:
        # alpha_1 short, so C[1, 0] = -3
        edges = [((0, 1), 3, 0)]
    else:
        raise DiagramError(f"unknown type {label}")
    return DynkinDiagram(n, tuple(sorted(edges)), label)


def _product(diagrams: Sequence[DynkinDiagram]) -> DynkinDiagram:
    edges = []
    offset = 0
    for d in diagrams:
        for (i, j), m, short in d.edges:
            edges.append(((i + offset, j + offset), m, None if short is None else short + offset))
        offset += d.rank
    label = "x".join(d.type_label or "?" for d in diagrams)
    if any(d.type_label is None for d in diagrams):
        label = None
    return DynkinDiagram(offset, tuple(sorted(edges)), label)


def _parse_edge_list(text: str) -> DynkinDiagram:
    fields = {}
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise DiagramError(f"expected key=value, got {part!r}")
        key, value = part.split("=", 1)
        fields[key.strip().lower()] = value.strip()
    if "rank" not in fields:
        raise DiagramError("edge-list form needs rank=<n>")
    try:
        rank = int(fields["rank"])
    except ValueError:
        raise DiagramError(f"bad rank {fields['rank']!r}") from None
    edges = []
    spec = fields.get("edges", "")
    for item in filter(None, (s.strip() for s in spec.split(","))):
        m_ = re.fullmatch(r"(\d+)-(\d+)(?::(\d)([<>]?))?", item)
        if not m_:
            raise DiagramError(f"bad edge {item!r} (expected i-j:m with optional < or >)")
        a, b = int(m_.group(1)) - 1, int(m_.group(2)) - 1
        mult = int(m_.group(3) or 1)
        arrow = m_.group(4) or ""
        if a == b:
            raise DiagramError(f"loop edge {item!r}")
        short = None
        if arrow == ">":
            short = b
        elif arrow == "<":
            short = a
        i, j = min(a, b), max(a, b)
        edges.append(((i, j), mult, short))
    return DynkinDiagram(rank, tuple(sorted(edges)))


def parse_diagram(text: str, max_rank: int = DEFAULT_MAX_RANK) -> DynkinDiagram:
    """Parse ``A3``, ``B2``, ``A1xA2`` or ``rank=3; edges=1-2:1,2-3:2>``.

    In the edge-list form ``i-j:m`` gives a bond of multiplicity ``m``;
    ``>`` points from ``i`` toward the shorter root ``j`` and ``<`` points
    toward ``i``.
    """
    text = text.strip()
    if not text:
        raise DiagramError("empty diagram")
    if "=" in text:
        d = _parse_edge_list(text)
    else:
        parts = re.split(r"\s*[x*×]\s*", text)
        simple = []
        for p in parts:
            m_ = _SIMPLE_RE.match(p.upper())
            if not m_:
                raise DiagramError(f"cannot parse diagram component {p!r}")
            simple.append(simple_diagram(m_.group(1), int(m_.group(2))))
        d = simple[0] if len(simple) == 1 else _product(simple)
    if d.rank > max_rank:
        raise DiagramError(f"rank {d.rank} exceeds cap {max_rank}")
    cartan_from_diagram(d)
    return d


_ORDERS = {
    "A": lambda n: math.factorial(n + 1),
    "B": lambda n: 2**n * math.factorial(n),
    "C": lambda n: 2**n * math.factorial(n),
    "D": lambda n: 2 ** (n - 1) * math.factorial(n),
    "E": lambda n: {6: 51840, 7: 2903040, 8: 696729600}[n],
    "F": lambda n: 1152,
    "G": lambda n: 12,
}


def classification_order(type_label: str) -> int:
    """|W| from the classification, for labels like ``B3`` or ``A1xA2``."""
    total = 1
    for p in type_label.split("x"):
        m_ = _SIMPLE_RE.match(p)
        if not m_:
            raise DiagramError(f"unknown label {p!r}")
        total *= _ORDERS[m_.group(1)](int(m_.group(2)))
    return total


# ----------------------------------------------------------------- Weyl group


@dataclass(frozen=True)
class WeylElement:
    matrix: tuple[tuple[int, ...], ...]
    length: int = field(compare=False)
    reduced_word: tuple[int, ...] = field(compare=False)
    index: int = field(compare=False, default=-1)

    def word_str(self) -> str:
        return "".join(f"s{i + 1}" for i in self.reduced_word) or "e"

    def __repr__(self):
        return f"WeylElement({self.word_str()})"


class WeylGroup:
    """Fully enumerated finite Weyl group.

    Elements are addressed by their BFS index; ``0`` is the identity.
    ``right[i][k]`` is the index of ``w_k s_i`` and ``left[i][k]`` the
    index of ``s_i w_k``.
    """

    def __init__(self, diagram: DynkinDiagram, max_elements: int = DEFAULT_MAX_ELEMENTS):
        self.diagram = diagram
        self.rank = l = diagram.rank
        self.cartan = cartan_from_diagram(diagram)
        gens = []
        for i in range(l):
            s = np.eye(l, dtype=np.int64)
            # s_i(alpha_j) = alpha_j - C[j, i] alpha_i, stored column-wise
            s[i, :] -= self.cartan[:, i]
            gens.append(s)
        self.generators = gens

        ident = np.eye(l, dtype=np.int64)
        mats = [ident]
        lookup = {ident.tobytes(): 0}
        lengths = [0]
        words: list[tuple[int, ...]] = [()]
        right = [[-1] for _ in range(l)]
        queue = deque([0])
        while queue:
            k = queue.popleft()
            for i in range(l):
                if right[i][k] >= 0:
                    continue
                prod = mats[k] @ gens[i]
                key = prod.tobytes()
                idx = lookup.get(key)
                if idx is None:
                    idx = len(mats)
                    if idx >= max_elements:
                        raise GroupTooLarge(f"Weyl group exceeds {max_elements} elements")
                    lookup[key] = idx
                    mats.append(prod)
                    lengths.append(lengths[k] + 1)
                    words.append(words[k] + (i,))
                    for row in right:
                        row.append(-1)
                    queue.append(idx)
                right[i][k] = idx
                right[i][idx] = k
        self._mats = mats
        self._lookup = lookup
        self.lengths = lengths
        self.words = words
        self.right = right
        self.order = len(mats)
        self.left = [[lookup[(gens[i] @ m).tobytes()] for m in mats] for i in range(l)]
        self.inverse = [self.from_word(reversed(w)) for w in words]
        self.longest = max(range(self.order), key=lengths.__getitem__)

    # element access -------------------------------------------------------
    def element(self, k: int) -> WeylElement:
        m = self._mats[k]
        return WeylElement(tuple(map(tuple, m.tolist())), self.lengths[k], self.words[k], k)

    @property
    def elements(self) -> list[WeylElement]:
        return [self.element(k) for k in range(self.order)]

    def matrix(self, k: int) -> np.ndarray:
        return self._mats[k].copy()

    def index_of(self, w) -> int:
        """BFS index of a ``WeylElement``, an integer matrix or an index."""
        if isinstance(w, (int, np.integer)):
            return int(w)
        if isinstance(w, WeylElement):
            m = np.array(w.matrix, dtype=np.int64)
        else:
            m = np.asarray(w, dtype=np.int64)
        return self._lookup[m.tobytes()]

    def from_word(self, word: Iterable[int]) -> int:
        k = 0
        for i in word:
            k = self.right[i][k]
        return k

    def multiply(self, a: int, b: int) -> int:
        for i in self.words[b]:
            a = self.right[i][a]
        return a

    def length(self, k: int) -> int:
        return self.lengths[k]

    def parabolic(self, S: Iterable[int]) -> list[int]:
        """Elements of the parabolic subgroup ``W_S``."""
        S = sorted(set(S))
        seen = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for k in frontier:
                for i in S:
                    j = self.right[i][k]
                    if j not in seen:
                        seen.add(j)
                        nxt.append(j)
            frontier = nxt
        return sorted(seen)

    def is_min_coset_rep(self, k: int, S: Iterable[int]) -> bool:
        lk = self.lengths[k]
        return all(self.lengths[self.right[i][k]] > lk for i in S)

    def __len__(self):
        return self.order

    def __repr__(self):
        return f"WeylGroup({self.diagram}, order={self.order})"


def enumerate_weyl(d: DynkinDiagram, max_elements: int = DEFAULT_MAX_ELEMENTS) -> WeylGroup:
    return WeylGroup(d, max_elements=max_elements)


def unstable_support(W: WeylGroup, w) -> frozenset[int]:
    """Simple roots ``i`` with ``l(s_i w) > l(w)``; its size is the index of ``w``."""
    k = W.index_of(w)
    lk = W.lengths[k]
    return frozenset(i for i in range(W.rank) if W.lengths[W.left[i][k]] > lk)


def index_counts(W: WeylGroup) -> list[int]:
    counts = [0] * (W.rank + 1)
    for k in range(W.order):
        counts[len(unstable_support(W, k))] += 1
    return counts


def min_coset_rep(W: WeylGroup, w, S: Iterable[int]) -> tuple[int, int]:
    """Split ``w = w_min * tail`` with ``tail`` in ``W_S`` and ``w_min`` minimal."""
    S = tuple(sorted(set(S)))
    k = W.index_of(w)
    tail = 0
    changed = True
    while changed:
        changed = False
        for i in S:
            j = W.right[i][k]
            if W.lengths[j] < W.lengths[k]:
                k = j
                tail = W.left[i][tail]
                changed = True
                break
    return k, tail


def subsets(items: Sequence[int]) -> list[frozenset[int]]:
    out = []
    for r in range(len(items) + 1):
        out.extend(frozenset(c) for c in combinations(items, r))
    return out
