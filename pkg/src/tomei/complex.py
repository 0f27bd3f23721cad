"""The twisted Tomei manifold ``M(delta)`` as a finite cell complex.

Every chamber of the polytope is a combinatorial cube: for each simple
root ``i`` it has an internal wall (the reflecting hyperplane) and an
external wall (a facet of the polytope).  A cell ``(eps; A; S; w)`` is the
face of the chamber ``(eps, w)`` lying on the external walls in ``A`` and
the internal walls in ``S``; its dimension is ``l - |A| - |S|``.

Gluing identifies ``(eps, w) ~ (s_i eps, w s_i)`` across an internal wall
``i in S`` and makes ``eps_i`` irrelevant across an external wall
``i in A``.  A canonical cell has ``eps`` zero exactly on ``A`` and ``w`` a
minimal representative of ``w W_S``.

Both gluings are the identity in the chamber coordinates pulled back to
the dominant chamber, so orienting each cell by its free coordinates
gives a cubical chain complex.  Cells are stored in the signed basis
``f = (prod of free eps) * e`` where the external faces of a cell have
coefficient ``-(-1)^p eps_j`` and the internal ones ``(-1)^p eps_j tau``,
``p`` the position of ``j`` among the free roots and ``tau`` the sign
change of the free entries caused by canonicalizing the face.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, NamedTuple

import numpy as np
from scipy import sparse

from .roots import WeylGroup, subsets, unstable_support
from .signs import MarkedDynkinDiagram, act_generator, all_sign_vectors, signs_to_str

log = logging.getLogger(__name__)

__all__ = [
    "Cell",
    "CellComplex",
    "SubComplex",
    "FaceConventionFailure",
    "MismatchWithGenericBoundary",
    "NotAnAction",
    "build_complex",
    "calibrate_convention",
]

CONVENTIONS = ("relative", "absolute")


class FaceConventionFailure(RuntimeError):
    pass


class MismatchWithGenericBoundary(RuntimeError):
    pass


class NotAnAction(ValueError):
    """The marking's generator maps violate a Coxeter relation."""


class Cell(NamedTuple):
    eps: tuple[int, ...]
    A: frozenset[int]
    S: frozenset[int]
    w: int

    @property
    def dim(self) -> int:
        return len(self.eps) - len(self.A) - len(self.S)

    def free(self) -> list[int]:
        return [k for k in range(len(self.eps)) if k not in self.A and k not in self.S]


Chain = dict  # Cell -> nonzero int


def _add(chain: dict, cell: Cell, coef: int) -> None:
    v = chain.get(cell, 0) + coef
    if v:
        chain[cell] = v
    else:
        chain.pop(cell, None)


class CellComplex:
    """Cells and integer boundary matrices of ``M(delta)``.

    Parameters
    ----------
    delta : MarkedDynkinDiagram
    group : WeylGroup, optional
        Reused when given; must belong to ``delta.base``.
    convention : {"relative", "absolute"}
        Whether the sign ``(-1)^p`` uses the position of the root among the
        free roots of the cell or its absolute index.  Only the relative
        reading satisfies ``d^2 = 0``.
    transport : bool
        Include the sign change ``tau`` picked up when an internal face is
        canonicalized.  Switching it off reproduces the untwisted formula.
    check : bool
        Verify ``d_{k-1} d_k = 0`` and raise ``FaceConventionFailure``.
    """

    def __init__(
        self,
        delta: MarkedDynkinDiagram,
        group: WeylGroup | None = None,
        convention: str = "relative",
        transport: bool = True,
        check: bool = True,
        max_cells: int = 2_000_000,
    ):
        if convention not in CONVENTIONS:
            raise ValueError(f"unknown convention {convention!r}")
        self.delta = delta
        self.W = group if group is not None else WeylGroup(delta.base)
        if self.W.diagram != delta.base:
            raise ValueError("Weyl group does not match the marking's diagram")
        self.rank = delta.rank
        self.convention = convention
        self.transport = transport
        self.is_action = delta.is_action
        self._canon: dict = {}
        self._enumerate(max_cells)
        self.boundaries = [None] + [self._boundary(k) for k in range(1, self.rank + 1)]
        if check:
            self.check_boundary_squared()

    # ---------------------------------------------------------- canonical form
    def canonicalize(self, eps: Iterable[int], A: Iterable[int], S: Iterable[int], w) -> Cell:
        A = frozenset(A)
        S = frozenset(S)
        if A & S:
            raise ValueError("A and S must be disjoint")
        w = self.W.index_of(w)
        eps = tuple(0 if k in A else int(e) for k, e in enumerate(eps))
        if not S:
            return Cell(eps, A, S, w)
        key = (eps, A, S, w)
        hit = self._canon.get(key)
        if hit is not None:
            return hit
        if self.is_action:
            cell = self._reduce(eps, A, S, w)
        else:
            cell = self._orbit_min(eps, A, S, w)
        self._canon[key] = cell
        return cell

    def _reduce(self, eps, A, S, w) -> Cell:
        W, delta = self.W, self.delta
        order = sorted(S)
        changed = True
        while changed:
            changed = False
            for i in order:
                j = W.right[i][w]
                if W.lengths[j] < W.lengths[w]:
                    w = j
                    eps = act_generator(delta, i, eps)
                    changed = True
                    break
        return Cell(eps, A, S, w)

    def _orbit_min(self, eps, A, S, w) -> Cell:
        # without the Coxeter relations the identifications generate a
        # groupoid whose orbits may repeat a chamber; take the least element
        W, delta = self.W, self.delta
        start = (eps, w)
        seen = {start}
        stack = [start]
        while stack:
            e, k = stack.pop()
            for i in S:
                nxt = (act_generator(delta, i, e), W.right[i][k])
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        e, k = min(seen, key=lambda p: (W.lengths[p[1]], p[1], p[0]))
        return Cell(e, A, S, k)

    # -------------------------------------------------------------- cells
    def _enumerate(self, max_cells: int) -> None:
        l = self.rank
        W = self.W
        roots = list(range(l))
        self.cells: list[list[Cell]] = [[] for _ in range(l + 1)]
        total = 0
        for A in subsets(roots):
            rest = [k for k in roots if k not in A]
            vectors = all_sign_vectors(l, A)
            for S in subsets(rest):
                dim = l - len(A) - len(S)
                bucket = self.cells[dim]
                if self.is_action:
                    reps = [k for k in range(W.order) if W.is_min_coset_rep(k, S)]
                    for k in reps:
                        for eps in vectors:
                            bucket.append(Cell(eps, A, S, k))
                    total += len(reps) * len(vectors)
                else:
                    seen = set()
                    for k in range(W.order):
                        for eps in vectors:
                            c = self.canonicalize(eps, A, S, k)
                            if c not in seen:
                                seen.add(c)
                                bucket.append(c)
                    total += len(seen)
                if total > max_cells:
                    raise RuntimeError(f"complex exceeds {max_cells} cells")
        self.index = [{c: n for n, c in enumerate(cs)} for cs in self.cells]

    @property
    def f_vector(self) -> list[int]:
        return [len(c) for c in self.cells]

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * n for k, n in enumerate(self.f_vector))

    def cell_index(self, cell: Cell) -> int:
        return self.index[cell.dim][cell]

    # ------------------------------------------------------------- faces
    def _position(self, cell: Cell, j: int) -> int:
        if self.convention == "relative":
            return cell.free().index(j) + 1
        return j + 1

    def face(self, cell: Cell, j: int, t: int) -> tuple[Cell, int]:
        """Face of ``cell`` in direction ``j``: ``t=1`` external, ``t=2`` internal.

        The orientation index ``c`` is whichever of ``1, 2`` the sign
        ``eps_j`` selects for that face type, and the sign is
        ``(-1)^(p + c + 1)`` times the transport sign of internal faces.
        """
        if j in cell.A or j in cell.S:
            raise ValueError(f"root {j + 1} is not free in {cell}")
        ej = cell.eps[j]
        p = self._position(cell, j)
        if t == 1:
            c = 2 if ej == 1 else 1
            eps = tuple(0 if k == j else e for k, e in enumerate(cell.eps))
            return Cell(eps, cell.A | {j}, cell.S, cell.w), (-1) ** (p + c + 1)
        if t == 2:
            c = 1 if ej == 1 else 2
            f = self.canonicalize(cell.eps, cell.A, cell.S | {j}, cell.w)
            tau = 1
            if self.transport:
                for k in f.free():
                    tau *= cell.eps[k] * f.eps[k]
            return f, (-1) ** (p + c + 1) * tau
        raise ValueError("face type must be 1 (external) or 2 (internal)")

    def cell_boundary(self, cell: Cell) -> dict:
        out: dict = {}
        for j in cell.free():
            for t in (1, 2):
                f, s = self.face(cell, j, t)
                _add(out, f, s)
        return out

    def _boundary(self, k: int) -> sparse.csc_matrix:
        rows, cols, vals = [], [], []
        lower = self.index[k - 1]
        for n, cell in enumerate(self.cells[k]):
            for f, s in self.cell_boundary(cell).items():
                rows.append(lower[f])
                cols.append(n)
                vals.append(s)
        shape = (len(self.cells[k - 1]), len(self.cells[k]))
        return sparse.csc_matrix((np.array(vals, dtype=np.int64), (rows, cols)), shape=shape)

    def boundary_matrix(self, k: int) -> sparse.csc_matrix:
        """``d_k``: columns are k-cells, rows are (k-1)-cells."""
        if k < 1 or k > self.rank:
            raise ValueError(f"no boundary in degree {k}")
        return self.boundaries[k]

    def boundary_squared_defects(self) -> list[int]:
        out = []
        for k in range(2, self.rank + 1):
            prod = self.boundaries[k - 1] @ self.boundaries[k]
            out.append(int(abs(prod).sum()))
        return out

    def check_boundary_squared(self) -> None:
        for k, bad in enumerate(self.boundary_squared_defects(), start=2):
            if bad:
                raise FaceConventionFailure(
                    f"d_{k - 1} d_{k} != 0 under the {self.convention} convention for {self.delta}"
                )

    # -------------------------------------------------------------- chains
    def to_vector(self, chain: dict) -> tuple[int, np.ndarray]:
        dims = {c.dim for c in chain}
        if len(dims) > 1:
            raise ValueError("chain mixes dimensions")
        k = dims.pop() if dims else self.rank
        v = np.zeros(len(self.cells[k]), dtype=np.int64)
        for c, a in chain.items():
            v[self.index[k][c]] += a
        return k, v

    def from_vector(self, k: int, v: np.ndarray) -> dict:
        return {self.cells[k][n]: int(a) for n, a in enumerate(v) if a}

    def apply_boundary(self, chain: dict) -> dict:
        """Boundary through the assembled matrices."""
        if not chain:
            return {}
        k, v = self.to_vector(chain)
        if k == 0:
            return {}
        return self.from_vector(k - 1, self.boundaries[k] @ v)

    def _require_action(self):
        if not self.is_action:
            r = self.delta.relations
            raise NotAnAction(f"{self.delta} violates {r.relation} at {signs_to_str(r.witness)}")

    def act(self, w: int, eps) -> tuple[int, ...]:
        out = tuple(eps)
        for i in reversed(self.W.words[w]):
            out = act_generator(self.delta, i, out)
        return out

    def gamma_chain(self, eps) -> dict:
        """The sheet ``Gamma_eps``: sum over chambers ``(w eps, w^-1)``."""
        self._require_action()
        W = self.W
        eps = tuple(eps)
        chain: dict = {}
        for w in range(W.order):
            weps = self.act(w, eps)
            sign = (-1) ** W.lengths[w]
            for a, b in zip(eps, weps):
                sign *= a * b
            _add(chain, Cell(weps, frozenset(), frozenset(), W.inverse[w]), sign)
        return chain

    def _unstable_data(self, w):
        W = self.W
        w = W.index_of(w)
        pu = unstable_support(W, w)
        ps = frozenset(range(self.rank)) - pu
        return w, sorted(pu), ps, W.parabolic(pu)

    def unstable_chain(self, w) -> dict:
        """Closure of the unstable manifold of the critical point ``w^-1 x_0``.

        Sum over ``sigma`` in ``W^u(w)`` and ``eps`` in ``E^{Pi^s(w)}`` of
        ``(-1)^(l(sigma)+l(w)) prod_{k in Pi^u} eps_k (sigma eps)_k`` times the
        chamber face ``(sigma eps; Pi^s(w); {}; (sigma w)^-1)``.
        """
        self._require_action()
        W = self.W
        w, pu, ps, Wu = self._unstable_data(w)
        chain: dict = {}
        for sigma in Wu:
            v = W.inverse[W.multiply(sigma, w)]
            base = (-1) ** (W.lengths[sigma] + W.lengths[w])
            for eps in all_sign_vectors(self.rank, ps):
                seps = self.act(sigma, eps)
                sign = base
                for k in pu:
                    sign *= eps[k] * seps[k]
                _add(chain, Cell(seps, ps, frozenset(), v), sign)
        return chain

    def unstable_boundary_explicit(self, w) -> dict:
        """Closed-form boundary of ``unstable_chain(w)``; every coefficient is even."""
        self._require_action()
        W = self.W
        w, pu, ps, Wu = self._unstable_data(w)
        chain: dict = {}
        lw = W.lengths[w]
        for sigma in Wu:
            v = W.inverse[W.multiply(sigma, w)]
            sinv = W.inverse[sigma]
            for pos, r in enumerate(pu, start=1):
                p = pos if self.convention == "relative" else r + 1
                A = ps | {r}
                for eps in all_sign_vectors(self.rank, A):
                    em = tuple(-1 if k == r else e for k, e in enumerate(eps))
                    ep = tuple(1 if k == r else e for k, e in enumerate(eps))
                    am, ap = self.act(sinv, em), self.act(sinv, ep)
                    same = 1
                    for j in pu:
                        same *= am[j] * ap[j]
                    if same != 1:
                        continue
                    mu = (-1) ** (W.lengths[sigma] + p)
                    for j in pu:
                        mu *= em[j] * am[j]
                    _add(chain, Cell(eps, A, frozenset(), v), 2 * (-1) ** lw * mu)
        return chain

    def check_unstable_boundary(self, w) -> dict:
        generic = self.apply_boundary(self.unstable_chain(w))
        explicit = self.unstable_boundary_explicit(w)
        if generic != explicit:
            raise MismatchWithGenericBoundary(f"closed form disagrees for w={self.W.element(w)}")
        return generic

    def is_unstable_cycle(self, w) -> bool:
        return not self.apply_boundary(self.unstable_chain(w))

    def weyl_act_cell(self, sigma, cell: Cell) -> Cell:
        self._require_action()
        sigma = self.W.index_of(sigma)
        return self.canonicalize(cell.eps, cell.A, cell.S, self.W.multiply(sigma, cell.w))

    def unstable_closure(self, w) -> "SubComplex":
        """Smallest subcomplex containing the top cells of ``unstable_chain(w)``."""
        top = list(self.unstable_chain(w))
        return SubComplex.closure_of(self, top)

    def levi_marking(self, w) -> MarkedDynkinDiagram | None:
        """Marking restricted to ``Pi^u(w)``; ``None`` when that set is empty."""
        pu = unstable_support(self.W, w)
        return self.delta.restrict(pu) if pu else None

    def orientation_kernel(self) -> tuple[int, dict | None]:
        """Rank of ``ker d_l`` over Z and, when it is 1, a generator.

        Every codimension-one cell of a closed pseudomanifold meets at most
        two top cells, so a kernel vector is determined on each connected
        piece of the dual graph by one coefficient; propagate and test.
        """
        l = self.rank
        D = self.boundaries[l].tocsr()
        n = D.shape[1]
        rows = [(D.indices[D.indptr[r]:D.indptr[r + 1]], D.data[D.indptr[r]:D.indptr[r + 1]])
                for r in range(D.shape[0])]
        if any(len(c) > 2 for c, _ in rows):
            raise RuntimeError("top boundary is not that of a pseudomanifold")
        adj: list[list[tuple[int, int, int]]] = [[] for _ in range(n)]
        for (cols, vals) in rows:
            if len(cols) == 2:
                a, b = int(cols[0]), int(cols[1])
                adj[a].append((b, int(vals[0]), int(vals[1])))
                adj[b].append((a, int(vals[1]), int(vals[0])))
        x = np.zeros(n, dtype=np.int64)
        rank = 0
        for start in range(n):
            if x[start]:
                continue
            x[start] = 1
            comp = [start]
            stack = [start]
            while stack:
                a = stack.pop()
                for b, va, vb in adj[a]:
                    # va x_a + vb x_b = 0 with va, vb = +-1
                    want = -va * vb * x[a]
                    if not x[b]:
                        x[b] = want
                        comp.append(b)
                        stack.append(b)
            comp = np.array(comp)
            y = np.zeros(n, dtype=np.int64)
            y[comp] = x[comp]
            if not (D @ y).any():
                rank += 1
            else:
                x[comp] = np.where(x[comp] != 0, 2, 0)  # mark visited, not a cycle
        if rank != 1:
            return rank, None
        x[x == 2] = 0
        return 1, self.from_vector(l, x)

    # ----------------------------------------------------------------- dump
    def to_json(self) -> dict:
        W = self.W

        def cell_json(c: Cell) -> dict:
            return {
                "dim": c.dim,
                "eps": signs_to_str(c.eps),
                "A": sorted(k + 1 for k in c.A),
                "S": sorted(k + 1 for k in c.S),
                "w": "".join(str(i + 1) for i in W.words[c.w]) or "e",
            }

        bounds = {}
        for k in range(1, self.rank + 1):
            coo = self.boundaries[k].tocoo()
            trip = sorted(zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist()))
            bounds[str(k)] = [[r, c, v] for r, c, v in trip if v]
        return {
            "diagram": self.delta.base.to_text(),
            "marking": self.delta.to_text(),
            "convention": self.convention,
            "f_vector": self.f_vector,
            "cells": [cell_json(c) for k in range(self.rank + 1) for c in self.cells[k]],
            "boundaries": bounds,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True)

    def __repr__(self):
        return f"CellComplex({self.delta}, f={self.f_vector})"


@dataclass
class SubComplex:
    """Face-closed set of cells of a parent complex with restricted boundaries."""

    parent: CellComplex
    cells: list[list[Cell]]
    boundaries: list

    @classmethod
    def closure_of(cls, parent: CellComplex, cells: Iterable[Cell]) -> "SubComplex":
        l = parent.rank
        keep: list[set] = [set() for _ in range(l + 1)]
        stack = list(cells)
        for c in stack:
            keep[c.dim].add(c)
        while stack:
            c = stack.pop()
            for j in c.free():
                for t in (1, 2):
                    f, _ = parent.face(c, j, t)
                    if f not in keep[f.dim]:
                        keep[f.dim].add(f)
                        stack.append(f)
        ordered = [sorted(ks, key=parent.index[k].__getitem__) for k, ks in enumerate(keep)]
        bounds = [None]
        for k in range(1, l + 1):
            rows = [parent.index[k - 1][c] for c in ordered[k - 1]]
            cols = [parent.index[k][c] for c in ordered[k]]
            bounds.append(parent.boundaries[k][rows, :][:, cols].tocsc())
        return cls(parent, ordered, bounds)

    @property
    def f_vector(self) -> list[int]:
        return [len(c) for c in self.cells]

    @property
    def top_dim(self) -> int:
        return max((k for k, c in enumerate(self.cells) if c), default=0)


def build_complex(delta: MarkedDynkinDiagram, group: WeylGroup | None = None, **kw) -> CellComplex:
    return CellComplex(delta, group=group, **kw)


def calibrate_convention(markings: Iterable[MarkedDynkinDiagram]) -> str:
    """Pick the sign reading for which ``d^2 = 0`` on every given marking."""
    markings = list(markings)
    for conv in CONVENTIONS:
        ok = True
        for m in markings:
            cx = CellComplex(m, convention=conv, check=False)
            if any(cx.boundary_squared_defects()):
                ok = False
                break
        if ok:
            log.info("boundary sign convention selected: %s", conv)
            return conv
    raise FaceConventionFailure("no sign convention gives d^2 = 0")
