"""Pure-Python elimination kernels (fallback for ``_ckernels``).

Both entry points take a dense integer ``numpy`` array.  ``int_diagonal``
returns the nonzero diagonal of *some* diagonal matrix equivalent to the
input under unimodular row and column operations; divisibility is fixed
up by the caller.
"""
from __future__ import annotations

import numpy as np

BACKEND = "python"


def gf2_rank(M) -> int:
    M = np.asarray(M)
    if M.size == 0:
        return 0
    bits = np.packbits((M % 2).astype(np.uint8), axis=1)
    basis: dict[int, int] = {}
    for row in bits:
        r = int.from_bytes(row.tobytes(), "big")
        while r:
            h = r.bit_length() - 1
            b = basis.get(h)
            if b is None:
                basis[h] = r
                break
            r ^= b
    return len(basis)


def _unit_eliminate(rows: list[dict[int, int]]):
    """Eliminate +-1 pivots in place; returns (#unit pivots, leftover rows)."""
    col_rows: dict[int, set[int]] = {}
    for r, row in enumerate(rows):
        for c in row:
            col_rows.setdefault(c, set()).add(r)
    alive = set(r for r, row in enumerate(rows) if row)
    units = 0
    while True:
        best = None
        for r in alive:
            row = rows[r]
            for c, v in row.items():
                if v == 1 or v == -1:
                    cost = (len(row) - 1) * (len(col_rows[c]) - 1)
                    if best is None or cost < best[0]:
                        best = (cost, r, c)
                        if cost == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        _, pr, pc = best
        prow = rows[pr]
        pv = prow[pc]
        for r in list(col_rows[pc]):
            if r == pr:
                continue
            row = rows[r]
            factor = row[pc] * pv  # pv = +-1 so this is row[pc] / pv
            for c, v in prow.items():
                nv = row.get(c, 0) - factor * v
                if nv:
                    if c not in row:
                        col_rows[c].add(r)
                    row[c] = nv
                else:
                    if c in row:
                        del row[c]
                        col_rows[c].discard(r)
            if not row:
                alive.discard(r)
        # column pc is now zero outside pr; the rest of row pr is cleared by
        # column operations that touch no other row
        for c in prow:
            col_rows[c].discard(pr)
        rows[pr] = {}
        alive.discard(pr)
        units += 1
    return units, [rows[r] for r in sorted(alive)]


def dense_diagonal(A: list[list[int]]) -> list[int]:
    """Diagonalize a small dense matrix of Python ints (min-abs pivoting)."""
    A = [list(map(int, row)) for row in A]
    m = len(A)
    n = len(A[0]) if m else 0
    diag = []
    t = 0
    while t < min(m, n):
        piv = None
        for i in range(t, m):
            for j in range(t, n):
                v = A[i][j]
                if v and (piv is None or abs(v) < piv[0]):
                    piv = (abs(v), i, j)
        if piv is None:
            break
        _, pi, pj = piv
        A[t], A[pi] = A[pi], A[t]
        for row in A:
            row[t], row[pj] = row[pj], row[t]
        while True:
            p = A[t][t]
            done = True
            for i in range(t + 1, m):
                if A[i][t]:
                    q = A[i][t] // p
                    if q:
                        Ai, At = A[i], A[t]
                        for j in range(t, n):
                            Ai[j] -= q * At[j]
                    if A[i][t]:
                        done = False
            for j in range(t + 1, n):
                if A[t][j]:
                    q = A[t][j] // p
                    if q:
                        for i in range(t, m):
                            A[i][j] -= q * A[i][t]
                    if A[t][j]:
                        done = False
            if done:
                break
            # a remainder smaller than the pivot survived: move it into place
            best = None
            for i in range(t + 1, m):
                if A[i][t] and (best is None or abs(A[i][t]) < best[0]):
                    best = (abs(A[i][t]), i, None)
            for j in range(t + 1, n):
                if A[t][j] and (best is None or abs(A[t][j]) < best[0]):
                    best = (abs(A[t][j]), None, j)
            _, bi, bj = best
            if bi is not None:
                A[t], A[bi] = A[bi], A[t]
            else:
                for row in A:
                    row[t], row[bj] = row[bj], row[t]
        diag.append(abs(A[t][t]))
        t += 1
    return diag


def sparse_int_diagonal(rows: list[dict[int, int]]) -> list[int]:
    units, rest = _unit_eliminate([dict(r) for r in rows])
    diag = [1] * units
    if rest:
        cols = sorted({c for r in rest for c in r})
        pos = {c: k for k, c in enumerate(cols)}
        dense = [[0] * len(cols) for _ in rest]
        for i, r in enumerate(rest):
            for c, v in r.items():
                dense[i][pos[c]] = v
        diag.extend(dense_diagonal(dense))
    return diag


def int_diagonal(M) -> list[int]:
    M = np.asarray(M)
    if M.size == 0:
        return []
    rows = []
    for row in M.tolist():
        rows.append({c: int(v) for c, v in enumerate(row) if v})
    return sparse_int_diagonal(rows)
