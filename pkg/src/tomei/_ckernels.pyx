# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled elimination kernels; same contract as ``tomei._pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, uint64_t

cnp.import_array()

BACKEND = "cython"

cdef int64_t LIMIT = (<int64_t>1) << 62


def gf2_rank(M):
    """Rank over GF(2) of a dense integer matrix (entries reduced mod 2)."""
    A = np.asarray(M)
    if A.size == 0:
        return 0
    cdef Py_ssize_t m = A.shape[0], n = A.shape[1]
    cdef Py_ssize_t words = (n + 63) // 64
    bits01 = (A % 2).astype(np.uint8)
    padded = np.zeros((m, words * 64), dtype=np.uint8)
    padded[:, :n] = bits01
    packed = np.packbits(padded, axis=1, bitorder="little").view(np.uint64)
    packed = np.ascontiguousarray(packed)
    cdef uint64_t[:, ::1] R = packed
    cdef Py_ssize_t rank = 0, col, r, piv, w, wi
    cdef uint64_t mask, tmp
    for col in range(n):
        if rank == m:
            break
        wi = col >> 6
        mask = (<uint64_t>1) << (col & 63)
        piv = -1
        for r in range(rank, m):
            if R[r, wi] & mask:
                piv = r
                break
        if piv < 0:
            continue
        if piv != rank:
            for w in range(wi, words):
                tmp = R[piv, w]
                R[piv, w] = R[rank, w]
                R[rank, w] = tmp
        for r in range(rank + 1, m):
            if R[r, wi] & mask:
                for w in range(wi, words):
                    R[r, w] ^= R[rank, w]
        rank += 1
    return rank


cdef inline int64_t _abs(int64_t x) nogil:
    return -x if x < 0 else x


cdef inline int64_t _floordiv(int64_t a, int64_t b) nogil:
    cdef int64_t q = a / b
    if (a % b != 0) and ((a < 0) != (b < 0)):
        q -= 1
    return q


cdef int _axpy_row(int64_t[:, ::1] A, Py_ssize_t dst, Py_ssize_t src, int64_t q,
                   Py_ssize_t start, Py_ssize_t n) nogil:
    cdef Py_ssize_t j
    cdef int64_t v
    for j in range(start, n):
        v = A[src, j]
        if v != 0:
            if _abs(v) > LIMIT / _abs(q):
                return -1
            A[dst, j] -= q * v
            if _abs(A[dst, j]) > LIMIT:
                return -1
    return 0


cdef int _axpy_col(int64_t[:, ::1] A, Py_ssize_t dst, Py_ssize_t src, int64_t q,
                   Py_ssize_t start, Py_ssize_t m) nogil:
    cdef Py_ssize_t i
    cdef int64_t v
    for i in range(start, m):
        v = A[i, src]
        if v != 0:
            if _abs(v) > LIMIT / _abs(q):
                return -1
            A[i, dst] -= q * v
            if _abs(A[i, dst]) > LIMIT:
                return -1
    return 0


cdef void _swap_rows(int64_t[:, ::1] A, Py_ssize_t a, Py_ssize_t b, Py_ssize_t n) nogil:
    cdef Py_ssize_t j
    cdef int64_t t
    for j in range(n):
        t = A[a, j]
        A[a, j] = A[b, j]
        A[b, j] = t


cdef void _swap_cols(int64_t[:, ::1] A, Py_ssize_t a, Py_ssize_t b, Py_ssize_t m) nogil:
    cdef Py_ssize_t i
    cdef int64_t t
    for i in range(m):
        t = A[i, a]
        A[i, a] = A[i, b]
        A[i, b] = t


def int_diagonal(M):
    """Nonzero diagonal of a unimodularly equivalent diagonal matrix.

    Row operations only visit the nonzero columns of the pivot row, and a
    unit pivot clears its row without touching the rest of the matrix, so
    sparse boundary matrices cost far less than a dense sweep.  Raises
    ``OverflowError`` when an intermediate entry leaves the int64 safety
    margin; callers fall back to arbitrary precision.
    """
    arr = np.array(M, dtype=np.int64, order="C", copy=True)
    if arr.size == 0:
        return []
    cdef int64_t[:, ::1] A = arr
    cdef Py_ssize_t m = A.shape[0], n = A.shape[1]
    cdef Py_ssize_t t = 0, i, j, pi, pj, bi, bj, c, nc
    cdef int64_t best, v, p, q
    cdef bint done, stale
    cols_arr = np.empty(n, dtype=np.intp)
    cdef Py_ssize_t[::1] cols = cols_arr
    # per-column nonzero counts steer the pivot toward sparse columns
    counts_arr = np.count_nonzero(arr, axis=0).astype(np.intp)
    cdef Py_ssize_t[::1] counts = counts_arr
    diag = []
    while t < m and t < n:
        best = 0
        pi = -1
        pj = -1
        # unit pivot in the sparsest column that has one, else min |entry|
        for j in range(t, n):
            if counts[j] == 0:
                continue
            if pj >= 0 and best == 1 and counts[j] >= counts[pj]:
                continue
            for i in range(t, m):
                v = _abs(A[i, j])
                if v != 0 and (best == 0 or v < best or (v == best and v == 1 and counts[j] < counts[pj])):
                    best = v
                    pi = i
                    pj = j
                    if v == 1:
                        break
            if best == 1 and counts[pj] <= 2:
                break
        if pi < 0:
            break
        if pi != t:
            _swap_rows(A, t, pi, n)
        if pj != t:
            _swap_cols(A, t, pj, m)
            counts[t], counts[pj] = counts[pj], counts[t]
        stale = False
        while True:
            p = A[t, t]
            nc = 0
            for j in range(t, n):
                if A[t, j] != 0:
                    cols[nc] = j
                    nc += 1
            done = True
            for i in range(t + 1, m):
                if A[i, t] != 0:
                    q = _floordiv(A[i, t], p)
                    if q != 0:
                        for c in range(nc):
                            j = cols[c]
                            v = A[t, j]
                            if _abs(v) > LIMIT / _abs(q):
                                raise OverflowError("int64 range exceeded")
                            if A[i, j] == 0:
                                counts[j] += 1
                            A[i, j] -= q * v
                            if A[i, j] == 0:
                                counts[j] -= 1
                            elif _abs(A[i, j]) > LIMIT:
                                raise OverflowError("int64 range exceeded")
                    if A[i, t] != 0:
                        done = False
            if _abs(p) == 1 and done:
                # column t is zero below the pivot: clear row t directly
                for c in range(nc):
                    j = cols[c]
                    if j != t:
                        A[t, j] = 0
                        counts[j] -= 1
                break
            stale = True
            for j in range(t + 1, n):
                if A[t, j] != 0:
                    q = _floordiv(A[t, j], p)
                    if q != 0 and _axpy_col(A, j, t, q, t, m) < 0:
                        raise OverflowError("int64 range exceeded")
                    if A[t, j] != 0:
                        done = False
            if done:
                break
            best = 0
            bi = -1
            bj = -1
            for i in range(t + 1, m):
                v = _abs(A[i, t])
                if v != 0 and (best == 0 or v < best):
                    best = v
                    bi = i
                    bj = -1
            for j in range(t + 1, n):
                v = _abs(A[t, j])
                if v != 0 and (best == 0 or v < best):
                    best = v
                    bj = j
                    bi = -1
            if bi >= 0:
                _swap_rows(A, t, bi, n)
            else:
                _swap_cols(A, t, bj, m)
                counts[t], counts[bj] = counts[bj], counts[t]
        if stale:
            # column operations bypass the counts
            for j in range(t + 1, n):
                counts[j] = 0
                for i in range(t + 1, m):
                    if A[i, j] != 0:
                        counts[j] += 1
        diag.append(int(_abs(A[t, t])))
        t += 1
    return diag
