"""Backend selection for the elimination kernels.

The compiled ``_ckernels`` extension is used when it imports; otherwise
(or with ``TOMEI_PURE_PYTHON=1``) the pure-Python ``_pykernels`` run.
"""
from __future__ import annotations

import os

from . import _pykernels

python_backend = _pykernels

if os.environ.get("TOMEI_PURE_PYTHON", "") not in ("", "0"):
    compiled_backend = None
else:
    try:
        from . import _ckernels as compiled_backend
    except ImportError:  # extension not built
        compiled_backend = None

backend = compiled_backend or python_backend
BACKEND = backend.BACKEND

# dense int64 elimination beyond this many entries goes through the sparse path
DENSE_LIMIT = 100_000_000


def gf2_rank(M) -> int:
    return backend.gf2_rank(M)


def int_diagonal(M) -> list[int]:
    if compiled_backend is not None and M.size <= DENSE_LIMIT:
        try:
            return compiled_backend.int_diagonal(M)
        except OverflowError:
            pass
    return python_backend.int_diagonal(M)


def sparse_int_diagonal(rows: list[dict[int, int]]) -> list[int]:
    return python_backend.sparse_int_diagonal(rows)
