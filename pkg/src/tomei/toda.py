"""Type-A Toda lattice on trace-zero symmetric tridiagonal matrices.

The flow is ``X(t) = Q(t)^T X(0) Q(t)`` with ``exp(t X(0)) = Q(t) R(t)``
and ``R`` having positive diagonal.  Integration re-factorizes
``exp(h X(t_k))`` at every step, which agrees with the global formula by
the semigroup property of the QR flow and never overflows.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

__all__ = [
    "TridiagonalState",
    "Spectrum",
    "Trajectory",
    "StepTooLarge",
    "DegenerateSpectrum",
    "SumMismatch",
    "BrokenStep",
    "char_coefficients",
    "flow_step",
    "simulate",
    "morse_value",
    "moment_diag",
    "in_permutohedron",
    "convexity_audit",
    "initial_state_with_spectrum",
    "convergence_rate",
]

DELTA_MIN = 1e-6
DEAD_BAND = 1e-10
MAX_H_RHO = 30.0
MONOTONE_TOL = 1e-9
SUM_TOL = 1e-9


class StepTooLarge(ValueError):
    pass


class DegenerateSpectrum(ValueError):
    pass


class SumMismatch(ValueError):
    pass


class BrokenStep(RuntimeError):
    """A step produced entries outside the tridiagonal band."""


@dataclass(frozen=True)
class TridiagonalState:
    """Symmetric tridiagonal ``X`` with diagonal ``a`` and off-diagonal ``b``."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float).copy()
        b = np.asarray(self.b, dtype=float).copy()
        if a.ndim != 1 or b.ndim != 1 or len(a) != len(b) + 1 or len(b) < 1:
            raise ValueError("need len(a) = len(b) + 1 >= 2")
        scale = max(np.linalg.norm(a), np.linalg.norm(b), 1.0)
        if abs(a.sum()) > 1e-12 * scale:
            raise ValueError(f"trace {a.sum():.3g} is not zero")
        a.flags.writeable = False
        b.flags.writeable = False
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def size(self) -> int:
        return len(self.a)

    @property
    def rank(self) -> int:
        return len(self.b)

    def matrix(self) -> np.ndarray:
        return np.diag(self.a) + np.diag(self.b, 1) + np.diag(self.b, -1)

    @classmethod
    def from_matrix(cls, M, dead_band: float = DEAD_BAND) -> "TridiagonalState":
        M = np.asarray(M, dtype=float)
        M = 0.5 * (M + M.T)
        outside = np.triu(M, 2)
        if outside.size and np.abs(outside).max() > dead_band * max(1.0, np.abs(M).max()):
            raise BrokenStep(f"band leak {np.abs(outside).max():.3g}")
        return cls(np.diag(M).copy(), np.diag(M, 1).copy())

    def flip(self, signs) -> "TridiagonalState":
        return TridiagonalState(self.a, self.b * np.asarray(signs, dtype=float))

    def is_interior(self) -> bool:
        return bool(np.all(self.b != 0))


@dataclass(frozen=True)
class Spectrum:
    """Strictly decreasing trace-zero eigenvalues with gap above ``delta_min``."""

    lam: np.ndarray
    delta_min: float = DELTA_MIN

    def __post_init__(self):
        lam = np.asarray(self.lam, dtype=float)
        if lam.ndim != 1 or len(lam) < 2:
            raise ValueError("need at least two eigenvalues")
        if abs(lam.sum()) > SUM_TOL * max(1.0, np.abs(lam).max()):
            raise ValueError("eigenvalues must sum to zero")
        gaps = -np.diff(lam)
        if np.any(np.abs(gaps) <= self.delta_min):
            raise DegenerateSpectrum(f"eigenvalue gap {np.abs(gaps).min():.3g} <= {self.delta_min}")
        if np.any(gaps < 0):
            raise ValueError("eigenvalues must be strictly decreasing")
        object.__setattr__(self, "lam", lam)

    @classmethod
    def of(cls, values, delta_min: float = DELTA_MIN) -> "Spectrum":
        """Sort descending, then validate."""
        return cls(np.sort(np.asarray(values, dtype=float))[::-1], delta_min)

    @property
    def gaps(self) -> np.ndarray:
        return -np.diff(self.lam)


def char_coefficients(X: TridiagonalState) -> np.ndarray:
    """Coefficients ``(c_l, ..., c_0)`` of ``det(lambda I - X)`` below the leading 1."""
    prev = np.array([1.0])
    cur = np.array([1.0, -X.a[0]])
    for k in range(1, X.size):
        nxt = np.convolve(cur, [1.0, -X.a[k]])
        nxt[2:] -= X.b[k - 1] ** 2 * prev
        prev, cur = cur, nxt
    return cur[1:]


def _expm(X: TridiagonalState, h: float):
    w, V = eigh_tridiagonal(X.a, X.b)
    rho = np.abs(w).max()
    if h * rho > MAX_H_RHO:
        raise StepTooLarge(f"h * spectral radius = {h * rho:.3g} > {MAX_H_RHO}")
    return (V * np.exp(h * w)) @ V.T


def flow_step(X: TridiagonalState, h: float) -> TridiagonalState:
    """Advance the Toda flow by ``h``."""
    if h <= 0:
        raise ValueError("step must be positive")
    E = _expm(X, h)
    Q, R = np.linalg.qr(E)
    Q = Q * np.where(np.diag(R) < 0, -1.0, 1.0)
    Y = Q.T @ X.matrix() @ Q
    Y = TridiagonalState.from_matrix(Y)
    # keep the trace exactly where it was
    a = Y.a - (Y.a.sum() - X.a.sum()) / X.size
    return TridiagonalState(a, Y.b)


@dataclass
class Trajectory:
    t: np.ndarray
    a: np.ndarray  # (samples, l+1)
    b: np.ndarray  # (samples, l)
    f: np.ndarray
    drift: np.ndarray

    @property
    def max_drift(self) -> float:
        return float(self.drift.max())

    def state(self, k: int) -> TridiagonalState:
        return TridiagonalState(self.a[k], self.b[k])

    @property
    def final(self) -> TridiagonalState:
        return self.state(-1)

    def to_csv(self) -> str:
        n, l1 = self.a.shape
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t"] + [f"a{i + 1}" for i in range(l1)] + [f"b{i + 1}" for i in range(l1 - 1)] + ["f", "drift"])
        for k in range(n):
            row = [self.t[k], *self.a[k], *self.b[k], self.f[k], self.drift[k]]
            w.writerow([repr(float(x)) for x in row])
        return buf.getvalue()


def simulate(X0: TridiagonalState, T: float, h: float, every: int = 1) -> Trajectory:
    """Step from ``X0`` to time ``T``; samples every ``every`` steps."""
    if T < 0:
        raise ValueError("T must be non-negative")
    n = int(round(T / h))
    if n and abs(n * h - T) > 1e-9 * max(1.0, T):
        raise ValueError("T must be a multiple of h")
    c0 = char_coefficients(X0)
    ts, As, Bs, Fs, Ds = [0.0], [X0.a], [X0.b], [morse_value(X0)], [0.0]
    X = X0
    for k in range(1, n + 1):
        X = flow_step(X, h)
        if k % every == 0 or k == n:
            ts.append(k * h)
            As.append(X.a)
            Bs.append(X.b)
            Fs.append(morse_value(X))
            Ds.append(float(np.abs(char_coefficients(X) - c0).max()))
    drift = np.maximum.accumulate(np.array(Ds))
    return Trajectory(np.array(ts), np.array(As), np.array(Bs), np.array(Fs), drift)


def morse_value(X) -> float:
    """``f = sum_i (l - i + 1) a_i`` over the first ``l`` diagonal entries."""
    a = X.a if isinstance(X, TridiagonalState) else np.asarray(X, dtype=float)
    l = len(a) - 1
    return float(np.dot(np.arange(l, 0, -1), a[:l]))


def moment_diag(X: TridiagonalState) -> np.ndarray:
    return np.array(X.a)


def in_permutohedron(d, lam, tol: float = 1e-9) -> bool:
    """Is ``d`` in the convex hull of all permutations of ``lam`` (majorization)."""
    d = np.sort(np.asarray(d, dtype=float))[::-1]
    lam = np.sort(np.asarray(lam.lam if isinstance(lam, Spectrum) else lam, dtype=float))[::-1]
    if len(d) != len(lam):
        raise ValueError("dimension mismatch")
    if abs(d.sum() - lam.sum()) > SUM_TOL:
        raise SumMismatch(f"sum {d.sum():.3g} != {lam.sum():.3g}")
    return bool(np.all(np.cumsum(d)[:-1] <= np.cumsum(lam)[:-1] + tol))


@dataclass
class ConvexityReport:
    inside_polytope: bool
    monotone: bool
    limit_permutation: list[int]
    max_drift: float
    lam: list[float]
    violations: list[tuple[float, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.inside_polytope and self.monotone

    def to_json(self) -> dict:
        return {
            "lambda": self.lam,
            "limit_permutation": self.limit_permutation,
            "max_drift": self.max_drift,
            "monotone": self.monotone,
            "inside_polytope": self.inside_polytope,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True)


def limit_permutation(a, lam) -> list[int]:
    """1-based ``pi`` with ``a_i`` closest to ``lam_{pi(i)}``; identity when sorted."""
    lam = np.asarray(lam.lam if isinstance(lam, Spectrum) else lam, dtype=float)
    order_a = np.argsort(-np.asarray(a), kind="stable")
    pi = np.empty(len(lam), dtype=int)
    pi[order_a] = np.arange(len(lam))
    return [int(p) + 1 for p in pi]


def convexity_audit(traj: Trajectory, lam=None, tol: float = MONOTONE_TOL) -> ConvexityReport:
    """Majorization at every sample, monotone Morse function, limiting chamber."""
    if lam is None:
        w = eigh_tridiagonal(traj.a[0], traj.b[0], eigvals_only=True)
        lam = np.sort(w)[::-1]
    lam = np.asarray(lam.lam if isinstance(lam, Spectrum) else lam, dtype=float)
    violations = []
    inside = True
    for k in range(len(traj.t)):
        if not in_permutohedron(traj.a[k], lam):
            inside = False
            violations.append((float(traj.t[k]), "outside permutohedron"))
    steps = np.diff(traj.f)
    monotone = bool(np.all(steps >= -tol))
    for k in np.nonzero(steps < -tol)[0]:
        violations.append((float(traj.t[k + 1]), f"f decreased by {-steps[k]:.3g}"))
    return ConvexityReport(
        inside,
        monotone,
        limit_permutation(traj.a[-1], lam),
        traj.max_drift,
        [float(x) for x in lam],
        violations,
    )


def initial_state_with_spectrum(spectrum, signs=None, seed: int | None = 0) -> TridiagonalState:
    """Tridiagonal matrix with the given eigenvalues and off-diagonal sign pattern.

    Lanczos on ``diag(lam)`` from a random unit vector with nonzero entries
    (the first row of the eigenvector matrix) gives positive off-diagonals;
    the sign pattern is then imposed by conjugating with a diagonal
    ``+-1`` matrix, which changes neither the spectrum nor ``|b|``.
    """
    spec = spectrum if isinstance(spectrum, Spectrum) else Spectrum.of(spectrum)
    lam = spec.lam
    n = len(lam)
    rng = np.random.default_rng(seed)
    q = np.abs(rng.standard_normal(n)) + 0.1
    q /= np.linalg.norm(q)
    Qs = [q]
    a = np.zeros(n)
    b = np.zeros(n - 1)
    for k in range(n):
        v = lam * Qs[k]
        a[k] = Qs[k] @ v
        for u in Qs:  # full reorthogonalization; n is small
            v = v - (u @ v) * u
        if k == n - 1:
            break
        b[k] = np.linalg.norm(v)
        if b[k] < 1e-12:
            raise DegenerateSpectrum("Lanczos broke down")
        Qs.append(v / b[k])
    a -= a.mean()
    if signs is not None:
        s = _parse_signs(signs, n - 1)
        b = b * s
    return TridiagonalState(a, b)


def _parse_signs(signs, l: int) -> np.ndarray:
    if isinstance(signs, str):
        if len(signs) != l or set(signs) - set("+-"):
            raise ValueError(f"sign pattern must be {l} characters from '+-'")
        return np.array([1.0 if c == "+" else -1.0 for c in signs])
    s = np.asarray(signs, dtype=float)
    if s.shape != (l,) or not np.all(np.abs(s) == 1):
        raise ValueError(f"sign pattern must have {l} entries +-1")
    return s


def convergence_rate(traj: Trajectory, hi: float = 1e-3, lo: float = 1e-11) -> float:
    """Slope of ``log ||b(t)||`` over the samples with ``lo < ||b|| < hi``."""
    nb = np.linalg.norm(traj.b, axis=1)
    mask = (nb < hi) & (nb > lo)
    if mask.sum() < 3:
        raise ValueError("not enough samples in the fitting window")
    slope, _ = np.polyfit(traj.t[mask], np.log(nb[mask]), 1)
    return float(slope)
