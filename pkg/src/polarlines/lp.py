"""Strict feasibility of ``A r > 0`` by a small dense simplex method.

The strict system is replaced by the bounded max-slack program::

    maximize t   subject to   A r >= t,  -1 <= r <= 1

written with ``r = p - q`` and ``p, q, t >= 0`` so that every right-hand side
is non-negative and the slack basis is feasible from the start.  An optimum
``t > tol`` gives a strictly feasible ``r``.  Otherwise the dual multipliers
of the ``A r >= t`` rows form a non-negative row dependency (a Carver
certificate) which is polished and re-checked before it is returned.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Union

import numpy as np

from .matrix import ConstraintMatrix, evaluate_matrix

TOL = 1e-7
CERT_TOL = 1e-8
_PIVOT_EPS = 1e-11


class NumericalFailure(RuntimeError):
    """The solver could not reach a trustworthy verdict."""


@dataclass
class Feasible:
    r: np.ndarray
    slack: float

    feasible = True

    def __str__(self) -> str:
        vals = " ".join(f"{x:.9g}" for x in self.r)
        return f"Feasible slack={self.slack:.9g}\nr = {vals}"


@dataclass
class Infeasible:
    lam: np.ndarray
    residual: float

    feasible = False

    def __str__(self) -> str:
        vals = " ".join(f"{x:.9g}" for x in self.lam)
        return f"Infeasible residual={self.residual:.3g}\nlambda = {vals}"


FeasibilityResult = Union[Feasible, Infeasible]


def _simplex_max(c: np.ndarray, B: np.ndarray, b: np.ndarray, max_iter: int):
    """Maximize c.x subject to B x <= b, x >= 0, with b >= 0.

    Returns (x, y, value) where y are the dual prices of the rows.
    Bland's rule throughout, so the method cannot cycle.
    """
    m, n = B.shape
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = B
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :n] = -c
    basis = list(range(n, n + m))
    for _ in range(max_iter):
        obj = T[m, :-1]
        entering = next((j for j in range(n + m) if obj[j] < -_PIVOT_EPS), None)
        if entering is None:
            break
        col = T[:m, entering]
        best = None
        for i in range(m):
            if col[i] > _PIVOT_EPS:
                ratio = T[i, -1] / col[i]
                key = (ratio, basis[i])
                if best is None or key[0] < best[0][0] - 1e-12 or (
                        abs(key[0] - best[0][0]) <= 1e-12 and key[1] < best[0][1]):
                    best = (key, i)
        if best is None:
            raise NumericalFailure("unbounded direction in a bounded program")
        i = best[1]
        T[i] /= T[i, entering]
        for k in range(m + 1):
            if k != i and T[k, entering] != 0.0:
                T[k] -= T[k, entering] * T[i]
        basis[i] = entering
    else:
        raise NumericalFailure(f"simplex method exceeded {max_iter} iterations")
    x = np.zeros(n + m)
    for i, j in enumerate(basis):
        x[j] = T[i, -1]
    y = T[m, n:n + m].copy()
    return x[:n], y, T[m, -1]


def certificate_residual(A: np.ndarray, lam: np.ndarray) -> float:
    return float(np.max(np.abs(lam @ A))) if A.size else 0.0


def certificate_scale(A: np.ndarray, lam: np.ndarray) -> float:
    return max(1.0, float(np.sum(np.abs(lam))) * float(np.max(np.abs(A), initial=0.0)))


def _polish(A: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """Replace lam by an exact null vector of the rows on its support, if one-signed."""
    support = np.flatnonzero(lam > 1e-9 * lam.max())
    sub = A[support]
    if sub.shape[1] == 0:
        return lam
    _, s, vt = np.linalg.svd(sub.T)
    # null space of sub.T: right singular vectors beyond the numerical rank
    rank = int(np.sum(s > 1e-10 * max(s[0] if s.size else 0.0, 1.0)))
    null = vt[rank:]
    if len(null) != 1:
        return lam
    v = null[0]
    v = v if v.sum() > 0 else -v
    if np.any(v < -1e-12):
        return lam
    out = np.zeros_like(lam)
    out[support] = np.clip(v, 0.0, None)
    if certificate_residual(A, out / out.max()) < certificate_residual(A, lam / lam.max()):
        return out
    return lam


def solve_strict(A, tol: float = TOL, max_iter: Optional[int] = None,
                 A_eq=None) -> FeasibilityResult:
    """Decide ``A r > 0`` (and ``A_eq r = 0`` if given); see the module docstring.

    With equality rows the certificate covers the stacked matrix ``[A; A_eq]``
    and only its first ``m`` entries are sign-constrained.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise ValueError(f"need a non-empty 2-d matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix entries must be finite")
    m, n = A.shape
    E = np.zeros((0, n)) if A_eq is None else np.asarray(A_eq, dtype=float).reshape(-1, n)
    k = E.shape[0]
    # variables: p (n), q (n), t (1); rows: strict, equality as two halves, box
    B = np.zeros((m + 2 * k + 2 * n, 2 * n + 1))
    B[:m, :n] = -A
    B[:m, n:2 * n] = A
    B[:m, -1] = 1.0
    B[m:m + k, :n] = E
    B[m:m + k, n:2 * n] = -E
    B[m + k:m + 2 * k, :n] = -E
    B[m + k:m + 2 * k, n:2 * n] = E
    B[m + 2 * k:, :2 * n] = np.eye(2 * n)
    b = np.concatenate([np.zeros(m + 2 * k), np.ones(2 * n)])
    c = np.zeros(2 * n + 1)
    c[-1] = 1.0
    cap = max_iter or 50 * (B.shape[0] + B.shape[1])
    x, y, value = _simplex_max(c, B, b, cap)
    if value > tol:
        r = x[:n] - x[n:2 * n]
        slack = float(np.min(A @ r))
        if slack <= 0:
            raise NumericalFailure(f"optimum {value:.3g} but recomputed slack {slack:.3g}")
        return Feasible(r, slack)
    lam = np.clip(y[:m], 0.0, None)
    if lam.max() <= 0:
        raise NumericalFailure("no dual weights at a non-positive optimum")
    if k:
        # equality multipliers are free; stationarity in p gives A^T lam = E^T (y1 - y2)
        mu = y[m + k:m + 2 * k] - y[m:m + k]
        full = np.concatenate([lam, mu])
        S = np.vstack([A, E])
        full = full / lam.max()
        res = certificate_residual(S, full)
        if res > CERT_TOL * certificate_scale(S, full):
            raise NumericalFailure(
                f"ambiguous instance: optimum {value:.3g}, certificate residual {res:.3g}")
        return Infeasible(full, res)
    lam = _polish(A, lam)
    lam = lam / lam.max()
    res = certificate_residual(A, lam)
    if res > CERT_TOL * certificate_scale(A, lam):
        raise NumericalFailure(
            f"ambiguous instance: optimum {value:.3g}, certificate residual {res:.3g}")
    return Infeasible(lam, res)


def verify_certificate(A, result: FeasibilityResult, tol: float = TOL, A_eq=None) -> bool:
    """Re-check either branch of a result against ``A`` from scratch."""
    A = np.asarray(A, dtype=float)
    m, n = A.shape
    E = np.zeros((0, n)) if A_eq is None else np.asarray(A_eq, dtype=float).reshape(-1, n)
    if isinstance(result, Feasible):
        r = np.asarray(result.r, dtype=float)
        if r.shape != (n,):
            return False
        if E.shape[0] and float(np.max(np.abs(E @ r))) > tol:
            return False
        low = float(np.min(A @ r))
        return low > 0 and low >= result.slack - tol
    if isinstance(result, Infeasible):
        lam = np.asarray(result.lam, dtype=float)
        if lam.shape != (m + E.shape[0],):
            return False
        signed = lam[:m]
        if np.any(signed < 0) or not np.any(signed > 0):
            return False
        S = np.vstack([A, E])
        return certificate_residual(S, lam) <= CERT_TOL * certificate_scale(S, lam)
    return False


def split_rows(M: ConstraintMatrix, theta: Mapping[int, float]):
    """Numeric strict rows and equality rows of ``M`` at ``theta``."""
    A = evaluate_matrix(M, theta)
    eq = sorted(M.equalities)
    strict = [i for i in range(A.shape[0]) if i not in M.equalities]
    return A[strict], (A[eq] if eq else None)


def solve_at(M: ConstraintMatrix, theta: Mapping[int, float], **kw) -> FeasibilityResult:
    """Evaluate ``M`` at ``theta`` and solve, honouring equality rows."""
    A, E = split_rows(M, theta)
    return solve_strict(A, A_eq=E, **kw)
