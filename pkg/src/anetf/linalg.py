"""Dense complex linear solves by Gaussian elimination with partial pivoting."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import kernels
from .errors import NearSingularError

#: Pivot moduli below ``PIVOT_RTOL * ||M||_inf`` count as singular.
PIVOT_RTOL = 1e-13
#: Residual budget relative to ``||rhs||_inf`` before one refinement pass.
RESIDUAL_RTOL = 1e-10


class SolveResult(NamedTuple):
    x: np.ndarray
    residual: float
    refined: bool


def as_complex_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def inf_norm(m: np.ndarray) -> float:
    return float(np.abs(m).sum(axis=1).max())


def solve(m, rhs, backend=None) -> SolveResult:
    """Solve ``M x = rhs`` for square complex ``M``.

    Raises :class:`NearSingularError` when a pivot modulus falls below
    ``1e-13 * ||M||_inf``.  If the residual ``||M x - rhs||_inf`` exceeds
    ``1e-10 * ||rhs||_inf`` a single refinement pass reuses the factors; the
    refined iterate is kept only if it lowers the residual.
    """
    a = as_complex_matrix(m)
    b = np.asarray(rhs, dtype=complex)
    n = a.shape[0]
    if a.shape[1] != n:
        raise ValueError(f"matrix must be square, got {a.shape}")
    if b.shape != (n,):
        raise ValueError(f"rhs must have length {n}, got shape {b.shape}")
    impl = backend or kernels
    norm = inf_norm(a)
    lu, piv, bad, pivot = impl.lu_factor(a, PIVOT_RTOL * norm)
    if bad >= 0:
        raise NearSingularError(bad, pivot, norm)
    x = impl.lu_solve(lu, piv, b)
    r = b - a @ x
    res = float(np.abs(r).max())
    refined = False
    if res > RESIDUAL_RTOL * float(np.abs(b).max(initial=0.0)):
        refined = True
        x2 = x + impl.lu_solve(lu, piv, r)
        res2 = float(np.abs(b - a @ x2).max())
        # in working precision the correction can overshoot on very
        # ill-conditioned systems; keep whichever iterate fits better
        if res2 < res:
            x, res = x2, res2
    return SolveResult(x, res, refined)
