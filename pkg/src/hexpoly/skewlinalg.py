"""Dense kernels: Pfaffians of real skew matrices, complex det and inverse."""

from __future__ import annotations

import warnings

import numba
import numpy as np
from scipy import linalg as sla

ANTISYMMETRY_TOL = 1e-12
SINGULAR_PIVOT = 1e-12


class SkewMatrixError(ValueError):
    pass


class SingularMatrixError(np.linalg.LinAlgError):
    """Raised when an LU pivot falls below the relative singularity threshold."""


@numba.njit(cache=True, nogil=True)
def _parlett_reid(a):
    # Skew Gaussian elimination with partial pivoting, in place.  The rank-2
    # update of each step is restricted to the rows where row k or column k+1
    # is nonzero, so banded Kasteleyn matrices cost O(N b^2).
    n = a.shape[0]
    sign = 1.0
    logabs = 0.0
    idx = np.empty(n, np.int64)
    tau = np.empty(n)
    col = np.empty(n)
    for k in range(0, n - 1, 2):
        kp = k + 1
        best = abs(a[k + 1, k])
        for i in range(k + 2, n):
            v = abs(a[i, k])
            if v > best:
                best = v
                kp = i
        if kp != k + 1:
            for j in range(n):
                t = a[k + 1, j]
                a[k + 1, j] = a[kp, j]
                a[kp, j] = t
            for i in range(n):
                t = a[i, k + 1]
                a[i, k + 1] = a[i, kp]
                a[i, kp] = t
            sign = -sign
        piv = a[k, k + 1]
        if piv == 0.0:
            return 0.0, -np.inf
        if piv < 0.0:
            sign = -sign
        logabs += np.log(abs(piv))
        m = 0
        for i in range(k + 2, n):
            t = a[k, i]
            c = a[i, k + 1]
            if t != 0.0 or c != 0.0:
                idx[m] = i
                tau[m] = t / piv
                col[m] = c
                m += 1
        for ii in range(m):
            i = idx[ii]
            ti = tau[ii]
            ci = col[ii]
            for jj in range(m):
                a[i, idx[jj]] += ti * col[jj] - ci * tau[jj]
    return sign, logabs


def _checked_skew(m) -> np.ndarray:
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise SkewMatrixError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] % 2:
        raise SkewMatrixError("Pfaffian requires even dimension")
    scale = np.max(np.abs(a)) if a.size else 0.0
    if scale and np.max(np.abs(a + a.T)) > ANTISYMMETRY_TOL * scale:
        raise SkewMatrixError("matrix is not antisymmetric within tolerance")
    return 0.5 * (a - a.T)


def slog_pfaffian(m) -> tuple[float, float]:
    """Sign and natural log of ``|Pf(m)|``, like :func:`numpy.linalg.slogdet`.

    A singular matrix gives ``(0.0, -inf)``.
    """
    a = _checked_skew(m)
    if a.shape[0] == 0:
        return 1.0, 0.0
    sign, logabs = _parlett_reid(np.ascontiguousarray(a))
    return float(sign), float(logabs)


def pfaffian(m) -> float:
    """Pfaffian of a real antisymmetric matrix of even dimension."""
    sign, logabs = slog_pfaffian(m)
    return sign * float(np.exp(logabs)) if sign else 0.0


def _lu(m):
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    with warnings.catch_warnings():
        # exact zero pivots are handled by the callers
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        return sla.lu_factor(a, check_finite=True)


def det_complex(m) -> complex:
    """Determinant from the pivot product of an LU factorisation."""
    a = np.asarray(m)
    if a.shape == (0, 0):
        return 1.0 + 0j
    with np.errstate(all="ignore"):
        lu, piv = _lu(a)
    swaps = np.count_nonzero(piv != np.arange(len(piv)))
    return complex((-1) ** swaps * np.prod(np.diag(lu)))


def inverse_complex(m) -> np.ndarray:
    """Inverse via LU; raises :class:`SingularMatrixError` on a tiny pivot."""
    a = np.asarray(m, dtype=complex)
    lu, piv = _lu(a)
    scale = np.max(np.abs(a))
    if scale == 0 or np.min(np.abs(np.diag(lu))) <= SINGULAR_PIVOT * scale:
        raise SingularMatrixError("matrix is numerically singular")
    return sla.lu_solve((lu, piv), np.eye(a.shape[0], dtype=complex))
