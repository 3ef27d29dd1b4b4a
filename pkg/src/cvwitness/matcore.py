"""
Small dense linear algebra: singular values, trace norm, symmetric spectra.

Every matrix met in this package is at most a few dozen rows wide, so the
routines favour robustness over speed.  Two SVD back ends are available:

* ``"lapack"`` (default) delegates to :func:`numpy.linalg.svd` and accepts
  stacks of matrices of shape ``(..., m, n)``;
* ``"jacobi"`` is a one-sided (Hestenes) Jacobi iteration written here,
  handy as an independent cross-check and for complex input.
"""

import numpy as np

from .constants import JACOBI_MAX_SWEEPS, JACOBI_TOL, SYMMETRY_TOL
from .exceptions import InputError, NumericError

__all__ = [
    "as_matrix",
    "svd",
    "jacobi_singular_values",
    "trace_norm",
    "sym_eigvals",
    "herm_eigvals",
]


def as_matrix(m, allow_stack=False):
    """Convert ``m`` to a finite 2-D (or stacked) ndarray, or raise."""
    arr = np.asarray(m)
    if arr.dtype.kind not in "biufc":
        raise InputError(f"matrix must be numeric, got dtype {arr.dtype}")
    if arr.ndim != 2 and not (allow_stack and arr.ndim > 2):
        raise InputError(f"expected a 2-D matrix, got shape {arr.shape}")
    if 0 in arr.shape:
        raise InputError("matrix dimensions must be positive")
    if not np.all(np.isfinite(arr)):
        raise InputError("matrix has non-finite entries")
    if arr.dtype.kind in "biu":
        arr = arr.astype(float)
    return arr


def jacobi_singular_values(m, tol=JACOBI_TOL, max_sweeps=JACOBI_MAX_SWEEPS):
    """Singular values of one matrix by one-sided Jacobi rotations.

    Columns are orthogonalised pairwise until every normalised inner product
    falls below ``tol``; the singular values are then the column norms.
    Each pair is first phase-aligned so that a real rotation suffices.
    """
    u = as_matrix(m)
    if u.shape[0] < u.shape[1]:
        u = u.conj().T
    u = np.array(u, dtype=np.complex128 if np.iscomplexobj(u) else float)
    n = u.shape[1]

    for _ in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                up, uq = u[:, p], u[:, q]
                alpha = np.vdot(up, up).real
                beta = np.vdot(uq, uq).real
                g = np.vdot(up, uq)
                gabs = abs(g)
                if gabs == 0.0 or gabs <= tol * np.sqrt(alpha * beta):
                    continue
                rotated = True
                # align q so that <u_p, u_q> = |g| and a real rotation works
                uq = uq * (np.conj(g) / gabs)
                zeta = (beta - alpha) / (2.0 * gabs)
                t = np.copysign(1.0, zeta) / (abs(zeta) + np.hypot(1.0, zeta))
                c = 1.0 / np.hypot(1.0, t)
                s = c * t
                u[:, p], u[:, q] = c * up - s * uq, s * up + c * uq
        if not rotated:
            return np.sort(np.linalg.norm(u, axis=0))[::-1]
    raise NumericError(f"Jacobi SVD did not converge in {max_sweeps} sweeps")


def svd(m, method="lapack"):
    """Return the singular values of ``m`` in nonincreasing order.

    Parameters
    ----------
    m : array_like, shape (r, c) or (..., r, c) for ``method="lapack"``
    method : {"lapack", "jacobi"}

    Returns
    -------
    ndarray of the ``min(r, c)`` singular values (per matrix for stacks).
    """
    if method == "lapack":
        arr = as_matrix(m, allow_stack=True)
        try:
            return np.linalg.svd(arr, compute_uv=False)
        except np.linalg.LinAlgError as exc:
            raise NumericError(str(exc)) from exc
    if method == "jacobi":
        return jacobi_singular_values(m)
    raise InputError(f"unknown SVD method {method!r}")


def trace_norm(m, method="lapack"):
    """Sum of singular values (along the last axis for stacks)."""
    return np.sum(svd(m, method=method), axis=-1)


def _check_symmetric(arr, tol, hermitian):
    if arr.shape[0] != arr.shape[1]:
        raise InputError(f"expected a square matrix, got shape {arr.shape}")
    other = arr.conj().T if hermitian else arr.T
    asym = np.max(np.abs(arr - other))
    if asym > tol * max(1.0, np.max(np.abs(arr))):
        kind = "Hermitian" if hermitian else "symmetric"
        raise InputError(f"matrix is not {kind} (max deviation {asym:.3g})")


def sym_eigvals(m, tol=SYMMETRY_TOL):
    """Ascending eigenvalues of a real symmetric matrix."""
    arr = as_matrix(m)
    if np.iscomplexobj(arr):
        raise InputError("sym_eigvals expects a real matrix; see herm_eigvals")
    _check_symmetric(arr, tol, hermitian=False)
    return np.linalg.eigvalsh(0.5 * (arr + arr.T))


def herm_eigvals(m, tol=SYMMETRY_TOL):
    """Ascending eigenvalues of a Hermitian matrix."""
    arr = as_matrix(m)
    _check_symmetric(arr, tol, hermitian=True)
    return np.linalg.eigvalsh(0.5 * (arr + arr.conj().T))
