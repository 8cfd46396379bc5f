"""Dense spectral utilities for small complex matrices.

All functions accept a single ``(m, m)`` array; ``matrix_exp`` and the
``*_batch`` helpers also accept stacks of shape ``(..., m, m)``.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from .errors import MatrixExpOverflow, NumericalFailure

__all__ = [
    "eigenvalues",
    "spectral_abscissa",
    "spectral_radius",
    "spectral_abscissa_batch",
    "operator_norm",
    "matrix_exp",
    "shilov_bound",
    "match_spectra",
]


def _as_square(A) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    if A.ndim < 2 or A.shape[-1] != A.shape[-2]:
        raise ValueError(f"expected square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def eigenvalues(A) -> np.ndarray:
    """Eigenvalues of ``A`` with algebraic multiplicity (LAPACK QR iteration)."""
    A = _as_square(A)
    try:
        return np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigenvalue iteration did not converge: {exc}") from exc


def spectral_abscissa(A) -> float:
    """``max Re sigma(A)``."""
    return float(np.max(eigenvalues(A).real))


def spectral_radius(A) -> float:
    """``max |sigma(A)|``."""
    return float(np.max(np.abs(eigenvalues(A))))


def spectral_abscissa_batch(As) -> tuple[np.ndarray, np.ndarray]:
    """Spectral abscissae of a stack ``(K, m, m)``.

    Returns ``(abscissae, failed)``; failed points (non-finite input or a
    non-converged eigensolve) get ``nan`` and ``failed[k] = True``.
    """
    As = np.asarray(As, dtype=complex)
    K = As.shape[0]
    out = np.full(K, np.nan)
    finite = np.all(np.isfinite(As.reshape(K, -1)), axis=1)
    idx = np.flatnonzero(finite)
    if idx.size:
        try:
            out[idx] = np.linalg.eigvals(As[idx]).real.max(axis=-1)
        except np.linalg.LinAlgError:
            for k in idx:
                try:
                    out[k] = np.linalg.eigvals(As[k]).real.max()
                except np.linalg.LinAlgError:
                    pass
    return out, np.isnan(out)


def operator_norm(A) -> float:
    """Largest singular value."""
    return float(np.linalg.norm(_as_square(A), 2))


def matrix_exp(A) -> np.ndarray:
    """``exp(A)`` for a matrix or a stack of matrices.

    Scalars (``1 x 1``) use the complex exponential directly; larger systems
    use Pade scaling and squaring.

    Raises
    ------
    MatrixExpOverflow
        If any result entry is not finite.  The exception carries ``||A||_2``
        of the first offending matrix.
    """
    A = _as_square(A)
    with np.errstate(over="ignore", invalid="ignore"):
        if A.shape[-1] == 1:
            E = np.exp(A)
        else:
            E = scipy.linalg.expm(A)
    if not np.all(np.isfinite(E)):
        bad = ~np.all(np.isfinite(E.reshape(-1, A.shape[-1] ** 2)), axis=1)
        k = int(np.argmax(bad))
        raise MatrixExpOverflow(float(np.linalg.norm(A.reshape(-1, *A.shape[-2:])[k], 2)), index=k)
    return E


def shilov_bound(A, t: float) -> float:
    """Right-hand side of the Shilov inequality for ``||exp(tA)||_2``.

    ``exp(t * abscissa(A)) * (1 + sum_{k=1}^{m-1} (2t)^k / k! * ||A||_2^k)``,
    where the norm is the operator 2-norm.  Returns ``inf`` if the value
    overflows.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    A = _as_square(A)
    m = A.shape[0]
    a = spectral_abscissa(A)
    nrm = operator_norm(A)
    poly = 1.0 + sum((2 * t * nrm) ** k / math.factorial(k) for k in range(1, m))
    try:
        return math.exp(t * a) * poly
    except OverflowError:
        return math.inf


def match_spectra(a, b) -> float:
    """Bottleneck distance between two eigenvalue multisets.

    Minimises the largest pairwise distance over all bijections; exact for
    up to 7 values, otherwise uses a min-sum assignment.
    """
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.size != b.size:
        raise ValueError("multisets have different sizes")
    if a.size == 0:
        return 0.0
    D = np.abs(a[:, None] - b[None, :])
    if a.size <= 7:
        return float(min(max(D[i, p] for i, p in enumerate(perm)) for perm in itertools.permutations(range(a.size))))
    rows, cols = linear_sum_assignment(D**2)
    return float(D[rows, cols].max())
