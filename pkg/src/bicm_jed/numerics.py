"""Special functions and small structured linear algebra.

Everything here works in the log domain where a likelihood could underflow.
Matrix sizes are tiny (at most 48 x 4), so the SVD is a one-sided Jacobi
sweep rather than a LAPACK call.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError

# ln I0 switches from the power series to the large-argument expansion here.
BESSEL_SWITCH = 20.0

_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def as_cvec(values) -> np.ndarray:
    """Return ``values`` as a finite 1-D complex128 array."""
    v = np.asarray(values, dtype=np.complex128)
    if v.ndim != 1 or v.size == 0:
        raise DomainError(f"expected a non-empty vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise DomainError("vector has non-finite entries")
    return v


def as_cmat(values, hermitian: bool = False) -> np.ndarray:
    """Return ``values`` as a finite 2-D complex128 array.

    With ``hermitian=True`` the matrix must equal its conjugate transpose to
    1e-12 relative (Frobenius).
    """
    m = np.asarray(values, dtype=np.complex128)
    if m.ndim != 2 or m.size == 0:
        raise DomainError(f"expected a non-empty matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DomainError("matrix has non-finite entries")
    if hermitian:
        scale = max(np.linalg.norm(m), 1.0)
        if np.linalg.norm(m - m.conj().T) > 1e-12 * scale:
            raise DomainError("matrix is not Hermitian")
    return m


def _log_i0_series(z: np.ndarray) -> np.ndarray:
    q = 0.25 * z * z
    term = np.ones_like(z)
    total = np.ones_like(z)
    k = 0
    while True:
        k += 1
        term = term * q / (k * k)
        total = total + term
        if np.all(term <= 1e-17 * total) or k > 200:
            break
    return np.log(total)


def _log_i0_asymptotic(z: np.ndarray) -> np.ndarray:
    term = np.ones_like(z)
    total = np.ones_like(z)
    for k in range(1, 40):
        term = term * (2 * k - 1) ** 2 / (8.0 * k * z)
        total = total + term
        if np.all(term <= 1e-17 * total):
            break
    return z - 0.5 * np.log(z) - _HALF_LOG_2PI + np.log(total)


def log_bessel_i0(z):
    """Natural log of the zeroth-order modified Bessel function ``I0(z)``.

    Uses the power series ``sum (z/2)^(2k) / (k!)^2`` below ``z = 20`` and the
    Hankel expansion ``e^z / sqrt(2 pi z) * (1 + 1/(8z) + 9/(128 z^2) + ...)``
    above. Accepts scalars or arrays; raises :class:`DomainError` for
    negative or non-finite input.
    """
    arr = np.asarray(z, dtype=np.float64)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise DomainError("log_bessel_i0 needs finite z >= 0")
    flat = arr.reshape(-1)
    out = np.empty_like(flat)
    small = flat < BESSEL_SWITCH
    if np.any(small):
        out[small] = _log_i0_series(flat[small])
    if np.any(~small):
        out[~small] = _log_i0_asymptotic(flat[~small])
    out = out.reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


def logsumexp(values, axis=None):
    """``log(sum(exp(values)))`` with the usual max shift."""
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        raise DomainError("logsumexp of an empty sequence")
    m = np.max(v, axis=axis, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    s = np.log(np.sum(np.exp(v - m), axis=axis, keepdims=True)) + m
    if axis is None:
        return float(s.reshape(()))
    return np.squeeze(s, axis=axis)


def jacobi_svd(x, tol: float = 1e-15, max_sweeps: int = 60):
    """One-sided (Hestenes) Jacobi SVD of a tall complex matrix.

    Returns ``(sigma, v)`` with ``x^H x = v diag(sigma^2) v^H``; singular values
    are sorted in decreasing order. Left singular vectors are not formed.
    """
    a = as_cmat(x).copy()
    n = a.shape[1]
    v = np.eye(n, dtype=np.complex128)
    # columns whose energy falls below this are numerically zero
    floor = tol * tol * max(np.vdot(a, a).real, np.finfo(float).tiny)
    for _ in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = np.vdot(a[:, p], a[:, p]).real
                beta = np.vdot(a[:, q], a[:, q]).real
                gamma = np.vdot(a[:, p], a[:, q])
                g = abs(gamma)
                if g <= tol * math.sqrt(alpha * beta) or min(alpha, beta) <= floor:
                    continue
                rotated = True
                phase = gamma / g
                zeta = (beta - alpha) / (2.0 * g)
                t = math.copysign(1.0, zeta) / (abs(zeta) + math.hypot(1.0, zeta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = c * t
                for m in (a, v):
                    col_p = m[:, p].copy()
                    col_q = m[:, q] / phase
                    m[:, p] = c * col_p - s * col_q
                    m[:, q] = s * col_p + c * col_q
        if not rotated:
            break
    sigma = np.linalg.norm(a, axis=0)
    order = np.argsort(-sigma, kind="stable")
    return sigma[order], v[:, order]


def _check_n0(n0: float) -> float:
    n0 = float(n0)
    if not (n0 > 0.0 and math.isfinite(n0)):
        raise DomainError(f"noise level must be positive and finite, got {n0}")
    return n0


def compute_d_matrix(x, n0: float) -> np.ndarray:
    """``D = (n0 I + X^H X)^-1`` assembled from the SVD of ``X``."""
    n0 = _check_n0(n0)
    sigma, v = jacobi_svd(x)
    return (v * (1.0 / (n0 + sigma**2))) @ v.conj().T


def log_det_phi(x, n0: float) -> float:
    """``ln det(n0 I_N + X X^H)`` from the singular values of ``X`` (N x n)."""
    n0 = _check_n0(n0)
    a = as_cmat(x)
    rows, cols = a.shape
    if cols > rows:
        # eigenvalues of X X^H are the squared singular values of X^H
        a = a.conj().T
        rows, cols = cols, rows
        sigma, _ = jacobi_svd(a)
        return float(np.sum(np.log(n0 + sigma**2)))
    sigma, _ = jacobi_svd(a)
    return float((rows - cols) * math.log(n0) + np.sum(np.log(n0 + sigma**2)))


def woodbury_inverse(x, n0: float) -> np.ndarray:
    """``(n0 I + X X^H)^-1 = (I - X D X^H) / n0`` with ``D`` from :func:`compute_d_matrix`."""
    a = as_cmat(x)
    d = compute_d_matrix(a, n0)
    return (np.eye(a.shape[0]) - a @ d @ a.conj().T) / n0
