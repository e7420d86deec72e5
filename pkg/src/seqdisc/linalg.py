"""Small dense real symmetric linear algebra.

Everything here works on plain ``float64`` numpy arrays.  The eigen-solver is
a cyclic Jacobi iteration; the rotation sweeps run in a numba kernel when
available and in a numpy loop otherwise (see :mod:`seqdisc._accel`).
"""
from typing import NamedTuple

import numpy as np

from ._accel import njit, resolve_backend
from .errors import InvalidParameterError, NotPSDError, NumericalFailure

EIGEN_TOL = 1e-14
MAX_SWEEPS = 100
RANK_TOL = 1e-10
SYMMETRY_TOL = 1e-12


class EigenDecomposition(NamedTuple):
    values: np.ndarray
    vectors: np.ndarray
    """Columns are the orthonormal eigenvectors, ordered like ``values``."""
    sweeps: int = 0

    def reconstruct(self):
        return (self.vectors * self.values) @ self.vectors.T


def as_symmetric(m, atol=SYMMETRY_TOL):
    """Return ``m`` as an exactly symmetric float array.

    Raises ``InvalidParameterError`` if ``m`` is not square or deviates from
    symmetry by more than ``atol`` (relative to its largest entry).
    """
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidParameterError(f"expected a square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    if a.size and np.max(np.abs(a - a.T)) > atol * scale:
        raise InvalidParameterError("matrix is not symmetric")
    return 0.5 * (a + a.T)


def _off_norm(a):
    n = a.shape[0]
    total = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                total += a[i, j] * a[i, j]
    return np.sqrt(total)


_off_norm_jit = njit(cache=True)(_off_norm)


def _rotation(app, aqq, apq):
    tau = (aqq - app) / (2.0 * apq)
    if tau >= 0.0:
        t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
    else:
        t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
    c = 1.0 / np.sqrt(1.0 + t * t)
    return c, t * c


_rotation_jit = njit(cache=True)(_rotation)


@njit(cache=True)
def _jacobi_numba(a, v, tol, max_sweeps):
    n = a.shape[0]
    for sweep in range(max_sweeps + 1):
        if _off_norm_jit(a) < tol:
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                c, s = _rotation_jit(a[p, p], a[q, q], apq)
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
    return -1


def _jacobi_numpy(a, v, tol, max_sweeps):
    n = a.shape[0]
    offdiag = ~np.eye(n, dtype=bool)
    for sweep in range(max_sweeps + 1):
        if np.sqrt(np.sum(a[offdiag] ** 2)) < tol:
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                c, s = _rotation(a[p, p], a[q, q], apq)
                colp = a[:, p].copy()
                colq = a[:, q]
                a[:, p] = c * colp - s * colq
                a[:, q] = s * colp + c * colq
                rowp = a[p, :].copy()
                rowq = a[q, :]
                a[p, :] = c * rowp - s * rowq
                a[q, :] = s * rowp + c * rowq
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    return -1


def sym_eigen(m, tol=EIGEN_TOL, max_sweeps=MAX_SWEEPS, backend=None):
    """Full eigendecomposition of a real symmetric matrix by cyclic Jacobi.

    Convergence is declared when the off-diagonal Frobenius norm drops below
    ``tol * max(1, ||m||_F)``.  Eigenvalues are returned in ascending order;
    each eigenvector is signed so that its largest-magnitude component is
    positive.
    """
    a = as_symmetric(m)
    n = a.shape[0]
    v = np.eye(n)
    if n == 0:
        return EigenDecomposition(np.zeros(0), v, 0)
    threshold = tol * max(1.0, float(np.linalg.norm(a)))
    if resolve_backend(backend) == "numba":
        sweeps = _jacobi_numba(a, v, threshold, max_sweeps)
    else:
        sweeps = _jacobi_numpy(a, v, threshold, max_sweeps)
    if sweeps < 0:
        raise NumericalFailure(f"Jacobi iteration did not converge in {max_sweeps} sweeps")
    values = np.diag(a).copy()
    order = np.argsort(values, kind="stable")
    values = values[order]
    v = v[:, order]
    lead = np.argmax(np.abs(v), axis=0)
    signs = np.where(v[lead, np.arange(n)] < 0, -1.0, 1.0)
    return EigenDecomposition(values, v * signs, int(sweeps))


def is_psd(m, tol=0.0):
    """Return ``(ok, min_eigenvalue)`` with ``ok`` true iff min eigenvalue >= -tol."""
    if tol < 0:
        raise InvalidParameterError("tol must be non-negative")
    lam_min = float(sym_eigen(m).values[0])
    return lam_min >= -tol, lam_min


def inv_sqrt_psd(m, rank_tol=RANK_TOL):
    """Pseudo-inverse square root of a PSD matrix.

    Eigenvalues below ``rank_tol * lambda_max`` are treated as zero.  A
    negative eigenvalue beyond that threshold raises ``NotPSDError``.
    """
    eig = sym_eigen(m)
    vals, vecs = eig.values, eig.vectors
    cutoff = rank_tol * max(float(np.max(np.abs(vals))), np.finfo(float).tiny)
    if vals[0] < -cutoff:
        raise NotPSDError(f"matrix has eigenvalue {vals[0]:.3e} < 0")
    inv = np.zeros_like(vals)
    keep = vals > cutoff
    inv[keep] = 1.0 / np.sqrt(vals[keep])
    return as_symmetric((vecs * inv) @ vecs.T, atol=1e-8)


def gram(vectors):
    """Gram matrix of the rows of ``vectors``."""
    try:
        x = np.array(vectors, dtype=float)
    except ValueError as exc:
        raise InvalidParameterError("vectors must all have the same dimension") from exc
    if x.ndim != 2:
        raise InvalidParameterError("vectors must all have the same dimension")
    return as_symmetric(x @ x.T)
