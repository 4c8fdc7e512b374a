"""Feature standardization and PCA with a cumulative-variance cutoff.

Standardization is z-scoring with population (1/n) statistics; rate and
scalar features live on wildly different scales, so PCA runs on the
correlation structure.  The eigensolver is a cyclic Jacobi iteration with a
fixed sweep order and a fixed eigenvector sign convention, which makes
fitted models bit-reproducible for a given input matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ValidationError

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
SYMMETRY_TOL = 1e-10


def _as_2d(matrix) -> np.ndarray:
    if hasattr(matrix, "as_array"):
        matrix = matrix.as_array()
    arr = np.asarray(matrix, dtype=float)
    if arr.ndim != 2:
        raise ValidationError(f"expected a 2-D matrix, got shape {arr.shape}")
    return arr


@dataclass
class Standardizer:
    means: np.ndarray
    stddevs: np.ndarray  # population convention; zero-variance columns keep 0


@dataclass
class PcaModel:
    components: np.ndarray      # k x d, rows are orthonormal eigenvectors
    eigenvalues: np.ndarray     # all d, descending, clamped at 0
    k: int
    variance_threshold: float


def fit_standardizer(matrix) -> Standardizer:
    x = _as_2d(matrix)
    if x.shape[0] < 2:
        raise ValidationError("standardizer needs at least 2 rows")
    return Standardizer(means=x.mean(axis=0), stddevs=x.std(axis=0))


def standardize(matrix, std: Standardizer) -> np.ndarray:
    x = _as_2d(matrix)
    if x.shape[1] != std.means.shape[0]:
        raise ValidationError(
            f"column count {x.shape[1]} does not match standardizer "
            f"dimension {std.means.shape[0]}")
    centered = x - std.means
    safe = np.where(std.stddevs > 0, std.stddevs, 1.0)
    return np.where(std.stddevs > 0, centered / safe, 0.0)


def covariance(matrix) -> np.ndarray:
    """(1/n) X^T X of an already-centered matrix, symmetrized exactly."""
    x = _as_2d(matrix)
    if x.shape[0] < 2:
        raise ValidationError("covariance needs at least 2 rows")
    cov = (x.T @ x) / x.shape[0]
    return (cov + cov.T) / 2.0


def _max_offdiag(a: np.ndarray) -> float:
    if a.shape[0] < 2:
        return 0.0
    off = np.abs(a - np.diag(np.diag(a)))
    return float(off.max())


def eigendecompose_symmetric(a) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Returns (eigenvalues descending, eigenvectors as rows in the same
    order).  Sweeps run in fixed row-major pair order until the largest
    off-diagonal magnitude drops below 1e-12; failure to converge within
    100 sweeps raises NumericalError.  Each eigenvector's sign is fixed so
    its largest-magnitude entry (first such, on ties) is positive.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {a.shape}")
    if float(np.abs(a - a.T).max(initial=0.0)) > SYMMETRY_TOL:
        raise ValidationError("matrix is not symmetric within 1e-10")

    d = a.shape[0]
    work = a.copy()
    vectors = np.eye(d)

    sweeps = 0
    while _max_offdiag(work) >= JACOBI_TOL:
        if sweeps >= JACOBI_MAX_SWEEPS:
            raise NumericalError(
                f"Jacobi iteration did not converge in {JACOBI_MAX_SWEEPS} sweeps "
                f"(max off-diagonal {_max_offdiag(work):.3e})")
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = work[p, q]
                if apq == 0.0:
                    continue
                theta = (work[q, q] - work[p, p]) / (2.0 * apq)
                if theta >= 0.0:
                    t = 1.0 / (theta + math.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c

                col_p = work[:, p].copy()
                col_q = work[:, q].copy()
                work[:, p] = c * col_p - s * col_q
                work[:, q] = s * col_p + c * col_q
                row_p = work[p, :].copy()
                row_q = work[q, :].copy()
                work[p, :] = c * row_p - s * row_q
                work[q, :] = s * row_p + c * row_q
                # the rotation annihilates this pair analytically
                work[p, q] = 0.0
                work[q, p] = 0.0

                vec_p = vectors[:, p].copy()
                vec_q = vectors[:, q].copy()
                vectors[:, p] = c * vec_p - s * vec_q
                vectors[:, q] = s * vec_p + c * vec_q
        sweeps += 1

    eigenvalues = np.diag(work).copy()
    order = np.argsort(-eigenvalues, kind="stable")
    eigenvalues = eigenvalues[order]
    rows = vectors[:, order].T.copy()
    for i in range(d):
        pivot = int(np.argmax(np.abs(rows[i])))
        if rows[i, pivot] < 0:
            rows[i] = -rows[i]
    return eigenvalues, rows


def select_k(eigenvalues: np.ndarray, threshold: float) -> int:
    """Smallest k whose leading eigenvalues explain `threshold` of the variance."""
    vals = np.asarray(eigenvalues, dtype=float)
    if not 0.0 < threshold <= 1.0:
        raise ValidationError(f"threshold must be in (0, 1], got {threshold}")
    if vals.size == 0 or np.any(vals < 0):
        raise ValidationError("eigenvalues must be a nonempty nonnegative vector")
    total = float(vals.sum())
    if total == 0.0:
        raise ValidationError("all-zero spectrum: no variance to explain")
    ratios = np.cumsum(vals) / total
    ratios[-1] = 1.0  # exact by definition; beats float drift at threshold 1.0
    return int(np.searchsorted(ratios, threshold, side="left")) + 1


def fit_pca(matrix, threshold: float = 0.6) -> PcaModel:
    """Fit PCA on a standardized matrix, retaining the variance-cutoff components."""
    cov = covariance(matrix)
    eigenvalues, rows = eigendecompose_symmetric(cov)
    eigenvalues = np.where(eigenvalues < 0.0, 0.0, eigenvalues)
    k = select_k(eigenvalues, threshold)
    return PcaModel(components=rows[:k].copy(), eigenvalues=eigenvalues,
                    k=k, variance_threshold=threshold)


def project(model: PcaModel, vector) -> np.ndarray:
    """Project one d-vector onto the retained components."""
    x = np.asarray(vector, dtype=float)
    if x.ndim != 1 or x.shape[0] != model.components.shape[1]:
        raise ValidationError(
            f"vector of dimension {x.shape} does not match PCA input "
            f"dimension {model.components.shape[1]}")
    return model.components @ x


def transform(model: PcaModel, matrix) -> np.ndarray:
    """Project an n x d matrix to n x k."""
    x = _as_2d(matrix)
    if x.shape[1] != model.components.shape[1]:
        raise ValidationError(
            f"matrix with {x.shape[1]} columns does not match PCA input "
            f"dimension {model.components.shape[1]}")
    return x @ model.components.T
