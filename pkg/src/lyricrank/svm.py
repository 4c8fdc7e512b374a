"""Kernel SVM trained by simplified sequential minimal optimization.

The solver iterates over examples violating their KKT condition beyond
tol, pairs each with a seeded-random second index, and solves the
two-variable subproblem in closed form with box clipping.  Training is
single-threaded and fully determined by (data, parameters, seed).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .rng import SplitMix64

KINDS = ("linear", "poly", "rbf")


@dataclass
class KernelSpec:
    """Kernel kind plus exactly the parameters that kind requires."""

    kind: str
    gamma: float | None = None
    degree: int | None = None
    coef0: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown kernel kind '{self.kind}'")
        if self.kind == "linear":
            if (self.gamma, self.degree, self.coef0) != (None, None, None):
                raise ValidationError("linear kernel takes no parameters")
        elif self.kind == "rbf":
            if self.gamma is None or self.gamma <= 0:
                raise ValidationError("rbf kernel requires gamma > 0")
            if (self.degree, self.coef0) != (None, None):
                raise ValidationError("rbf kernel takes only gamma")
        else:  # poly
            if self.gamma is None or self.gamma <= 0:
                raise ValidationError("poly kernel requires gamma > 0")
            if self.degree is None or self.degree < 1:
                raise ValidationError("poly kernel requires degree >= 1")
            if self.coef0 is None:
                raise ValidationError("poly kernel requires coef0")

    @classmethod
    def linear(cls) -> "KernelSpec":
        return cls(kind="linear")

    @classmethod
    def rbf(cls, gamma: float) -> "KernelSpec":
        return cls(kind="rbf", gamma=gamma)

    @classmethod
    def poly(cls, gamma: float, degree: int = 3, coef0: float = 1.0) -> "KernelSpec":
        return cls(kind="poly", gamma=gamma, degree=degree, coef0=coef0)


@dataclass
class SvmModel:
    kernel: KernelSpec
    support_vectors: np.ndarray
    dual_coefs: np.ndarray  # alpha_i * y_i per stored support vector
    bias: float
    C: float
    diagnostics: dict = field(default_factory=dict)


def kernel_eval(spec: KernelSpec, x, y) -> float:
    """K(x, y) for a single pair of vectors."""
    a = np.asarray(x, dtype=float)
    b = np.asarray(y, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValidationError(f"kernel arguments must be equal-length vectors, "
                              f"got shapes {a.shape} and {b.shape}")
    if spec.kind == "linear":
        return float(a @ b)
    if spec.kind == "poly":
        return float((spec.gamma * (a @ b) + spec.coef0) ** spec.degree)
    diff = a - b
    return float(np.exp(-spec.gamma * (diff @ diff)))


def kernel_matrix(spec: KernelSpec, a, b) -> np.ndarray:
    """All pairwise kernel values between the rows of a and the rows of b."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    if a.shape[1] != b.shape[1]:
        raise ValidationError(f"kernel arguments must share dimension, "
                              f"got {a.shape[1]} and {b.shape[1]}")
    if spec.kind == "linear":
        return a @ b.T
    if spec.kind == "poly":
        return (spec.gamma * (a @ b.T) + spec.coef0) ** spec.degree
    sq = (np.sum(a * a, axis=1)[:, None] + np.sum(b * b, axis=1)[None, :]
          - 2.0 * (a @ b.T))
    np.maximum(sq, 0.0, out=sq)
    return np.exp(-spec.gamma * sq)


def _kkt_violation(alphas: np.ndarray, y: np.ndarray, margins: np.ndarray,
                   C: float) -> float:
    """Largest KKT residual; margins holds y_i * E_i per example."""
    lower = np.where(alphas < C, np.maximum(0.0, -margins), 0.0)
    upper = np.where(alphas > 0, np.maximum(0.0, margins), 0.0)
    return float(np.maximum(lower, upper).max())


def train_smo(X, y, C: float, spec: KernelSpec, tol: float = 1e-3,
              max_passes: int = 10, max_iters: int = 100000,
              seed: int = 0) -> SvmModel:
    """Train a binary SVM with labels in {-1, +1}.

    Stops after `max_passes` consecutive full passes without an update, or
    after `max_iters` accepted updates; in the latter case the model is
    still returned, with the residual KKT violation in its diagnostics.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise ValidationError("X must be n x d with one label per row")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValidationError("labels must be -1 or +1")
    if np.all(y == y[0]):
        raise ValidationError("training data contains a single class")
    if not np.all(np.isfinite(X)):
        raise ValidationError("features must be finite")
    if C <= 0:
        raise ValidationError(f"C must be positive, got {C}")

    n = X.shape[0]
    K = kernel_matrix(spec, X, X)
    alphas = np.zeros(n)
    b = 0.0
    u = np.zeros(n)  # u_i = sum_j alpha_j y_j K_ij, bias excluded
    rng = SplitMix64(seed)
    updates = 0
    clean_passes = 0

    while clean_passes < max_passes and updates < max_iters:
        changed = 0
        for i in range(n):
            e_i = u[i] + b - y[i]
            r_i = y[i] * e_i
            if not ((r_i < -tol and alphas[i] < C) or (r_i > tol and alphas[i] > 0)):
                continue
            j = rng.below(n - 1)
            if j >= i:
                j += 1
            e_j = u[j] + b - y[j]
            a_i, a_j = alphas[i], alphas[j]
            if y[i] != y[j]:
                lo = max(0.0, a_j - a_i)
                hi = min(C, C + a_j - a_i)
            else:
                lo = max(0.0, a_i + a_j - C)
                hi = min(C, a_i + a_j)
            if lo >= hi:
                continue
            eta = 2.0 * K[i, j] - K[i, i] - K[j, j]
            if eta >= 0.0:
                continue
            a_j_new = a_j - y[j] * (e_i - e_j) / eta
            a_j_new = min(hi, max(lo, a_j_new))
            if abs(a_j_new - a_j) < 1e-5:
                continue
            a_i_new = a_i + y[i] * y[j] * (a_j - a_j_new)

            d_i = a_i_new - a_i
            d_j = a_j_new - a_j
            b1 = b - e_i - y[i] * d_i * K[i, i] - y[j] * d_j * K[i, j]
            b2 = b - e_j - y[i] * d_i * K[i, j] - y[j] * d_j * K[j, j]
            if 0.0 < a_i_new < C:
                b = b1
            elif 0.0 < a_j_new < C:
                b = b2
            else:
                b = (b1 + b2) / 2.0

            u += (d_i * y[i]) * K[i] + (d_j * y[j]) * K[j]
            alphas[i] = a_i_new
            alphas[j] = a_j_new
            changed += 1
            updates += 1
            if updates >= max_iters:
                break
        clean_passes = clean_passes + 1 if changed == 0 else 0

    margins = y * (u + b - y)
    violation = _kkt_violation(alphas, y, margins, C)
    mask = alphas > 0.0
    return SvmModel(
        kernel=spec,
        support_vectors=X[mask].copy(),
        dual_coefs=(alphas * y)[mask],
        bias=float(b),
        C=float(C),
        diagnostics={
            "iterations": updates,
            "converged": clean_passes >= max_passes,
            "final_kkt_violation": violation,
            "n_support_vectors": int(mask.sum()),
        },
    )


def decision_values(model: SvmModel, X) -> np.ndarray:
    """f(x) = sum_i dual_coef_i K(sv_i, x) + bias for each row of X."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if model.support_vectors.shape[0] == 0:
        return np.full(X.shape[0], model.bias)
    if X.shape[1] != model.support_vectors.shape[1]:
        raise ValidationError(
            f"input dimension {X.shape[1]} does not match support vectors "
            f"({model.support_vectors.shape[1]})")
    k = kernel_matrix(model.kernel, model.support_vectors, X)
    return model.dual_coefs @ k + model.bias


def decision_value(model: SvmModel, x) -> float:
    return float(decision_values(model, np.asarray(x, dtype=float)[None, :])[0])


def predict(model: SvmModel, x) -> int:
    """Label in {-1, +1}; the zero decision value maps to +1."""
    return 1 if decision_value(model, x) >= 0.0 else -1


def predict_many(model: SvmModel, X) -> np.ndarray:
    return np.where(decision_values(model, X) >= 0.0, 1, -1)


def dual_objective(X, y, alphas, spec: KernelSpec, C: float | None = None) -> float:
    """Dual value sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij.

    Validates dual feasibility: alphas in the box and sum alpha_i y_i = 0
    within 1e-8.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    a = np.asarray(alphas, dtype=float)
    if np.any(a < -1e-12):
        raise ValidationError("alphas must be nonnegative")
    if C is not None and np.any(a > C + 1e-12):
        raise ValidationError(f"alphas must not exceed C={C}")
    if abs(float(a @ y)) > 1e-8:
        raise ValidationError("alphas violate the equality constraint sum(alpha*y)=0")
    K = kernel_matrix(spec, X, X)
    ay = a * y
    return float(a.sum() - 0.5 * (ay @ K @ ay))
