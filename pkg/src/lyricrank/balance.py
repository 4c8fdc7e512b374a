"""SMOTE oversampling to bring the minority class up to exact parity.

Synthetic points interpolate between a minority sample and one of its k
nearest minority neighbors: x + lambda * (x_nn - x).  Base samples cycle
through the minority list in index order; the neighbor choice and lambda
come from a per-point SplitMix64 substream, so generation is reproducible
(and parallelizable) point by point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .rng import SplitMix64, substream_seed


@dataclass
class SmoteConfig:
    """k_neighbors must stay below the minority class size; target is parity."""

    k_neighbors: int = 5
    seed: int = 0


def knn_indices(points, query_index: int, k: int) -> list[int]:
    """Indices of the k nearest points to points[query_index], excluding itself.

    Euclidean distance; ties broken by lower index.
    """
    pts = np.asarray(points, dtype=float)
    n = pts.shape[0]
    if k >= n:
        raise ValidationError(f"k={k} must be smaller than the number of points ({n})")
    if k < 1:
        raise ValidationError(f"k must be at least 1, got {k}")
    others = np.concatenate([np.arange(query_index), np.arange(query_index + 1, n)])
    diffs = pts[others] - pts[query_index]
    sq_dists = np.einsum("ij,ij->i", diffs, diffs)
    order = np.lexsort((others, sq_dists))
    return [int(others[i]) for i in order[:k]]


def smote(minority, n_synthetic: int, cfg: SmoteConfig) -> np.ndarray:
    """Generate n_synthetic interpolated minority points, deterministically."""
    pts = np.asarray(minority, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise ValidationError("SMOTE needs at least 2 minority samples")
    if cfg.k_neighbors >= pts.shape[0]:
        raise ValidationError(
            f"k_neighbors={cfg.k_neighbors} must be smaller than the minority "
            f"class size ({pts.shape[0]})")
    if n_synthetic < 0:
        raise ValidationError("n_synthetic must be nonnegative")

    m = pts.shape[0]
    neighbors = [knn_indices(pts, i, cfg.k_neighbors) for i in range(m)]
    out = np.empty((n_synthetic, pts.shape[1]), dtype=float)
    for i in range(n_synthetic):
        base = i % m
        stream = SplitMix64(substream_seed(cfg.seed, i))
        nn = neighbors[base][stream.below(cfg.k_neighbors)]
        lam = stream.uniform()
        out[i] = pts[base] + lam * (pts[nn] - pts[base])
    return out


def balance_classes(rows, labels, cfg: SmoteConfig) -> tuple[np.ndarray, np.ndarray]:
    """Append synthetic minority rows until both classes have equal counts.

    Original rows come first and are preserved verbatim; majority rows are
    never touched.  Raises on single-class input.
    """
    x = np.asarray(rows, dtype=float)
    y = np.asarray(labels)
    if x.shape[0] != y.shape[0]:
        raise ValidationError("rows and labels must have equal length")
    classes, counts = np.unique(y, return_counts=True)
    if classes.size != 2:
        raise ValidationError(f"expected exactly 2 classes, got {classes.size}")

    if counts[0] == counts[1]:
        return x.copy(), y.copy()
    minority_label = classes[int(np.argmin(counts))]
    n_synthetic = int(abs(counts[0] - counts[1]))
    minority_rows = x[y == minority_label]
    synthetic = smote(minority_rows, n_synthetic, cfg)
    out_rows = np.vstack([x, synthetic])
    out_labels = np.concatenate([y, np.full(n_synthetic, minority_label, dtype=y.dtype)])
    return out_rows, out_labels
