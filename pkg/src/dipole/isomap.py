"""Classical-MDS embedding of a distance matrix (the Isomap initialization).

Double-center the squared distances, take the top eigenpairs of the Gram
matrix, and scale eigenvectors by the square roots of their eigenvalues.
Negative eigenvalues (non-Euclidean inputs) clamp to zero coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ParameterError, ValidationError
from .geometry import DistanceMatrix

__all__ = ["Embedding", "double_center", "top_eigenpairs", "isomap_embed"]


@dataclass(frozen=True)
class Embedding:
    """n points in the target dimension d, stored as an (n, d) array."""

    coords: np.ndarray

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=float)
        if coords.ndim != 2 or coords.shape[1] < 1:
            raise ValidationError("embedding must be a 2-D array with d >= 1")
        if not np.all(np.isfinite(coords)):
            raise ValidationError("embedding contains non-finite coordinates")
        object.__setattr__(self, "coords", coords)

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def dim(self) -> int:
        return self.coords.shape[1]


def double_center(dist: DistanceMatrix) -> np.ndarray:
    """Gram matrix B = -1/2 C D^(2) C with C the centering matrix."""
    d2 = dist.entries**2
    row_mean = d2.mean(axis=1)
    total = d2.mean()
    b = -0.5 * (d2 - row_mean[None, :] - row_mean[:, None] + total)
    # mirror the upper triangle so B is symmetric to the last bit
    return np.triu(b) + np.triu(b, 1).T


def top_eigenpairs(b: np.ndarray, d: int) -> tuple[np.ndarray, np.ndarray]:
    """The d algebraically largest eigenpairs of a symmetric matrix.

    Eigenvalues come back in descending order with orthonormal eigenvectors
    as columns. Each eigenvector's sign is fixed so its largest-magnitude
    entry is positive. Residuals are checked against 1e-8 * ||B||_F.
    """
    b = np.asarray(b, dtype=float)
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise ParameterError("matrix must be square")
    if not 1 <= d <= b.shape[0]:
        raise ParameterError(f"d={d} must be between 1 and {b.shape[0]}")
    try:
        vals, vecs = np.linalg.eigh(b)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc
    vals = vals[::-1][:d]
    vecs = vecs[:, ::-1][:, :d]
    for j in range(d):
        if vecs[np.argmax(np.abs(vecs[:, j])), j] < 0:
            vecs[:, j] = -vecs[:, j]
    norm = np.linalg.norm(b)
    residual = np.linalg.norm(b @ vecs - vecs * vals[None, :], axis=0)
    if norm > 0 and np.any(residual > 1e-8 * norm):
        raise NumericalError("eigenpair residual exceeds tolerance")
    return vals, vecs


def isomap_embed(dist: DistanceMatrix, d: int) -> Embedding:
    """Embed a metric in R^d by classical MDS on the (geodesic) distances."""
    n = dist.n
    if not 1 <= d <= n - 1:
        raise ParameterError(f"target dimension d={d} must satisfy 1 <= d <= {n - 1}")
    vals, vecs = top_eigenpairs(double_center(dist), d)
    coords = vecs * np.sqrt(np.maximum(vals, 0.0))[None, :]
    coords = coords - coords.mean(axis=0, keepdims=True)
    return Embedding(coords)
