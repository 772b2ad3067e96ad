"""Quantitative quality tests comparing a target metric against an embedding.

All four tests compare a reference metric d_H with the metric d_L obtained by
pulling back the Euclidean metric of the embedded points, and all are defined
so that lower values mean better preservation:

- ijk: probability that the relative order of two distances from a common
  point is violated, estimated by sampling triples.
- residual variance: 1 - R^2 for the Pearson correlation between the two
  distance matrices.
- global degree-0 / degree-1 persistence: 2-Wasserstein distance between
  Rips diagrams of farthest-point subsamples taken under each metric.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInputError, ParameterError
from .geometry import DistanceMatrix, farthest_point_sample, restrict
from .wasserstein import wasserstein_pp

__all__ = [
    "EvaluationReport",
    "ijk_test",
    "residual_variance",
    "global_ph_score",
    "evaluate",
]


@dataclass(frozen=True)
class EvaluationReport:
    """The four scores plus the sampling parameters that produced them."""

    ijk_score: float
    residual_variance: float
    ph0_score: float
    ph1_score: float
    parameters: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "ijk_score": self.ijk_score,
            "residual_variance": self.residual_variance,
            "ph0_score": self.ph0_score,
            "ph1_score": self.ph1_score,
            "parameters": dict(self.parameters),
        }


def _check_same_size(dh: DistanceMatrix, dl: DistanceMatrix):
    if dh.n != dl.n:
        raise ParameterError(f"metric sizes differ: {dh.n} vs {dl.n}")


def ijk_test(
    dh: DistanceMatrix, dl: DistanceMatrix, samples: int = 10000, seed: int = 0
) -> float:
    """Probability that the order of two distances from a common point flips.

    Draws triples (i, j, k) uniformly with replacement and checks whether
    d(i,j) vs d(i,k) has the same ordering under both metrics; ties satisfy
    both inclusive inequalities and count as preserved. Returns one minus the
    preserved fraction.
    """
    _check_same_size(dh, dl)
    if samples < 1:
        raise ParameterError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, dh.n, size=(samples, 3))
    i, j, k = idx[:, 0], idx[:, 1], idx[:, 2]
    hij, hik = dh.entries[i, j], dh.entries[i, k]
    lij, lik = dl.entries[i, j], dl.entries[i, k]
    preserved = ((hij <= hik) & (lij <= lik)) | ((hij >= hik) & (lij >= lik))
    return float(1.0 - preserved.mean())


def ijk_exhaustive(dh: DistanceMatrix, dl: DistanceMatrix) -> float:
    """Exact ijk value over all n^3 triples (test-scale oracle)."""
    _check_same_size(dh, dl)
    h = dh.entries
    low = dl.entries
    hij = h[:, :, None]
    hik = h[:, None, :]
    lij = low[:, :, None]
    lik = low[:, None, :]
    preserved = ((hij <= hik) & (lij <= lik)) | ((hij >= hik) & (lij >= lik))
    return float(1.0 - preserved.mean())


def residual_variance(dh: DistanceMatrix, dl: DistanceMatrix) -> float:
    """1 - R^2 for the Pearson correlation of the two distance matrices.

    Computed over the strict upper-triangle entries viewed as mean-centered
    vectors. Raises on zero-variance input, where the correlation is
    undefined.
    """
    _check_same_size(dh, dl)
    if dh.n < 3:
        raise ParameterError("residual variance needs at least 3 points")
    iu, ju = np.triu_indices(dh.n, k=1)
    x = dh.entries[iu, ju]
    y = dl.entries[iu, ju]
    xc = x - x.mean()
    yc = y - y.mean()
    sx = np.sqrt(np.sum(xc**2))
    sy = np.sqrt(np.sum(yc**2))
    if sx == 0.0 or sy == 0.0:
        raise DegenerateInputError("a distance matrix has zero variance")
    r = float(np.sum(xc * yc) / (sx * sy))
    return 1.0 - r**2


def global_ph_score(
    dh: DistanceMatrix,
    dl: DistanceMatrix,
    sample_size: int = 256,
    degree: int = 0,
    seed: int = 0,
) -> float:
    """2-Wasserstein distance between subsampled global persistence diagrams.

    Farthest-point sampling is run on each metric separately (same seed, so
    identical metrics give identical subsets); the Rips diagram of each
    subsample at the given degree is compared with W_2 (the root, not its
    square).
    """
    from .persistence import rips_diagrams

    _check_same_size(dh, dl)
    if sample_size < 2:
        raise ParameterError("sample_size must be >= 2")
    if degree not in (0, 1):
        raise ParameterError("degree must be 0 or 1")
    idx_h = farthest_point_sample(dh, sample_size, seed)
    idx_l = farthest_point_sample(dl, sample_size, seed)
    dgm_h = rips_diagrams(restrict(dh, idx_h), degree)[degree]
    dgm_l = rips_diagrams(restrict(dl, idx_l), degree)[degree]
    cost, _ = wasserstein_pp(dgm_h, dgm_l, p=2.0)
    return float(np.sqrt(cost))


def evaluate(
    dh: DistanceMatrix,
    dl: DistanceMatrix,
    ijk_samples: int = 10000,
    fps_size: int = 256,
    seed: int = 0,
) -> EvaluationReport:
    """Bundle all four quality scores with the parameters that produced them."""
    return EvaluationReport(
        ijk_score=ijk_test(dh, dl, samples=ijk_samples, seed=seed),
        residual_variance=residual_variance(dh, dl),
        ph0_score=global_ph_score(dh, dl, sample_size=fps_size, degree=0, seed=seed),
        ph1_score=global_ph_score(dh, dl, sample_size=fps_size, degree=1, seed=seed),
        parameters={
            "ijk_samples": ijk_samples,
            "fps_size": fps_size,
            "seed": seed,
            "fps_seed_dh": seed,
            "fps_seed_dl": seed,
            "n": dh.n,
        },
    )
