"""Synthetic dataset generators and CSV loaders for point clouds and metrics.

The swiss-roll surface uses the common spiral parametrization
(t*cos(t), h, t*sin(t)) with t in [1.5*pi, 4.5*pi] and h in [0, 21]. The
holed variant removes every sample whose first two ambient coordinates
(x, y) = (t*cos(t), h) fall strictly inside the disk x^2 + (y-1)^2 < 25,
i.e. the interior of a cylinder drilled along the remaining axis; rejected
draws are resampled until the requested count survives. The generator can
return the (t, h) parameters alongside the points so the rejection region
stays assertable.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, ValidationError
from .geometry import DistanceMatrix, PointCloud

__all__ = [
    "DatasetSpec",
    "swiss_roll",
    "swiss_roll_hole",
    "circle_sample",
    "torus_sample",
    "load_cloud",
    "load_distance",
]

T_MIN = 1.5 * np.pi
T_MAX = 4.5 * np.pi
HEIGHT = 21.0
HOLE_CENTER_Y = 1.0
HOLE_RADIUS = 5.0


@dataclass(frozen=True)
class DatasetSpec:
    """A reproducible description of a dataset source."""

    kind: str  # swiss_roll_hole | swiss_roll | circle | torus | csv_cloud | csv_distance
    n: int = 0
    noise: float = 0.0
    seed: int = 0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in (
            "swiss_roll_hole",
            "swiss_roll",
            "circle",
            "torus",
            "csv_cloud",
            "csv_distance",
        ):
            raise ParameterError(f"unknown dataset kind {self.kind!r}")
        if self.n < 0 or self.noise < 0:
            raise ParameterError("n and noise must be nonnegative")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "noise": self.noise,
            "seed": self.seed,
            "params": dict(self.params),
        }


def _roll_points(t: np.ndarray, h: np.ndarray) -> np.ndarray:
    return np.column_stack((t * np.cos(t), h, t * np.sin(t)))


def hole_excluded(t: np.ndarray, h: np.ndarray) -> np.ndarray:
    """True where a (t, h) parameter pair lands strictly inside the drilled hole."""
    x = t * np.cos(t)
    return x**2 + (h - HOLE_CENTER_Y) ** 2 < HOLE_RADIUS**2


def swiss_roll(
    n: int, seed: int, noise: float = 0.0, return_params: bool = False
):
    """Plain swiss roll sample (no hole)."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    rng = np.random.default_rng(seed)
    t = rng.uniform(T_MIN, T_MAX, size=n)
    h = rng.uniform(0.0, HEIGHT, size=n)
    pts = _roll_points(t, h)
    if noise > 0:
        pts = pts + noise * rng.standard_normal(pts.shape)
    cloud = PointCloud(pts)
    if return_params:
        return cloud, np.column_stack((t, h))
    return cloud


def swiss_roll_hole(n: int, seed: int, return_params: bool = False):
    """Swiss roll with the cylindrical hole removed by rejection sampling."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    rng = np.random.default_rng(seed)
    ts, hs = [], []
    remaining = n
    while remaining > 0:
        t = rng.uniform(T_MIN, T_MAX, size=2 * remaining)
        h = rng.uniform(0.0, HEIGHT, size=2 * remaining)
        keep = ~hole_excluded(t, h)
        ts.append(t[keep][:remaining])
        hs.append(h[keep][:remaining])
        remaining -= ts[-1].size
    t = np.concatenate(ts)
    h = np.concatenate(hs)
    cloud = PointCloud(_roll_points(t, h))
    if return_params:
        return cloud, np.column_stack((t, h))
    return cloud


def circle_sample(n: int, radius: float = 1.0, noise: float = 0.0, seed: int = 0) -> PointCloud:
    """n points at evenly spaced angles on a circle, with radial Gaussian noise."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    if radius <= 0:
        raise ParameterError("radius must be positive")
    rng = np.random.default_rng(seed)
    theta = 2.0 * np.pi * np.arange(n) / n
    r = radius + (noise * rng.standard_normal(n) if noise > 0 else 0.0)
    return PointCloud(np.column_stack((r * np.cos(theta), r * np.sin(theta))))


def torus_sample(n: int, R: float = 2.0, r: float = 0.5, seed: int = 0) -> PointCloud:
    """Uniform-in-angles sample of a torus with major radius R and minor radius r."""
    if not R > r > 0:
        raise ParameterError(f"torus radii must satisfy R > r > 0, got R={R}, r={r}")
    if n < 1:
        raise ParameterError("n must be >= 1")
    rng = np.random.default_rng(seed)
    u = rng.uniform(0.0, 2.0 * np.pi, size=n)
    v = rng.uniform(0.0, 2.0 * np.pi, size=n)
    ring = R + r * np.cos(v)
    return PointCloud(np.column_stack((ring * np.cos(u), ring * np.sin(u), r * np.sin(v))))


def _read_numeric_csv(path) -> np.ndarray:
    """Parse a numeric CSV, auto-detecting one optional header row."""
    rows: list[list[float]] = []
    width = None
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for lineno, raw in enumerate(reader, start=1):
            cells = [c.strip() for c in raw if c.strip() != ""]
            if not cells:
                continue
            try:
                values = [float(c) for c in cells]
            except ValueError as exc:
                if lineno == 1 and not rows:
                    continue  # non-numeric first row is a header
                raise ValidationError(f"{path}: line {lineno}: {exc}") from exc
            if width is None:
                width = len(values)
            elif len(values) != width:
                raise ValidationError(
                    f"{path}: line {lineno}: expected {width} columns, got {len(values)}"
                )
            rows.append(values)
    if not rows:
        raise ValidationError(f"{path}: no numeric rows found")
    return np.array(rows, dtype=float)


def load_cloud(path) -> PointCloud:
    """Load a point cloud from CSV (one point per row)."""
    return PointCloud(_read_numeric_csv(path))


def load_distance(path) -> DistanceMatrix:
    """Load and validate a distance matrix from CSV.

    Requires a square matrix, symmetry to 1e-9, a zero diagonal to 1e-9, and
    nonnegative entries; small asymmetries and diagonal noise are snapped to
    exact values.
    """
    m = _read_numeric_csv(path)
    if m.shape[0] != m.shape[1]:
        raise ValidationError(f"{path}: distance matrix must be square, got {m.shape}")
    if np.max(np.abs(m - m.T)) > 1e-9:
        raise ValidationError(f"{path}: distance matrix is not symmetric (tol 1e-9)")
    if np.max(np.abs(np.diagonal(m))) > 1e-9:
        raise ValidationError(f"{path}: distance matrix diagonal is not zero (tol 1e-9)")
    if np.any(m < -1e-9):
        raise ValidationError(f"{path}: distance matrix has negative entries")
    m = 0.5 * (m + m.T)
    np.fill_diagonal(m, 0.0)
    np.clip(m, 0.0, None, out=m)
    return DistanceMatrix(m)
