import numpy as np
import pytest

from dipole.errors import ParameterError
from dipole.geometry import DistanceMatrix, PointCloud, euclidean_distances
from dipole.isomap import double_center, isomap_embed, top_eigenpairs


class TestDoubleCenter:
    def test_two_points(self):
        b = double_center(DistanceMatrix(np.array([[0.0, 2.0], [2.0, 0.0]])))
        assert np.allclose(b, [[1.0, -1.0], [-1.0, 1.0]], atol=1e-15)

    def test_zero_distances(self):
        b = double_center(DistanceMatrix(np.zeros((4, 4))))
        assert np.array_equal(b, np.zeros((4, 4)))

    def test_row_sums_vanish(self):
        rng = np.random.default_rng(0)
        d = euclidean_distances(PointCloud(rng.standard_normal((9, 4))))
        b = double_center(d)
        assert np.max(np.abs(b.sum(axis=1))) < 1e-10
        assert np.array_equal(b, b.T)


class TestTopEigenpairs:
    def test_identity(self):
        vals, _ = top_eigenpairs(np.eye(3), 2)
        assert np.allclose(vals, [1.0, 1.0])

    def test_diagonal(self):
        vals, vecs = top_eigenpairs(np.diag([3.0, 2.0, 1.0]), 2)
        assert np.allclose(vals, [3.0, 2.0])
        assert np.allclose(np.abs(vecs), [[1, 0], [0, 1], [0, 0]], atol=1e-12)
        assert np.all(vecs[np.argmax(np.abs(vecs), axis=0), [0, 1]] > 0)

    def test_residual_bound(self):
        rng = np.random.default_rng(1)
        a = rng.standard_normal((10, 10))
        b = a + a.T
        vals, vecs = top_eigenpairs(b, 4)
        res = np.linalg.norm(b @ vecs - vecs * vals[None, :], axis=0)
        assert np.all(res <= 1e-8 * np.linalg.norm(b))

    def test_rejects_nonsquare(self):
        with pytest.raises(ParameterError):
            top_eigenpairs(np.zeros((2, 3)), 1)


class TestIsomapEmbed:
    def test_two_points(self):
        e = isomap_embed(DistanceMatrix(np.array([[0.0, 2.0], [2.0, 0.0]])), 1)
        assert np.allclose(np.sort(e.coords[:, 0]), [-1.0, 1.0], atol=1e-12)

    def test_collinear_recovery(self):
        pts = np.array([[0.0], [1.0], [3.0]])
        d = euclidean_distances(PointCloud(pts))
        e = isomap_embed(d, 1)
        rebuilt = euclidean_distances(PointCloud(e.coords))
        assert np.allclose(rebuilt.entries, d.entries, atol=1e-8)

    def test_planar_realizable_recovery(self):
        rng = np.random.default_rng(2)
        pts = rng.standard_normal((12, 2))
        d = euclidean_distances(PointCloud(pts))
        e = isomap_embed(d, 2)
        rebuilt = euclidean_distances(PointCloud(e.coords))
        mask = d.entries > 0
        rel = np.abs(rebuilt.entries[mask] - d.entries[mask]) / d.entries[mask]
        assert np.max(rel) < 1e-6

    def test_mean_centered(self):
        rng = np.random.default_rng(3)
        d = euclidean_distances(PointCloud(rng.standard_normal((10, 3))))
        e = isomap_embed(d, 2)
        assert np.max(np.abs(e.coords.sum(axis=0))) < 1e-8

    def test_deterministic(self):
        rng = np.random.default_rng(4)
        d = euclidean_distances(PointCloud(rng.standard_normal((8, 3))))
        a = isomap_embed(d, 2)
        b = isomap_embed(d, 2)
        assert np.array_equal(a.coords, b.coords)

    def test_negative_eigenvalues_clamp(self):
        # a metric that is not Euclidean-realizable in 2-D: unit star metric
        m = np.full((4, 4), 1.0)
        np.fill_diagonal(m, 0.0)
        m[0, 1] = m[1, 0] = 2.0
        e = isomap_embed(DistanceMatrix(m), 3)
        assert np.all(np.isfinite(e.coords))

    def test_dim_range(self):
        d = DistanceMatrix(np.array([[0.0, 1.0], [1.0, 0.0]]))
        with pytest.raises(ParameterError):
            isomap_embed(d, 2)
