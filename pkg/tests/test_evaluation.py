import numpy as np
import pytest

from dipole.errors import DegenerateInputError, ParameterError
from dipole.evaluation import (
    evaluate,
    global_ph_score,
    ijk_exhaustive,
    ijk_test,
    residual_variance,
)
from dipole.geometry import (
    DistanceMatrix,
    PointCloud,
    euclidean_distances,
    farthest_point_sample,
    restrict,
)
from dipole.persistence import rips_diagrams
from dipole.wasserstein import wasserstein_pp


def random_metric(rng, n, d=3):
    return euclidean_distances(PointCloud(rng.standard_normal((n, d))))


def symmetric_from_upper(values, n):
    m = np.zeros((n, n))
    iu, ju = np.triu_indices(n, k=1)
    m[iu, ju] = values
    m[ju, iu] = values
    return DistanceMatrix(m)


class TestIjkTest:
    def test_identity_zero(self):
        rng = np.random.default_rng(0)
        d = random_metric(rng, 8)
        assert ijk_test(d, d, samples=2000, seed=1) == 0.0

    def test_monotone_rescale_zero(self):
        rng = np.random.default_rng(1)
        d = random_metric(rng, 8)
        scaled = DistanceMatrix(2.0 * d.entries)
        assert ijk_test(d, scaled, samples=2000, seed=2) == 0.0

    def test_sampled_close_to_exhaustive(self):
        rng = np.random.default_rng(2)
        dh = random_metric(rng, 6)
        dl = random_metric(rng, 6)
        exact = ijk_exhaustive(dh, dl)
        est = ijk_test(dh, dl, samples=10000, seed=3)
        assert abs(est - exact) < 0.02

    def test_deterministic_under_seed(self):
        rng = np.random.default_rng(3)
        dh, dl = random_metric(rng, 7), random_metric(rng, 7)
        assert ijk_test(dh, dl, 500, seed=9) == ijk_test(dh, dl, 500, seed=9)

    def test_size_mismatch(self):
        rng = np.random.default_rng(4)
        with pytest.raises(ParameterError):
            ijk_test(random_metric(rng, 5), random_metric(rng, 6))

    def test_bounds(self):
        rng = np.random.default_rng(5)
        dh, dl = random_metric(rng, 10), random_metric(rng, 10)
        v = ijk_test(dh, dl, 3000, seed=0)
        assert 0.0 <= v <= 1.0


class TestResidualVariance:
    def test_affine_rescale_zero(self):
        rng = np.random.default_rng(6)
        dh = random_metric(rng, 9)
        off = 3.0 * dh.entries + 0.7
        np.fill_diagonal(off, 0.0)
        dl = DistanceMatrix(0.5 * (off + off.T))
        assert residual_variance(dh, dl) == pytest.approx(0.0, abs=1e-12)

    def test_orthogonal_perturbation_gives_one(self):
        rng = np.random.default_rng(7)
        n = 10
        dh = random_metric(rng, n)
        iu, ju = np.triu_indices(n, k=1)
        x = dh.entries[iu, ju]
        xc = x - x.mean()
        u = rng.standard_normal(x.size)
        u -= u.mean()
        u -= (u @ xc) / (xc @ xc) * xc
        u -= u.mean()
        y = 10.0 + 0.1 * u  # positive, centered-orthogonal to x
        dl = symmetric_from_upper(y, n)
        assert residual_variance(dh, dl) == pytest.approx(1.0, abs=1e-9)

    def test_matches_corrcoef_oracle(self):
        rng = np.random.default_rng(8)
        for _ in range(10):
            dh, dl = random_metric(rng, 8), random_metric(rng, 8)
            iu, ju = np.triu_indices(8, k=1)
            r = np.corrcoef(dh.entries[iu, ju], dl.entries[iu, ju])[0, 1]
            assert residual_variance(dh, dl) == pytest.approx(1 - r**2, abs=1e-12)

    def test_zero_variance_rejected(self):
        n = 5
        ones = np.ones((n, n)) - np.eye(n)
        rng = np.random.default_rng(9)
        with pytest.raises(DegenerateInputError):
            residual_variance(DistanceMatrix(ones), random_metric(rng, n))


class TestGlobalPhScore:
    def test_identical_metrics_zero(self):
        rng = np.random.default_rng(10)
        d = random_metric(rng, 30)
        for degree in (0, 1):
            assert global_ph_score(d, d, sample_size=10, degree=degree, seed=4) == 0.0

    def test_scaling_matches_direct_computation(self):
        rng = np.random.default_rng(11)
        d = random_metric(rng, 25)
        c = 1.7
        scaled = DistanceMatrix(c * d.entries)
        for degree in (0, 1):
            score = global_ph_score(d, scaled, sample_size=12, degree=degree, seed=5)
            idx = farthest_point_sample(d, 12, seed=5)
            dgm = rips_diagrams(restrict(d, idx), degree)[degree]
            dgm_c = rips_diagrams(restrict(scaled, idx), degree)[degree]
            expected = np.sqrt(wasserstein_pp(dgm, dgm_c, 2.0)[0])
            assert score == pytest.approx(expected, rel=1e-12)

    def test_small_space_uses_everything(self):
        rng = np.random.default_rng(12)
        dh = random_metric(rng, 8)
        dl = random_metric(rng, 8)
        score = global_ph_score(dh, dl, sample_size=50, degree=0, seed=6)
        full_h = rips_diagrams(dh, 0)[0]
        full_l = rips_diagrams(dl, 0)[0]
        assert score == pytest.approx(np.sqrt(wasserstein_pp(full_h, full_l, 2.0)[0]))

    def test_scores_nonnegative(self):
        rng = np.random.default_rng(13)
        dh, dl = random_metric(rng, 20), random_metric(rng, 20)
        assert global_ph_score(dh, dl, 10, 1, seed=0) >= 0.0


class TestEvaluate:
    def test_identical_metrics_all_zero(self):
        rng = np.random.default_rng(14)
        d = random_metric(rng, 20)
        report = evaluate(d, d, ijk_samples=2000, fps_size=10, seed=7)
        assert report.ijk_score == 0.0
        assert report.residual_variance == pytest.approx(0.0, abs=1e-12)
        assert report.ph0_score == 0.0
        assert report.ph1_score == 0.0

    def test_fields_recombine_from_individual_calls(self):
        rng = np.random.default_rng(15)
        dh, dl = random_metric(rng, 15), random_metric(rng, 15)
        report = evaluate(dh, dl, ijk_samples=1000, fps_size=8, seed=8)
        assert report.ijk_score == ijk_test(dh, dl, 1000, seed=8)
        assert report.residual_variance == residual_variance(dh, dl)
        assert report.ph0_score == global_ph_score(dh, dl, 8, 0, seed=8)
        assert report.ph1_score == global_ph_score(dh, dl, 8, 1, seed=8)

    def test_deterministic(self):
        rng = np.random.default_rng(16)
        dh, dl = random_metric(rng, 12), random_metric(rng, 12)
        a = evaluate(dh, dl, ijk_samples=500, fps_size=6, seed=9)
        b = evaluate(dh, dl, ijk_samples=500, fps_size=6, seed=9)
        assert a.to_dict() == b.to_dict()

    def test_parameters_recorded(self):
        rng = np.random.default_rng(17)
        d = random_metric(rng, 10)
        report = evaluate(d, d, ijk_samples=100, fps_size=5, seed=3)
        assert report.parameters["ijk_samples"] == 100
        assert report.parameters["fps_size"] == 5
        assert report.parameters["n"] == 10
