import numpy as np
import pytest

from dipole.datasets import (
    DatasetSpec,
    HOLE_CENTER_Y,
    HOLE_RADIUS,
    T_MAX,
    T_MIN,
    circle_sample,
    load_cloud,
    load_distance,
    swiss_roll,
    swiss_roll_hole,
    torus_sample,
)
from dipole.errors import ParameterError, ValidationError
from dipole.geometry import PointCloud, euclidean_distances, farthest_point_sample, restrict
from dipole.persistence import rips_h1
from dipole.serialize import write_matrix_csv


class TestSwissRoll:
    def test_shape_and_ranges(self):
        cloud, params = swiss_roll(500, seed=0, return_params=True)
        assert cloud.coords.shape == (500, 3)
        assert np.all(params[:, 0] >= T_MIN) and np.all(params[:, 0] <= T_MAX)
        assert np.all(params[:, 1] >= 0.0) and np.all(params[:, 1] <= 21.0)

    def test_deterministic(self):
        a = swiss_roll(100, seed=5)
        b = swiss_roll(100, seed=5)
        assert np.array_equal(a.coords, b.coords)


class TestSwissRollHole:
    def test_rejection_invariant(self):
        cloud, params = swiss_roll_hole(1200, seed=1, return_params=True)
        t, h = params[:, 0], params[:, 1]
        x = t * np.cos(t)
        assert np.all(x**2 + (h - HOLE_CENTER_Y) ** 2 >= HOLE_RADIUS**2)
        # the generated points actually use those parameters
        assert np.allclose(cloud.coords[:, 0], x)
        assert np.allclose(cloud.coords[:, 1], h)

    def test_paper_scale_count(self):
        cloud = swiss_roll_hole(3000, seed=2)
        assert cloud.coords.shape == (3000, 3)

    def test_deterministic(self):
        a = swiss_roll_hole(300, seed=3)
        b = swiss_roll_hole(300, seed=3)
        assert np.array_equal(a.coords, b.coords)

    def test_hole_region_is_nonempty(self):
        # without rejection, some draws would land inside the hole
        _, params = swiss_roll(4000, seed=4, return_params=True)
        x = params[:, 0] * np.cos(params[:, 0])
        inside = x**2 + (params[:, 1] - HOLE_CENTER_Y) ** 2 < HOLE_RADIUS**2
        assert inside.any()


class TestCircle:
    def test_octagon_side_length(self):
        cloud = circle_sample(8, radius=1.0, noise=0.0, seed=0)
        side = np.linalg.norm(cloud.coords[0] - cloud.coords[1])
        assert side == pytest.approx(2 * np.sin(np.pi / 8), rel=1e-12)

    def test_noiseless_circle_has_one_cycle(self):
        cloud = circle_sample(16, radius=1.0, noise=0.0, seed=0)
        dgm = rips_h1(euclidean_distances(cloud))
        assert len(dgm.points) == 1

    def test_deterministic(self):
        a = circle_sample(20, noise=0.1, seed=6)
        b = circle_sample(20, noise=0.1, seed=6)
        assert np.array_equal(a.coords, b.coords)


class TestTorus:
    def test_parameter_order(self):
        with pytest.raises(ParameterError):
            torus_sample(10, R=0.5, r=2.0, seed=0)

    def test_ranges_bounded(self):
        cloud = torus_sample(200, R=2.0, r=0.5, seed=1)
        assert np.all(np.abs(cloud.coords[:, :2]) <= 2.5 + 1e-12)
        assert np.all(np.abs(cloud.coords[:, 2]) <= 0.5 + 1e-12)

    def test_deterministic(self):
        a = torus_sample(50, seed=2)
        b = torus_sample(50, seed=2)
        assert np.array_equal(a.coords, b.coords)

    def test_two_dominant_cycles(self):
        cloud = torus_sample(400, R=2.0, r=0.8, seed=1)
        d = euclidean_distances(cloud)
        idx = farthest_point_sample(d, 150, seed=2)
        dgm = rips_h1(restrict(d, idx))
        pers = sorted((p.death - p.birth for p in dgm.points), reverse=True)
        assert len(pers) >= 2
        assert pers[0] > 1.5 * pers[2]
        assert pers[1] > 1.2 * pers[2]


class TestDatasetSpec:
    def test_round_trip(self):
        spec = DatasetSpec(kind="circle", n=10, noise=0.1, seed=3, params={"radius": 2.0})
        assert DatasetSpec(**spec.to_dict()) == spec

    def test_unknown_kind(self):
        with pytest.raises(ParameterError):
            DatasetSpec(kind="mystery")


class TestLoaders:
    def test_cloud_roundtrip(self, tmp_path):
        path = tmp_path / "cloud.csv"
        path.write_text("1.0,2.0,3.0\n4.0,5.0,6.0\n")
        cloud = load_cloud(path)
        assert cloud.coords.shape == (2, 3)

    def test_header_autodetect(self, tmp_path):
        path = tmp_path / "cloud.csv"
        path.write_text("x,y\n1.0,2.0\n3.0,4.0\n")
        assert load_cloud(path).coords.shape == (2, 2)

    def test_parse_error_reports_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1.0,2.0\n3.0,oops\n")
        with pytest.raises(ValidationError, match="line 2"):
            load_cloud(path)

    def test_ragged_row_reports_line(self, tmp_path):
        path = tmp_path / "ragged.csv"
        path.write_text("1.0,2.0\n3.0\n")
        with pytest.raises(ValidationError, match="line 2"):
            load_cloud(path)

    def test_asymmetric_distance_rejected(self, tmp_path):
        path = tmp_path / "asym.csv"
        path.write_text("0.0,1.0\n2.0,0.0\n")
        with pytest.raises(ValidationError, match="symmetric"):
            load_distance(path)

    def test_nonsquare_rejected(self, tmp_path):
        path = tmp_path / "rect.csv"
        path.write_text("0.0,1.0,2.0\n1.0,0.0,3.0\n")
        with pytest.raises(ValidationError, match="square"):
            load_distance(path)

    def test_negative_rejected(self, tmp_path):
        path = tmp_path / "neg.csv"
        path.write_text("0.0,-1.0\n-1.0,0.0\n")
        with pytest.raises(ValidationError):
            load_distance(path)

    def test_distance_write_read_lossless(self, tmp_path):
        rng = np.random.default_rng(7)
        d = euclidean_distances(PointCloud(rng.standard_normal((6, 3))))
        path = tmp_path / "dist.csv"
        write_matrix_csv(path, d.entries)
        again = load_distance(path)
        assert np.array_equal(again.entries, d.entries)

    def test_cloud_write_read_lossless(self, tmp_path):
        rng = np.random.default_rng(8)
        pts = rng.standard_normal((5, 4))
        path = tmp_path / "cloud.csv"
        write_matrix_csv(path, pts)
        assert np.array_equal(load_cloud(path).coords, pts)
