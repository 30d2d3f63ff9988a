import numpy as np
import pytest

from blocksketch import Grid
from blocksketch.data import (clustered_features, load_csv, load_matrix,
                              rbf_kernel, save_matrix, synthetic_psd)


class TestRbfKernel:
    def test_identical_points_give_one(self):
        X = np.array([[1.0, 2.0], [1.0, 2.0]])
        A = rbf_kernel(X, sigma=3.0)
        assert A[0, 1] == pytest.approx(1.0)

    def test_distance_sigma_gives_inverse_e(self):
        X = np.array([[0.0], [2.5]])
        A = rbf_kernel(X, sigma=2.5)
        assert A[0, 1] == pytest.approx(np.exp(-1.0), rel=1e-12)

    def test_numerically_psd(self):
        X = np.random.default_rng(0).standard_normal((50, 4))
        A = rbf_kernel(X, sigma=2.0)
        assert np.linalg.eigvalsh(A).min() >= -1e-10

    def test_exactly_symmetric_with_unit_diagonal(self):
        X = np.random.default_rng(1).standard_normal((40, 6))
        A = rbf_kernel(X, sigma=1.5)
        assert np.array_equal(A, A.T)
        assert np.all(np.diag(A) == 1.0)

    def test_distributed_layout(self):
        X = np.random.default_rng(2).standard_normal((16, 3))
        dense = rbf_kernel(X, sigma=2.0)
        dist = rbf_kernel(X, sigma=2.0, layout=Grid(2))
        assert np.array_equal(dist.gather(), dense)

    def test_input_validation(self):
        with pytest.raises(ValueError):
            rbf_kernel(np.ones((3, 2)), sigma=0.0)
        bad = np.ones((3, 2))
        bad[0, 0] = np.nan
        with pytest.raises(ValueError):
            rbf_kernel(bad, sigma=1.0)


class TestSyntheticPsd:
    def test_flat_spectrum_gives_identity(self):
        A, _ = synthetic_psd(8, np.ones(8), seed=0)
        assert np.allclose(A, np.eye(8), atol=1e-12)

    def test_rank_one(self):
        A, _ = synthetic_psd(8, np.array([1.0] + [0.0] * 7), seed=1)
        assert np.trace(A) == pytest.approx(1.0, rel=1e-12)
        s = np.linalg.svd(A, compute_uv=False)
        assert np.sum(s > 1e-12) == 1

    def test_spectrum_roundtrip(self):
        spec = 0.9 ** np.arange(32)
        A, returned = synthetic_psd(32, spec, seed=2)
        assert np.array_equal(returned, spec)
        s = np.linalg.svd(A, compute_uv=False)
        assert np.allclose(s, spec, atol=1e-10)

    def test_rejects_unsorted_spectrum(self):
        with pytest.raises(ValueError):
            synthetic_psd(3, np.array([1.0, 2.0, 0.5]), seed=0)
        with pytest.raises(ValueError):
            synthetic_psd(3, np.array([1.0, -0.5, -1.0]), seed=0)


class TestLoadCsv:
    def test_plain_table(self, tmp_path):
        f = tmp_path / "t.csv"
        f.write_text("1,2\n3,4\n")
        assert np.array_equal(load_csv(f), [[1.0, 2.0], [3.0, 4.0]])

    def test_header_autodetect(self, tmp_path):
        f = tmp_path / "t.csv"
        f.write_text("a,b\n1,2\n")
        assert np.array_equal(load_csv(f), [[1.0, 2.0]])

    def test_empty_file(self, tmp_path):
        f = tmp_path / "t.csv"
        f.write_text("")
        with pytest.raises(ValueError):
            load_csv(f)

    def test_ragged_rows(self, tmp_path):
        f = tmp_path / "t.csv"
        f.write_text("1,2\n3\n")
        with pytest.raises(ValueError):
            load_csv(f)

    def test_non_numeric_cell(self, tmp_path):
        f = tmp_path / "t.csv"
        f.write_text("1,2\n3,x\n")
        with pytest.raises(ValueError):
            load_csv(f)


def test_clustered_features_bounds():
    X = clustered_features(100, dim=16, seed=3)
    assert X.shape == (100, 16)
    assert X.min() >= 0.0 and X.max() <= 1.0


def test_matrix_cache_roundtrip(tmp_path):
    A = np.random.default_rng(4).standard_normal((5, 7))
    path = tmp_path / "m.bin"
    save_matrix(path, A)
    assert np.array_equal(load_matrix(path), A)
