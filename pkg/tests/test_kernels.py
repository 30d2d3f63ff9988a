import numpy as np
import pytest

from blocksketch import (cholesky_psd, pinv_apply, tri_solve, truncated_svd,
                         tsqr)


class TestTSQR:
    def test_orthonormal_input_gives_identity_r(self):
        Q0, _ = np.linalg.qr(np.random.default_rng(0).standard_normal((64, 8)))
        f = tsqr(Q0, 4)
        assert np.allclose(np.abs(f.R), np.eye(8), atol=1e-10)

    def test_single_panel_is_householder_qr(self):
        Y = np.random.default_rng(1).standard_normal((30, 6))
        f = tsqr(Y, 1)
        Q, R = np.linalg.qr(Y)
        assert np.array_equal(f.Q, Q) and np.array_equal(f.R, R)

    @pytest.mark.parametrize("p", [2, 3, 4, 8])
    def test_reconstruction_and_orthonormality(self, p):
        Y = np.random.default_rng(p).standard_normal((512, 16))
        f = tsqr(Y, p)
        assert np.linalg.norm(f.Q @ f.R - Y) <= 1e-12 * np.linalg.norm(Y)
        assert np.linalg.norm(f.Q.T @ f.Q - np.eye(16)) <= 1e-10 * 4
        assert np.allclose(np.triu(f.R), f.R)

    def test_rejects_wide_input(self):
        with pytest.raises(ValueError):
            tsqr(np.zeros((4, 8)), 2)


class TestTruncatedSVD:
    def test_diagonal_case(self):
        f = truncated_svd(np.diag([3.0, 2.0, 1.0]), 2)
        assert np.allclose(f.S, [3.0, 2.0])
        assert np.linalg.norm(np.diag([3.0, 2.0, 1.0]) - f.dense()) == pytest.approx(1.0)

    def test_full_rank_reconstructs(self):
        M = np.random.default_rng(2).standard_normal((9, 6))
        f = truncated_svd(M, 6)
        assert np.allclose(f.dense(), M, atol=1e-12)

    def test_eckart_young_against_full_svd_oracle(self):
        M = np.random.default_rng(3).standard_normal((20, 12))
        f = truncated_svd(M, 5)
        s = np.linalg.svd(M, compute_uv=False)
        expected = np.sqrt(np.sum(s[5:] ** 2))
        assert np.linalg.norm(M - f.dense()) == pytest.approx(expected, abs=1e-10)

    def test_sign_convention_deterministic(self):
        M = np.random.default_rng(4).standard_normal((10, 10))
        f = truncated_svd(M, 4)
        for j in range(4):
            assert f.U[np.argmax(np.abs(f.U[:, j])), j] > 0

    def test_k_out_of_range(self):
        with pytest.raises(ValueError):
            truncated_svd(np.eye(3), 4)


class TestCholeskyPsd:
    def test_identity(self):
        f = cholesky_psd(np.eye(4))
        assert f.is_cholesky and np.allclose(f.C, np.eye(4))

    def test_rank_one_projector_fallback(self):
        f = cholesky_psd(np.diag([1.0, 0.0]))
        assert not f.is_cholesky
        B = np.array([[3.0, 7.0]])
        # pseudo-solve then re-multiply projects onto range(S)
        assert np.allclose(f.solve_right(B) @ f.C, [[3.0, 0.0]], atol=1e-12)

    def test_gram_matrix_reconstruction(self):
        G = np.random.default_rng(5).standard_normal((30, 8))
        S = G.T @ G
        f = cholesky_psd(S)
        assert f.is_cholesky
        assert np.linalg.norm(f.C.T @ f.C - S) <= 1e-10 * np.linalg.norm(S)

    def test_fallback_projection_property(self):
        G = np.random.default_rng(6).standard_normal((5, 12))
        S = G.T @ G  # 12x12 of rank 5
        f = cholesky_psd(S)
        assert not f.is_cholesky
        B = np.random.default_rng(7).standard_normal((4, 12))
        recomposed = f.solve_right(B) @ f.C
        proj = f.basis @ f.basis.T
        assert np.linalg.norm(recomposed - B @ proj) <= 1e-8 * np.linalg.norm(B)

    def test_shift_option_keeps_cholesky_path(self):
        G = np.random.default_rng(8).standard_normal((6, 6))
        S = G.T @ G
        f = cholesky_psd(S, shift=True)
        assert np.linalg.norm(f.C.T @ f.C - S) <= 1e-8 * np.linalg.norm(S)

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            cholesky_psd(np.array([[1.0, 2.0], [0.0, 1.0]]))


class TestTriSolve:
    def test_identity(self):
        B = np.random.default_rng(9).standard_normal((5, 3))
        assert np.array_equal(tri_solve(np.eye(3), B), B)

    def test_scaled_identity(self):
        B = np.random.default_rng(10).standard_normal((5, 3))
        assert np.allclose(tri_solve(2.0 * np.eye(3), B), B / 2.0)

    def test_residual_oracle(self):
        rng = np.random.default_rng(11)
        C = np.triu(rng.standard_normal((8, 8))) + 8.0 * np.eye(8)
        B = rng.standard_normal((50, 8))
        X = tri_solve(C, B)
        assert np.linalg.norm(X @ C - B) <= 1e-10 * np.linalg.norm(B)

    def test_singular_raises(self):
        C = np.triu(np.ones((3, 3)))
        C[1, 1] = 0.0
        with pytest.raises(np.linalg.LinAlgError):
            tri_solve(C, np.ones((2, 3)))


class TestPinvApply:
    def test_orthonormal_columns(self):
        Q, _ = np.linalg.qr(np.random.default_rng(12).standard_normal((12, 4)))
        B = np.random.default_rng(13).standard_normal((12, 3))
        assert np.allclose(pinv_apply(Q, B), Q.T @ B, atol=1e-12)

    def test_zero_matrix_gives_zero(self):
        out = pinv_apply(np.zeros((6, 3)), np.ones((6, 2)))
        assert np.all(out == 0.0)

    def test_recovers_planted_solution(self):
        rng = np.random.default_rng(14)
        M = rng.standard_normal((40, 10))
        X0 = rng.standard_normal((10, 4))
        X = pinv_apply(M, M @ X0)
        assert np.linalg.norm(X - X0) <= 1e-10 * np.linalg.norm(X0)
