import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blocksketch import dense_hadamard, fwht_columns, fwht_inplace


def test_first_basis_vector():
    out = fwht_inplace(np.array([1.0, 0.0]))
    assert np.allclose(out, [1 / np.sqrt(2), 1 / np.sqrt(2)], atol=1e-15)


def test_constant_vector_concentrates():
    out = fwht_inplace(np.ones(4))
    assert np.allclose(out, [2.0, 0.0, 0.0, 0.0], atol=1e-15)


def test_identity_gives_hadamard():
    out = fwht_columns(np.eye(2))
    assert np.allclose(out, np.array([[1, 1], [1, -1]]) / np.sqrt(2), atol=1e-15)


def test_single_column_matches_vector_path():
    x = np.random.default_rng(3).standard_normal(16)
    col = fwht_columns(x.copy()[:, None])
    vec = fwht_inplace(x.copy())
    assert np.array_equal(col[:, 0], vec)


def test_frobenius_preserved_dense_oracle():
    rng = np.random.default_rng(11)
    M = rng.standard_normal((8, 3))
    H = dense_hadamard(8)
    out = fwht_columns(M.copy())
    assert np.linalg.norm(out) == pytest.approx(np.linalg.norm(M), rel=1e-12)
    assert np.allclose(out, H @ M, atol=1e-12)


@pytest.mark.parametrize("r", [1, 2, 4, 8, 16, 32, 64])
def test_matches_dense_hadamard(r):
    rng = np.random.default_rng(r)
    x = rng.standard_normal(r)
    assert np.allclose(fwht_inplace(x.copy()), dense_hadamard(r) @ x, atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(t=st.integers(min_value=0, max_value=10), seed=st.integers(0, 2**31))
def test_orthogonality_and_involution(t, seed):
    x = np.random.default_rng(seed).standard_normal(2**t)
    nrm = np.linalg.norm(x)
    once = fwht_inplace(x.copy())
    assert np.linalg.norm(once) == pytest.approx(nrm, rel=1e-12, abs=1e-12)
    twice = fwht_inplace(once.copy())
    assert np.allclose(twice, x, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("bad", [0, 3, 6, 12])
def test_rejects_non_power_of_two(bad):
    with pytest.raises(ValueError):
        fwht_inplace(np.zeros(bad))
    with pytest.raises(ValueError):
        fwht_columns(np.zeros((bad, 2)))
