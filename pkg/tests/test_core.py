import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_spd
from galkit.core import GalParams, MatrixProductParams, asym_const, factorize, quad_form, validate_params
from galkit.errors import DimensionMismatch, NonPositiveShape, NonSymmetric, NotPsd, SingularSigma
from oracles import quad_form_dense


def test_validate_identity():
    params = validate_params(np.eye(2), [0, 0], 1.0)
    assert params.p == 2
    assert params.s == 1.0


def test_validate_rejects_indefinite():
    # eigenvalues 3 and -1
    with pytest.raises(NotPsd):
        validate_params([[1, 2], [2, 1]], [0, 0], 1.0)


@pytest.mark.parametrize("s", [-1.0, 0.0, float("nan")])
def test_validate_rejects_shape(s):
    with pytest.raises(NonPositiveShape):
        validate_params(np.eye(2), [0, 0], s)


def test_validate_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        validate_params(np.eye(2), [0, 0, 0], 1.0)
    with pytest.raises(DimensionMismatch):
        validate_params(np.ones((2, 3)), [0, 0], 1.0)


def test_symmetrization_tolerance():
    sigma = np.array([[2.0, 1.0], [1.0 + 1e-13, 3.0]])
    params = GalParams(sigma, [0, 0], 1.0)
    assert params.sigma[0, 1] == params.sigma[1, 0]
    with pytest.raises(NonSymmetric):
        GalParams(np.array([[2.0, 1.0], [1.1, 3.0]]), [0, 0], 1.0)


def test_psd_tolerance_is_scale_free():
    sigma = np.array([[1.0, 1.0], [1.0, 1.0]]) + np.diag([0.0, -1e-12])
    for scale in (1e-6, 1.0, 1e6):
        GalParams(scale * sigma, [0, 0], 1.0)


def test_params_are_immutable():
    params = GalParams(np.eye(2), [1, 2], 1.0)
    with pytest.raises(ValueError):
        params.sigma[0, 0] = 5.0
    with pytest.raises(AttributeError):
        params.s = 2.0


def test_matrix_product_params():
    mp = MatrixProductParams([[4, 2], [2, 5]], [1, -1], d=5, alpha=1.0)
    target = mp.target()
    np.testing.assert_array_equal(target.sigma, [[8, 4], [4, 10]])
    np.testing.assert_array_equal(target.mu, [2, -2])
    assert target.s == 2.5
    with pytest.raises(DimensionMismatch):
        MatrixProductParams(np.eye(2), [0, 0], d=0)
    with pytest.raises(NonPositiveShape):
        MatrixProductParams(np.eye(2), [0, 0], d=2, alpha=0.0)


def test_factorize_hand_example():
    f = factorize([[4, 2], [2, 5]])
    np.testing.assert_allclose(f.lower, [[2, 0], [1, 2]], rtol=0, atol=1e-15)
    assert f.log_det == pytest.approx(math.log(16), rel=1e-15)
    assert f.full_rank


def test_factorize_identity():
    f = factorize(np.eye(4))
    np.testing.assert_array_equal(f.lower, np.eye(4))
    assert f.log_det == 0.0


def test_factorize_rank_deficient():
    f = factorize([[1, 1], [1, 1]])
    assert not f.full_rank
    assert f.rank == 1
    np.testing.assert_allclose(f.lower @ f.lower.T, [[1, 1], [1, 1]], atol=1e-15)
    with pytest.raises(SingularSigma):
        quad_form(f, [1.0, 0.0])


def test_factorize_rank_deficient_3d():
    v = np.array([[1.0, 2.0, -1.0], [0.5, 0.0, 3.0]])
    sigma = v.T @ v
    f = factorize(sigma)
    assert not f.full_rank and f.rank == 2
    np.testing.assert_allclose(f.lower @ f.lower.T, sigma, atol=1e-13)


def test_factorize_zero_matrix():
    f = factorize(np.zeros((3, 3)))
    assert not f.full_rank
    np.testing.assert_array_equal(f.lower, np.zeros((3, 3)))


def test_quad_form_examples():
    assert quad_form(factorize(np.eye(2)), [3, 4]) == pytest.approx(5.0, rel=1e-15)
    assert quad_form(factorize(4 * np.eye(2)), [2, 0]) == pytest.approx(1.0, rel=1e-15)
    assert quad_form(factorize([[4, 2], [2, 5]]), [0, 0]) == 0.0


def test_asym_const_examples():
    assert asym_const(factorize(np.eye(3)), np.zeros(3)) == pytest.approx(math.sqrt(2), rel=1e-15)
    assert asym_const(factorize(np.eye(2)), [1, 1]) == pytest.approx(2.0, rel=1e-15)
    assert asym_const(factorize([[2.0]]), [2.0]) == pytest.approx(2.0, rel=1e-15)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), p=st.integers(1, 8))
def test_quad_form_matches_dense_solve(seed, p):
    rng = np.random.default_rng(seed)
    sigma = random_spd(rng, p)
    x = rng.standard_normal(p)
    q = quad_form(factorize(sigma), x)
    assert q * q == pytest.approx(quad_form_dense(sigma, x) ** 2, rel=1e-10)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), p=st.integers(1, 12))
def test_factor_reconstructs(seed, p):
    sigma = random_spd(np.random.default_rng(seed), p)
    f = factorize(sigma)
    err = np.linalg.norm(f.lower @ f.lower.T - sigma) / np.linalg.norm(sigma)
    assert err <= 1e-12
    assert f.log_det == pytest.approx(2 * np.sum(np.log(np.diag(f.lower))), rel=1e-14)
    assert np.allclose(np.triu(f.lower, 1), 0.0)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), c=st.floats(-1e3, 1e3, allow_nan=False))
def test_quad_form_homogeneous(seed, c):
    rng = np.random.default_rng(seed)
    f = factorize(random_spd(rng, 3))
    x = rng.standard_normal(3)
    assert quad_form(f, c * x) == pytest.approx(abs(c) * quad_form(f, x), rel=1e-12, abs=1e-300)


def test_quad_form_batch_matches_rows():
    rng = np.random.default_rng(3)
    f = factorize(random_spd(rng, 4))
    xs = rng.standard_normal((10, 4))
    batch = quad_form(f, xs)
    np.testing.assert_allclose(batch, [quad_form(f, x) for x in xs], rtol=1e-15)
