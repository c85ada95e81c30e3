import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cventangle import analytic_covariance, check_physical, invert, symplectic_eigenvalues, symplectic_form
from cventangle.errors import NonSymmetricError, NotPositiveDefiniteError, ShapeMismatchError, SingularMatrixError
from cventangle.symplectic import (
    as_covariance,
    canonical_sign,
    covariance_from_dict,
    covariance_to_dict,
    is_symplectic,
    load_covariance,
    reduce_modes,
    save_covariance,
)

import oracles

R = math.log(2) / 2


def test_symplectic_form_identities():
    for n in (1, 2, 5):
        om = symplectic_form(n)
        assert np.array_equal(om.T @ om, np.eye(2 * n))
        assert np.array_equal(om.T, -om)
        assert np.array_equal(om, oracles.omega(n))


def test_vacuum_spectrum():
    np.testing.assert_allclose(symplectic_eigenvalues(0.5 * np.eye(4)), [1, 1], atol=1e-12)


def test_single_mode_squeezed_spectrum():
    r = 0.7
    g = 0.5 * np.diag([math.exp(-2 * r), math.exp(2 * r)])
    np.testing.assert_allclose(symplectic_eigenvalues(g), [1.0], atol=1e-12)


def test_pure_two_mode_spectrum_matches_oracles():
    g = analytic_covariance("two_mode_epr", 0.3466, 1.0)
    ev = symplectic_eigenvalues(g)
    np.testing.assert_allclose(ev, [1, 1], atol=1e-9)
    np.testing.assert_allclose(ev, oracles.symplectic_spectrum_sqrtm(g), atol=1e-9)
    assert np.linalg.det(2 * g) == pytest.approx(np.prod(ev**2), rel=1e-9)


def test_thermal_spectrum_descending():
    g = 0.5 * np.diag([3.0, 3.0, 1.5, 1.5])
    np.testing.assert_allclose(symplectic_eigenvalues(g), [3.0, 1.5])


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_spectrum_against_sqrtm_and_determinant(n, seed):
    rng = np.random.default_rng(seed)
    g = oracles.random_state(n, rng)
    ev = symplectic_eigenvalues(g)
    np.testing.assert_allclose(ev, oracles.symplectic_spectrum_sqrtm(g), rtol=1e-8)
    assert np.linalg.det(2 * g) == pytest.approx(np.prod(ev**2), rel=1e-9)
    assert np.all(np.diff(ev) <= 1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_spectrum_invariant_under_symplectic(n, seed):
    rng = np.random.default_rng(seed)
    g = oracles.random_state(n, rng)
    s = oracles.random_symplectic(n, rng, scale=0.3)
    assert is_symplectic(s, tol=1e-9)
    np.testing.assert_allclose(symplectic_eigenvalues(s @ g @ s.T), symplectic_eigenvalues(g), rtol=1e-9)


def test_check_physical_examples():
    rep = check_physical(0.5 * np.eye(4))
    assert rep.physical and abs(rep.margin) < 1e-12
    rep = check_physical(0.25 * np.eye(2))
    assert not rep.physical
    assert rep.margin == pytest.approx(-0.5)
    assert check_physical(analytic_covariance("cluster4", 0.3466, 0.5)).physical


def test_check_physical_rejects_asymmetric():
    with pytest.raises(NonSymmetricError):
        check_physical(np.array([[1.0, 0.1], [0.0, 1.0]]))


def test_check_physical_non_positive_definite():
    rep = check_physical(np.diag([1.0, -0.2]))
    assert not rep.physical and rep.margin < -1


def test_symmetrization_of_tiny_asymmetry():
    g = 0.5 * np.eye(2)
    g[0, 1] = 1e-14
    out = as_covariance(g)
    assert out[0, 1] == out[1, 0] == pytest.approx(5e-15)


def test_shape_errors():
    with pytest.raises(ShapeMismatchError):
        as_covariance(np.eye(3))
    with pytest.raises(ShapeMismatchError):
        as_covariance(np.ones((2, 4)))


def test_spectrum_errors():
    with pytest.raises(NotPositiveDefiniteError):
        symplectic_eigenvalues(np.diag([1.0, -1.0]))
    with pytest.raises(NonSymmetricError):
        symplectic_eigenvalues(np.array([[1.0, 0.5], [0.0, 1.0]]))


def test_invert_examples():
    np.testing.assert_allclose(invert(0.5 * np.eye(2)), 2 * np.eye(2))
    r = 0.4
    g = 0.5 * np.diag([math.exp(-2 * r), math.exp(2 * r)])
    np.testing.assert_allclose(invert(g), 2 * np.diag([math.exp(2 * r), math.exp(-2 * r)]), rtol=1e-12)


def test_invert_pure_state_saturation():
    g = analytic_covariance("two_mode_epr", R, 1.0)
    om = symplectic_form(2)
    np.testing.assert_allclose(invert(g), 4 * om.T @ g @ om, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_invert_involution_and_identity(n, seed):
    g = oracles.random_state(n, np.random.default_rng(seed))
    inv = invert(g)
    assert np.max(np.abs(g @ inv - np.eye(2 * n))) < 1e-10
    assert np.max(np.abs(invert(inv) - g)) < 1e-9


def test_invert_singular():
    with pytest.raises(SingularMatrixError):
        invert(np.diag([1.0, 1e-16]))


def test_canonical_sign():
    np.testing.assert_array_equal(canonical_sign([0.0, -1e-12, -0.5, 0.3]), [0.0, 1e-12, 0.5, -0.3])
    np.testing.assert_array_equal(canonical_sign([0.2, -1.0]), [0.2, -1.0])


def test_reduce_modes_order_preserved():
    g = np.arange(36, dtype=float).reshape(6, 6)
    g = g + g.T
    sub = reduce_modes(g, [2, 0])
    np.testing.assert_array_equal(sub, g[np.ix_([4, 5, 0, 1], [4, 5, 0, 1])])


def test_json_roundtrip(tmp_path):
    g = analytic_covariance("ghz3", R, 0.4)
    d = covariance_to_dict(g)
    assert d["n_modes"] == 3 and d["vacuum_variance"] == 0.5 and d["ordering"] == "x1p1...xNpN"
    assert len(d["matrix"]) == 6 and len(d["matrix"][0]) == 6
    np.testing.assert_array_equal(covariance_from_dict(d), g)
    path = tmp_path / "cov.json"
    save_covariance(path, g, note="x")
    np.testing.assert_array_equal(load_covariance(path), g)


def test_json_foreign_vacuum_variance_rescaled():
    g = covariance_from_dict({"matrix": np.eye(2).tolist(), "vacuum_variance": 1.0})
    np.testing.assert_allclose(g, 0.5 * np.eye(2))


def test_json_bad_ordering():
    with pytest.raises(ShapeMismatchError):
        covariance_from_dict({"matrix": np.eye(2).tolist(), "ordering": "x1x2p1p2"})
