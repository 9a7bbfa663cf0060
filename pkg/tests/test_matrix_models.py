import numpy as np
import pytest

from garding import matrix_models as mm
from garding import poly_core, spectra
from garding.errors import SchemaError
from garding.matrix_models import SpectralModel

MODELS = [("det_real", 3, None), ("det_complex", 2, None), ("det_quaternionic", 1, None),
          ("trace", 3, None), ("lagrangian", 1, None), ("lagrangian", 2, None), ("isotropic", 2, 1)]


@pytest.mark.parametrize("kind,n,p", MODELS)
def test_identity_maps_to_ones(kind, n, p):
    m = SpectralModel(kind, n, p)
    assert np.allclose(m.eigen(np.eye(m.N)), 1.0)


@pytest.mark.parametrize("kind,n,p", MODELS)
def test_positivity(kind, n, p):
    assert mm.dg_positivity_check(SpectralModel(kind, n, p), 100, rng=0)


def test_broken_model_is_refuted():
    base = SpectralModel("det_real", 2)
    broken = mm.RecipeModel(base, lambda lam: 3 * lam - 2 * lam.sum(-1, keepdims=True) / 2, 2, "broken")
    assert not mm.dg_positivity_check(broken, 100, rng=0)


def test_complex_structure_squares_to_minus_identity():
    J = mm.complex_structure(6)
    assert np.allclose(J @ J, -np.eye(6))


def test_quaternion_relations():
    I, J, K = mm.quaternion_structures(8)
    assert np.allclose(I @ J, K) and np.allclose(I @ I, -np.eye(8))


def test_complex_det_invariant_under_unitary(rng):
    m = SpectralModel("det_complex", 2)
    A = mm.random_symmetric(rng, 4)
    U = mm.commuting_orthogonal(rng, 2)
    assert np.allclose(m.eigen(A), m.eigen(U.T @ A @ U))


def test_lagrangian_one_matches_real_det(rng):
    lag, det = SpectralModel("lagrangian", 1), SpectralModel("det_real", 2)
    A = mm.random_symmetric(rng, 2, count=100)
    assert np.allclose(np.sort(lag.eigen(A), -1), np.sort(det.eigen(A), -1), atol=1e-9)


def test_value_is_product_of_eigenvalues(rng):
    m = SpectralModel("det_complex", 2)
    A = mm.random_symmetric(rng, 4)
    assert m.value(A) == pytest.approx(np.prod(m.eigen(A)))


def test_sym_vector_input():
    m = SpectralModel("det_real", 2)
    lam = spectra.eigenvalues(m, None, poly_core.sym_to_vector(np.array([[1.0, 2], [2, 1]]))).values
    assert np.allclose(lam, [-1, 3])


def test_bad_models():
    with pytest.raises(SchemaError):
        SpectralModel("nope", 2)
    with pytest.raises(SchemaError):
        SpectralModel("isotropic", 2, 3)


def test_model_json_round_trip():
    m = SpectralModel("isotropic", 2, 1)
    back = mm.model_from_json_dict(m.to_json_dict())
    assert (back.kind, back.n, back.p) == ("isotropic", 2, 1)
