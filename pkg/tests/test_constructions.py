import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from garding import constructions, poly_core, spectra
from garding.branches import Region
from garding.errors import ConeViolation
from garding.matrix_models import SpectralModel

vec3 = st.lists(st.floats(-4, 4), min_size=3, max_size=3)


def test_kfold_on_diagonal():
    d = constructions.kfold_sum_poly(poly_core.product_poly(3), np.ones(3), 2)
    assert np.allclose(d.eigenvalues([1, 2, 3]).values, [1.5, 2, 2.5])
    assert d([1, 2, 3]) == pytest.approx(60)


def test_perm_product_repeats_values():
    d = constructions.perm_product_poly(poly_core.product_poly(3), np.ones(3), [0, 0, 1])
    vals = d.eigenvalues([1, 2, 3]).values
    assert d.degree == 6
    assert np.allclose(vals, [1, 1, 2, 2, 3, 3])


@settings(max_examples=30, deadline=None)
@given(vec3)
def test_sigma_poly_matches_elementary_symmetric(x):
    p = poly_core.example_a3()
    lam = spectra.eigenvalues(p, np.ones(3), x).values
    for j in (1, 2):
        d = constructions.sigma_poly(p, np.ones(3), j)
        assert d(x) == pytest.approx(spectra.elementary_symmetric(lam)[j - 1], abs=1e-9)


def test_derivative_interlaces(rng):
    p = poly_core.det_expanded(3)
    b = poly_core.sym_to_vector(np.diag([1.0, 2.0, 3.0]))
    d = constructions.derivative_poly(p, b, rng=rng, verify=100)
    assert d.degree == 2 and spectra.is_hyperbolic(d.realized, b, rng=0)


def test_derivative_rejects_outside_direction():
    with pytest.raises(ConeViolation):
        constructions.derivative_poly(poly_core.light_cone(), [0, 1, 0], a=[1, 0, 0])


def test_product_of_monomials_is_exact():
    p = poly_core.light_cone()
    q = poly_core.linear_form([1.0, 0.5, 0.0])
    d = constructions.product(p, q, np.array([1.0, 0, 0]), rng=0)
    assert d.exact and d.degree == 3


def test_product_with_spectral_factor():
    m = SpectralModel("det_real", 2)
    d = constructions.product(m, m, rng=0)
    x = poly_core.sym_to_vector(np.diag([1.0, 3.0]))
    assert np.allclose(d.eigenvalues(x).values, [1, 1, 3, 3])


def test_restrict_subspace():
    p = poly_core.product_poly(3)
    W = np.array([[1.0, 0], [0, 1], [0, 1]])
    d = constructions.restrict_subspace(p, np.ones(3), W, [1.0, 1.0])
    assert d.degree == 3 and spectra.is_hyperbolic(d.realized, [1.0, 1.0], rng=0)


def test_delta_elliptic_eigenvalues():
    d = constructions.delta_elliptic(poly_core.product_poly(2), np.ones(2), 0.5)
    assert np.allclose(d.eigenvalues([1.0, -1.0]).values, [-0.5, 0.5])


def test_universal_compose_with_sigma2():
    Q = constructions.sigma_poly(poly_core.product_poly(3), np.ones(3), 2).realized
    d = constructions.universal_compose(Q, poly_core.det_expanded(3), poly_core.identity_vector(3), rng=0)
    x = poly_core.sym_to_vector(np.diag([1.0, 2.0, 3.0]))
    assert d(x) == pytest.approx(11.0)


def test_krylov_half_identity_outside():
    p, a = poly_core.det_expanded(2), poly_core.identity_vector(2)
    x = 0.5 * a
    assert constructions.krylov_membership(p, a, x, [2.0, 0.0]) is Region.OUTSIDE
    # c = (0, 1): value det - tr, negative at I/2 and positive at 3I
    assert constructions.krylov_membership(p, a, x, [0.0, 1.0]) is Region.OUTSIDE
    assert constructions.krylov_membership(p, a, 3 * a, [0.0, 1.0]) is Region.INSIDE


def test_derived_json():
    d = constructions.sigma_poly(poly_core.det_expanded(2), poly_core.identity_vector(2), 1)
    j = d.to_json_dict()
    assert j["kind"] == "sigma" and j["params"] == {"j": 1}


def test_sigma_of_derivative_eigenvalues_is_proportional(rng):
    p, a = poly_core.det_expanded(3), poly_core.identity_vector(3)
    d = constructions.derivative_poly(p, a, a=a, rng=0)
    ratios = []
    for x in rng.standard_normal((30, 6)):
        s_d = spectra.elementary_symmetric(d.eigenvalues(x).values)
        s = spectra.elementary_symmetric(spectra.eigenvalues(p, a, x).values)
        ratios.append(s_d / s[:2])
    ratios = np.array(ratios)
    assert np.allclose(ratios, ratios[0], rtol=1e-7)
    assert np.all(ratios[0] > 0)
