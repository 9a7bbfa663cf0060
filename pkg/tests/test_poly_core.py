import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from garding import poly_core
from garding.errors import DegenerateDirection, SchemaError
from garding.poly_core import MonomialPoly, evaluate

coords = st.floats(-3, 3, allow_nan=False)


def test_light_cone_values():
    p = poly_core.light_cone()
    assert evaluate(p, [1, 0, 0]) == 1
    assert evaluate(p, [2, 1, 1]) == 2


@given(st.lists(coords, min_size=3, max_size=3))
def test_directional_derivative_matches_finite_difference(x):
    p = poly_core.example_a3()
    b = np.array([0.3, -1.0, 2.0])
    d = evaluate(poly_core.directional_derivative(p, b), x)
    h = 1e-5
    fd = (evaluate(p, np.add(x, h * b)) - evaluate(p, np.subtract(x, h * b))) / (2 * h)
    assert d == pytest.approx(fd, rel=1e-6, abs=1e-6)


@given(st.lists(coords, min_size=3, max_size=3), st.floats(-2, 2))
def test_restriction_coefficients_reproduce_values(x, t):
    p = poly_core.det_expanded(2)
    a = poly_core.identity_vector(2)
    c = poly_core.restriction_coefficients(p, a, x)
    assert np.polyval(c, t) == pytest.approx(evaluate(p, t * a + np.asarray(x)), abs=1e-9)


def test_degenerate_direction_rejected():
    with pytest.raises(DegenerateDirection):
        poly_core.restrict_line(poly_core.light_cone(), [1, 1, 0], [0, 0, 1])


def test_polarized_value_of_product_polynomial():
    p = poly_core.product_poly(3)
    assert poly_core.polarized_value(p, list(np.eye(3))) == pytest.approx(1 / 6)


def test_polarization_is_symmetric(rng):
    p = poly_core.det_expanded(3)
    bs = list(rng.standard_normal((3, 6)))
    assert poly_core.polarized_value(p, bs) == pytest.approx(poly_core.polarized_value(p, bs[::-1]))


def test_json_round_trip():
    p = poly_core.det_expanded(3)
    q = poly_core.loads(__import__("json").dumps(poly_core.to_json_dict(p)))
    assert q.terms == p.terms and q.dim == p.dim and q.degree == p.degree


def test_schema_errors():
    with pytest.raises(SchemaError):
        poly_core.from_json_dict({"dim": 2, "degree": 2, "terms": [{"exp": [1, 0], "coeff": 1}]})
    with pytest.raises(SchemaError):
        poly_core.from_json_dict({"dim": 2})


def test_zero_polynomial_is_allowed():
    z = MonomialPoly(2, 3, {})
    assert z.is_zero() and evaluate(z, [1.0, 2.0]) == 0


def test_det_expanded_matches_numpy(rng):
    for n in (2, 3, 4):
        A = rng.standard_normal((n, n))
        A = A + A.T
        assert evaluate(poly_core.det_expanded(n), poly_core.sym_to_vector(A)) == pytest.approx(np.linalg.det(A))


def test_sym_round_trip(rng):
    A = rng.standard_normal((3, 3))
    A = A + A.T
    assert np.allclose(poly_core.vector_to_sym(poly_core.sym_to_vector(A), 3), A)
