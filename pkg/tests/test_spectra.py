import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from garding import poly_core, spectra
from garding.errors import NotReal
from garding.matrix_models import SpectralModel

from conftest import all_instances


def test_light_cone_eigenvalues():
    lam = spectra.eigenvalues(poly_core.light_cone(), [1, 0, 0], [0, 0, 1])
    assert np.allclose(lam.values, [-1, 1])


def test_example_a3_eigenvalues():
    lam = spectra.eigenvalues(poly_core.example_a3(), [1, 1, 1], [1, 0, 0])
    assert np.allclose(lam.values, [0, 2 / 3])


def test_non_hyperbolic_polynomial_is_refuted():
    p = poly_core.MonomialPoly(2, 2, {(2, 0): 1.0, (0, 2): 1.0})
    v = spectra.is_hyperbolic(p, [1.0, 0.0], rng=0)
    assert not v
    with pytest.raises(NotReal):
        spectra.eigenvalues(p, [1.0, 0.0], v.witness)


@pytest.mark.parametrize("name,p,a", all_instances(), ids=[i[0] for i in all_instances()])
def test_shipped_instances_are_hyperbolic(name, p, a):
    assert spectra.is_hyperbolic(p, a, sample_count=50, rng=1)


@pytest.mark.parametrize("name,p,a", all_instances(), ids=[i[0] for i in all_instances()])
def test_direction_has_unit_eigenvalues(name, p, a):
    lam = spectra.eigenvalues(p, a, spectra.direction_of(p, a))
    assert np.allclose(lam.values, 1.0, atol=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=6, max_size=6), st.floats(-10, 10))
def test_shift_identity_det3(x, t):
    p = poly_core.det_expanded(3)
    assert spectra.shift_identity_check(p, poly_core.identity_vector(3), x, t) <= 1e-7 * (1 + abs(t) + max(map(abs, x)))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=3, max_size=3), st.floats(-3, 3))
def test_eigenvalues_are_homogeneous(x, s):
    p = poly_core.light_cone()
    a = np.array([1.0, 0, 0])
    lam = spectra.eigenvalues(p, a, x).values
    scaled = spectra.eigenvalues(p, a, s * np.asarray(x)).values
    assert np.allclose(scaled, np.sort(s * lam), atol=1e-9 * (1 + np.abs(lam).max()))


def test_trace_paths_agree(rng):
    p, a = poly_core.det_expanded(3), poly_core.identity_vector(3)
    for x in rng.standard_normal((20, 6)):
        assert spectra.trace_a(p, a, x) == pytest.approx(spectra.trace_a(p, a, x, path="derivative"))


def test_rank_profile():
    p, a = poly_core.det_expanded(2), poly_core.identity_vector(2)
    r = spectra.rank_profile(p, a, poly_core.sym_to_vector(np.diag([2.0, 0.0])))
    assert (r.plus, r.minus, r.nullity) == (1, 0, 1)


def test_spectral_and_monomial_det_agree(rng):
    m = SpectralModel("det_real", 3)
    p, a = poly_core.det_expanded(3), poly_core.identity_vector(3)
    for x in rng.standard_normal((20, 6)):
        assert np.allclose(spectra.eigenvalues(m, None, x).values, spectra.eigenvalues(p, a, x).values, atol=1e-9)


def test_curves_are_increasing_and_csv_shaped():
    b = spectra.track_curves(poly_core.light_cone(), [1, 0, 0], [2, 1, 0], [0, 0, 1], -2, 2, 21)
    assert b.is_strictly_increasing()
    lines = b.to_csv().strip().splitlines()
    assert lines[0] == "t,lambda_1,lambda_2" and len(lines) == 22


def test_batch_matches_single(rng):
    p, a = poly_core.example_a3(), np.ones(3)
    X = rng.standard_normal((30, 3))
    vals, ok = spectra.eigenvalues_batch(p, a, X)
    assert ok.all()
    for x, v in zip(X, vals):
        assert np.allclose(v, spectra.eigenvalues(p, a, x).values)


def test_repeated_roots_are_accepted():
    p, a = poly_core.det_expanded(3), poly_core.identity_vector(3)
    x = poly_core.sym_to_vector(np.diag([1.0, 1.0, 1.0]) * 2)
    assert np.allclose(spectra.eigenvalues(p, a, x).values, 2.0)


def test_reciprocal_eigenvalues_between_cone_points(rng):
    p, e = poly_core.det_expanded(3), poly_core.identity_vector(3)
    for _ in range(20):
        G = rng.standard_normal((2, 3, 3))
        a, b = (poly_core.sym_to_vector(g @ g.T + 0.5 * np.eye(3)) for g in G)
        lam_ab = spectra.eigenvalues(p, a, b).values  # b relative to a
        lam_ba = spectra.eigenvalues(p, b, a).values
        assert np.allclose(np.sort(1 / lam_ab), lam_ba, rtol=1e-8)
