import numpy as np
import pytest

from garding import poly_core
from garding.matrix_models import SpectralModel


def monomial_instances():
    """(name, polynomial, direction) for the shipped monomial polynomials."""
    return [
        ("lightcone", poly_core.light_cone(), np.array([1.0, 0.0, 0.0])),
        ("product3", poly_core.product_poly(3), np.ones(3)),
        ("exA3", poly_core.example_a3(), np.ones(3)),
        ("det2", poly_core.det_expanded(2), poly_core.identity_vector(2)),
        ("det3", poly_core.det_expanded(3), poly_core.identity_vector(3)),
    ]


def spectral_instances():
    return [
        ("det_complex2", SpectralModel("det_complex", 2)),
        ("lagrangian1", SpectralModel("lagrangian", 1)),
        ("lagrangian2", SpectralModel("lagrangian", 2)),
    ]


def all_instances():
    out = [(n, p, a) for n, p, a in monomial_instances()]
    out += [(n, m, None) for n, m in spectral_instances()]
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
