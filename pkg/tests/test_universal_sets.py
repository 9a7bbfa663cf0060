import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from garding import universal_sets as us
from garding.branches import Region
from garding.matrix_models import SpectralModel

lam3 = st.lists(st.floats(-5, 5), min_size=3, max_size=3).map(np.array)


@settings(max_examples=100)
@given(lam3)
def test_dual_is_an_involution(lam):
    for E in (us.branch(3, 1), us.branch(3, 2), us.special_lagrangian(3, 0.7), us.delta_branch(3, 0.3, 1)):
        twice = us.dual_set(us.dual_set(E))
        assert twice.contains(lam) == E.contains(lam)


@settings(max_examples=100)
@given(lam3)
def test_dual_of_branch_is_branch(lam):
    assert us.dual_set(us.branch(3, 1)).contains(lam) == us.branch(3, 3).contains(lam)


@given(lam3)
def test_offset_puts_point_on_boundary(lam):
    E = us.special_lagrangian(3, 0.5)
    t = E.offset(lam)
    assert E.contains(lam - t) is Region.BOUNDARY


def test_monotonicity():
    assert us.monotonicity_check(us.branch(3, 2), 500, rng=0)
    assert not us.monotonicity_check(us.halfspace([1.0, -1.0, 1.0], 0.0), 500, rng=0)


def test_delta_monotonicity():
    E = us.delta_branch(3, 0.2, 1)
    assert us.delta_monotonicity_check(E, 0.2, 500, rng=0)
    assert not us.delta_monotonicity_check(us.branch(3, 1), 0.5, 500, rng=0)


def test_yuan_threshold_small():
    c_star = math.pi / 2
    assert not us.convexity_probe(us.special_lagrangian(3, c_star - 0.2), 1000, rng=0)
    assert us.convexity_probe(us.special_lagrangian(3, c_star + 0.05), 2000, rng=0)


def test_branches_are_convex():
    assert us.convexity_probe(us.branch(3, 1), 2000, rng=0)


def test_induced_membership():
    model = SpectralModel("det_real", 3)
    assert us.induced_membership(us.branch(3, 1), model, np.diag([1.0, 2.0, 3.0])) is Region.INSIDE
    assert us.induced_membership(us.branch(3, 1), model, np.diag([-1.0, 2.0, 3.0])) is Region.OUTSIDE


def test_structure_graph_of_positive_orphant():
    assert us.structure_graph(us.branch(2, 1), np.array([1.0, -1.0])) == pytest.approx(1.0)


def test_json_round_trip():
    E = us.pconvex_branch(3, 2, 1)
    back = us.from_json_dict(E.to_json_dict())
    lam = np.array([0.3, -0.1, 2.0])
    assert back.contains(lam) == E.contains(lam)


def test_lipschitz():
    assert us.lipschitz_check(us.special_lagrangian(3, 0.3), 100, rng=0)
