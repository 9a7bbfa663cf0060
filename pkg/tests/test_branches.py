import numpy as np
import pytest
from hypothesis import given, strategies as st

from garding import branches, poly_core
from garding.branches import Region
from garding.errors import NotOnHyperplane


def test_example_a3_branch_report():
    r = branches.classification_report(poly_core.example_a3(), np.ones(3), [1, 1, -1])
    assert r["branches"] == ["outside", "inside"]


@given(st.lists(st.sampled_from([-1, 0, 1]), min_size=3, max_size=6))
def test_sign_variation_ignores_zeros(signs):
    s = [1] + signs
    kept = [v for v in s if v]
    expected = sum(1 for u, v in zip(kept, kept[1:]) if u != v)
    assert branches.sign_variation(s) == expected


def test_descartes_matches_eigen(rng):
    p, a = poly_core.det_expanded(3), poly_core.identity_vector(3)
    for x in rng.standard_normal((200, 6)):
        for k in (1, 2, 3):
            by_eig = branches.branch_membership_eigen(p, a, x, k).member
            assert branches.branch_membership_descartes(p, a, x, k) == by_eig


def test_dual_branch(rng):
    p, a = poly_core.det_expanded(3), poly_core.identity_vector(3)
    for x in rng.standard_normal((50, 6)):
        assert branches.dual_branch_membership(p, a, x, 1) == branches.branch_membership_eigen(p, a, x, 3)


def test_edge_of_product_is_trivial_and_light_cone_too():
    assert not branches.edge_test(poly_core.product_poly(3), [1, 0, 0], a=np.ones(3))
    assert branches.edge_test(poly_core.product_poly(3), [0, 0, 0], a=np.ones(3))


def test_edge_of_degenerate_polynomial():
    p = poly_core.MonomialPoly(3, 2, {(2, 0, 0): 1.0, (0, 2, 0): -1.0})
    assert branches.edge_test(p, [0, 0, 1], probe_count=20, rng=0)


def test_sign_orthant_cells():
    sv, cells = branches.sign_orthant_decomposition(poly_core.example_a3(), np.ones(3), [1, 0, 0])
    assert sv.entries == (1, 1, 0)
    assert len(cells) == 2


def test_norms_require_trace_zero():
    p, a = poly_core.light_cone(), np.array([1.0, 0, 0])
    with pytest.raises(NotOnHyperplane):
        branches.norms_pm(p, a, [1, 0, 0])
    assert branches.norms_pm(p, a, [0, 3, 4]) == pytest.approx((5, 5))


def test_graph_function_light_cone():
    p, a = poly_core.light_cone(), np.array([1.0, 0, 0])
    f = branches.graph_function(p, a, branches.branch_member(p, a, 1), np.array([0, 3.0, 4.0]))
    assert f == pytest.approx(5.0)


def test_region_values():
    assert Region.INSIDE.member and Region.BOUNDARY.member and not Region.OUTSIDE.member
