import numpy as np
import pytest

from garding import dirichlet as dq
from garding import universal_sets as us
from garding.matrix_models import SpectralModel

DET2 = SpectralModel("det_real", 2)


def harmonic(x, y):
    return x ** 2 - y ** 2


def test_laplace_exact_quadratic():
    grid = dq.Grid2D(33)
    rep, u = dq.solve(dq.Equation(SpectralModel("trace", 2), k=1), grid, harmonic)
    assert rep.converged and dq.max_error(grid, u, harmonic) < 1e-10


def test_monge_ampere_convex_branch():
    grid = dq.Grid2D(33)
    eq = dq.Equation(DET2, k=1)
    rep, u = dq.solve(eq, grid, lambda x, y: x ** 2)
    assert rep.converged and dq.max_error(grid, u, lambda x, y: x ** 2) < 1e-8
    assert dq.harmonic_certificate(u, eq, grid).passed


@pytest.mark.parametrize("shape", ["disk", "square"])
def test_duality_reflection(shape):
    g = lambda x, y: np.sin(2 * x) + y ** 3
    eq = dq.Equation(DET2, k=1)
    _, u1 = dq.solve(eq, dq.Grid2D(25, shape=shape), g)
    _, u2 = dq.solve(eq.dual(), dq.Grid2D(25, shape=shape), lambda x, y: -g(x, y))
    m = dq.Grid2D(25, shape=shape).mask != dq.EXTERIOR
    assert np.max(np.abs(u1[m] + u2[m])) < 1e-6


def test_comparison_principle():
    eq = dq.Equation(DET2, k=1)
    _, u1 = dq.solve(eq, dq.Grid2D(25), lambda x, y: x ** 2)
    _, u2 = dq.solve(eq, dq.Grid2D(25), lambda x, y: x ** 2 + 0.1)
    m = dq.Grid2D(25).mask != dq.EXTERIOR
    assert np.max(u1[m] - u2[m]) <= 1e-9


def test_special_lagrangian_solve():
    E = us.special_lagrangian(2, 0.3)
    eq = dq.Equation(DET2, E=E)
    grid = dq.Grid2D(25)
    rep, u = dq.solve(eq, grid, lambda x, y: x * y)
    assert rep.converged and dq.harmonic_certificate(u, eq, grid).passed


def test_explicit_method_small_grid():
    grid = dq.Grid2D(17)
    rep, u = dq.solve(dq.Equation(DET2, k=1), grid, lambda x, y: x ** 2,
                      dq.SolveConfig(method="explicit", tol=1e-8))
    assert rep.converged and dq.max_error(grid, u, lambda x, y: x ** 2) < 1e-6


def test_boundary_convexity():
    assert dq.boundary_convexity_check("disk", DET2, k=1).status == "admitted"
    assert dq.boundary_convexity_check("square", DET2, k=1).status == "nonsmooth-admitted"
    assert dq.boundary_convexity_check("disk", DET2, E=us.special_lagrangian(2, 0.3)).status == "unverified-noncone"


def test_csv_outputs():
    grid = dq.Grid2D(9)
    rep, _ = dq.solve(dq.Equation(DET2, k=1), grid, lambda x, y: x ** 2)
    assert grid.to_csv().startswith("x,y,u\n")
    assert rep.history_csv().startswith("iter,residual\n")
    assert "wall_time" not in rep.to_json_dict()


def test_equation_validation():
    with pytest.raises(ValueError):
        dq.Equation(DET2)
    with pytest.raises(ValueError):
        dq.Equation(SpectralModel("det_real", 3), k=1)
