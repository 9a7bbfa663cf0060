"""Grid refinement study for the planar Dirichlet solver.

Prints max errors and observed orders for the Laplace branch with smooth
harmonic data, and the convex Monge-Ampere branch with data x^2.
"""
import math

import numpy as np

from garding import dirichlet as dq
from garding.matrix_models import SpectralModel

CASES = [
    ("laplace e^x cos y", dq.Equation(SpectralModel("trace", 2), k=1), lambda x, y: np.exp(x) * np.cos(y)),
    ("laplace x^2-y^2", dq.Equation(SpectralModel("trace", 2), k=1), lambda x, y: x ** 2 - y ** 2),
    ("monge-ampere x^2", dq.Equation(SpectralModel("det_real", 2), k=1), lambda x, y: x ** 2),
]


def main():
    print("case,n,h,max_error,order,iterations,seconds")
    for name, eq, g in CASES:
        prev = None
        for n in (17, 33, 65, 129):
            grid = dq.Grid2D(n)
            rep, u = dq.solve(eq, grid, g)
            err = dq.max_error(grid, u, g)
            order = math.log2(prev / err) if prev and err > 1e-13 else float("nan")
            print(f"{name},{n},{grid.h:.5f},{err:.3e},{order:.2f},{rep.iterations},{rep.wall_time:.2f}")
            prev = err


if __name__ == "__main__":
    main()
