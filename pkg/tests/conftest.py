import numpy as np
import pytest
from hypothesis import settings
from scipy.integrate import solve_bvp

settings.register_profile("deterministic", derandomize=True)
settings.load_profile("deterministic")


def collocation_dirichlet(k, lam, x0, x1, mesh, tol=3e-11):
    """Independent collocation solve of u'' + k u' - lam u = 0 with
    u(0)=x0, u(1)=x1.  Returns (values on mesh, dense solution)."""
    def rhs(x, y):
        return np.vstack([y[1], lam * y[0] - k * y[1]])

    def bc(ya, yb):
        return np.array([ya[0] - x0, yb[0] - x1])

    x_init = np.linspace(0, 1, 201)
    y_init = np.vstack([x0 + (x1 - x0) * x_init, np.full_like(x_init, x1 - x0)])
    sol = solve_bvp(rhs, bc, x_init, y_init, tol=tol, max_nodes=500_000)
    if not sol.success:
        raise RuntimeError(f"collocation failed: {sol.message}")
    return sol.sol(mesh)[0], sol


def collocation_char_det(a, b, k, lam):
    """Characteristic determinant assembled from collocation solutions:
    boundary derivatives of the two canonical Dirichlet solutions give the
    feedback matrix column by column."""
    mesh = np.linspace(0, 1, 11)
    cols = []
    for x0, x1 in ((1.0, 0.0), (0.0, 1.0)):
        _, sol = collocation_dirichlet(k, lam, x0, x1, mesh)
        cols.append([sol.sol(0.0)[1], -sol.sol(1.0)[1]])
    pencil = np.diag([a, b]) + np.array(cols).T
    return np.linalg.det(lam * np.eye(2) - pencil)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(0xD7DB)
