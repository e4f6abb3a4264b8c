"""Finite-difference realisation of the boundary-coupled operator on the
product space C^2 x grid.

State vectors are ordered (node 0, interior nodes 1..N, node N+1) on the
uniform grid x_i = i*h, h = 1/(N+1), so the boundary block stays
contiguous for 2x2 extraction.  The inner product carries weight 1 on the
two boundary nodes and h on interior nodes, discretising the norm of
C^2 x L^2(0,1).

Interior rows use centred second/first differences (second order).  The
boundary rows use the one-sided two-point derivative

    u'(0) ~ (u_1 - u_0)/h,      u'(1) ~ (u_{N+1} - u_N)/h,

which is the unique closure, given the weights and interior stencil, that
(a) maps the constant vector exactly to (alpha, 0, ..., 0, beta),
(b) is self-adjoint w.r.t. the weighted inner product when k = 0 and
    alpha, beta are real, and
(c) keeps lam - A an M-matrix for lam > 0 large, so discrete resolvent
    positivity is exact.
Its truncation error at the two boundary nodes is O(h); eigenvalues
therefore converge at first order in general (second order whenever the
eigenfunction's boundary values are negligible).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analytic import SystemParams, dirichlet_apply, _check_sigma_d
from .errors import EigenFailure, NearSingular

COND_LIMIT = 1e12


@dataclass(frozen=True)
class Grid:
    """Uniform grid on [0,1] with N interior nodes: x_i = i*h, h = 1/(N+1)."""

    n_interior: int
    h: float
    nodes: np.ndarray

    @classmethod
    def with_interior(cls, n_interior: int) -> "Grid":
        if n_interior < 8:
            raise ValueError(f"need at least 8 interior nodes, got {n_interior}")
        h = 1.0 / (n_interior + 1)
        return cls(n_interior, h, np.linspace(0.0, 1.0, n_interior + 2))


@dataclass(frozen=True)
class ProductState:
    """A vector on C^2 x grid: two boundary values plus interior values."""

    boundary: np.ndarray
    interior: np.ndarray

    @classmethod
    def from_vector(cls, vec) -> "ProductState":
        vec = np.asarray(vec)
        return cls(np.array([vec[0], vec[-1]]), vec[1:-1].copy())

    def to_vector(self) -> np.ndarray:
        return np.concatenate(([self.boundary[0]], self.interior, [self.boundary[1]]))


@dataclass(frozen=True)
class DiscreteOperator:
    """Assembled (N+2)x(N+2) matrix with its inner-product weights."""

    matrix: np.ndarray
    weights: np.ndarray
    params: SystemParams
    grid: Grid

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def weighted_inner(self, u, v) -> complex:
        return complex(np.sum(self.weights * np.asarray(u) * np.conj(np.asarray(v))))

    def weighted_norm(self, u) -> float:
        return float(np.sqrt(np.sum(self.weights * np.abs(np.asarray(u)) ** 2)))

    def weighted_adjoint(self) -> np.ndarray:
        """Adjoint w.r.t. the weighted inner product: W^-1 A^H W."""
        w = self.weights
        return (self.matrix.conj().T * w[None, :]) / w[:, None]

    def symmetry_defect(self) -> float:
        """Max-entry deviation of W*A from Hermitian."""
        s = self.weights[:, None] * self.matrix
        return float(np.abs(s - s.conj().T).max())

    def interior_block(self) -> np.ndarray:
        return self.matrix[1:-1, 1:-1]


def assemble(params: SystemParams, n_interior: int) -> DiscreteOperator:
    """Assemble the finite-difference operator for the coupled system."""
    grid = Grid.with_interior(n_interior)
    N = n_interior
    inv_h = float(N + 1)
    complex_coeffs = params.alpha.imag != 0.0 or params.beta.imag != 0.0
    dtype = complex if complex_coeffs else float
    alpha = params.alpha if complex_coeffs else params.alpha.real
    beta = params.beta if complex_coeffs else params.beta.real
    k = params.k

    A = np.zeros((N + 2, N + 2), dtype=dtype)
    lower = inv_h**2 - k * inv_h / 2.0
    upper = inv_h**2 + k * inv_h / 2.0
    idx = np.arange(1, N + 1)
    A[idx, idx - 1] = lower
    A[idx, idx] = -2.0 * inv_h**2
    A[idx, idx + 1] = upper
    A[0, 0] = alpha - inv_h
    A[0, 1] = inv_h
    A[N + 1, N + 1] = beta - inv_h
    A[N + 1, N] = inv_h

    weights = np.full(N + 2, grid.h)
    weights[0] = weights[-1] = 1.0
    return DiscreteOperator(A, weights, params, grid)


def discrete_spectrum(op: DiscreteOperator) -> np.ndarray:
    """All eigenvalues of the assembled matrix, sorted by descending real
    part (ties by imaginary part)."""
    try:
        ev = np.linalg.eigvals(op.matrix)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(f"dense eigensolver failed: {exc}") from exc
    order = np.lexsort((ev.imag, -ev.real))
    return ev[order]


def _guarded_inverse(M, what):
    try:
        inv = np.linalg.inv(M)
    except np.linalg.LinAlgError as exc:
        raise NearSingular(f"{what} is singular") from exc
    cond = np.linalg.norm(M, 1) * np.linalg.norm(inv, 1)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise NearSingular(f"{what} has condition estimate {cond:.3e} > {COND_LIMIT:.0e}")
    return inv


def discrete_resolvent(op: DiscreteOperator, lam: complex) -> np.ndarray:
    """(lam*I - A)^-1.  Its corner 2x2 block on the boundary nodes
    approximates the analytic 2x2 resolvent (lam - pencil(lam))^-1."""
    lam = complex(lam)
    n = op.size
    M = lam * np.eye(n, dtype=complex) - op.matrix
    return _guarded_inverse(M, f"lam*I - A at lam={lam}")


def boundary_resolvent_block(R: np.ndarray) -> np.ndarray:
    """Extract the 2x2 boundary corner of a full resolvent."""
    return np.array([[R[0, 0], R[0, -1]], [R[-1, 0], R[-1, -1]]])


def dirichlet_relation_residual(params: SystemParams, lam: complex,
                                n_interior: int) -> float:
    """Consistency of the Dirichlet solution operators with the resolvent
    relation  D_lam = (I - lam * R(lam, D)) D_0.

    The left side samples the closed-form Dirichlet solution at lam; the
    right side pushes the closed-form solution at 0 through the discrete
    interior resolvent.  Returns the max-norm difference over the grid for
    the two canonical boundary inputs (1,0) and (0,1); O(h^2) since only
    the interior (Dirichlet) block enters.
    """
    lam = complex(lam)
    _check_sigma_d(lam, params.k)
    op = assemble(params, n_interior)
    D_h = op.interior_block().astype(complex)
    nodes = op.grid.nodes[1:-1]
    n = n_interior
    M = lam * np.eye(n) - D_h
    Minv = _guarded_inverse(M, f"lam*I - D at lam={lam}")
    worst = 0.0
    for x0, x1 in ((1.0, 0.0), (0.0, 1.0)):
        lhs = np.asarray(dirichlet_apply(params, lam, x0, x1, nodes))
        g = np.asarray(dirichlet_apply(params, 0.0, x0, x1, nodes))
        rhs = g - lam * (Minv @ g)
        worst = max(worst, float(np.abs(lhs - rhs).max()))
    return worst
