"""Structural checks for coupled block operator matrices, verified on
finite matrices.

``osc_check`` tests the criterion for an invertible block matrix to carry
a one-sided coupled factorisation (upper-triangular times unipotent
lower-triangular) with invertible lower-right corner: writing the inverse
as blocks [[U, V], [W, S]], the corner D of the original matrix is
invertible iff U is injective and rg(V) is contained in rg(U).

``triangular_semigroup_check`` verifies, on matrices, the closed
expression for the semigroup generated by the coupled triangular product
diag(A, D) @ [[I, 0], [L, I]]: the flow splits as
[[T(t), 0], [Q(t), S(t)]] with T, S the factor flows and

    Q(t) = D * integral_0^t S(t-s) L T(s) ds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import NotInvertible


@dataclass(frozen=True)
class OscCheckResult:
    d_invertible: bool
    u_injective: bool
    range_v_in_range_u: bool

    @property
    def equivalence_holds(self) -> bool:
        return self.d_invertible == (self.u_injective and self.range_v_in_range_u)


def osc_check(U, V, W, S, rank_tol: float = 1e-8) -> OscCheckResult:
    """Coupling criterion flags from the inverse blocks of a block matrix.

    U, V, W, S are the blocks of M^-1 (U square on the first factor, S
    square on the second).  Reconstructs M, extracts its lower-right
    corner D, and reports the three flags of the criterion; rank decisions
    use singular values at relative tolerance ``rank_tol``.
    """
    U, V, W, S = (np.asarray(B, dtype=complex) for B in (U, V, W, S))
    nx, ny = U.shape[0], S.shape[0]
    if U.shape != (nx, nx) or S.shape != (ny, ny) or V.shape != (nx, ny) or W.shape != (ny, nx):
        raise ValueError("inconsistent block shapes")
    M_inv = np.block([[U, V], [W, S]])
    sv = np.linalg.svd(M_inv, compute_uv=False)
    if sv[-1] <= rank_tol * max(1.0, sv[0]):
        raise NotInvertible("the given blocks form a singular matrix")
    M = np.linalg.inv(M_inv)
    D = M[nx:, nx:]

    s_d = np.linalg.svd(D, compute_uv=False)
    d_invertible = bool(s_d[-1] > rank_tol * max(1.0, s_d[0]))

    s_u = np.linalg.svd(U, compute_uv=False)
    u_injective = bool(s_u[-1] > rank_tol * max(1.0, s_u[0]))

    s_uv = np.linalg.svd(np.hstack([U, V]), compute_uv=False)
    thresh = rank_tol * max(1.0, s_uv[0])
    rank_u = int(np.sum(s_u > thresh))
    rank_uv = int(np.sum(s_uv > thresh))
    range_v_in_range_u = bool(rank_uv == rank_u)

    return OscCheckResult(d_invertible, u_injective, range_v_in_range_u)


def coupled_block_generator(A, D, L) -> np.ndarray:
    """The matrix diag(A, D) @ [[I, 0], [L, I]] = [[A, 0], [D L, D]]."""
    A, D, L = (np.asarray(B) for B in (A, D, L))
    n, m = A.shape[0], D.shape[0]
    out = np.zeros((n + m, n + m), dtype=np.result_type(A, D, L))
    out[:n, :n] = A
    out[n:, :n] = D @ L
    out[n:, n:] = D
    return out


def coupling_block_quadrature(A, D, L, t: float, panels: int) -> np.ndarray:
    """Q(t) = D * integral_0^t S(t-s) L T(s) ds by composite Simpson.

    ``panels`` must be even; T and S are the matrix exponential flows of A
    and D, evaluated as powers of a single per-panel exponential.
    """
    A, D, L = (np.asarray(B, dtype=complex) for B in (A, D, L))
    if t < 0:
        raise ValueError("t must be >= 0")
    if panels < 2 or panels % 2:
        raise ValueError("panels must be an even integer >= 2")
    m, n = D.shape[0], A.shape[0]
    if t == 0.0:
        return np.zeros((m, n), dtype=complex)
    dt = t / panels
    ET, ES = expm(A * dt), expm(D * dt)
    T_pows = [np.eye(n, dtype=complex)]
    S_pows = [np.eye(m, dtype=complex)]
    for _ in range(panels):
        T_pows.append(ET @ T_pows[-1])
        S_pows.append(ES @ S_pows[-1])
    w = np.ones(panels + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    acc = np.zeros((m, n), dtype=complex)
    for i in range(panels + 1):
        acc += w[i] * (S_pows[panels - i] @ L @ T_pows[i])
    return D @ (acc * dt / 3.0)


def triangular_block_semigroup(A, D, L, t: float, panels: int) -> np.ndarray:
    """[[T(t), 0], [Q(t), S(t)]] with Q from quadrature."""
    A, D, L = (np.asarray(B, dtype=complex) for B in (A, D, L))
    n, m = A.shape[0], D.shape[0]
    out = np.zeros((n + m, n + m), dtype=complex)
    out[:n, :n] = expm(A * t)
    out[n:, n:] = expm(D * t)
    out[n:, :n] = coupling_block_quadrature(A, D, L, t, panels)
    return out


def triangular_semigroup_check(A, D, L, t: float, panels: int) -> float:
    """Max-entry difference between the quadrature Q(t) and the lower-left
    block of expm(t * [[A, 0], [D L, D]])."""
    Q = coupling_block_quadrature(A, D, L, t, panels)
    n = np.asarray(A).shape[0]
    ref = expm(coupled_block_generator(A, D, L) * t)[n:, :n]
    return float(np.abs(Q - ref).max())
