"""Implicit time integration for the discretised boundary-coupled system
and for the associated second-order (wave) system.

Backward Euler is a resolvent iteration: with the M-matrix structure of
the assembled operator it preserves nonnegativity of the state exactly.
Crank-Nicolson is the Cayley transform: it is a weighted-norm contraction
whenever the operator is dissipative for those weights.  The wave system
is reduced to first order and stepped by the implicit trapezoidal rule,
which exactly conserves the discrete energy in the self-adjoint case.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .analytic import SystemParams
from .discrete import DiscreteOperator, ProductState, assemble
from .errors import NearSingular

COND_LIMIT = 1e12

SCHEMES = ("BackwardEuler", "CrankNicolson")


@dataclass
class Trajectory:
    """Time samples of an evolution: values[i] is the state at times[i]."""

    times: np.ndarray
    values: np.ndarray            # shape (n_times, n_dof)
    norms: np.ndarray
    min_values: np.ndarray

    def __post_init__(self):
        n = len(self.times)
        if not (len(self.values) == len(self.norms) == len(self.min_values) == n):
            raise ValueError("trajectory fields must have equal length")
        if n > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")

    def state(self, i: int) -> ProductState:
        return ProductState.from_vector(self.values[i])

    @property
    def states(self) -> list:
        return [self.state(i) for i in range(len(self.times))]

    def to_csv(self, target) -> None:
        """Write columns time, norm, min_value, boundary_0, boundary_1."""
        close = False
        if isinstance(target, (str, bytes)):
            fh, close = open(target, "w", encoding="utf-8", newline="\n"), True
        else:
            fh = target
        try:
            fh.write("time,norm,min_value,boundary_0,boundary_1\n")
            for i, t in enumerate(self.times):
                b0, b1 = self.values[i, 0], self.values[i, -1]
                fh.write(f"{t:.17g},{self.norms[i]:.17g},{self.min_values[i]:.17g},"
                         f"{_fmt(b0)},{_fmt(b1)}\n")
        finally:
            if close:
                fh.close()


def _fmt(z):
    z = complex(z)
    if z.imag == 0.0:
        return f"{z.real:.17g}"
    return f"{z.real:.17g}{z.imag:+.17g}j"


def _prepared_solver(M, what):
    lu = lu_factor(M)
    # one-shot condition estimate; the factorisation is reused for it
    n = M.shape[0]
    inv_norm = np.linalg.norm(lu_solve(lu, np.eye(n, dtype=M.dtype)), 1)
    cond = np.linalg.norm(M, 1) * inv_norm
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise NearSingular(f"{what}: condition estimate {cond:.3e} > {COND_LIMIT:.0e}")

    def solve(b):
        x = lu_solve(lu, b)
        # one iterative-refinement pass keeps exact fixed points
        # (e.g. the constant state in the markovian case) to roundoff
        r = b - M @ x
        return x + lu_solve(lu, r)

    return solve


def evolve(op: DiscreteOperator, u0, T: float, dt: float,
           scheme: str = "CrankNicolson") -> Trajectory:
    """Integrate u' = A u with an implicit one-step scheme.

    BackwardEuler solves (I - dt A) u_{n+1} = u_n; CrankNicolson solves
    (I - dt/2 A) u_{n+1} = (I + dt/2 A) u_n.  Records the weighted norm
    and the minimal real part of the entries at every step.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"scheme must be one of {SCHEMES}, got {scheme!r}")
    if dt <= 0:
        raise ValueError("dt must be positive")
    if T < dt:
        raise ValueError("T must be >= dt")
    u = u0.to_vector() if isinstance(u0, ProductState) else np.asarray(u0)
    n = op.size
    if u.shape != (n,):
        raise ValueError(f"initial state has wrong length {u.shape}, expected ({n},)")
    A = op.matrix
    eye = np.eye(n, dtype=A.dtype)
    if scheme == "BackwardEuler":
        solve = _prepared_solver(eye - dt * A, f"I - dt*A with dt={dt}")
        rhs_mat = None
    else:
        solve = _prepared_solver(eye - 0.5 * dt * A, f"I - dt/2*A with dt={dt}")
        rhs_mat = eye + 0.5 * dt * A

    steps = int(round(T / dt))
    out = np.empty((steps + 1, n), dtype=np.result_type(A, u))
    out[0] = u
    for m in range(steps):
        b = out[m] if rhs_mat is None else rhs_mat @ out[m]
        out[m + 1] = solve(b)
    times = dt * np.arange(steps + 1)
    norms = np.sqrt(np.sum(op.weights[None, :] * np.abs(out) ** 2, axis=1))
    min_values = out.real.min(axis=1)
    return Trajectory(times, out, norms, min_values)


def decay_rate(traj: Trajectory, t_start: float) -> float:
    """Least-squares slope of log ||u(t)|| for t >= t_start.

    Returns -inf if the norms have decayed below the floating-point floor.
    """
    sel = traj.times >= t_start
    if int(sel.sum()) < 10:
        raise ValueError("need at least 10 samples after t_start")
    norms = traj.norms[sel]
    if np.any(norms < 1e-300):
        return -np.inf
    return float(np.polyfit(traj.times[sel], np.log(norms), 1)[0])


@dataclass(frozen=True)
class WaveState:
    displacement: ProductState
    velocity: ProductState


@dataclass
class WaveTrajectory:
    """Displacement/velocity samples of the second-order system, with the
    discrete energy  E = -<A u, u>_w + ||v||_w^2."""

    times: np.ndarray
    displacements: np.ndarray
    velocities: np.ndarray
    energies: np.ndarray

    def state(self, i: int) -> WaveState:
        return WaveState(ProductState.from_vector(self.displacements[i]),
                         ProductState.from_vector(self.velocities[i]))

    @property
    def states(self) -> list:
        return [self.state(i) for i in range(len(self.times))]


def wave_evolve(params: SystemParams, f, g, T: float, dt: float) -> WaveTrajectory:
    """Integrate the wave system u_tt = u'' with boundary accelerations
    u_tt(0) = u'(0) + alpha u(0), u_tt(1) = -u'(1) + beta u(1).

    Requires k = 0.  ``f`` and ``g`` are displacement and velocity on the
    full grid (length N+2).  First-order reduction (u, v)' = (v, A u),
    stepped by the implicit trapezoidal rule; for real alpha, beta <= 0
    the recorded energy is nonnegative and conserved up to roundoff.
    """
    if params.k != 0.0:
        raise ValueError("the wave system has no transport term: k must be 0")
    if dt <= 0:
        raise ValueError("dt must be positive")
    if T < dt:
        raise ValueError("T must be >= dt")
    f = np.asarray(f)
    g = np.asarray(g)
    if f.shape != g.shape or f.ndim != 1 or len(f) < 10:
        raise ValueError("f and g must be equal-length grid vectors (length N+2 >= 10)")
    n = len(f)
    op = assemble(params, n - 2)
    A = op.matrix
    J = np.zeros((2 * n, 2 * n), dtype=A.dtype)
    J[:n, n:] = np.eye(n)
    J[n:, :n] = A

    solve = _prepared_solver(np.eye(2 * n, dtype=A.dtype) - 0.5 * dt * J,
                             f"wave trapezoidal step with dt={dt}")
    M2 = np.eye(2 * n, dtype=A.dtype) + 0.5 * dt * J

    steps = int(round(T / dt))
    z = np.concatenate([f, g]).astype(np.result_type(A, f, g))
    disp = np.empty((steps + 1, n), dtype=z.dtype)
    vel = np.empty((steps + 1, n), dtype=z.dtype)
    disp[0], vel[0] = z[:n], z[n:]
    for m in range(steps):
        z = solve(M2 @ z)
        disp[m + 1], vel[m + 1] = z[:n], z[n:]
    energies = np.array([wave_energy(op, disp[i], vel[i]) for i in range(steps + 1)])
    return WaveTrajectory(dt * np.arange(steps + 1), disp, vel, energies)


def wave_energy(op: DiscreteOperator, u, v) -> float:
    """E = -<A u, u>_w + ||v||_w^2 (real part)."""
    return float((-op.weighted_inner(op.matrix @ np.asarray(u), u)).real
                 + op.weighted_norm(v) ** 2)
