"""Characteristic equations and stability for finite-dimensional delay
equations with point delays, and for Volterra integro-differential
equations with exponential-sum kernels.

For  u'(t) = A u(t) + sum_j Psi_j u(t - r_j)  the spectral values are the
zeros of  det(lam - A - sum_j Psi_j e^{-lam r_j}).  In the positivity
regime (A real with nonnegative off-diagonal entries, Psi_j entrywise
nonnegative) the rightmost zero is real and its sign equals the sign of
the largest real eigenvalue of A + sum_j Psi_j, independently of the
delays.

For  u'(t) = A u(t) + int_0^t C(t-s) A-free kernel variant with
C(s) = sum_i e^{-a_i s} C_i  the Laplace transform is closed form and the
characteristic function is  det(lam - A - sum_i C_i / (lam + a_i)),
valid for Re lam > -min_i a_i.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve
from scipy.optimize import brentq

from .errors import MisalignedDelay, OutsideHalfplane, WindowTooSmall
from .evolution import Trajectory


@dataclass(frozen=True)
class DelaySystem:
    """u'(t) = A u(t) + sum_j Psi_j u(t - r_j), history on [-1, 0]."""

    A: np.ndarray
    terms: tuple

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A))
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
            raise ValueError("A must be a square matrix")
        terms = []
        for psi, r in self.terms:
            psi = np.atleast_2d(np.asarray(psi))
            if psi.shape != A.shape:
                raise ValueError("each Psi_j must have the shape of A")
            r = float(r)
            if not 0.0 <= r <= 1.0:
                raise ValueError(f"delays must lie in [0, 1], got {r}")
            terms.append((psi, r))
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "terms", tuple(terms))

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    def is_positive_regime(self) -> bool:
        """A real Metzler (nonnegative off-diagonal), all Psi_j >= 0."""
        A = self.A
        if np.iscomplexobj(A) and np.any(A.imag != 0):
            return False
        off = A.real - np.diag(np.diag(A.real))
        if np.any(off < 0):
            return False
        for psi, _ in self.terms:
            if np.iscomplexobj(psi) and np.any(psi.imag != 0):
                return False
            if np.any(psi.real < 0):
                return False
        return True


@dataclass(frozen=True)
class ExpKernel:
    """C(s) = sum_i e^{-a_i s} C_i with all a_i > 0."""

    terms: tuple

    def __post_init__(self):
        terms = []
        for a, C in self.terms:
            a = float(a)
            if a <= 0:
                raise ValueError(f"decay rates must be positive, got {a}")
            terms.append((a, np.atleast_2d(np.asarray(C))))
        object.__setattr__(self, "terms", tuple(terms))

    @property
    def min_rate(self) -> float:
        return min(a for a, _ in self.terms)

    def __call__(self, s):
        return sum(np.exp(-a * s) * C for a, C in self.terms)


def adde_char_det(sys: DelaySystem, lam) -> complex:
    """det(lam*I - A - sum_j Psi_j e^{-lam r_j}); entire in lam.

    ``lam`` may be an array; the determinant is then evaluated batched.
    """
    lam = np.asarray(lam, dtype=complex)
    m = sys.dim
    M = lam[..., None, None] * np.eye(m) - sys.A.astype(complex)
    for psi, r in sys.terms:
        M = M - psi * np.exp(-lam * r)[..., None, None]
    det = np.linalg.det(M)
    return complex(det) if det.ndim == 0 else det


def _rightmost_real_root(f, re_min, up_start, label):
    """Scan [re_min, up] for the last sign change of the (vectorised)
    real function f and bisect."""
    up = up_start
    for _ in range(60):
        if f(np.array([up]))[0] > 0:
            break
        up *= 1.5
    else:
        raise WindowTooSmall(f"{label}: no positive values found above re_min")
    if up <= re_min:
        up = re_min + 1.0
    n_pts = min(400_000, max(4000, int((up - re_min) / 0.005) + 1))
    grid = np.linspace(re_min, up, n_pts)
    vals = f(grid)
    sign_flip = np.sign(vals[:-1]) != np.sign(vals[1:])
    idx = np.nonzero(sign_flip)[0]
    if idx.size:
        i = int(idx[-1])
        if vals[i + 1] == 0.0:
            return float(grid[i + 1])
        if vals[i] == 0.0:
            return float(grid[i])
        fs = lambda x: float(f(np.array([x]))[0])
        return float(brentq(fs, grid[i], grid[i + 1], xtol=1e-13, rtol=1e-15))
    if vals.min() > 0:
        return -math.inf
    raise WindowTooSmall(f"{label}: sign behaviour unresolved at re_min={re_min}")


def adde_rightmost_real_root(sys: DelaySystem, re_min: float = -50.0) -> float:
    """Largest real zero of the delay characteristic function on
    [re_min, inf); -inf if there is none.

    Complete (the true rightmost spectral value) in the positivity
    regime; advisory otherwise.
    """
    # every real root lam >= 0 satisfies lam <= ||A|| + sum ||Psi_j||
    bound = np.linalg.norm(sys.A, np.inf) + sum(np.linalg.norm(p, np.inf) for p, _ in sys.terms)
    f = lambda x: np.asarray(adde_char_det(sys, x)).real
    return _rightmost_real_root(f, re_min, max(2.0, bound + 1.0), "delay root scan")


@dataclass
class DelayIndependenceReport:
    """Per-delay rightmost roots compared with the undelayed bound."""

    r_values: list
    roots: list
    signs: list
    s_undelayed: float
    independent: bool

    def to_json(self) -> str:
        return json.dumps({
            "schema_version": 1,
            "r_values": self.r_values,
            "roots": self.roots,
            "signs": self.signs,
            "s_undelayed": self.s_undelayed,
            "independent": self.independent,
        }, indent=2, sort_keys=True)


def _sign(x, tol=1e-9):
    if x < -tol:
        return -1
    if x > tol:
        return 1
    return 0


def delay_independence_report(A, Psi, r_values) -> DelayIndependenceReport:
    """For each delay r, the rightmost real root of the characteristic
    function of u' = A u + Psi u(.-r), together with the largest real
    eigenvalue of A + Psi; in the positivity regime all root signs agree
    with the sign of that eigenvalue."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    Psi = np.atleast_2d(np.asarray(Psi, dtype=float))
    ev = np.linalg.eigvals(A + Psi)
    s_undelayed = float(ev.real.max())
    roots, signs = [], []
    for r in r_values:
        sys = DelaySystem(A, ((Psi, float(r)),))
        root = adde_rightmost_real_root(sys)
        roots.append(root)
        signs.append(_sign(root))
    independent = len(set(signs)) <= 1 and (not signs or signs[0] == _sign(s_undelayed))
    return DelayIndependenceReport([float(r) for r in r_values], roots, signs,
                                   s_undelayed, independent)


def method_of_steps(sys: DelaySystem, history, T: float, dt: float) -> Trajectory:
    """Integrate the delay equation by stepping with the implicit
    trapezoidal rule, delayed terms taken explicitly from stored history.

    Every delay must be an integer multiple of dt (to 1e-12 relative);
    ``history`` is a callable on [-1, 0] returning the state.  Delays
    equal to zero are folded into A.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    steps_f = T / dt
    if abs(steps_f - round(steps_f)) > 1e-9 * max(1.0, abs(steps_f)):
        raise ValueError("T must be an integer multiple of dt")
    steps = int(round(steps_f))
    if steps < 1:
        raise ValueError("T must be >= dt")

    m = sys.dim
    A = sys.A.astype(complex)
    lags = []
    for psi, r in sys.terms:
        n_r = r / dt
        if abs(n_r - round(n_r)) > 1e-12 * max(1.0, n_r):
            raise MisalignedDelay(f"delay r={r} is not a multiple of dt={dt}")
        n_r = int(round(n_r))
        if n_r == 0:
            A = A + psi
        else:
            lags.append((psi.astype(complex), n_r))

    max_lag = max((n for _, n in lags), default=0)
    hist = np.empty((max_lag + steps + 1, m), dtype=complex)
    for i in range(max_lag + 1):
        hist[i] = np.atleast_1d(history((i - max_lag) * dt))

    lu = lu_factor(np.eye(m) - 0.5 * dt * A)
    M2 = np.eye(m) + 0.5 * dt * A

    def delayed(idx):
        d = np.zeros(m, dtype=complex)
        for psi, n_r in lags:
            d += psi @ hist[idx - n_r]
        return d

    for n in range(steps):
        i = max_lag + n
        b = M2 @ hist[i] + 0.5 * dt * (delayed(i) + delayed(i + 1))
        hist[i + 1] = lu_solve(lu, b)

    values = hist[max_lag:]
    times = dt * np.arange(steps + 1)
    norms = np.linalg.norm(values, axis=1)
    return Trajectory(times, values, norms, values.real.min(axis=1))


def vide_char_det(A, kernel: ExpKernel, lam: complex) -> complex:
    """det(lam*I - A - sum_i C_i/(lam + a_i)), the characteristic function
    of the Volterra equation with kernel C(s) = sum_i e^{-a_i s} C_i.

    Only valid where the Laplace transform converges: raises
    OutsideHalfplane unless Re lam > -min_i a_i.
    """
    lam = complex(lam)
    if lam.real <= -kernel.min_rate:
        raise OutsideHalfplane(
            f"Re lam = {lam.real} is not > {-kernel.min_rate} "
            "(Laplace transform of the kernel diverges)")
    A = np.atleast_2d(np.asarray(A))
    m = A.shape[0]
    M = lam * np.eye(m) - A.astype(complex)
    for a, C in kernel.terms:
        M -= C / (lam + a)
    return complex(np.linalg.det(M))
