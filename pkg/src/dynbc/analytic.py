"""Closed-form objects for the 1-D diffusion-transport system with
dynamical boundary conditions

    u_t(t,x) = u''(t,x) + k u'(t,x),        x in [0,1],
    u_t(t,0) =  u'(t,0) + alpha u(t,0),
    u_t(t,1) = -u'(t,1) + beta  u(t,1),

viewed as an operator matrix on the product space C^2 x L^2(0,1).

Everything here reduces to the two roots mu1, mu2 of  mu^2 + k mu = lam:
the two-point boundary value problem  u'' + k u' - lam u = 0,
u(0)=x0, u(1)=x1  has the explicit solution ``dirichlet_apply``, the map
from boundary data to (signed) boundary derivatives of that solution is
the 2x2 ``feedback_matrix``, and lam is a spectral value of the coupled
system iff  det(lam*I - diag(alpha,beta) - feedback_matrix(lam)) = 0,
which ``char_det`` evaluates.

All functions accept scalar lam; the ``*_many`` helpers are vectorised
over lam for root scans.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SpectrumHit

# Switch to the confluent (double-root) formulas when the discriminant
# k^2 + 4*lam is below this relative threshold: the generic two-exponential
# expressions lose digits as mu1 -> mu2.
COALESCENCE_TOL = 1e-10

# Relative guard radius around the Dirichlet eigenvalues -pi^2 n^2 - k^2/4,
# where the boundary value problem is not uniquely solvable.
SIGMA_D_GUARD = 1e-9


@dataclass(frozen=True)
class SystemParams:
    """Coefficients of the boundary-coupled diffusion-transport system.

    alpha, beta are the boundary reaction coefficients at x=0 and x=1;
    k >= 0 is the transport coefficient.
    """

    alpha: complex
    beta: complex
    k: float

    def __post_init__(self):
        a, b = complex(self.alpha), complex(self.beta)
        k = float(self.k)
        for name, v in (("alpha", a), ("beta", b)):
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise ValueError(f"{name} must be finite, got {v}")
        if not math.isfinite(k):
            raise ValueError(f"k must be finite, got {k}")
        if k < 0:
            raise ValueError(f"k must be >= 0, got {k}")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)
        object.__setattr__(self, "k", k)


@dataclass(frozen=True)
class CharRoots:
    """Roots of mu^2 + k mu - lam = 0; ``degenerate`` marks coalescence."""

    mu1: complex
    mu2: complex
    degenerate: bool


@dataclass(frozen=True)
class FeedbackMatrix:
    """2x2 boundary feedback matrix at a given lam (and transport k)."""

    entries: np.ndarray
    lam: complex
    k: float


def _is_degenerate(lam, k):
    disc = k * k + 4.0 * np.asarray(lam, dtype=complex)
    scale = np.maximum(1.0, np.maximum(np.abs(lam), k * k))
    return np.abs(disc) < COALESCENCE_TOL * scale


def char_roots(lam: complex, k: float) -> CharRoots:
    """Roots mu1,2 = (-k +- sqrt(k^2 + 4 lam))/2 (principal square root).

    mu1 + mu2 = -k and mu1 * mu2 = -lam hold by construction.
    """
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    lam = complex(lam)
    root = np.sqrt(complex(k * k + 4.0 * lam))
    mu1 = (-k + root) / 2.0
    mu2 = (-k - root) / 2.0
    return CharRoots(mu1, mu2, bool(_is_degenerate(lam, k)))


def sigma_d_nearest(lam, k):
    """Distance from lam to the nearest Dirichlet eigenvalue
    -pi^2 n^2 - k^2/4 (n >= 1), and that n."""
    lam = complex(lam)
    t = -(lam.real + k * k / 4.0) / math.pi**2
    n = max(1, int(round(math.sqrt(max(t, 0.0)))))
    best_n, best_d = n, abs(lam - (-math.pi**2 * n**2 - k * k / 4.0))
    for m in (n - 1, n + 1):
        if m >= 1:
            d = abs(lam - (-math.pi**2 * m**2 - k * k / 4.0))
            if d < best_d:
                best_n, best_d = m, d
    return best_d, best_n


def _check_sigma_d(lam, k):
    dist, n = sigma_d_nearest(lam, k)
    point = -math.pi**2 * n**2 - k * k / 4.0
    if dist <= SIGMA_D_GUARD * max(1.0, abs(point)):
        raise SpectrumHit(
            f"lam={lam} lies on the Dirichlet spectrum "
            f"(within {dist:.2e} of -pi^2*{n}^2 - k^2/4 = {point:.6g})"
        )


def dirichlet_apply(params: SystemParams, lam: complex, x0: complex,
                    x1: complex, x) -> complex:
    """Solution u(x) of  u'' + k u' - lam u = 0,  u(0)=x0, u(1)=x1.

    Uses the generic two-exponential formula

        u(x) = [(x1 - x0 e^{mu2}) e^{mu1 x} + (x0 e^{mu1} - x1) e^{mu2 x}]
               / (e^{mu1} - e^{mu2}),

    rewritten with e^{mu1} factored out so nothing overflows for large
    Re lam, and the confluent formula

        u(x) = x0 e^{-kx/2} + (x1 e^{k/2} - x0) x e^{-kx/2}

    within the coalescence threshold of lam = -k^2/4.

    Accepts scalar or array x in [0, 1]; raises SpectrumHit on the
    Dirichlet spectrum.
    """
    k = params.k
    lam = complex(lam)
    _check_sigma_d(lam, k)
    x = np.asarray(x, dtype=float)
    if np.any(x < -1e-15) or np.any(x > 1 + 1e-15):
        raise ValueError("x must lie in [0, 1]")
    if _is_degenerate(lam, k):
        base = np.exp(-k * x / 2.0)
        u = x0 * base + (x1 * np.exp(k / 2.0) - x0) * x * base
    else:
        r = char_roots(lam, k)
        mu1, mu2 = r.mu1, r.mu2  # Re mu1 >= Re mu2 by the principal branch
        den = 1.0 - np.exp(mu2 - mu1)
        u = ((x1 - x0 * np.exp(mu2)) * np.exp(mu1 * (x - 1.0))
             + (x0 - x1 * np.exp(-mu1)) * np.exp(mu2 * x)) / den
    if u.ndim == 0:
        return complex(u)
    return u


def _feedback_entries(mu1, mu2):
    """Feedback matrix entries from explicit roots (vectorised).

    Scaled form with e^{mu1} factored from numerators and denominator;
    safe for large Re mu1 provided Re(mu2 - mu1) <= 0.
    Returns (b11, b12, b21, b22).
    """
    mu1 = np.asarray(mu1, dtype=complex)
    mu2 = np.asarray(mu2, dtype=complex)
    q = np.exp(mu2 - mu1)
    den = 1.0 - q
    b11 = (mu2 - mu1 * q) / den
    b12 = (mu1 - mu2) * np.exp(-mu1) / den
    b21 = (mu1 - mu2) * np.exp(mu2) / den
    b22 = (mu2 * q - mu1) / den
    return b11, b12, b21, b22


def _feedback_degenerate(k):
    return np.array([[-1.0 - k / 2.0, np.exp(k / 2.0)],
                     [np.exp(-k / 2.0), -1.0 + k / 2.0]], dtype=complex)


def feedback_matrix(params: SystemParams, lam: complex) -> FeedbackMatrix:
    """Boundary feedback matrix: boundary data (x0, x1) of the Dirichlet
    solution map to its signed boundary derivatives (u'(0), -u'(1)).

    The value is invariant under swapping mu1 <-> mu2, so it does not
    depend on the square-root branch.  Within the coalescence threshold
    of lam = -k^2/4 the confluent limit

        [[-1 - k/2, e^{k/2}], [e^{-k/2}, -1 + k/2]]

    is used directly.  Raises SpectrumHit on the Dirichlet spectrum.
    """
    k = params.k
    lam = complex(lam)
    _check_sigma_d(lam, k)
    if _is_degenerate(lam, k):
        entries = _feedback_degenerate(k)
    else:
        r = char_roots(lam, k)
        b11, b12, b21, b22 = _feedback_entries(r.mu1, r.mu2)
        entries = np.array([[b11, b12], [b21, b22]], dtype=complex)
    return FeedbackMatrix(entries, lam, k)


def pencil(params: SystemParams, lam: complex) -> np.ndarray:
    """2x2 matrix diag(alpha, beta) + feedback_matrix(lam): lam belongs to
    the spectrum of the coupled system iff lam is an eigenvalue of this
    matrix."""
    fb = feedback_matrix(params, lam)
    out = fb.entries.copy()
    out[0, 0] += params.alpha
    out[1, 1] += params.beta
    return out


def char_det(params: SystemParams, lam: complex) -> complex:
    """Characteristic function det(lam*I - pencil(lam)).

    Zero (within tolerance) exactly at the spectral values of the coupled
    operator away from the Dirichlet spectrum.  At lam = -k^2/4 this
    equals one sixteenth of the quartic ``degenerate_char_value``.
    """
    p = pencil(params, lam)
    lam = complex(lam)
    return complex((lam - p[0, 0]) * (lam - p[1, 1]) - p[0, 1] * p[1, 0])


def degenerate_char_value(params: SystemParams) -> complex:
    """Quartic whose vanishing decides whether lam = -k^2/4 is a spectral
    value:  k^4 + 4k^2(alpha+beta-3) + 8k(alpha-beta) + 16(alpha*beta -
    alpha - beta).  Equals 16 * char_det at lam = -k^2/4."""
    a, b, k = params.alpha, params.beta, params.k
    return k**4 + 4 * k**2 * (a + b - 3) + 8 * k * (a - b) + 16 * (a * b - a - b)


def char_det_many(params: SystemParams, lam) -> np.ndarray:
    """Vectorised char_det over an array of lam values.

    No Dirichlet-spectrum guard: values within the guard radius of a
    Dirichlet eigenvalue are set to nan.  Used by root scans.
    """
    lam = np.asarray(lam, dtype=complex)
    a, b, k = params.alpha, params.beta, params.k
    root = np.sqrt(k * k + 4.0 * lam)
    mu1 = (-k + root) / 2.0
    mu2 = (-k - root) / 2.0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        b11, b12, b21, b22 = _feedback_entries(mu1, mu2)
    deg = _is_degenerate(lam, k)
    if np.any(deg):
        d = _feedback_degenerate(k)
        b11 = np.where(deg, d[0, 0], b11)
        b12 = np.where(deg, d[0, 1], b12)
        b21 = np.where(deg, d[1, 0], b21)
        b22 = np.where(deg, d[1, 1], b22)
    det = (lam - a - b11) * (lam - b - b22) - b12 * b21
    # mask the guard disks around the Dirichlet spectrum
    n_max = int(math.sqrt(max(np.max(-lam.real - k * k / 4.0) / math.pi**2, 0.0))) + 2
    for n in range(1, n_max + 1):
        point = -math.pi**2 * n**2 - k * k / 4.0
        det = np.where(np.abs(lam - point) <= SIGMA_D_GUARD * max(1.0, abs(point)),
                       np.nan + 0j, det)
    return det


def char_det_deriv(params: SystemParams, lam: complex, rel_step: float = 1e-6) -> complex:
    """Derivative of char_det by central differences (char_det is
    holomorphic away from the Dirichlet spectrum)."""
    h = rel_step * max(1.0, abs(lam))
    return complex((char_det_many(params, lam + h) - char_det_many(params, lam - h)) / (2 * h))
