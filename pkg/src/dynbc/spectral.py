"""Spectrum location and stability classification for the
boundary-coupled diffusion-transport system.

The spectral values in the resolvent set of the interior Dirichlet
operator are exactly the zeros of :func:`dynbc.analytic.char_det`; the
Dirichlet eigenvalues themselves (``dirichlet_eigenvalue``) are reported
separately.  For real coefficients the semigroup is positive, so the
spectral bound is attained on the real axis and
:func:`real_spectral_bound` locates it by a one-dimensional scan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .analytic import (SystemParams, char_det, char_det_many,
                       degenerate_char_value)
from .errors import WindowTooSmall

# Newton iterates are kept out of punctured disks of this radius around
# the Dirichlet eigenvalues (simple poles of the characteristic function).
POLE_GUARD = 1e-6

# Roots are accepted when |char_det| <= RESIDUAL_TOL * (1 + |lam|).
RESIDUAL_TOL = 1e-10

# Roots closer than this are merged.
DEDUP_TOL = 1e-8

# |spectral bound| below this is classified as Undetermined.
BOUNDARY_TIE_TOL = 1e-9


@dataclass(frozen=True)
class SearchWindow:
    """Rectangle in the complex plane with a seeding density per unit length."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float
    grid_density: int = 8

    def __post_init__(self):
        for name in ("re_min", "re_max", "im_min", "im_max"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not self.re_min < self.re_max:
            raise ValueError("re_min must be < re_max")
        if not self.im_min <= self.im_max:
            raise ValueError("im_min must be <= im_max")
        if self.grid_density < 4:
            raise ValueError("grid_density must be >= 4")

    def contains(self, lam, margin=1e-9):
        lam = complex(lam)
        return (self.re_min - margin <= lam.real <= self.re_max + margin
                and self.im_min - margin <= lam.imag <= self.im_max + margin)


@dataclass
class SpectrumReport:
    """Roots of the characteristic function found in a search window."""

    roots: list
    residuals: list
    spectral_bound: float
    verdict: str                  # "UES" | "NotUES" | "Undetermined"
    sigma_d_points: list = field(default_factory=list)
    n_seeds: int = 0
    dropped_seeds: int = 0


@dataclass(frozen=True)
class StabilityVerdict:
    ues: bool
    contractive: bool
    selfadjoint: bool
    markovian: bool
    method: str                   # "ClosedForm" | "SpectralBound"


def dirichlet_eigenvalue(params: SystemParams, n: int) -> float:
    """n-th eigenvalue -pi^2 n^2 - k^2/4 of the interior diffusion-transport
    operator with homogeneous Dirichlet boundary conditions (n >= 1)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return -math.pi**2 * n**2 - params.k**2 / 4.0


def _sigma_d_in_range(params, lo, hi):
    pts = []
    n = 1
    while True:
        p = dirichlet_eigenvalue(params, n)
        if p < lo:
            break
        if p <= hi:
            pts.append(p)
        n += 1
    return pts


def _newton_polish(params, seeds, max_iter=80):
    """Vectorised damped Newton on char_det.  Returns (points, n_failed)."""
    lam = np.asarray(seeds, dtype=complex).copy()
    if lam.size == 0:
        return lam, 0
    active = np.isfinite(lam)
    f = char_det_many(params, lam)
    active &= np.isfinite(f)
    for _ in range(max_iter):
        if not active.any():
            break
        scale = 1.0 + np.abs(lam)
        h = 1e-7 * scale
        with np.errstate(all="ignore"):
            fp = (char_det_many(params, lam + h) - char_det_many(params, lam - h)) / (2 * h)
            step = f / fp
        bad = ~np.isfinite(step)
        # cap the step so iterates cannot jump across pole clusters
        mag = np.abs(step)
        step = np.where(mag > 2.0, step * (2.0 / np.where(mag == 0, 1, mag)), step)
        cand = np.where(active & ~bad, lam - step, lam)
        f_cand = char_det_many(params, cand)
        improved = np.abs(f_cand) <= np.abs(f)
        # one halving pass for the non-improving iterates
        cand2 = np.where(active & ~bad & ~improved, lam - 0.5 * step, cand)
        f_cand2 = np.where(active & ~bad & ~improved,
                           char_det_many(params, cand2), f_cand)
        lam = np.where(active & ~bad, cand2, lam)
        f = np.where(active & ~bad, f_cand2, f)
        active &= ~bad & np.isfinite(f)
        converged = np.abs(f) <= 0.05 * RESIDUAL_TOL * (1.0 + np.abs(lam))
        active &= ~converged
    res = np.abs(char_det_many(params, lam))
    ok = np.isfinite(lam) & np.isfinite(res) & (res <= RESIDUAL_TOL * (1.0 + np.abs(lam)))
    return lam[ok], int((~ok).sum())


def find_spectrum(params: SystemParams, window: SearchWindow) -> SpectrumReport:
    """All zeros of the characteristic function inside ``window``.

    Seeds a rectangular grid at ``window.grid_density`` points per unit
    length, refines by damped Newton, deduplicates, and keeps points whose
    residual satisfies |char_det| <= 1e-10 * (1 + |lam|).  The point
    lam = -k^2/4 is tested separately through the degenerate-case quartic.
    Dirichlet eigenvalues inside the window are listed in
    ``sigma_d_points``; they are not zeros of the characteristic function
    and their membership in the full spectrum is left to the
    finite-difference cross-check.
    """
    k = params.k
    n_re = max(2, int(math.ceil((window.re_max - window.re_min) * window.grid_density)) + 1)
    n_im = max(1, int(math.ceil((window.im_max - window.im_min) * window.grid_density)) + 1)
    re = np.linspace(window.re_min, window.re_max, n_re)
    if n_im == 1:
        im = np.array([0.5 * (window.im_min + window.im_max)])
    else:
        im = np.linspace(window.im_min, window.im_max, n_im)
    seeds = (re[:, None] + 1j * im[None, :]).ravel()

    # punctured-disk guard around the Dirichlet eigenvalues
    sigma = _sigma_d_in_range(params, window.re_min - 1.0, window.re_max + 1.0)
    keep = np.ones(seeds.shape, dtype=bool)
    for p in sigma:
        keep &= np.abs(seeds - p) > POLE_GUARD
    seeds = seeds[keep]

    points, dropped = _newton_polish(params, seeds)

    # in-window and pole-guard filters
    sel = np.array([window.contains(z) for z in points], dtype=bool) if len(points) else np.array([], dtype=bool)
    for p in sigma:
        if len(points):
            sel &= np.abs(points - p) > POLE_GUARD
    points = points[sel] if len(points) else points

    # degenerate point lam = -k^2/4, decided by the quartic
    roots = list(points)
    lam_deg = -k * k / 4.0
    if window.contains(lam_deg):
        q = degenerate_char_value(params)
        if abs(q) / 16.0 <= RESIDUAL_TOL * (1.0 + abs(lam_deg)):
            roots.append(complex(lam_deg))

    # deduplicate, deterministically
    roots.sort(key=lambda z: (z.real, z.imag))
    merged = []
    for z in roots:
        if not merged or abs(z - merged[-1]) > DEDUP_TOL:
            merged.append(z)
        # keep the representative with the smaller residual
        elif abs(char_det(params, z)) < abs(char_det(params, merged[-1])):
            merged[-1] = z
    merged.sort(key=lambda z: (-z.real, z.imag))

    residuals = [abs(char_det(params, z)) for z in merged]
    if merged:
        bound = max(z.real for z in merged)
        if bound < -BOUNDARY_TIE_TOL:
            verdict = "UES"
        elif bound > BOUNDARY_TIE_TOL:
            verdict = "NotUES"
        else:
            verdict = "Undetermined"
    else:
        bound = -math.inf
        verdict = "Undetermined"

    in_window_sigma = [p for p in sigma
                       if window.re_min <= p <= window.re_max
                       and window.im_min <= 0.0 <= window.im_max]
    return SpectrumReport(roots=merged, residuals=residuals, spectral_bound=bound,
                          verdict=verdict, sigma_d_points=in_window_sigma,
                          n_seeds=int(len(seeds)), dropped_seeds=dropped)


def default_re_min(params: SystemParams) -> float:
    """Lower scan edge: below the first Dirichlet eigenvalue with margin."""
    return min(-params.k**2 / 4.0 - 1.0, -50.0)


def real_spectral_bound(params: SystemParams, re_min: float | None = None) -> float:
    """Largest real zero of the characteristic function on [re_min, inf).

    Requires real alpha, beta: the semigroup is then positive, its
    spectral bound is real and attained, so scanning the real axis
    suffices.  Returns -inf if no real zero lies above ``re_min``.
    """
    if params.alpha.imag != 0.0 or params.beta.imag != 0.0:
        raise ValueError("real_spectral_bound requires real alpha and beta")
    if re_min is None:
        re_min = default_re_min(params)
    a, b, k = params.alpha.real, params.beta.real, params.k

    # char_det ~ (lam + sqrt(lam))^2 for large real lam, so it is positive
    # beyond every root; start above a crude root bound and extend if needed.
    lam_up = max(4.0, (abs(a) + abs(b) + 2 * k + 6.0))
    for _ in range(60):
        v = complex(char_det_many(params, lam_up))
        if np.isfinite(v.real) and v.real > 0:
            break
        lam_up *= 1.5
    else:
        raise WindowTooSmall("could not bracket the characteristic function from above")

    if lam_up <= re_min:
        lam_up = re_min + 1.0

    n_pts = min(500_000, max(4000, int((lam_up - re_min) / 0.02) + 1))
    grid = np.linspace(re_min, lam_up, n_pts)
    with np.errstate(all="ignore"):
        vals = char_det_many(params, grid).real
    sigma = _sigma_d_in_range(params, re_min - 1.0, lam_up + 1.0)

    def crosses_pole(x0, x1):
        return any(x0 <= p <= x1 for p in sigma)

    f = lambda x: float(char_det_many(params, complex(x)).real)
    for i in range(n_pts - 2, -1, -1):
        v0, v1 = vals[i], vals[i + 1]
        if not (np.isfinite(v0) and np.isfinite(v1)):
            continue
        if v1 == 0.0:
            return float(grid[i + 1])
        if v0 == 0.0:
            return float(grid[i])
        if np.sign(v0) != np.sign(v1) and not crosses_pole(grid[i], grid[i + 1]):
            return float(brentq(f, grid[i], grid[i + 1], xtol=1e-13, rtol=1e-15))

    finite = vals[np.isfinite(vals)]
    if finite.size and finite.min() > 0:
        return -math.inf
    raise WindowTooSmall(
        f"sign behaviour unresolved down to re_min={re_min}; enlarge the window")


def ues_closed_form(params: SystemParams) -> bool:
    """Uniform exponential stability from the explicit coefficient
    inequalities (real alpha, beta).

    k = 0:  alpha + beta < min(2, alpha*beta).
    k > 0:  both coefficients of the quadratic lam^2 + b*lam + c with

              b = k(1+e^{-k})/(1-e^{-k}) - alpha - beta,
              c = alpha*beta - k(alpha e^{-k} + beta)/(1-e^{-k})

            are positive; its discriminant b^2 - 4c is always positive, so
            this is exactly "both eigenvalues negative".
    """
    if params.alpha.imag != 0.0 or params.beta.imag != 0.0:
        raise ValueError("closed-form stability test requires real alpha, beta")
    a, b_, k = params.alpha.real, params.beta.real, params.k
    if k == 0.0:
        return a + b_ < min(2.0, a * b_)
    e = math.exp(-k)
    b_coef = k * (1 + e) / (1 - e) - a - b_
    c_coef = a * b_ - k * (a * e + b_) / (1 - e)
    return b_coef > 0.0 and c_coef > 0.0


def classify(params: SystemParams) -> StabilityVerdict:
    """Stability / contractivity / self-adjointness / markov flags.

    ues:         closed form (see :func:`ues_closed_form`) for real
                 alpha, beta; otherwise the sign of the spectral bound of
                 the roots found in a default window.
    contractive: Re alpha <= k/2 <= -Re beta.
    selfadjoint: k = 0 and alpha, beta real.
    markovian:   k = alpha = beta = 0.
    """
    a, b, k = params.alpha, params.beta, params.k
    contractive = a.real <= k / 2.0 <= -b.real
    selfadjoint = (k == 0.0 and a.imag == 0.0 and b.imag == 0.0)
    markovian = (k == 0.0 and a == 0 and b == 0)
    if a.imag == 0.0 and b.imag == 0.0:
        return StabilityVerdict(ues_closed_form(params), contractive,
                                selfadjoint, markovian, "ClosedForm")
    height = abs(a.imag) + abs(b.imag) + 10.0
    window = SearchWindow(default_re_min(params),
                          max(5.0, abs(a) + abs(b) + k + 3.0),
                          -height, height, grid_density=4)
    report = find_spectrum(params, window)
    return StabilityVerdict(report.spectral_bound < 0.0, contractive,
                            selfadjoint, markovian, "SpectralBound")
