"""The wave system with dynamical boundary conditions, and characteristic
equations for delay and Volterra integro-differential equations.

The wave equation u_tt = u'' with boundary accelerations
u_tt(0) = u'(0) + alpha u(0), u_tt(1) = -u'(1) + beta u(1) is integrated
through its first-order reduction; with alpha, beta <= 0 and k = 0 the
spatial operator is self-adjoint and nonpositive, so the discrete energy
is exactly conserved by the trapezoidal rule.

For the delay equation u'(t) = a u(t) + psi u(t - r) in the positive
regime, stability does not depend on the delay r: the rightmost root of
lam - a - psi e^{-lam r} has the sign of a + psi for every r.
"""

import numpy as np

from dynbc import (DelaySystem, ExpKernel, SystemParams,
                   adde_rightmost_real_root, delay_independence_report,
                   method_of_steps, vide_char_det, wave_evolve)

# --- wave system: energy conservation and time reversal -----------------
params = SystemParams(-1.0, -1.0, 0.0)
x = np.linspace(0, 1, 202)
fwd = wave_evolve(params, np.sin(np.pi * x), np.zeros(202), T=1.0, dt=1e-3)
E = fwd.energies
print(f"wave energy: E(0) = {E[0]:.6f}, relative drift over T=1: "
      f"{np.abs(E - E[0]).max() / E[0]:.2e}")

back = wave_evolve(params, fwd.displacements[-1], -fwd.velocities[-1], T=1.0, dt=1e-3)
print(f"velocity-reversal round trip error: "
      f"{np.abs(back.displacements[-1] - np.sin(np.pi * x)).max():.2e}")

# --- delay equation: stability independent of the delay -----------------
print("\nrightmost root of lam + 1 - psi e^{-lam r}:")
for psi in (0.5, 1.5):
    roots = [adde_rightmost_real_root(DelaySystem([[-1.0]], (([[psi]], r),)))
             for r in np.arange(0.1, 1.05, 0.1)]
    print(f"  psi={psi}: roots for r=0.1..1.0 -> "
          + " ".join(f"{r:+.3f}" for r in roots)
          + f"   (undelayed bound {psi - 1:+.1f})")

rep = delay_independence_report([[-1.0]], [[0.5]], np.arange(0.1, 1.05, 0.1))
print(f"  independence verdict: {rep.independent}")

# --- method of steps: trajectory slope matches the dominant root --------
sys = DelaySystem([[-1.0]], (([[0.5]], 0.5),))
traj = method_of_steps(sys, lambda s: np.array([1.0]), T=16.0, dt=1e-3)
sel = traj.times >= 8.0
slope = np.polyfit(traj.times[sel], np.log(traj.norms[sel]), 1)[0]
print(f"\nmethod-of-steps log-slope {slope:.4f} vs dominant root "
      f"{adde_rightmost_real_root(sys):.4f}")

# --- Volterra equation with an exponential kernel ------------------------
a, c = -0.8, 0.6
kern = ExpKernel(((1.0, [[c]]),))
roots = np.roots([1.0, 1.0 - a, -a - c])
print(f"\nVolterra char function lam - a - c/(lam+1) with a={a}, c={c}:")
for z in roots:
    z = complex(z)
    if z.real > -1:
        print(f"  quadratic root {z.real:+.6f}: |char fn| = "
              f"{abs(vide_char_det([[a]], kern, z)):.1e}")
