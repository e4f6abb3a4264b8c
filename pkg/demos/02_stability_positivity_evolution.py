"""Stability regions, positivity, contractivity and decay rates.

For real boundary coefficients the solution semigroup is positive, so
uniform exponential stability reduces to explicit inequalities in
(alpha, beta, k); the same verdict must come out of the sign of the real
spectral bound, and the long-time decay rate of an actual trajectory
must match that bound.
"""

import numpy as np

from dynbc import (SystemParams, assemble, classify, decay_rate, evolve,
                   real_spectral_bound)

# --- closed-form classification vs the spectral bound -------------------
print("closed-form stability vs largest real characteristic root:")
for a, b, k in [(-1, -1, 0), (3, 3, 0), (0.4, -0.6, 1), (-3, -3, 1), (1, -2, 1)]:
    p = SystemParams(a, b, k)
    v = classify(p)
    bound = real_spectral_bound(p)
    print(f"  alpha={a:5.2f} beta={b:5.2f} k={k}:  ues={str(v.ues):5s} "
          f"contractive={str(v.contractive):5s} selfadjoint={str(v.selfadjoint):5s} "
          f"bound={bound: .4f}")

# --- a small stability map over the coefficient plane -------------------
print("\nstability region at k=1 (rows beta = 2..-2, cols alpha = -2..2):")
for b in np.linspace(2, -2, 9):
    row = "".join("#" if classify(SystemParams(a, b, 1.0)).ues else "."
                  for a in np.linspace(-2, 2, 17))
    print("   ", row)

# --- positivity: backward Euler is a resolvent iteration ----------------
rng = np.random.default_rng(7)
op = assemble(SystemParams(1, 1, 0), 64)      # unstable but positive
traj = evolve(op, rng.random(66), T=2.0, dt=1e-2, scheme="BackwardEuler")
print(f"\nbackward Euler from nonnegative data: min entry over the run = "
      f"{traj.min_values.min():.2e} (stays >= 0), final norm {traj.norms[-1]:.3f}")

# --- contractivity under the dissipativity condition --------------------
op = assemble(SystemParams(0.4, -0.6, 1.0), 64)  # Re a <= k/2 <= -Re b
traj = evolve(op, rng.random(66), T=2.0, dt=1e-2, scheme="CrankNicolson")
print(f"Crank-Nicolson under the dissipation condition: max norm increase "
      f"per step = {np.diff(traj.norms).max():.2e}")

# --- decay rate equals spectral bound for positive semigroups -----------
p = SystemParams(-1, -1, 0)
op = assemble(p, 256)
traj = evolve(op, rng.random(258), T=5.0, dt=1e-3)
print(f"\nmeasured decay rate {decay_rate(traj, 1.0):.5f}  vs  "
      f"spectral bound {real_spectral_bound(p):.5f}")
