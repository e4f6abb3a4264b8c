"""Numerics for a 1-D diffusion-transport equation whose boundary values
obey their own dynamics: closed-form characteristic equations, spectrum
and stability classification, a finite-difference cross-check on the
product space C^2 x grid, implicit time integration (including the
associated wave system), and characteristic equations for delay and
Volterra integro-differential equations.
"""

__version__ = "0.1.0"

from .analytic import (CharRoots, FeedbackMatrix, SystemParams, char_det,
                       char_det_many, char_roots, degenerate_char_value,
                       dirichlet_apply, feedback_matrix, pencil)
from .blocks import (OscCheckResult, coupled_block_generator,
                     coupling_block_quadrature, osc_check,
                     triangular_block_semigroup, triangular_semigroup_check)
from .delays import (DelaySystem, DelayIndependenceReport, ExpKernel,
                     adde_char_det, adde_rightmost_real_root,
                     delay_independence_report, method_of_steps, vide_char_det)
from .discrete import (DiscreteOperator, Grid, ProductState, assemble,
                       boundary_resolvent_block, dirichlet_relation_residual,
                       discrete_resolvent, discrete_spectrum)
from .errors import (EigenFailure, MisalignedDelay, NearSingular, NotInvertible,
                     NumericalFailure, OutsideHalfplane, SpectrumHit,
                     WindowTooSmall)
from .evolution import (Trajectory, WaveState, WaveTrajectory, decay_rate,
                        evolve, wave_energy, wave_evolve)
from .spectral import (SearchWindow, SpectrumReport, StabilityVerdict,
                       classify, dirichlet_eigenvalue, find_spectrum,
                       real_spectral_bound, ues_closed_form)
