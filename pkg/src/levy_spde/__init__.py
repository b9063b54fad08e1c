"""Spectral-Galerkin simulation of dissipative SPDEs driven by cylindrical pure-jump Levy noise.

Set ``LEVY_SPDE_DISABLE_NUMBA=1`` before import to force the pure-numpy kernels.
"""
from .cylnoise import CylNoiseSpec, DoubleSidedPath, admissible, find_weight
from .drift import DriftSpec, cubic_drift, make_collocation, zero_drift
from .engine import SolverConfig, decompose, solve_path, stationary_path
from .errors import (ConfigError, DriftOverflowError, HypothesisViolation, UndecidableError,
                     UnsupportedSampling)
from .levy1d import (CompoundPoisson, DiscreteJumps, SlowLogTail, SymmetricAlphaStable,
                     UniformJumps, char_exponent)
from .ou_invariant import invariant_cf, invariant_measure, sample_xi
from .rng import RngStream
from .spectral import make_dirichlet_laplacian, make_power_law, make_shifted_neumann

__version__ = "0.1.0"
