"""Finite-difference solvers for the periodic Kawahara equation
``u_t = -u u_x - u_xxx + u_xxxxx`` with semi-implicit time stepping,
O(n)-per-step periodic banded solves, discrete energy diagnostics, and
soliton benchmarks."""

from .config import RunConfig, RunResult
from .diagnostics import LedgerRecord, hamiltonian, l2_error, ledger, mass
from .errors import (ConfigurationError, DivergenceError, KawafdError,
                     LedgerError, NumericalError, SamplingError, SolverError,
                     UsageError)
from .grid import (GridFunction, PeriodicGrid, inner_h, make_grid, norm_h,
                   sample)
from .implicit import ImplicitFactorization, dense_oracle, factor, solve
from .runner import (BENCH_COURANT, PRESET_NAMES, parse_config,
                     preset_config, run_convergence, run_snapshots,
                     write_outputs)
from .schemes import (CFL_ROOT, SchemeParams, StepDiagnostics, evolve,
                      jmo_step, max_dt, rk4_step, semidiscrete_rhs, uk_step)
from .solutions import (AMPLITUDE, SPEED, InitialCondition, exact_soliton,
                        initial_profile, residual_check)
from .stencils import Stencil, apply, builtin, compose, identity, symbol

__version__ = "0.1.0"

__all__ = [
    "AMPLITUDE", "BENCH_COURANT", "CFL_ROOT", "ConfigurationError",
    "DivergenceError", "GridFunction", "ImplicitFactorization",
    "InitialCondition", "KawafdError", "LedgerError", "LedgerRecord",
    "NumericalError", "PRESET_NAMES", "PeriodicGrid", "RunConfig",
    "RunResult", "SPEED", "SamplingError", "SchemeParams", "SolverError",
    "Stencil", "StepDiagnostics", "UsageError", "apply", "builtin",
    "compose", "dense_oracle", "evolve", "exact_soliton", "factor",
    "hamiltonian", "identity", "initial_profile", "inner_h", "jmo_step",
    "l2_error", "ledger", "make_grid", "mass", "max_dt", "norm_h",
    "parse_config", "preset_config", "residual_check", "rk4_step",
    "run_convergence", "run_snapshots", "sample", "semidiscrete_rhs",
    "solve", "symbol", "uk_step", "write_outputs",
]
