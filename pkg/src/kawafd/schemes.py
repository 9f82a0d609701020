"""Time stepping: semi-implicit schemes, a reference integrator, CFL control.

Two production schemes share the implicit operator M = I + dt*(airy -
kawahara), so one factorization serves either:

* ``uk``: transport substep ``w = ubar - dt * ubar * D0 u`` with
  ``ubar_j = (u_{j+1} + u_{j-1})/2``, then solve ``M u' = w``.  Under the
  CFL bound the discrete mass is nonincreasing and the energy ledger
  (see :mod:`kawafd.diagnostics`) is nonnegative at every step.
* ``jmo``: comparison scheme ``w = u - (dt/2) * Dminus(u^2)``, same solve.

``rk4`` integrates the semi-discrete system with the classical four-stage
method.  Its explicit stability ceiling is dt of order dx^5 (fifth
derivative treated explicitly), which makes it a cross-validation tool for
small grids only, not a production integrator.

The primary CFL bound solves ``s*(1 + 24 s) = 3/2`` for
``s = dt * ||u||_h / dx^(3/2)``; the positive root is
``s* = (sqrt(145) - 1)/48``.  An optional secondary bound additionally
restricts lambda = dt/dx through
``lambda^2 (4 max|u^n|^2 + 2 max|u^{n-1}|^2) + (lambda/12) max|u^n| <= 1/16``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .diagnostics import LedgerRecord, hamiltonian, ledger, mass
from .errors import (ConfigurationError, DivergenceError, LedgerError,
                     UsageError)
from .grid import GridFunction, make_grid, norm_h, sample
from .implicit import ImplicitFactorization, factor, solve_values
from .solutions import exact_soliton, initial_profile

if TYPE_CHECKING:  # pragma: no cover
    from .config import RunConfig, RunResult

__all__ = [
    "CFL_ROOT",
    "SCHEME_KINDS",
    "DT_MODES",
    "SchemeParams",
    "StepDiagnostics",
    "max_dt",
    "uk_step",
    "jmo_step",
    "semidiscrete_rhs",
    "rk4_step",
    "evolve",
]

#: Positive root of 24 s^2 + s - 3/2 = 0.
CFL_ROOT = (math.sqrt(145.0) - 1.0) / 48.0

SCHEME_KINDS = ("uk", "jmo", "rk4")
#: ``courant`` fixes dt = cfl_fraction * courant_number * dx; it is how the
#: benchmark presets pin the time step across a mesh-refinement sweep.
DT_MODES = ("fixed_from_initial", "adaptive", "override", "courant")

#: Relative slack allowed by strict ledger checks, in units of mass(u0).
LEDGER_RTOL = 1e-10


@dataclass(frozen=True)
class SchemeParams:
    """Scheme selection and time-step policy."""

    kind: str
    cfl_fraction: float = 0.75
    dt_mode: str = "fixed_from_initial"
    dt_override: float | None = None
    courant_number: float | None = None
    enforce_secondary_cfl: bool = False
    dt_cap: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in SCHEME_KINDS:
            raise ConfigurationError(
                f"scheme.kind: unknown scheme {self.kind!r}; valid values: "
                f"{', '.join(SCHEME_KINDS)}")
        if not 0.0 < self.cfl_fraction <= 1.0:
            raise ConfigurationError(
                f"scheme.cfl_fraction must lie in (0, 1], got "
                f"{self.cfl_fraction}")
        if self.dt_mode not in DT_MODES:
            raise ConfigurationError(
                f"scheme.dt_mode: unknown mode {self.dt_mode!r}; valid "
                f"values: {', '.join(DT_MODES)}")
        if (self.dt_override is not None) != (self.dt_mode == "override"):
            raise ConfigurationError(
                "scheme.dt_override must be given exactly when "
                "dt_mode='override'")
        if self.dt_override is not None and self.dt_override <= 0:
            raise ConfigurationError("scheme.dt_override must be positive")
        if self.dt_mode == "courant":
            if self.courant_number is None or self.courant_number <= 0:
                raise ConfigurationError(
                    "scheme.courant_number must be positive when "
                    "dt_mode='courant'")
        if self.dt_cap <= 0:
            raise ConfigurationError("scheme.dt_cap must be positive")


@dataclass(frozen=True)
class StepDiagnostics:
    """Per-step record; state quantities refer to the post-step state."""

    step: int
    t: float
    dt: float
    mass: float
    ledger_residual: float
    hamiltonian: float
    max_abs: float
    solver_residual: float


def max_dt(u: GridFunction, params: SchemeParams,
           u_prev: GridFunction | None = None) -> float:
    """Largest time step allowed by the CFL policy, scaled by cfl_fraction.

    Zero data has no CFL restriction; ``params.dt_cap`` is returned.  With
    ``enforce_secondary_cfl`` the secondary lambda bound is intersected;
    ``u_prev`` defaults to ``u`` (startup convention).
    """
    dx = u.grid.dx
    nrm = norm_h(u)
    if nrm == 0.0:
        return params.dt_cap
    dt = params.cfl_fraction * CFL_ROOT * dx**1.5 / nrm
    if params.enforce_secondary_cfl:
        m_now = float(np.max(np.abs(u.values)))
        m_prev = m_now if u_prev is None else float(
            np.max(np.abs(u_prev.values)))
        a = 4.0 * m_now**2 + 2.0 * m_prev**2
        b = m_now / 12.0
        if a > 0.0:
            lam = (-b + math.sqrt(b * b + a / 4.0)) / (2.0 * a)
            dt = min(dt, lam * dx)
    return dt


def _check_step_args(u: GridFunction, f: ImplicitFactorization,
                     dt: float) -> None:
    if u.grid != f.grid:
        raise UsageError("state grid does not match the factorization grid")
    if dt != f.dt:
        raise UsageError(
            f"dt={dt} does not match the factorization's dt={f.dt}; "
            f"refactor for the new step size")


def _solve_substep(f: ImplicitFactorization,
                   w: np.ndarray) -> tuple[np.ndarray, float]:
    if not np.all(np.isfinite(w)):
        raise DivergenceError("transport substep produced non-finite values")
    return solve_values(f, w)


def _uk_raw(values: np.ndarray, f: ImplicitFactorization,
            dt: float) -> tuple[np.ndarray, np.ndarray, float]:
    """One uk step on raw arrays; returns (u_next, w, solver residual)."""
    up = np.roll(values, -1)
    um = np.roll(values, 1)
    ubar = 0.5 * (up + um)
    w = ubar - dt * ubar * ((up - um) / (2.0 * f.dx))
    out, res = _solve_substep(f, w)
    return out, w, res


def _jmo_raw(values: np.ndarray, f: ImplicitFactorization,
             dt: float) -> tuple[np.ndarray, np.ndarray, float]:
    """One jmo step on raw arrays; returns (u_next, w, solver residual)."""
    u2 = values * values
    w = values - (dt / 2.0) * (u2 - np.roll(u2, 1)) / f.dx
    out, res = _solve_substep(f, w)
    return out, w, res


def _wrap_step(grid, out: np.ndarray) -> GridFunction:
    if not np.all(np.isfinite(out)):
        raise DivergenceError("time step produced non-finite values")
    return GridFunction(grid, out)


def uk_step(u: GridFunction, f: ImplicitFactorization,
            dt: float) -> GridFunction:
    """One semi-implicit step of the primary scheme."""
    _check_step_args(u, f, dt)
    out, _, _ = _uk_raw(u.values, f, dt)
    return _wrap_step(u.grid, out)


def jmo_step(u: GridFunction, f: ImplicitFactorization,
             dt: float) -> GridFunction:
    """One semi-implicit step of the comparison scheme."""
    _check_step_args(u, f, dt)
    out, _, _ = _jmo_raw(u.values, f, dt)
    return _wrap_step(u.grid, out)


def _dplus(a: np.ndarray) -> np.ndarray:
    return np.roll(a, -1) - a


def _dminus(a: np.ndarray) -> np.ndarray:
    return a - np.roll(a, 1)


def _rhs_raw(values: np.ndarray, dx: float) -> np.ndarray:
    up = np.roll(values, -1)
    um = np.roll(values, 1)
    d0u = (up - um) / (2.0 * dx)
    u2 = values * values
    d0u2 = (np.roll(u2, -1) - np.roll(u2, 1)) / (2.0 * dx)
    # nested first differences annihilate constants exactly
    airy = _dminus(_dplus(_dplus(values))) / dx**3
    kawa = _dplus(_dplus(_dplus(_dminus(_dminus(values))))) / dx**5
    return -(values * d0u + d0u2) / 3.0 - airy + kawa


def semidiscrete_rhs(u: GridFunction) -> GridFunction:
    """Right-hand side of the spatially discrete evolution system."""
    return GridFunction(u.grid, _rhs_raw(u.values, u.grid.dx))


def rk4_step(u: GridFunction, dt: float) -> GridFunction:
    """Classical four-stage explicit step of the semi-discrete system.

    The caller is responsible for explicit stability (dt of order dx^5).
    """
    v = u.values
    dx = u.grid.dx
    k1 = _rhs_raw(v, dx)
    k2 = _rhs_raw(v + 0.5 * dt * k1, dx)
    k3 = _rhs_raw(v + 0.5 * dt * k2, dx)
    k4 = _rhs_raw(v + dt * k3, dx)
    return _wrap_step(u.grid, v + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4))


def _nominal_dt(params: SchemeParams, u0: GridFunction, dx: float) -> float:
    if params.dt_mode == "override":
        return params.dt_override
    if params.dt_mode == "courant":
        return params.cfl_fraction * params.courant_number * dx
    return max_dt(u0, params)  # fixed_from_initial (adaptive re-derives)


def evolve(config: "RunConfig") -> "RunResult":
    """Run the time loop described by ``config`` from t=0 to t_end.

    The step lands exactly on every snapshot time and on t_end (a shortened
    remainder step gets its own factorization).  Every step appends one
    :class:`StepDiagnostics` record.  In strict-ledger mode a negative
    ledger residual or mass growth beyond ``1e-10 * mass(u0)`` aborts with
    the step index and time; divergence and solver failures always abort.
    On abort, the partial result is attached to the exception as
    ``exc.partial``.
    """
    from .config import RunResult  # deferred to avoid an import cycle

    started = time.perf_counter()
    grid = make_grid(config.domain[0], config.domain[1], config.n)
    params = config.scheme
    u = sample(grid, initial_profile(config.initial_condition))
    u_prev: GridFunction | None = None
    mass0 = mass(u)
    tol = LEDGER_RTOL * mass0

    snap_times = sorted(set(float(s) for s in config.snapshot_times))
    snapshots: dict[float, GridFunction] = {}
    if snap_times and snap_times[0] == 0.0:
        snapshots[0.0] = u
    targets = sorted(set(s for s in snap_times if s > 0.0)
                     | ({float(config.t_end)} if config.t_end > 0 else set()))

    diag: list[StepDiagnostics] = []
    fact_cache: dict[float, ImplicitFactorization] = {}
    implicit = params.kind in ("uk", "jmo")
    raw_step = _uk_raw if params.kind == "uk" else _jmo_raw
    dt_nom = _nominal_dt(params, u, grid.dx) if params.dt_mode != "adaptive" \
        else None

    def result(final_err: float | None = None) -> "RunResult":
        return RunResult(config=config, snapshots=dict(snapshots),
                         diagnostics=list(diag), final_l2_error=final_err,
                         duration_seconds=time.perf_counter() - started)

    def fail(exc: Exception) -> Exception:
        exc.partial = result()
        return exc

    t = 0.0
    step = 0
    for target in targets:
        while t < target:
            dt_n = max_dt(u, params, u_prev) if dt_nom is None else dt_nom
            remaining = target - t
            landing = remaining <= dt_n * (1.0 + 1e-9)
            dt_step = remaining if landing else dt_n
            try:
                if implicit:
                    f = fact_cache.get(dt_step)
                    if f is None:
                        f = factor(grid, dt_step)
                        if params.dt_mode != "adaptive":
                            fact_cache[dt_step] = f
                    out, w_vals, solver_res = raw_step(u.values, f, dt_step)
                else:
                    out = rk4_step(u, dt_step).values
                    w_vals = u.values
                    solver_res = 0.0
            except DivergenceError as exc:
                raise fail(DivergenceError(
                    f"{exc} at step {step + 1}, t={t:.6g}"))
            except Exception as exc:
                raise fail(exc)
            # the 1e100 guard stops pre-overflow states from polluting the
            # diagnostics with inf arithmetic before the blow-up is caught
            if not np.all(np.isfinite(out)) or np.max(np.abs(out)) > 1e100:
                raise fail(DivergenceError(
                    f"non-finite state at step {step + 1}, t={t:.6g}"))
            u_next = GridFunction(grid, out)
            rec = ledger(u, u_next, GridFunction(grid, w_vals), dt_step)
            if config.strict_ledger:
                if rec.residual < -tol:
                    raise fail(LedgerError(
                        f"ledger residual {rec.residual:.3e} < {-tol:.3e} "
                        f"at step {step + 1}, t={t:.6g}"))
                if rec.mass_out > rec.mass_in + tol:
                    raise fail(LedgerError(
                        f"mass grew by {rec.mass_out - rec.mass_in:.3e} "
                        f"at step {step + 1}, t={t:.6g}"))
            step += 1
            t = target if landing else t + dt_step
            u_prev, u = u, u_next
            diag.append(StepDiagnostics(
                step=step, t=t, dt=dt_step, mass=rec.mass_out,
                ledger_residual=rec.residual, hamiltonian=hamiltonian(u),
                max_abs=float(np.max(np.abs(u.values))),
                solver_residual=solver_res))
        if target in snap_times:
            snapshots[target] = u

    final_err = None
    if config.compare_exact:
        ic = config.initial_condition
        if ic.id != "one_soliton":
            raise fail(ConfigurationError(
                "compare_exact requires the one_soliton initial condition"))
        ref = sample(grid, lambda x: exact_soliton(x, config.t_end, ic.c))
        final_err = norm_h(u - ref)
    return result(final_err)
