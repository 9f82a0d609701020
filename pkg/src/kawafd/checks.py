"""Self-contained property suite behind the ``check`` CLI subcommand.

Verifies the operator identities, the solver against the dense oracle, and
one CFL-limited soliton step's energy ledger, at a fixed small grid size.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import stencils
from .diagnostics import ledger, mass
from .grid import GridFunction, inner_h, make_grid, norm_h, sample
from .implicit import dense_oracle, factor, solve
from .schemes import SchemeParams, jmo_step, max_dt, rk4_step, uk_step
from .solutions import exact_soliton

__all__ = ["CheckResult", "run_checks"]

_TRIALS = 100


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _rand_gf(grid, rng) -> GridFunction:
    return GridFunction(grid, rng.standard_normal(grid.n))


def run_checks(n: int = 64, seed: int = 20240817) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    grid = make_grid(0.0, 1.0, n)
    dx = grid.dx
    results: list[CheckResult] = []

    def record(name: str, worst: float, tol: float) -> None:
        results.append(CheckResult(
            name, worst <= tol, f"worst {worst:.3e} vs tol {tol:.1e}"))

    dplus, dminus = stencils.builtin("dplus"), stencils.builtin("dminus")
    airy, kawa = stencils.builtin("airy"), stencils.builtin("kawahara")
    laplace, dzero = stencils.builtin("laplace"), stencils.builtin("dzero")

    worst = 0.0
    for _ in range(_TRIALS):
        u, v = _rand_gf(grid, rng), _rand_gf(grid, rng)
        lhs = inner_h(u, stencils.apply(dplus, v))
        rhs = -inner_h(stencils.apply(dminus, u), v)
        worst = max(worst, abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300))
    record("summation_by_parts", worst, 1e-13)

    worst = 0.0
    for _ in range(_TRIALS):
        u = _rand_gf(grid, rng)
        q = inner_h(u, stencils.apply(airy, u))
        ref = dx / 2.0 * norm_h(stencils.apply(laplace, u))**2
        worst = max(worst, abs(q - ref) / abs(ref))
    record("airy_quadratic_form", worst, 1e-12)

    worst = 0.0
    for _ in range(_TRIALS):
        u = _rand_gf(grid, rng)
        q = inner_h(u, stencils.apply(kawa, u))
        ref = -dx / 2.0 * norm_h(stencils.apply(airy, u))**2
        worst = max(worst, abs(q - ref) / abs(ref))
    record("kawahara_quadratic_form", worst, 1e-12)

    worst = 0.0
    for _ in range(_TRIALS):
        u = _rand_gf(grid, rng)
        d0u = stencils.apply(dzero, u)
        usq = GridFunction(grid, u.values**2)
        nonlin = GridFunction(grid, u.values * d0u.values
                              + stencils.apply(dzero, usq).values)
        scale = norm_h(u) * norm_h(nonlin)
        worst = max(worst, abs(inner_h(u, nonlin)) / scale)
    record("nonlinear_orthogonality", worst, 1e-12)

    worst = 0.0
    for k in range(n):
        u = _rand_gf(grid, rng)
        mode = np.exp(2j * np.pi * k * np.arange(n) / n)
        for s in (dzero, airy, kawa):
            applied = (stencils.apply_values(s, mode.real, dx)
                       + 1j * stencils.apply_values(s, mode.imag, dx))
            sym = stencils.symbol(s, grid, k)
            scale = max(np.max(np.abs(applied)), 1.0 / dx**s.dx_power)
            worst = max(worst, float(np.max(np.abs(applied - sym * mode)))
                        / scale)
    record("symbol_matches_apply", worst, 1e-10)

    dt = 0.5 * dx**5 * 100.0
    fac = factor(grid, dt)
    worst = 0.0
    for _ in range(20):
        rhs = _rand_gf(grid, rng)
        got = solve(fac, rhs)
        ref = dense_oracle(grid, dt, rhs)
        worst = max(worst, norm_h(got - ref) / norm_h(ref))
    record("solve_matches_dense_oracle", worst, 1e-10)

    worst = 0.0
    for _ in range(_TRIALS):
        u = _rand_gf(grid, rng)
        mu = GridFunction(grid, fac.apply_m(u.values))
        worst = max(worst, mass(u) - inner_h(u, mu))
    record("implicit_positivity", worst, 1e-12)

    worst = 0.0
    for k in range(n):
        sym = 1.0 + dt * (stencils.symbol(airy, grid, k)
                          - stencils.symbol(kawa, grid, k))
        worst = max(worst, 1.0 - sym.real)
    record("symbol_real_part_lower_bound", worst, 1e-12)

    sol_grid = make_grid(-40.0, 40.0, 2000)
    params = SchemeParams(kind="uk")
    u0 = sample(sol_grid, lambda x: exact_soliton(x, 0.0, 0.0))
    dt = max_dt(u0, params)
    fac = factor(sol_grid, dt)
    u1 = uk_step(u0, fac, dt)
    ubar = 0.5 * (np.roll(u0.values, -1) + np.roll(u0.values, 1))
    d0 = stencils.apply_values(dzero, u0.values, sol_grid.dx)
    w = GridFunction(sol_grid, ubar - dt * ubar * d0)
    rec = ledger(u0, u1, w, dt)
    ok = (rec.residual >= -1e-10 * rec.mass_in
          and rec.burgers_slack >= -1e-12
          and norm_h(u1) <= norm_h(u0) + 1e-10 * norm_h(u0))
    results.append(CheckResult(
        "uk_step_energy_ledger", ok,
        f"residual {rec.residual:.3e}, substep slack "
        f"{rec.burgers_slack:.3e}"))

    const = GridFunction(grid, np.full(n, 0.7))
    fac = factor(grid, dt := 1e-3 * dx**3)
    worst = max(
        float(np.max(np.abs(uk_step(const, fac, dt).values - 0.7))),
        float(np.max(np.abs(jmo_step(const, fac, dt).values - 0.7))),
        float(np.max(np.abs(rk4_step(const, 1e-12).values - 0.7))))
    record("constant_states_fixed", worst, 1e-13)

    return results
