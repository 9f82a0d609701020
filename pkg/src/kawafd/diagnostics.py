"""Error norms, conserved-functional proxies, and the per-step energy ledger.

The continuous equation conserves the mass integral of u^2 and the
functional integral of (u^3/3 - u_x^2 - u_xx^2).  Discretely, mass is
``norm_h(u)**2`` and the functional uses D+ and D+D- for the derivatives,
matching the operators whose norms appear in the scheme's energy identity.

The ledger decomposes the mass change of one implicit step into its
identified dissipation channels::

    residual = ||u^n||^2 - ||u^{n+1}||^2
               - dt*dx*||airy u^{n+1}||^2 - dt*dx*||laplace u^{n+1}||^2
               - (dx^2/8)*||D0 u^n||^2

A step taken under the CFL bound has residual >= 0 up to solver round-off;
positive residual is slack in the inequality.  ``burgers_slack`` is the
corresponding slack of the intermediate transport substep,
``||u^n||^2 - ||w||^2 - (dx^2/8)*||D0 u^n||^2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import GridFunction, inner_h, norm_h
from .stencils import apply_values, builtin

__all__ = ["LedgerRecord", "l2_error", "mass", "hamiltonian", "ledger"]

_DPLUS = builtin("dplus")
_LAPLACE = builtin("laplace")
_AIRY = builtin("airy")
_DZERO = builtin("dzero")


@dataclass(frozen=True)
class LedgerRecord:
    mass_in: float
    mass_out: float
    dissipation_airy: float
    dissipation_laplace: float
    dissipation_burgers: float
    burgers_slack: float

    @property
    def residual(self) -> float:
        return (self.mass_in - self.mass_out - self.dissipation_airy
                - self.dissipation_laplace - self.dissipation_burgers)


def l2_error(u: GridFunction, reference: GridFunction) -> float:
    """``norm_h(u - reference)``; grids must match."""
    return norm_h(u - reference)


def mass(u: GridFunction) -> float:
    """Discrete mass ``(u, u)_h``."""
    return inner_h(u, u)


def hamiltonian(u: GridFunction) -> float:
    """``dx * sum(u^3/3 - (D+ u)^2 - (D+D- u)^2)``.

    Monitored only; the scheme does not conserve it.
    """
    dx = u.grid.dx
    v = u.values
    du = apply_values(_DPLUS, v, dx)
    ddu = apply_values(_LAPLACE, v, dx)
    return float(dx * np.sum(v**3 / 3.0 - du**2 - ddu**2))


def ledger(u_n: GridFunction, u_np1: GridFunction, w: GridFunction,
           dt: float) -> LedgerRecord:
    """Energy ledger for one step u_n -> u_np1 with transport substep w."""
    u_n._check_same_grid(u_np1)
    u_n._check_same_grid(w)
    dx = u_n.grid.dx
    airy_out = apply_values(_AIRY, u_np1.values, dx)
    lap_out = apply_values(_LAPLACE, u_np1.values, dx)
    d0_in = apply_values(_DZERO, u_n.values, dx)
    mass_in = mass(u_n)
    mass_out = mass(u_np1)
    da = float(dt * dx * dx * np.dot(airy_out, airy_out))
    dl = float(dt * dx * dx * np.dot(lap_out, lap_out))
    db = float(dx**2 / 8.0 * dx * np.dot(d0_in, d0_in))
    slack = mass_in - mass(w) - db
    return LedgerRecord(mass_in=mass_in, mass_out=mass_out,
                        dissipation_airy=da, dissipation_laplace=dl,
                        dissipation_burgers=db, burgers_slack=slack)
