"""Per-step implicit solves: M u = w with M = I + dt*(airy - kawahara).

M is a circulant with offsets -2..3, so on the periodic grid it splits as

    M = B + U V^T

where B is the plain band matrix (2 sub-, 3 super-diagonals) and U V^T is a
rank-5 correction carrying the wrap entries of the five boundary rows
(rows 0, 1, n-3, n-2, n-1).  B is LU-factored once with LAPACK's banded
``gbtrf``; every solve is then one banded back-substitution plus a 5x5
Woodbury correction, O(n) per step, and the factorization is reused for as
long as (grid, dt) stay fixed.

Every solve verifies its own residual ``||M u - rhs||_h``.  The acceptance
bound is ``solve_tolerance`` relative, widened by the conditioning estimate
``1 + dt*(8/dx^3 + 32/dx^5)`` times machine epsilon, which is the backward
error a stable direct method can actually deliver when dt times the symbol
is large.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import get_lapack_funcs, lu_factor, lu_solve

from .errors import SolverError, UsageError
from .grid import GridFunction, PeriodicGrid
from .stencils import builtin, to_dense

__all__ = ["ImplicitFactorization", "factor", "solve", "solve_values",
           "dense_oracle"]

_KL, _KU = 2, 3  # sub-/super-diagonal counts of the -2..3 stencil row
_OFFSETS = range(-2, 4)
_DENSE_LIMIT = 1024
#: Multiple of machine epsilon allowed per unit of symbol magnitude.
_BACKWARD_FACTOR = 500.0


def _m_row(dt: float, dx: float) -> dict[int, float]:
    """One circulant row of M = I + dt*(airy - kawahara)."""
    airy, kawa = builtin("airy"), builtin("kawahara")
    row = {off: 0.0 for off in _OFFSETS}
    row[0] = 1.0
    for off, c in zip(airy.offsets, airy.fcoeffs):
        row[off] += dt * c / dx**3
    for off, c in zip(kawa.offsets, kawa.fcoeffs):
        row[off] -= dt * c / dx**5
    return row


@dataclass(eq=False)
class ImplicitFactorization:
    """Reusable factorization of M for one (grid, dt) pair."""

    grid: PeriodicGrid
    dt: float
    solve_tolerance: float
    row: dict[int, float]
    symbol_bound: float
    _lu: np.ndarray = field(repr=False)
    _ipiv: np.ndarray = field(repr=False)
    _binv_u: np.ndarray = field(repr=False)
    _vt: np.ndarray = field(repr=False)
    _cap_lu: tuple = field(repr=False)
    _gbtrs: object = field(repr=False)

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def dx(self) -> float:
        return self.grid.dx

    def apply_m(self, values: np.ndarray) -> np.ndarray:
        """Apply the periodic operator M to a raw array."""
        acc = np.zeros_like(values)
        for off, c in self.row.items():
            acc += c * np.roll(values, -off)
        return acc

    @property
    def residual_bound(self) -> float:
        """Effective relative residual bound used for verification."""
        eps = float(np.finfo(float).eps)
        return max(self.solve_tolerance, _BACKWARD_FACTOR * eps * self.symbol_bound)


def factor(grid: PeriodicGrid, dt: float,
           solve_tolerance: float = 1e-10) -> ImplicitFactorization:
    """Factor M = I + dt*(airy - kawahara) on a periodic grid.

    Cost O(n).  dt = 0 yields the identity and is allowed for testing the
    degenerate limit; negative dt is rejected.
    """
    if dt < 0:
        raise UsageError(f"dt must be nonnegative, got {dt}")
    n, dx = grid.n, grid.dx
    row = _m_row(dt, dx)

    ab = np.zeros((2 * _KL + _KU + 1, n))
    for off in _OFFSETS:
        j0, j1 = max(0, off), n - 1 + min(0, off)
        ab[_KL + _KU - off, j0:j1 + 1] = row[off]
    gbtrf, gbtrs = get_lapack_funcs(("gbtrf", "gbtrs"), (ab,))
    lu, ipiv, info = gbtrf(ab, _KL, _KU)
    if info != 0:
        raise SolverError(
            f"banded LU factorization failed (info={info}); the periodic "
            f"operator has Re(symbol) >= 1, so treat this as a bug signal")

    # Wrap entries of the five affected rows, at their wrapped columns.
    vt = np.zeros((5, n))
    vt[0, n - 2], vt[0, n - 1] = row[-2], row[-1]
    vt[1, n - 1] = row[-2]
    vt[2, 0] = row[3]
    vt[3, 0], vt[3, 1] = row[2], row[3]
    vt[4, 0], vt[4, 1], vt[4, 2] = row[1], row[2], row[3]
    u_cols = np.zeros((n, 5))
    for k, r in enumerate((0, 1, n - 3, n - 2, n - 1)):
        u_cols[r, k] = 1.0
    binv_u, info = gbtrs(lu, _KL, _KU, u_cols, ipiv)
    if info != 0:
        raise SolverError(f"banded substitution failed (info={info})")
    try:
        cap_lu = lu_factor(np.eye(5) + vt @ binv_u)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"singular wrap-correction matrix: {exc}") from exc

    symbol_bound = 1.0 + dt * (8.0 / dx**3 + 32.0 / dx**5)
    return ImplicitFactorization(
        grid=grid, dt=dt, solve_tolerance=solve_tolerance, row=row,
        symbol_bound=symbol_bound, _lu=lu, _ipiv=ipiv, _binv_u=binv_u,
        _vt=vt, _cap_lu=cap_lu, _gbtrs=gbtrs)


def solve_values(f: ImplicitFactorization,
                 rhs: np.ndarray) -> tuple[np.ndarray, float]:
    """Solve M u = rhs on raw arrays; returns (u, relative residual).

    Raises :class:`SolverError` if the verified residual exceeds the
    factorization's residual bound.
    """
    y, info = f._gbtrs(f._lu, _KL, _KU, rhs, f._ipiv)
    if info != 0:
        raise SolverError(f"banded substitution failed (info={info})")
    u = y - f._binv_u @ lu_solve(f._cap_lu, f._vt @ y)
    rhs_norm = float(np.linalg.norm(rhs))
    res = float(np.linalg.norm(f.apply_m(u) - rhs))
    rel = res / rhs_norm if rhs_norm > 0 else res
    if rel > f.residual_bound:
        raise SolverError(
            f"solve residual {rel:.3e} exceeds tolerance "
            f"{f.residual_bound:.3e} (n={f.n}, dt={f.dt})")
    return u, rel


def solve(f: ImplicitFactorization, rhs: GridFunction) -> GridFunction:
    """Solve M u = rhs; O(n), residual-verified."""
    if rhs.grid != f.grid:
        raise UsageError(f"rhs grid {rhs.grid} does not match factorization "
                         f"grid {f.grid}")
    u, _ = solve_values(f, rhs.values)
    return GridFunction(f.grid, u)


def dense_oracle(grid: PeriodicGrid, dt: float, rhs: GridFunction) -> GridFunction:
    """Reference solve by dense assembly and LAPACK elimination.

    O(n^3); guarded to n <= 1024.  Arbitrates between production solve
    backends.
    """
    if grid.n > _DENSE_LIMIT:
        raise UsageError(
            f"dense oracle limited to n <= {_DENSE_LIMIT}, got {grid.n}")
    if rhs.grid != grid:
        raise UsageError("rhs grid does not match")
    mat = np.eye(grid.n) + dt * (to_dense(builtin("airy"), grid)
                                 - to_dense(builtin("kawahara"), grid))
    return GridFunction(grid, np.linalg.solve(mat, rhs.values))
