"""Difference operators on periodic grids as explicit circulant stencils.

The primitive operators are::

    D+ u_i = (u_{i+1} - u_i) / dx
    D- u_i = (u_i - u_{i-1}) / dx
    D0 u_i = (u_{i+1} - u_{i-1}) / (2 dx)

together with the compositions used by the dispersive terms::

    laplace  = D+ D-           offsets (-1, 0, 1),        coeffs (1, -2, 1),           p=2
    airy     = D- D+^2         offsets (-1, 0, 1, 2),     coeffs (-1, 3, -3, 1),       p=3
    kawahara = D+^3 D-^2       offsets (-2, ..., 3),      coeffs (-1, 5, -10, 10, -5, 1), p=5

Coefficients are stored as exact rationals and only divided by ``dx**p``
at application time, so composition is exact and testable by integer
comparison.  Shift operators commute, hence so do all compositions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import UsageError
from .grid import GridFunction, PeriodicGrid

__all__ = [
    "Stencil",
    "builtin",
    "identity",
    "compose",
    "apply",
    "apply_values",
    "symbol",
    "to_dense",
    "BUILTIN_NAMES",
]


@dataclass(frozen=True)
class Stencil:
    """Circulant operator: offsets, rational coefficients, dx power."""

    offsets: tuple[int, ...]
    coeffs: tuple[Fraction, ...]
    dx_power: int

    def __post_init__(self) -> None:
        offs = tuple(int(o) for o in self.offsets)
        cfs = tuple(Fraction(c) for c in self.coeffs)
        if len(offs) != len(cfs):
            raise UsageError("offsets and coeffs must have equal length")
        if not offs:
            raise UsageError("stencil must have at least one entry")
        if any(b <= a for a, b in zip(offs, offs[1:])):
            raise UsageError("offsets must be strictly increasing")
        if any(c == 0 for c in cfs):
            raise UsageError("zero coefficients must be pruned")
        if self.dx_power < 0:
            raise UsageError("dx_power must be nonnegative")
        if self.dx_power >= 1 and sum(cfs) != 0:
            raise UsageError(
                "a differencing stencil (dx_power >= 1) must annihilate "
                "constants: coefficients must sum to zero")
        object.__setattr__(self, "offsets", offs)
        object.__setattr__(self, "coeffs", cfs)

    @property
    def width(self) -> int:
        return self.offsets[-1] - self.offsets[0] + 1

    @cached_property
    def fcoeffs(self) -> np.ndarray:
        arr = np.array([float(c) for c in self.coeffs])
        arr.setflags(write=False)
        return arr


_BUILTINS: dict[str, Stencil] = {
    "dplus": Stencil((0, 1), (Fraction(-1), Fraction(1)), 1),
    "dminus": Stencil((-1, 0), (Fraction(-1), Fraction(1)), 1),
    "dzero": Stencil((-1, 1), (Fraction(-1, 2), Fraction(1, 2)), 1),
    "laplace": Stencil((-1, 0, 1), (Fraction(1), Fraction(-2), Fraction(1)), 2),
    "airy": Stencil(
        (-1, 0, 1, 2),
        (Fraction(-1), Fraction(3), Fraction(-3), Fraction(1)), 3),
    "kawahara": Stencil(
        (-2, -1, 0, 1, 2, 3),
        (Fraction(-1), Fraction(5), Fraction(-10), Fraction(10),
         Fraction(-5), Fraction(1)), 5),
}

BUILTIN_NAMES = tuple(sorted(_BUILTINS))


def builtin(name: str) -> Stencil:
    """Return a named built-in stencil (see module docstring)."""
    try:
        return _BUILTINS[name]
    except KeyError:
        raise UsageError(
            f"unknown stencil {name!r}; valid names: "
            f"{', '.join(BUILTIN_NAMES)}") from None


def identity() -> Stencil:
    """The identity operator: offsets (0,), coeffs (1,), p=0."""
    return Stencil((0,), (Fraction(1),), 0)


def compose(s1: Stencil, s2: Stencil) -> Stencil:
    """Stencil of ``s1 o s2``: coefficient convolution, dx powers add."""
    acc: dict[int, Fraction] = {}
    for o1, c1 in zip(s1.offsets, s1.coeffs):
        for o2, c2 in zip(s2.offsets, s2.coeffs):
            acc[o1 + o2] = acc.get(o1 + o2, Fraction(0)) + c1 * c2
    entries = sorted((o, c) for o, c in acc.items() if c != 0)
    if not entries:
        raise UsageError("composition cancelled to the zero operator")
    offs, cfs = zip(*entries)
    return Stencil(offs, cfs, s1.dx_power + s2.dx_power)


def apply_values(s: Stencil, values: np.ndarray, dx: float) -> np.ndarray:
    """Apply a stencil to a raw periodic array (hot path, no wrapping)."""
    acc = s.fcoeffs[0] * np.roll(values, -s.offsets[0])
    for off, c in zip(s.offsets[1:], s.fcoeffs[1:]):
        acc += c * np.roll(values, -off)
    if s.dx_power:
        acc /= dx**s.dx_power
    return acc


def apply(s: Stencil, u: GridFunction) -> GridFunction:
    """Apply a stencil: ``(Su)_i = dx**-p * sum_m c_m u_{i+off_m mod n}``."""
    if u.grid.n < s.width:
        raise UsageError(
            f"grid with n={u.grid.n} is narrower than stencil width {s.width}")
    return GridFunction(u.grid, apply_values(s, u.values, u.grid.dx))


def symbol(s: Stencil, grid: PeriodicGrid, k: int) -> complex:
    """Fourier symbol at integer mode ``k``.

    Applying ``s`` to the discrete mode ``exp(2 pi i k j / n)`` multiplies
    it by this value.
    """
    if not 0 <= k < grid.n:
        raise UsageError(f"mode k={k} out of range [0, {grid.n})")
    phase = 2.0j * np.pi * k / grid.n
    val = sum(float(c) * np.exp(phase * off)
              for off, c in zip(s.offsets, s.coeffs))
    return complex(val / grid.dx**s.dx_power)


def to_dense(s: Stencil, grid: PeriodicGrid) -> np.ndarray:
    """Dense circulant matrix of the stencil (test oracles, small n only)."""
    n = grid.n
    mat = np.zeros((n, n))
    scale = grid.dx**s.dx_power
    for off, c in zip(s.offsets, s.fcoeffs):
        for i in range(n):
            mat[i, (i + off) % n] += c / scale
    return mat
