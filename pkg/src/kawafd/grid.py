"""Uniform periodic grids, grid functions, and the discrete inner product.

Nodes are left-closed: ``x_i = a + i*dx`` for ``i = 0..n-1`` with
``dx = (b-a)/n``; the right endpoint ``b`` is identified with ``a``.
Indexing a :class:`GridFunction` is modulo ``n``, so ``u[i+n] == u[i]``.

The inner product is the trapezoid-free Riemann sum
``(u, v)_h = dx * sum_i u_i v_i`` and ``norm_h(u) = sqrt((u, u)_h)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from .errors import ConfigurationError, SamplingError, UsageError

__all__ = [
    "PeriodicGrid",
    "GridFunction",
    "make_grid",
    "sample",
    "inner_h",
    "norm_h",
]

#: The widest built-in difference stencil spans 6 nodes.
MIN_CELLS = 8


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform periodic grid on ``[a, b)`` with ``n`` cells."""

    a: float
    b: float
    n: int

    def __post_init__(self) -> None:
        if not self.b > self.a:
            raise ConfigurationError(
                f"grid requires b > a, got a={self.a}, b={self.b}")
        if self.n < MIN_CELLS:
            raise ConfigurationError(
                f"grid requires n >= {MIN_CELLS} (widest stencil spans 6 "
                f"nodes), got n={self.n}")

    @property
    def dx(self) -> float:
        return (self.b - self.a) / self.n

    @cached_property
    def nodes(self) -> np.ndarray:
        x = self.a + self.dx * np.arange(self.n)
        x.setflags(write=False)
        return x


def make_grid(a: float, b: float, n: int) -> PeriodicGrid:
    """Build a periodic grid on ``[a, b)`` with ``n`` cells."""
    return PeriodicGrid(float(a), float(b), int(n))


@dataclass(frozen=True)
class GridFunction:
    """Real values on the nodes of a periodic grid.

    Immutable after construction; the backing array is read-only.
    """

    grid: PeriodicGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=float, copy=True)
        if vals.shape != (self.grid.n,):
            raise UsageError(
                f"expected {self.grid.n} values, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            bad = int(np.flatnonzero(~np.isfinite(vals))[0])
            raise UsageError(f"non-finite value at node {bad}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return self.grid.n

    def __getitem__(self, i: int) -> float:
        return float(self.values[i % self.grid.n])

    def _check_same_grid(self, other: "GridFunction") -> None:
        if self.grid != other.grid:
            raise UsageError(
                f"grid mismatch: {self.grid} vs {other.grid}")

    def __add__(self, other: "GridFunction") -> "GridFunction":
        self._check_same_grid(other)
        return GridFunction(self.grid, self.values + other.values)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        self._check_same_grid(other)
        return GridFunction(self.grid, self.values - other.values)

    def __mul__(self, scalar: float) -> "GridFunction":
        return GridFunction(self.grid, self.values * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "GridFunction":
        return GridFunction(self.grid, -self.values)


def sample(grid: PeriodicGrid, f: Callable[[float], float]) -> GridFunction:
    """Evaluate ``f`` at the grid nodes: ``values[i] = f(x_i)``."""
    x = grid.nodes
    try:
        vals = np.asarray(f(x), dtype=float)
        if vals.shape != x.shape:
            raise TypeError
    except Exception:
        vals = np.array([float(f(xi)) for xi in x])
    bad = np.flatnonzero(~np.isfinite(vals))
    if bad.size:
        i = int(bad[0])
        raise SamplingError(
            f"profile is not finite at node {i} (x = {x[i]!r})")
    return GridFunction(grid, vals)


def inner_h(u: GridFunction, v: GridFunction) -> float:
    """Discrete inner product ``dx * sum_i u_i v_i``."""
    u._check_same_grid(v)
    return float(u.grid.dx * np.dot(u.values, v.values))


def norm_h(u: GridFunction) -> float:
    """Discrete L2 norm ``sqrt((u, u)_h)``."""
    return float(np.sqrt(u.grid.dx) * np.linalg.norm(u.values))
