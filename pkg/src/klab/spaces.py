"""Spectra, grid-sampled real functions and the elementary norms.

Interval functions live on the nodes ``k/N`` for ``k = 0..N``; circle functions
on ``k/N`` for ``k = 0..N-1`` with the phase convention ``x = exp(2*pi*i*theta)``.
Between nodes every function is its piecewise-linear interpolant.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Union

import numpy as np

from . import kernels

Coordinate = Union[Fraction, float]


class Space(enum.Enum):
    POINT = "point"
    INTERVAL = "interval"
    CIRCLE = "circle"


@dataclass(frozen=True)
class SpectrumPoint:
    """A point of a spectrum. Rational coordinates are exact, floats approximate.

    Circle coordinates are phases and are reduced mod 1 on construction.
    """

    space: Space
    coordinate: Coordinate = Fraction(0)

    def __post_init__(self) -> None:
        c = self.coordinate
        if isinstance(c, int):
            c = Fraction(c)
        if self.space is Space.POINT:
            c = Fraction(0)
        elif self.space is Space.CIRCLE:
            c = c - math.floor(c)
        elif not 0 <= c <= 1:
            raise ValueError(f"interval coordinate {c} outside [0, 1]")
        object.__setattr__(self, "coordinate", c)

    @property
    def exact(self) -> bool:
        return isinstance(self.coordinate, Fraction)

    @classmethod
    def interval(cls, t: Coordinate) -> "SpectrumPoint":
        return cls(Space.INTERVAL, t)

    @classmethod
    def circle(cls, phase: Coordinate) -> "SpectrumPoint":
        return cls(Space.CIRCLE, phase)

    @classmethod
    def point(cls) -> "SpectrumPoint":
        return cls(Space.POINT)

    def value(self) -> complex | float:
        """The point itself: a complex unit for the circle, a real otherwise."""
        if self.space is Space.CIRCLE:
            return complex(np.exp(2j * np.pi * float(self.coordinate)))
        return float(self.coordinate)


def node_count(space: Space, resolution: int) -> int:
    if space is Space.POINT:
        return 1
    return resolution + 1 if space is Space.INTERVAL else resolution


def grid_nodes(space: Space, resolution: int) -> np.ndarray:
    """Node coordinates of the grid on ``space``."""
    if space is Space.POINT:
        return np.zeros(1)
    return np.arange(node_count(space, resolution), dtype=np.float64) / resolution


class GridFunction:
    """A real function on a spectrum, stored by its node samples (immutable)."""

    __slots__ = ("space", "samples", "resolution")

    def __init__(self, space: Space, samples, resolution: int | None = None) -> None:
        arr = np.array(samples, dtype=np.float64).ravel()
        if space is Space.POINT:
            if arr.size != 1:
                raise ValueError("point functions have one sample")
            res = resolution or 1
        elif space is Space.INTERVAL:
            res = arr.size - 1
        else:
            res = arr.size
        if space is not Space.POINT and res < 2:
            raise ValueError("grid resolution must be at least 2")
        if resolution is not None and space is not Space.POINT and resolution != res:
            raise ValueError(f"expected resolution {resolution}, got {res}")
        arr.setflags(write=False)
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "samples", arr)
        object.__setattr__(self, "resolution", res)

    def __setattr__(self, name, value):
        raise AttributeError("GridFunction is immutable")

    # construction ------------------------------------------------------
    @classmethod
    def from_callable(cls, space: Space, resolution: int, fn: Callable[[np.ndarray], np.ndarray]) -> "GridFunction":
        x = grid_nodes(space, resolution)
        vals = np.broadcast_to(np.asarray(fn(x), dtype=np.float64), x.shape)
        return cls(space, vals, resolution)

    @classmethod
    def constant(cls, space: Space, resolution: int, value: float) -> "GridFunction":
        return cls(space, np.full(node_count(space, resolution), float(value)), resolution)

    @classmethod
    def zeros(cls, space: Space, resolution: int) -> "GridFunction":
        return cls.constant(space, resolution, 0.0)

    # evaluation --------------------------------------------------------
    @property
    def nodes(self) -> np.ndarray:
        return grid_nodes(self.space, self.resolution)

    def __call__(self, x) -> np.ndarray | float:
        """Interpolated values at float coordinates."""
        if self.space is Space.POINT:
            return np.full(np.shape(x), self.samples[0]) if np.ndim(x) else float(self.samples[0])
        out = kernels.interp(self.samples, self.space is Space.CIRCLE, np.atleast_1d(np.asarray(x, dtype=np.float64)))
        return out if np.ndim(x) else float(out[0])

    def at(self, point: SpectrumPoint | Coordinate) -> float:
        """Value at a point; rational coordinates use exact cell arithmetic."""
        c = point.coordinate if isinstance(point, SpectrumPoint) else point
        if self.space is Space.POINT:
            return float(self.samples[0])
        if not isinstance(c, Fraction):
            return float(self(float(c)))
        n = self.resolution
        if self.space is Space.CIRCLE:
            c = c - math.floor(c)
        num = c.numerator * n
        k, rem = divmod(num, c.denominator)
        if rem == 0:
            return float(self.samples[k % len(self.samples)])
        k1 = k + 1 if self.space is Space.INTERVAL else (k + 1) % n
        frac = rem / c.denominator
        return float(self.samples[k] * (1.0 - frac) + self.samples[k1] * frac)

    def resample(self, resolution: int) -> "GridFunction":
        if self.space is Space.POINT or resolution == self.resolution:
            return self
        return GridFunction(self.space, self(grid_nodes(self.space, resolution)), resolution)

    # queries -----------------------------------------------------------
    def max(self) -> float:
        return float(self.samples.max())

    def min(self) -> float:
        return float(self.samples.min())

    def is_constant(self) -> bool:
        return bool(self.samples.max() == self.samples.min())

    def lipschitz(self) -> float:
        """Exact Lipschitz constant of the interpolant (w.r.t. the coordinate)."""
        if self.space is Space.POINT:
            return 0.0
        s = self.samples
        d = np.diff(np.append(s, s[0])) if self.space is Space.CIRCLE else np.diff(s)
        return float(np.abs(d).max() * self.resolution)

    def allclose(self, other: "GridFunction", atol: float = 1e-12) -> bool:
        return (
            self.space is other.space
            and self.samples.shape == other.samples.shape
            and bool(np.max(np.abs(self.samples - other.samples), initial=0.0) <= atol)
        )

    # arithmetic --------------------------------------------------------
    def _coerce(self, other) -> np.ndarray | float:
        if isinstance(other, GridFunction):
            if other.space is not self.space or other.samples.shape != self.samples.shape:
                raise ValueError("grid functions on different grids")
            return other.samples
        return float(other)

    def __add__(self, other) -> "GridFunction":
        return GridFunction(self.space, self.samples + self._coerce(other), self.resolution)

    __radd__ = __add__

    def __sub__(self, other) -> "GridFunction":
        return GridFunction(self.space, self.samples - self._coerce(other), self.resolution)

    def __rsub__(self, other) -> "GridFunction":
        return GridFunction(self.space, self._coerce(other) - self.samples, self.resolution)

    def __neg__(self) -> "GridFunction":
        return GridFunction(self.space, -self.samples, self.resolution)

    def __mul__(self, scalar: float) -> "GridFunction":
        return GridFunction(self.space, self.samples * float(scalar), self.resolution)

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> "GridFunction":
        return GridFunction(self.space, self.samples / float(scalar), self.resolution)

    def __repr__(self) -> str:
        return f"GridFunction({self.space.value}, N={self.resolution}, range=[{self.min():.6g}, {self.max():.6g}])"


def sup_norm(f: GridFunction) -> float:
    """Max of ``|f|`` over the nodes."""
    return float(np.abs(f.samples).max())


def midrange_seminorm(f: GridFunction) -> float:
    """Half the oscillation; the sup-norm distance from ``f`` to the constants."""
    return 0.5 * (f.max() - f.min())


def lattice_quotient_seminorm(f: GridFunction, lattice_step: Fraction | float) -> float:
    """Sup-norm distance from ``f`` to the constants in ``lattice_step * Z``."""
    step = float(lattice_step)
    if step <= 0:
        raise ValueError("lattice step must be positive")
    lo, hi = f.min(), f.max()
    mid = 0.5 * (lo + hi)
    q = mid / step
    dist = abs(q - round(q)) * step
    return 0.5 * (hi - lo) + dist
