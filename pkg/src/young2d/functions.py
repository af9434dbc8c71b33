"""Sampled one- and two-parameter functions.

Every function handled by the library is known only through its values on a
finite grid.  Between grid points the 1D functions are linear and the 2D
functions are bilinear, so evaluation at grid nodes is exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


class SizeError(ValueError):
    """Raised when an exhaustive computation is requested on an oversized input."""


class HypothesisError(ValueError):
    """Raised when the hypotheses of a bound or limit theorem are not met."""


class HypothesisWarning(UserWarning):
    pass


def _as_float_array(x, ndim: int, name: str) -> np.ndarray:
    arr = np.array(x, dtype=float)
    if arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Grid1D:
    points: np.ndarray

    def __post_init__(self):
        pts = _as_float_array(self.points, 1, "grid points")
        if pts.size < 2:
            raise ValueError("a grid needs at least 2 points")
        if np.any(np.diff(pts) <= 0):
            raise ValueError("grid points must be strictly increasing")
        object.__setattr__(self, "points", pts)

    @property
    def a(self) -> float:
        return float(self.points[0])

    @property
    def b(self) -> float:
        return float(self.points[-1])

    def __len__(self) -> int:
        return self.points.size

    def locate(self, x) -> tuple[np.ndarray, np.ndarray]:
        """Cell index and linear weight of each query point.

        Returns ``(i, w)`` with ``x = (1 - w) * points[i] + w * points[i + 1]``;
        ``w`` is exactly 0 or 1 at grid nodes.
        """
        x = np.asarray(x, dtype=float)
        tol = 1e-12 * max(1.0, abs(self.a), abs(self.b))
        if np.any(x < self.a - tol) or np.any(x > self.b + tol):
            raise ValueError(f"evaluation point outside [{self.a}, {self.b}]")
        pts = self.points
        i = np.clip(np.searchsorted(pts, x, side="right") - 1, 0, pts.size - 2)
        w = (x - pts[i]) / (pts[i + 1] - pts[i])
        return i, np.clip(w, 0.0, 1.0)


def uniform_grid(a: float, b: float, n_cells: int) -> Grid1D:
    """Grid with ``n_cells`` equal cells; nodes ``a + (b - a) * k / n_cells``."""
    k = np.arange(n_cells + 1, dtype=float)
    pts = a + (b - a) * (k / n_cells)
    pts[-1] = b
    return Grid1D(pts)


@dataclass(frozen=True)
class SampledFunction1D:
    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        if not isinstance(self.grid, Grid1D):
            object.__setattr__(self, "grid", Grid1D(self.grid))
        vals = _as_float_array(self.values, 1, "values")
        if vals.size != len(self.grid):
            raise ValueError(
                f"{vals.size} values for a grid of {len(self.grid)} points")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_callable(cls, f: Callable, points) -> "SampledFunction1D":
        grid = points if isinstance(points, Grid1D) else Grid1D(points)
        vals = np.broadcast_to(np.asarray(f(grid.points), dtype=float), grid.points.shape)
        return cls(grid, vals)

    @property
    def domain(self) -> tuple[float, float]:
        return self.grid.a, self.grid.b

    def __call__(self, x):
        i, w = self.grid.locate(x)
        v = self.values
        return (1.0 - w) * v[i] + w * v[i + 1]


@dataclass(frozen=True)
class SampledFunction2D:
    """Values ``values[i, j] = F(grid_x[i], grid_y[j])`` with bilinear interpolation."""

    grid_x: Grid1D
    grid_y: Grid1D
    values: np.ndarray

    def __post_init__(self):
        if not isinstance(self.grid_x, Grid1D):
            object.__setattr__(self, "grid_x", Grid1D(self.grid_x))
        if not isinstance(self.grid_y, Grid1D):
            object.__setattr__(self, "grid_y", Grid1D(self.grid_y))
        vals = _as_float_array(self.values, 2, "values")
        if vals.shape != (len(self.grid_x), len(self.grid_y)):
            raise ValueError(
                f"values of shape {vals.shape} do not match grids "
                f"({len(self.grid_x)}, {len(self.grid_y)})")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_callable(cls, F: Callable, xs, ys) -> "SampledFunction2D":
        gx = xs if isinstance(xs, Grid1D) else Grid1D(xs)
        gy = ys if isinstance(ys, Grid1D) else Grid1D(ys)
        vals = np.asarray(F(gx.points[:, None], gy.points[None, :]), dtype=float)
        return cls(gx, gy, np.broadcast_to(vals, (len(gx), len(gy))))

    @property
    def domain(self) -> tuple[tuple[float, float], tuple[float, float]]:
        return (self.grid_x.a, self.grid_x.b), (self.grid_y.a, self.grid_y.b)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def transpose(self) -> "SampledFunction2D":
        return SampledFunction2D(self.grid_y, self.grid_x, self.values.T)

    def on_grid(self, xs, ys) -> np.ndarray:
        """Bilinear interpolant on the outer product ``xs x ys``."""
        ix, wx = self.grid_x.locate(np.asarray(xs, dtype=float).ravel())
        iy, wy = self.grid_y.locate(np.asarray(ys, dtype=float).ravel())
        v = self.values
        wx = wx[:, None]
        wy = wy[None, :]
        ix = ix[:, None]
        iy = iy[None, :]
        return ((1.0 - wx) * ((1.0 - wy) * v[ix, iy] + wy * v[ix, iy + 1])
                + wx * ((1.0 - wy) * v[ix + 1, iy] + wy * v[ix + 1, iy + 1]))

    def __call__(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        ix, wx = self.grid_x.locate(x)
        iy, wy = self.grid_y.locate(y)
        v = self.values
        return ((1.0 - wx) * ((1.0 - wy) * v[ix, iy] + wy * v[ix, iy + 1])
                + wx * ((1.0 - wy) * v[ix + 1, iy] + wy * v[ix + 1, iy + 1]))


def eval_on_grid(F, xs, ys) -> np.ndarray:
    """Evaluate ``F`` on the outer product of ``xs`` and ``ys``.

    Objects exposing ``on_grid`` (sampled functions, upcrossing fields,
    occupation densities) are evaluated through it; plain callables are
    called with broadcast arguments.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if hasattr(F, "on_grid"):
        out = F.on_grid(xs, ys)
    else:
        out = F(xs[:, None], ys[None, :])
    return np.broadcast_to(np.asarray(out, dtype=float), (xs.size, ys.size))
