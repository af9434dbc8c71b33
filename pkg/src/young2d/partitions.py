"""Tagged partitions, step functions and dyadic refinement chains."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .functions import SampledFunction1D, eval_on_grid

MAX_CHAIN_DEPTH = 40


@dataclass(frozen=True)
class TaggedPartition:
    points: np.ndarray
    tags: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        tags = np.array(self.tags, dtype=float)
        if pts.ndim != 1 or pts.size < 2:
            raise ValueError("a partition needs at least 2 points")
        if np.any(np.diff(pts) <= 0):
            raise ValueError("partition points must be strictly increasing")
        if tags.shape != (pts.size - 1,):
            raise ValueError(f"expected {pts.size - 1} tags, got {tags.size}")
        if np.any(tags < pts[:-1]) or np.any(tags > pts[1:]):
            raise ValueError("each tag must lie in its cell [x_{i-1}, x_i]")
        pts.setflags(write=False)
        tags.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "tags", tags)

    @classmethod
    def with_midpoints(cls, points) -> "TaggedPartition":
        pts = np.asarray(points, dtype=float)
        return cls(pts, 0.5 * (pts[:-1] + pts[1:]))

    @property
    def a(self) -> float:
        return float(self.points[0])

    @property
    def b(self) -> float:
        return float(self.points[-1])

    @property
    def n_cells(self) -> int:
        return self.points.size - 1

    def to_json(self) -> dict:
        return {"points": self.points.tolist(), "tags": self.tags.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> "TaggedPartition":
        return cls(data["points"], data["tags"])


def _check_domain(f, part: TaggedPartition) -> None:
    dom = getattr(f, "domain", None)
    if dom is None or isinstance(dom[0], tuple):
        return
    lo, hi = dom
    if part.a < lo or part.b > hi:
        raise ValueError(
            f"partition [{part.a}, {part.b}] leaves the domain [{lo}, {hi}]")


@dataclass(frozen=True)
class StepFunction1D:
    partition: TaggedPartition
    node_values: np.ndarray
    interior_values: np.ndarray

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        pts = self.partition.points
        if np.any(x < pts[0]) or np.any(x > pts[-1]):
            raise ValueError("evaluation point outside the partitioned interval")
        i = np.searchsorted(pts, x, side="left")
        i_node = np.minimum(i, pts.size - 1)
        on_node = pts[i_node] == x
        cell = np.clip(i - 1, 0, pts.size - 2)
        return np.where(on_node, self.node_values[i_node], self.interior_values[cell])

    def breakpoint_samples(self) -> SampledFunction1D:
        """Resample at ``x_0, m_1, x_1, ..., m_N, x_N`` with cell midpoints ``m_i``.

        The step function is constant on each open cell, so its p-variation
        equals the p-variation of this sample sequence.
        """
        pts = self.partition.points
        n = pts.size - 1
        xs = np.empty(2 * n + 1)
        vs = np.empty(2 * n + 1)
        xs[0::2] = pts
        xs[1::2] = 0.5 * (pts[:-1] + pts[1:])
        vs[0::2] = self.node_values
        vs[1::2] = self.interior_values
        return SampledFunction1D(xs, vs)


def make_step_1d(f: Callable, part: TaggedPartition) -> StepFunction1D:
    _check_domain(f, part)
    nodes = np.asarray(f(part.points), dtype=float)
    interior = np.asarray(f(part.tags), dtype=float)
    return StepFunction1D(part, np.broadcast_to(nodes, part.points.shape).copy(),
                          np.broadcast_to(interior, part.tags.shape).copy())


@dataclass(frozen=True)
class StepFunction2D:
    partition_x: TaggedPartition
    partition_y: TaggedPartition
    corner_values: np.ndarray   # F(x_i, y_j)
    edge_values_x: np.ndarray   # F(x_i, eta_j)
    edge_values_y: np.ndarray   # F(xi_i, y_j)
    cell_values: np.ndarray     # F(xi_i, eta_j)

    @staticmethod
    def _locate(pts, x):
        i = np.searchsorted(pts, x, side="left")
        i_node = np.minimum(i, pts.size - 1)
        on_node = pts[i_node] == x
        cell = np.clip(i - 1, 0, pts.size - 2)
        return on_node, i_node, cell

    def __call__(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        px, py = self.partition_x.points, self.partition_y.points
        if (np.any(x < px[0]) or np.any(x > px[-1])
                or np.any(y < py[0]) or np.any(y > py[-1])):
            raise ValueError("evaluation point outside the partitioned rectangle")
        nx_, ix, cx = self._locate(px, x)
        ny_, iy, cy = self._locate(py, y)
        return np.where(
            nx_,
            np.where(ny_, self.corner_values[ix, iy], self.edge_values_x[ix, cy]),
            np.where(ny_, self.edge_values_y[cx, iy], self.cell_values[cx, cy]))


def make_step_2d(F: Callable, px: TaggedPartition, py: TaggedPartition) -> StepFunction2D:
    dom = getattr(F, "domain", None)
    if dom is not None:
        (xa, xb), (ya, yb) = dom
        if px.a < xa or px.b > xb or py.a < ya or py.b > yb:
            raise ValueError("partitions leave the domain of F")
    return StepFunction2D(
        px, py,
        eval_on_grid(F, px.points, py.points).copy(),
        eval_on_grid(F, px.points, py.tags).copy(),
        eval_on_grid(F, px.tags, py.points).copy(),
        eval_on_grid(F, px.tags, py.tags).copy())


@dataclass(frozen=True)
class RefinementChain:
    """Nested partitions ``levels[j]`` with ``2**j + 1`` points refining ``target``."""

    levels: list = field(repr=False)
    target: np.ndarray
    interval: tuple[float, float]

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def to_json(self) -> dict:
        return {"levels": [lv.tolist() for lv in self.levels]}


def build_chain(target, interval: tuple[float, float] | None = None) -> RefinementChain:
    """Dyadic chain ``Pi_0 = {a, b}, ..., Pi_M`` whose last level contains ``target``.

    At level ``j + 1`` each cell ``(t_k, t_{k+1})`` of ``Pi_j`` is split at a
    target point lying strictly inside it whose distances to both ends are
    below ``4 (b - a) 2^{-(j+1)}``; among several candidates the one closest
    to the cell midpoint wins, and the midpoint itself is used when there is
    none.  Gaps of ``Pi_j`` stay below ``4 (b - a) 2^{-j}``.
    """
    pts = target.points if isinstance(target, TaggedPartition) else np.asarray(target, dtype=float)
    pts = np.unique(pts)
    if interval is None:
        a, b = float(pts[0]), float(pts[-1])
    else:
        a, b = map(float, interval)
    if not b > a:
        raise ValueError("empty interval")
    if pts[0] < a or pts[-1] > b:
        raise ValueError("target points outside the interval")
    pts = np.union1d(pts, [a, b])
    if pts.size > 2 and np.min(np.diff(pts)) < 2.0 ** -(MAX_CHAIN_DEPTH - 2) * (b - a):
        raise ValueError("target gaps below 2^-38 (b - a) cannot be refined within the depth cap")

    level = np.array([a, b])
    levels = [level]
    j = 0
    while not np.all(np.isin(pts, level)):
        if j >= MAX_CHAIN_DEPTH:
            raise RuntimeError(f"refinement chain did not reach the target by depth {MAX_CHAIN_DEPTH}")
        delta = 4.0 * (b - a) * 2.0 ** -(j + 1)
        lo, hi = level[:-1], level[1:]
        mid = 0.5 * (lo + hi)
        win_lo = np.maximum(lo, hi - delta)
        win_hi = np.minimum(hi, lo + delta)
        idx = np.searchsorted(pts, mid)
        left = pts[np.clip(idx - 1, 0, pts.size - 1)]
        right = pts[np.clip(idx, 0, pts.size - 1)]
        ok_left = (left > win_lo) & (left < win_hi)
        ok_right = (right > win_lo) & (right < win_hi)
        use_right = ok_right & (~ok_left | (right - mid < mid - left))
        new = np.where(use_right, right, np.where(ok_left, left, mid))
        nxt = np.empty(2 * level.size - 1)
        nxt[0::2] = level
        nxt[1::2] = new
        level = nxt
        levels.append(level)
        j += 1
    return RefinementChain(levels, pts, (a, b))


def dyadic_level(a: float, b: float, n: int) -> np.ndarray:
    """Uniform level ``a + (b - a) k / 2^n``; level ``n`` is the even part of ``n + 1``."""
    k = np.arange(2 ** n + 1, dtype=float)
    pts = a + (b - a) * (k / 2.0 ** n)
    pts[-1] = b
    return pts


def dyadic_chain(a: float, b: float, depth: int) -> RefinementChain:
    levels = [dyadic_level(a, b, n) for n in range(depth + 1)]
    return RefinementChain(levels, levels[-1], (float(a), float(b)))
