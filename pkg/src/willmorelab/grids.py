"""Tensor-product quadrature grids over chart domains.

Periodic axes use equal-weight nodes offset by half a cell, which is the
periodic trapezoidal rule (spectrally accurate for smooth periodic
integrands); the half-cell offset keeps nodes off chart poles on doubled
spherical charts. Non-periodic axes use Gauss-Legendre nodes, which are
strictly interior and spectrally accurate for integrands analytic on the
closed interval. No adaptive rules anywhere, so a grid is a pure
function of (domain, resolution) and results are bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.polynomial.legendre import leggauss

__all__ = ["AxisInterval", "QuadratureGrid"]

_WEIGHT_SUM_TOL = 1e-12


@dataclass(frozen=True)
class AxisInterval:
    """Closed parameter interval for one chart axis."""

    lo: float
    hi: float
    periodic: bool = False

    def __post_init__(self) -> None:
        if not self.hi > self.lo:
            raise ValueError(f"empty axis interval [{self.lo}, {self.hi}]")

    @property
    def length(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class QuadratureGrid:
    """Product quadrature rule; one 1-d rule per chart axis."""

    axes: tuple[AxisInterval, ...]
    counts: tuple[int, ...]
    nodes_1d: tuple[np.ndarray, ...]
    weights_1d: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        if len({len(self.axes), len(self.counts), len(self.nodes_1d), len(self.weights_1d)}) != 1:
            raise ValueError("inconsistent per-axis data")
        for ax, cnt, nodes, weights in zip(self.axes, self.counts, self.nodes_1d, self.weights_1d):
            if cnt < 2 or len(nodes) != cnt or len(weights) != cnt:
                raise ValueError("per-axis node/weight counts do not match")
            if abs(float(np.sum(weights)) - ax.length) > _WEIGHT_SUM_TOL * max(1.0, ax.length):
                raise ValueError("axis weights do not sum to the interval length")

    @classmethod
    def for_axes(cls, axes, counts) -> "QuadratureGrid":
        axes = tuple(axes)
        if isinstance(counts, int):
            counts = (counts,) * len(axes)
        counts = tuple(int(c) for c in counts)
        if len(counts) != len(axes):
            raise ValueError("need one resolution per axis")
        nodes_1d = []
        weights_1d = []
        for ax, cnt in zip(axes, counts):
            if cnt < 2:
                raise ValueError("resolution must be at least 2 per axis")
            if ax.periodic:
                h = ax.length / cnt
                nodes = ax.lo + (np.arange(cnt) + 0.5) * h
                weights = np.full(cnt, h)
            else:
                x, w = leggauss(cnt)
                half = 0.5 * ax.length
                nodes = ax.lo + half * (x + 1.0)
                weights = half * w
            nodes.flags.writeable = False
            weights.flags.writeable = False
            nodes_1d.append(nodes)
            weights_1d.append(weights)
        return cls(axes, counts, tuple(nodes_1d), tuple(weights_1d))

    @classmethod
    def for_patch(cls, patch, resolution) -> "QuadratureGrid":
        return cls.for_axes(patch.domain, resolution)

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.counts

    @property
    def node_total(self) -> int:
        return int(np.prod(self.counts))

    def spacing(self, axis: int) -> float:
        """Uniform node spacing; only meaningful for periodic axes."""
        if not self.axes[axis].periodic:
            raise ValueError("spacing is defined only for periodic axes")
        return self.axes[axis].length / self.counts[axis]

    @cached_property
    def _points(self) -> np.ndarray:
        mesh = np.meshgrid(*self.nodes_1d, indexing="ij")
        pts = np.stack([m.reshape(-1) for m in mesh], axis=-1)
        pts.flags.writeable = False
        return pts

    @cached_property
    def _weights(self) -> np.ndarray:
        w = self.weights_1d[0]
        for axis_w in self.weights_1d[1:]:
            w = np.multiply.outer(w, axis_w)
        w = w.reshape(-1)
        w.flags.writeable = False
        return w

    def points(self) -> np.ndarray:
        """All nodes, flattened row-major: shape (prod(counts), ndim)."""
        return self._points

    def weights(self) -> np.ndarray:
        """Product weights matching :meth:`points`."""
        return self._weights

    def matches_domain(self, axes, tol: float = 1e-12) -> bool:
        axes = tuple(axes)
        if len(axes) != len(self.axes):
            return False
        for mine, theirs in zip(self.axes, axes):
            if mine.periodic != theirs.periodic:
                return False
            if abs(mine.lo - theirs.lo) > tol or abs(mine.hi - theirs.hi) > tol:
                return False
        return True
