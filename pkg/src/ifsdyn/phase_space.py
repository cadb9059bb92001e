"""Compact interval phase space and continuous piecewise-linear self-maps.

Everything here is exact up to floating-point representation: the image of
an interval under a continuous piecewise-linear map is again an interval whose
endpoints are attained at the interval endpoints or at interior vertices.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


class DomainError(ValueError):
    """A point or interval lies outside the phase space."""


# Slack used when validating user-supplied coordinates against the bounds.
_BOUND_SLACK = 1e-12


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def diameter(self) -> float:
        return self.hi - self.lo

    def contains(self, other: "Interval", tol: float = 0.0) -> bool:
        return self.lo - tol <= other.lo and other.hi <= self.hi + tol

    def __iter__(self):
        yield self.lo
        yield self.hi


class PiecewiseLinearMap:
    """Continuous piecewise-linear self-map of ``[lo, hi]`` given by its vertices.

    Parameters
    ----------
    vertices : sequence of (x, y)
        Graph vertices. The x-coordinates must be strictly increasing and span
        exactly the phase space; every y must lie in the phase space.
    bounds : (lo, hi), optional
        Phase-space bounds. Defaults to the first and last vertex x.
    """

    __slots__ = ("xs", "ys", "lo", "hi", "_xl", "_yl", "_slopes")

    def __init__(self, vertices: Sequence[Sequence[float]], bounds=None):
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 2:
            raise ValueError("need at least two (x, y) vertices")
        xs, ys = v[:, 0].copy(), v[:, 1].copy()
        lo, hi = (xs[0], xs[-1]) if bounds is None else (float(bounds[0]), float(bounds[1]))
        if not lo < hi:
            raise ValueError(f"degenerate phase space [{lo}, {hi}]")
        if np.any(np.diff(xs) <= 0):
            raise ValueError("vertex x-coordinates must be strictly increasing")
        if xs[0] != lo or xs[-1] != hi:
            raise DomainError(f"vertices must span [{lo}, {hi}], got [{xs[0]}, {xs[-1]}]")
        if ys.min() < lo - _BOUND_SLACK or ys.max() > hi + _BOUND_SLACK:
            raise DomainError("map does not send the phase space into itself")
        np.clip(ys, lo, hi, out=ys)
        xs.flags.writeable = False
        ys.flags.writeable = False
        self.xs, self.ys, self.lo, self.hi = xs, ys, lo, hi
        # plain-list copies for the scalar fast path used by long orbits
        self._xl = xs.tolist()
        self._yl = ys.tolist()
        self._slopes = (np.diff(ys) / np.diff(xs)).tolist()

    @classmethod
    def affine(cls, a: float, b: float, bounds=(0.0, 1.0)) -> "PiecewiseLinearMap":
        """The map ``clip(a*x + b)`` into the phase space, in vertex form."""
        lo, hi = map(float, bounds)
        xs = [lo, hi]
        if a != 0:
            for t in (lo, hi):
                c = (t - b) / a
                if lo < c < hi:
                    xs.append(c)
        xs = sorted(set(xs))
        ys = [min(max(a * x + b, lo), hi) for x in xs]
        return cls(list(zip(xs, ys)), bounds=(lo, hi))

    @classmethod
    def identity(cls, bounds=(0.0, 1.0)) -> "PiecewiseLinearMap":
        lo, hi = bounds
        return cls([(lo, lo), (hi, hi)], bounds=bounds)

    @classmethod
    def constant(cls, c: float, bounds=(0.0, 1.0)) -> "PiecewiseLinearMap":
        lo, hi = bounds
        return cls([(lo, c), (hi, c)], bounds=bounds)

    @property
    def bounds(self) -> tuple[float, float]:
        return (self.lo, self.hi)

    @property
    def vertices(self) -> list[tuple[float, float]]:
        return list(zip(self._xl, self._yl))

    @property
    def slopes(self) -> np.ndarray:
        return np.asarray(self._slopes)

    def __call__(self, x):
        return evaluate(self, x)

    def __repr__(self):
        return f"PiecewiseLinearMap({self.vertices!r})"

    def __eq__(self, other):
        if not isinstance(other, PiecewiseLinearMap):
            return NotImplemented
        return (self.lo, self.hi) == (other.lo, other.hi) and self.vertices == other.vertices

    def __hash__(self):
        return hash((self.lo, self.hi, tuple(self._xl), tuple(self._yl)))

    def to_dict(self) -> dict:
        return {"type": "pwl", "vertices": [list(v) for v in self.vertices]}


def _check_points(m: PiecewiseLinearMap, x: np.ndarray) -> None:
    if np.any(x < m.lo) or np.any(x > m.hi) or np.any(np.isnan(x)):
        raise DomainError(f"point outside phase space [{m.lo}, {m.hi}]")


def evaluate(m: PiecewiseLinearMap, x):
    """Evaluate ``m`` at a point (or array of points) of the phase space."""
    arr = np.asarray(x, dtype=float)
    _check_points(m, arr)
    out = np.interp(arr, m.xs, m.ys)
    return float(out) if out.ndim == 0 else out


def image_interval(m: PiecewiseLinearMap, interval: Interval) -> Interval:
    """Exact image ``m(I)``: extrema over the endpoints and the interior vertices."""
    a, b = interval.lo, interval.hi
    _check_points(m, np.array([a, b]))
    inner = (m.xs > a) & (m.xs < b)
    ends = np.interp([a, b], m.xs, m.ys)
    cand = np.concatenate([ends, m.ys[inner]])
    return Interval(float(cand.min()), float(cand.max()))


def compose_image(maps: Sequence[PiecewiseLinearMap], start: Interval) -> Interval:
    """Image of ``start`` under the maps applied in list order (first element first)."""
    if len(maps) == 0:
        raise ValueError("need at least one map")
    out = start
    for m in maps:
        out = image_interval(m, out)
    return out


def image_batch(m: PiecewiseLinearMap, lo: np.ndarray, hi: np.ndarray):
    """Vectorized :func:`image_interval` over arrays of interval endpoints.

    Returns the new ``(lo, hi)`` arrays. No domain checks; callers feed
    intervals that are already images inside the phase space.
    """
    flo = np.interp(lo, m.xs, m.ys)
    fhi = np.interp(hi, m.xs, m.ys)
    new_lo = np.minimum(flo, fhi)
    new_hi = np.maximum(flo, fhi)
    inner_x = m.xs[1:-1]
    if inner_x.size:
        inner_y = m.ys[1:-1]
        inside = (inner_x[None, :] > lo[:, None]) & (inner_x[None, :] < hi[:, None])
        if inside.any():
            y = np.broadcast_to(inner_y, inside.shape)
            new_lo = np.minimum(new_lo, np.where(inside, y, np.inf).min(axis=1))
            new_hi = np.maximum(new_hi, np.where(inside, y, -np.inf).max(axis=1))
    return new_lo, new_hi


def compose_maps(outer: PiecewiseLinearMap, inner: PiecewiseLinearMap) -> PiecewiseLinearMap:
    """The piecewise-linear map ``outer ∘ inner`` in vertex form.

    Breakpoints of the composite are the breakpoints of ``inner`` together with
    the preimages under ``inner`` of the interior breakpoints of ``outer``.
    Collinear vertices are dropped so that contracting compositions stay small.
    """
    xi, yi = inner.xs, inner.ys
    kinks = outer.xs[1:-1]
    pts = [xi]
    if kinks.size:
        y0, y1 = yi[:-1, None], yi[1:, None]
        lo_, hi_ = np.minimum(y0, y1), np.maximum(y0, y1)
        hit = (kinks[None, :] > lo_) & (kinks[None, :] < hi_)
        if hit.any():
            seg, k = np.nonzero(hit)
            t = (kinks[k] - yi[seg]) / (yi[seg + 1] - yi[seg])
            x = xi[seg] + t * (xi[seg + 1] - xi[seg])
            # keep preimages strictly inside their segment
            x = np.clip(x, xi[seg], xi[seg + 1])
            pts.append(x)
    xs = np.unique(np.concatenate(pts))
    ys = np.interp(np.interp(xs, xi, yi), outer.xs, outer.ys)
    xs, ys = _drop_collinear(xs, ys)
    return PiecewiseLinearMap(np.column_stack([xs, ys]), bounds=inner.bounds)


def _drop_collinear(xs: np.ndarray, ys: np.ndarray):
    if xs.size <= 2:
        return xs, ys
    dx0, dy0 = xs[1:-1] - xs[:-2], ys[1:-1] - ys[:-2]
    dx1, dy1 = xs[2:] - xs[1:-1], ys[2:] - ys[1:-1]
    cross = dx0 * dy1 - dy0 * dx1
    scale = np.abs(dx0 * dy1) + np.abs(dy0 * dx1)
    keep = np.ones(xs.size, dtype=bool)
    keep[1:-1] = np.abs(cross) > 1e-14 * scale
    return xs[keep], ys[keep]


def range_of(m: PiecewiseLinearMap) -> Interval:
    """The image ``m(X)`` of the whole phase space."""
    return Interval(float(m.ys.min()), float(m.ys.max()))


def fixed_points(m: PiecewiseLinearMap, tol: float = 1e-12) -> list[float]:
    """Solutions of ``m(x) = x`` on each linear piece (isolated ones only).

    A piece lying on the diagonal contributes its two endpoints.
    """
    out: list[float] = []
    for x0, x1, y0, y1 in zip(m._xl[:-1], m._xl[1:], m._yl[:-1], m._yl[1:]):
        g0, g1 = y0 - x0, y1 - x1
        if abs(g0) <= tol and abs(g1) <= tol:
            out.extend([x0, x1])
        elif abs(g0) <= tol:
            out.append(x0)
        elif abs(g1) <= tol:
            out.append(x1)
        elif g0 * g1 < 0:
            out.append(x0 + g0 / (g0 - g1) * (x1 - x0))
    out.sort()
    dedup: list[float] = []
    for x in out:
        if not dedup or x - dedup[-1] > tol:
            dedup.append(x)
    return dedup
