"""Skew product, chaos-game orbits, Birkhoff averages and the coding map."""
from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .diagnostics import backward_diameter
from .phase_space import DomainError
from .symbolic import IfsModel, Word, WordSampler, sample_words, shift


@dataclass(frozen=True)
class SkewState:
    word: Word
    x: float


def skew_step(model: IfsModel, s: SkewState) -> SkewState:
    """``(w, x) -> (shift(w), map_{w_1}(x))``."""
    if not s.word:
        raise ValueError("skew step needs a nonempty word")
    m = model.maps[s.word[0]]
    return SkewState(shift(s.word), m(s.x))


@dataclass(frozen=True)
class Monomial:
    """Observable ``x -> x**k``."""

    k: int

    def __call__(self, x):
        return np.asarray(x, dtype=float) ** self.k


class PiecewiseLinearObservable:
    """Continuous piecewise-linear observable; values are unrestricted."""

    def __init__(self, vertices):
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 2 or np.any(np.diff(v[:, 0]) <= 0):
            raise ValueError("need >= 2 vertices with strictly increasing x")
        self.xs, self.ys = v[:, 0], v[:, 1]

    def __call__(self, x):
        return np.interp(x, self.xs, self.ys)


Observable = Callable[[np.ndarray], np.ndarray]


def orbit(model: IfsModel, x0: float, w: Sequence[int]) -> np.ndarray:
    """Points ``x_j = map_{w_j}(x_{j-1})`` for ``j = 1..len(w)``.

    Runs a scalar loop over plain lists: the orbit is inherently sequential and
    this is several times faster than per-step numpy calls.
    """
    lo, hi = model.bounds
    if not lo <= x0 <= hi:
        raise DomainError(f"start point {x0} outside [{lo}, {hi}]")
    tables = [(m._xl, m._yl, m._slopes, len(m._xl) - 2) for m in model.maps]
    letters = w.tolist() if isinstance(w, np.ndarray) else list(w)
    out = [0.0] * len(letters)
    br = bisect.bisect_right
    x = float(x0)
    for j, c in enumerate(letters):
        xl, yl, sl, last = tables[c]
        i = br(xl, x) - 1
        if i > last:
            i = last
        x = yl[i] + sl[i] * (x - xl[i])
        # keep the orbit inside X against rounding on steep pieces
        if x < lo:
            x = lo
        elif x > hi:
            x = hi
        out[j] = x
    return np.asarray(out)


def birkhoff_average(model: IfsModel, f: Observable, x0: float, w: Sequence[int],
                     burn_in: int = 0) -> np.ndarray:
    """Running means of ``f`` along the orbit of ``x0`` driven by ``w``.

    Entry ``j - 1`` is ``(f(x_1) + ... + f(x_j)) / j``. With ``burn_in > 0``
    the first ``burn_in`` orbit points are discarded before averaging.
    """
    if len(w) < 1:
        raise ValueError("need at least one letter")
    xs = orbit(model, x0, w)[burn_in:]
    vals = np.asarray(f(xs), dtype=float)
    if vals.shape != xs.shape:
        vals = np.broadcast_to(vals, xs.shape)
    return np.cumsum(vals) / np.arange(1, xs.size + 1)


def chaos_game(model: IfsModel, n: int, seed: int, x0: float | None = None) -> np.ndarray:
    """The first ``n`` chaos-game points, letters from ``WordSampler(model, seed)``."""
    if x0 is None:
        lo, hi = model.bounds
        x0 = 0.5 * (lo + hi)
    return orbit(model, x0, WordSampler(model, seed).sample_array(n))


def gamma(model: IfsModel, w: Sequence[int], x: float) -> tuple[float, float]:
    """``(map_{w_1} ∘ ... ∘ map_{w_n}(x), h_n(w))``.

    Any two points of the composed image are within ``h_n(w)`` of each other,
    so the radius bounds the distance to the coding-map limit whenever it exists.
    """
    w = model.check_word(w)
    if not w:
        raise ValueError("gamma needs a nonempty word")
    lo, hi = model.bounds
    if not lo <= x <= hi:
        raise DomainError(f"point {x} outside [{lo}, {hi}]")
    y = float(x)
    for c in reversed(w):
        m = model.maps[c]
        y = float(np.interp(y, m.xs, m.ys))
    radius = float(backward_diameter(model, np.asarray([w]))[0])
    return y, radius


@dataclass(frozen=True)
class AttractorSample:
    points: np.ndarray
    radii: np.ndarray
    trial_index: np.ndarray
    trials: int
    seed: int

    @property
    def certified(self) -> int:
        return int(self.points.size)

    @property
    def uncertified(self) -> int:
        return self.trials - self.certified

    @property
    def certified_fraction(self) -> float:
        return self.certified / self.trials

    def pairs(self) -> list[tuple[float, float]]:
        return list(zip(self.points.tolist(), self.radii.tolist()))


def attractor_sample(model: IfsModel, trials: int, depth: int, eps: float, seed: int,
                     x: float | None = None) -> AttractorSample:
    """Certified points of the coding-map image.

    Draws ``trials`` words of length ``depth`` (trial ``t`` seeded ``seed + t``)
    and keeps ``gamma(w, x)`` for the words with ``h_depth(w) < eps``. The rest
    are counted in :attr:`AttractorSample.uncertified` but emit no point.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if depth < 1:
        raise ValueError("depth must be at least 1")
    lo, hi = model.bounds
    if x is None:
        x = 0.5 * (lo + hi)
    words = sample_words(model, depth, trials, seed)
    pts = np.full(trials, float(x))
    for k in reversed(range(depth)):
        col = words[:, k]
        for lam, m in enumerate(model.maps):
            sel = col == lam
            if sel.any():
                pts[sel] = np.interp(pts[sel], m.xs, m.ys)
    radii = backward_diameter(model, words)
    ok = radii < eps
    return AttractorSample(points=pts[ok], radii=radii[ok], trial_index=np.flatnonzero(ok),
                           trials=trials, seed=seed)


def _directed(a: np.ndarray, b_sorted: np.ndarray) -> float:
    i = np.searchsorted(b_sorted, a)
    left = b_sorted[np.clip(i - 1, 0, b_sorted.size - 1)]
    right = b_sorted[np.clip(i, 0, b_sorted.size - 1)]
    return float(np.max(np.minimum(np.abs(a - left), np.abs(a - right))))


def hausdorff_distance(A, B) -> float:
    """Hausdorff distance between two finite nonempty subsets of the line."""
    a = np.sort(np.asarray(A, dtype=float).ravel())
    b = np.sort(np.asarray(B, dtype=float).ravel())
    if a.size == 0 or b.size == 0:
        raise ValueError("Hausdorff distance needs nonempty sets")
    return max(_directed(a, b), _directed(b, a))
