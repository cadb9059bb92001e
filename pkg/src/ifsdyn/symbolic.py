"""Finite parameter space, words over it, and the Bernoulli product measure.

Words are plain tuples of map indices. Infinite words are never materialized:
a :class:`WordSampler` is a ``(model, seed)`` pair whose prefixes are drawn on
demand, and longer prefixes always extend shorter ones.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .phase_space import Interval, PiecewiseLinearMap

Word = tuple[int, ...]

WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class IfsModel:
    """A finite family of self-maps of ``[lo, hi]`` chosen with probabilities ``weights``."""

    maps: tuple[PiecewiseLinearMap, ...]
    weights: tuple[float, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        maps = tuple(self.maps)
        weights = tuple(float(w) for w in self.weights)
        object.__setattr__(self, "maps", maps)
        object.__setattr__(self, "weights", weights)
        if not maps:
            raise ValueError("an IFS needs at least one map")
        if len(weights) != len(maps):
            raise ValueError(f"{len(maps)} maps but {len(weights)} weights")
        if any(w < 0 or not math.isfinite(w) for w in weights):
            raise ValueError("weights must be finite and nonnegative")
        if abs(math.fsum(weights) - 1.0) > WEIGHT_TOL:
            raise ValueError(f"weights sum to {math.fsum(weights)!r}, not 1")
        b = maps[0].bounds
        if any(m.bounds != b for m in maps):
            raise ValueError("all maps must share the same phase space")

    @property
    def n_maps(self) -> int:
        return len(self.maps)

    @property
    def bounds(self) -> tuple[float, float]:
        return self.maps[0].bounds

    @property
    def phase_space(self) -> Interval:
        return Interval(*self.bounds)

    @property
    def diameter(self) -> float:
        lo, hi = self.bounds
        return hi - lo

    def with_weights(self, weights: Sequence[float]) -> "IfsModel":
        return IfsModel(self.maps, tuple(weights), self.name)

    def check_word(self, w: Sequence[int]) -> Word:
        w = tuple(int(c) for c in w)
        for c in w:
            if not 0 <= c < self.n_maps:
                raise ValueError(f"letter {c} out of range for {self.n_maps} maps")
        return w

    def to_dict(self) -> dict:
        lo, hi = self.bounds
        return {
            "phase_space": {"lo": lo, "hi": hi},
            "maps": [m.to_dict() for m in self.maps],
            "weights": list(self.weights),
        }


def shift(w: Sequence[int]) -> Word:
    """Drop the first letter."""
    if len(w) == 0:
        raise ValueError("cannot shift the empty word")
    return tuple(w[1:])


def reverse(w: Sequence[int]) -> Word:
    return tuple(reversed(w))


def cylinder_weight(model: IfsModel, w: Sequence[int]) -> float:
    """Product-measure mass of the cylinder of words starting with ``w``."""
    p = model.weights
    return math.prod(p[c] for c in w)


def enumerate_words(n_maps: int, n: int) -> Iterator[Word]:
    """All words of length ``n`` in lexicographic order."""
    return itertools.product(range(n_maps), repeat=n)


def word_distance(sigma: Sequence[int], xi: Sequence[int]) -> float:
    """``sup_n rho(sigma_n, xi_n) / n`` with the discrete metric on letters.

    Positions are 1-indexed, so this is ``1/k`` for the first mismatch ``k``.
    """
    if len(sigma) != len(xi):
        raise ValueError(f"length mismatch: {len(sigma)} vs {len(xi)}")
    for k, (a, b) in enumerate(zip(sigma, xi), start=1):
        if a != b:
            return 1.0 / k
    return 0.0


@dataclass(frozen=True)
class WordSampler:
    """Seeded i.i.d. letter stream with law ``model.weights``.

    Uses numpy's PCG64 generator seeded with ``seed``; letter ``k`` is the
    inverse-CDF image of the ``k``-th uniform double, so prefixes are
    consistent across lengths. Trial ``t`` of an estimator uses ``seed + t``.
    """

    model: IfsModel
    seed: int

    def sample(self, n: int) -> Word:
        return tuple(self.sample_array(n).tolist())

    def sample_array(self, n: int) -> np.ndarray:
        if n < 0:
            raise ValueError("word length must be nonnegative")
        u = np.random.default_rng(self.seed).random(n)
        return _letters_from_uniforms(self.model.weights, u)

    def trial(self, t: int) -> "WordSampler":
        return WordSampler(self.model, self.seed + t)


def sample_word(sampler: WordSampler, n: int) -> Word:
    return sampler.sample(n)


def _letters_from_uniforms(weights: Sequence[float], u: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(weights)
    cdf[-1] = 1.0
    letters = np.searchsorted(cdf, u, side="right")
    return np.minimum(letters, len(weights) - 1).astype(np.int64)


def sample_words(model: IfsModel, n: int, trials: int, seed: int) -> np.ndarray:
    """Matrix of ``trials`` words of length ``n``; row ``t`` is ``WordSampler(model, seed + t).sample(n)``."""
    out = np.empty((trials, n), dtype=np.int64)
    w = model.weights
    for t in range(trials):
        out[t] = _letters_from_uniforms(w, np.random.default_rng(seed + t).random(n))
    return out
