"""Preset systems and exact oracles for the halving/doubling example.

For the halving/doubling system every forward image of ``[0, 1]`` has the
form ``[0, b]``: the halving map sends it to ``[0, b/2]`` and the clipped
doubling map to ``[0, min(2b, 1)]``. So ``s_k = log2 f_k`` is a walk on the
nonpositive integers that steps down on letter 0 and up (capped at 0) on
letter 1. The dynamic programs below track that walk exactly. They are an
independent oracle: production diameters always come from interval images.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .phase_space import PiecewiseLinearMap
from .symbolic import IfsModel


def example6(p1: float = 0.5) -> IfsModel:
    """``x/2`` and ``min(2x, 1)`` on ``[0, 1]``; letter 1 has probability ``p1``."""
    halve = PiecewiseLinearMap([(0.0, 0.0), (1.0, 0.5)])
    double = PiecewiseLinearMap([(0.0, 0.0), (0.5, 1.0), (1.0, 1.0)])
    return IfsModel((halve, double), (1.0 - p1, p1), name="example6")


def cantor_ifs() -> IfsModel:
    return IfsModel(
        (PiecewiseLinearMap.affine(1 / 3, 0.0), PiecewiseLinearMap.affine(1 / 3, 2 / 3)),
        (0.5, 0.5),
        name="cantor",
    )


def malicet_ifs() -> IfsModel:
    """Two increasing homeomorphisms of ``[0, 1]`` without a common fixed point.

    The first map has a piece of slope 2, so the system is not contracting.
    """
    w0 = PiecewiseLinearMap([(0.0, 0.0), (0.25, 0.5), (1.0, 0.75)])
    w1 = PiecewiseLinearMap([(0.0, 0.25), (0.75, 0.5), (1.0, 1.0)])
    return IfsModel((w0, w1), (0.5, 0.5), name="malicet")


PRESETS = {
    "example6": example6,
    "cantor": cantor_ifs,
    "malicet": malicet_ifs,
}


def preset(name: str) -> IfsModel:
    try:
        return PRESETS[name]()
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None


@dataclass(frozen=True)
class WalkDistribution:
    """Law of ``s_n``; ``probs[j]`` is ``P(s_n = -j)`` for ``j = 0..n``."""

    n: int
    probs: np.ndarray

    @property
    def states(self) -> list[tuple[int, float]]:
        return [(-j, float(q)) for j, q in enumerate(self.probs) if q > 0]

    @property
    def diameters(self) -> np.ndarray:
        return 2.0 ** -np.arange(self.n + 1, dtype=float)

    def mean_diameter(self) -> float:
        """``E[2**s_n]``, i.e. the integral of ``f_n`` (and of ``h_n``)."""
        return float(np.dot(self.probs, self.diameters))

    def prob_diameter_below(self, eps: float) -> float:
        """``P(2**s_n < eps)``."""
        return float(self.probs[self.diameters < eps].sum())


def _walk_step(v: np.ndarray, p: float) -> np.ndarray:
    # index j holds P(s = -j); letter 0 moves j -> j + 1, letter 1 moves j -> max(j - 1, 0)
    out = np.zeros(v.size + 1)
    out[1:] += (1.0 - p) * v
    out[: v.size - 1] += p * v[1:]
    out[0] += p * v[0]
    return out


def example6_walk_dp(n: int, p: float = 0.5) -> WalkDistribution:
    """Exact distribution of the log-diameter walk after ``n`` letters.

    ``p`` is the probability of letter 1 (the doubling map).
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    v = np.ones(1)
    for _ in range(n):
        v = _walk_step(v, p)
    return WalkDistribution(n, v)


def example6_return_prob(window_start: int, n: int, p: float = 0.5) -> float:
    """Probability that the walk sits at state 0 at some time ``m`` in ``[window_start, n]``.

    Equivalently, that ``f_m = 1`` somewhere in the window. Mass that reaches
    state 0 inside the window is moved to an absorbing "visited" account, which
    is the (state, visited-flag) dynamic program with the flagged half summed out.
    """
    if not 0 <= window_start < n:
        raise ValueError("need 0 <= window_start < n")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    v = np.ones(1)
    for _ in range(window_start):
        v = _walk_step(v, p)
    visited = 0.0
    for m in range(window_start, n + 1):
        visited += v[0]
        v[0] = 0.0
        if m < n:
            v = _walk_step(v, p)
    return float(visited)
