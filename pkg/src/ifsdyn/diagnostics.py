"""Diameter sequences of random compositions and finite-depth set estimators.

For a word ``w = (w_1, ..., w_n)``:

* ``f_k(w)`` is the diameter of ``X`` pushed through ``w_1`` first and ``w_k``
  last (orbit order);
* ``h_k(w)`` is the diameter of ``X`` pushed through ``w_k`` first and ``w_1``
  last (coding order). ``h_k`` is nonincreasing in ``k``.

The tail sets S (``h_n -> 0``), F (Cesaro mean of ``f_n -> 0``) and G
(``f_n -> 0``) cannot be observed at finite depth. The estimators below report
the probability of an explicit finite-depth surrogate instead; for S the
surrogate ``{h_n < eps}`` increases to ``{lim h_n < eps}`` as ``n`` grows, and
letting ``eps`` decrease to 0 recovers P(S).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .phase_space import compose_image, compose_maps, image_batch, range_of
from .symbolic import IfsModel, sample_words

ENUMERATION_CAP = 2**20
# composed maps with more vertices than this fall back to direct interval images
_MAX_COMPOSED_VERTICES = 256


class EnumerationCapError(ValueError):
    pass


@dataclass(frozen=True)
class DiamSeries:
    h: np.ndarray
    f: np.ndarray
    cesaro: np.ndarray

    def __len__(self):
        return len(self.h)

    @property
    def u(self) -> np.ndarray:
        """Partial sums ``u_k = f_1 + ... + f_k``."""
        return np.cumsum(self.f)

    def rows(self):
        for k, (h, f, c) in enumerate(zip(self.h, self.f, self.cesaro), start=1):
            yield k, float(h), float(f), float(c)


class Estimate(NamedTuple):
    estimate: float
    stderr: float


class Lemma1Check(NamedTuple):
    sum_f: float
    sum_h: float
    max_abs_diff: float


def diam_series(model: IfsModel, w: Sequence[int]) -> DiamSeries:
    """``h_k``, ``f_k`` and ``u_k / k`` for every prefix length ``k`` of ``w``.

    ``f`` is a left fold of interval images. ``h`` is obtained by extending the
    composed map ``g_k = w_1 ∘ ... ∘ w_k`` on the right one letter at a time and
    reading off the diameter of its range, so both directions cost one step per
    letter. Compositions that grow too many vertices (non-monotone maps can
    double their breakpoints each step) are finished by direct interval images.
    """
    w = model.check_word(w)
    if not w:
        raise ValueError("diam_series needs a nonempty word")
    n = len(w)
    maps = model.maps
    X = model.phase_space

    f = np.empty(n)
    cur = X
    for k, c in enumerate(w):
        cur = compose_image([maps[c]], cur)
        f[k] = cur.diameter

    h = np.empty(n)
    g = maps[w[0]]
    h[0] = range_of(g).diameter
    for k in range(1, n):
        if g is not None:
            g = compose_maps(g, maps[w[k]])
            if len(g.xs) > _MAX_COMPOSED_VERTICES:
                g = None
        if g is not None:
            h[k] = range_of(g).diameter
        else:
            h[k] = compose_image([maps[c] for c in reversed(w[: k + 1])], X).diameter

    # the composed images are nested; only rounding in the composition can break this
    np.minimum.accumulate(h, out=h)
    cesaro = np.cumsum(f) / np.arange(1, n + 1)
    return DiamSeries(h=h, f=f, cesaro=cesaro)


def _step_all(model: IfsModel, letters: np.ndarray, lo: np.ndarray, hi: np.ndarray):
    for lam, m in enumerate(model.maps):
        sel = letters == lam
        if sel.any():
            lo[sel], hi[sel] = image_batch(m, lo[sel], hi[sel])


def forward_diameters(model: IfsModel, words: np.ndarray) -> Iterator[np.ndarray]:
    """Yield ``f_k`` for ``k = 1..n`` across a batch of words (rows of ``words``)."""
    a, b = model.bounds
    lo = np.full(words.shape[0], a)
    hi = np.full(words.shape[0], b)
    for k in range(words.shape[1]):
        _step_all(model, words[:, k], lo, hi)
        yield hi - lo


def backward_diameter(model: IfsModel, words: np.ndarray) -> np.ndarray:
    """``h_n`` across a batch of words of common length ``n``."""
    a, b = model.bounds
    lo = np.full(words.shape[0], a)
    hi = np.full(words.shape[0], b)
    for k in reversed(range(words.shape[1])):
        _step_all(model, words[:, k], lo, hi)
    return hi - lo


def _all_words(n_maps: int, n: int) -> np.ndarray:
    """All ``n_maps**n`` words as rows, lexicographic order."""
    idx = np.arange(n_maps**n)
    powers = n_maps ** np.arange(n - 1, -1, -1)
    return (idx[:, None] // powers[None, :]) % n_maps


def lemma1_check(model: IfsModel, n: int, cap: int = ENUMERATION_CAP) -> Lemma1Check:
    """Exact ``E[f_n]`` and ``E[h_n]`` under the product measure, by full enumeration.

    Also compares ``f_n(w)`` with ``h_n(reverse(w))`` word by word and reports
    the largest absolute difference.
    """
    if n < 1:
        raise ValueError("depth must be at least 1")
    N = model.n_maps
    total = N**n
    if total > cap:
        raise EnumerationCapError(
            f"{N}^{n} = {total} words exceeds the enumeration cap {cap}; "
            "use the Monte-Carlo estimators instead"
        )
    words = _all_words(N, n)
    fn = None
    for fn in forward_diameters(model, words):
        pass
    hn = backward_diameter(model, words)

    p = np.asarray(model.weights)
    weight = np.prod(p[words], axis=1)
    # row index of reverse(w): the digits of w read backwards
    powers = N ** np.arange(n)
    rev_idx = words @ powers
    diff = float(np.max(np.abs(fn - hn[rev_idx])))
    sum_f = math.fsum((weight * fn).tolist())
    sum_h = math.fsum((weight * hn).tolist())
    return Lemma1Check(sum_f, sum_h, diff)


def _binomial(hits: np.ndarray) -> Estimate:
    trials = hits.size
    p = float(np.count_nonzero(hits)) / trials
    return Estimate(p, math.sqrt(p * (1.0 - p) / trials))


def _check_mc(eps: float, trials: int):
    if not eps > 0:
        raise ValueError("eps must be positive")
    if trials < 1:
        raise ValueError("trials must be at least 1")


def estimate_S_mass(model: IfsModel, n: int, eps: float, trials: int, seed: int) -> Estimate:
    """Fraction of sampled length-``n`` words with ``h_n < eps``.

    Trial ``t`` uses the word ``WordSampler(model, seed + t).sample(n)``; since
    those words are prefix-consistent and ``h_n`` is nonincreasing, the
    estimate is nondecreasing in ``n`` for a fixed seed.
    """
    _check_mc(eps, trials)
    words = sample_words(model, n, trials, seed)
    return _binomial(backward_diameter(model, words) < eps)


def estimate_F_mass(model: IfsModel, n: int, eps: float, trials: int, seed: int) -> Estimate:
    """Fraction of sampled words whose Cesaro mean ``u_n / n`` is below ``eps``."""
    _check_mc(eps, trials)
    words = sample_words(model, n, trials, seed)
    u = np.zeros(trials)
    for fk in forward_diameters(model, words):
        u += fk
    return _binomial(u / n < eps)


def estimate_G_mass(model: IfsModel, n: int, window_start: int | None, eps: float,
                    trials: int, seed: int) -> Estimate:
    """Fraction of sampled words with ``max(f_m : window_start <= m <= n) < eps``.

    A single ``f_n`` can dip and come back up, so the window maximum is used
    to expose recurrence. ``window_start`` defaults to ``n // 2``.
    """
    _check_mc(eps, trials)
    if window_start is None:
        window_start = max(1, n // 2)
    if not 1 <= window_start < n:
        raise ValueError("need 1 <= window_start < n")
    words = sample_words(model, n, trials, seed)
    peak = np.zeros(trials)
    for m, fm in enumerate(forward_diameters(model, words), start=1):
        if m >= window_start:
            np.maximum(peak, fm, out=peak)
    return _binomial(peak < eps)
