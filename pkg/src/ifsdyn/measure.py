"""Finite atomic probability measures, the transfer operator and its fixed point."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .symbolic import IfsModel

MASS_TOL = 1e-10


class DiscreteMeasure:
    """Probability measure with finitely many atoms, stored sorted and merged.

    Parameters
    ----------
    positions, weights : array_like
        Atom locations and masses. Duplicate locations are merged; zero-mass
        atoms are dropped. Masses must be nonnegative and sum to 1.
    """

    __slots__ = ("positions", "weights")

    def __init__(self, positions, weights):
        x = np.asarray(positions, dtype=float).ravel()
        w = np.asarray(weights, dtype=float).ravel()
        if x.shape != w.shape:
            raise ValueError("positions and weights differ in length")
        if x.size == 0:
            raise ValueError("a probability measure needs at least one atom")
        if np.any(w < 0) or not np.all(np.isfinite(w)) or not np.all(np.isfinite(x)):
            raise ValueError("weights must be finite and nonnegative")
        if abs(w.sum() - 1.0) > MASS_TOL:
            raise ValueError(f"total mass {w.sum()!r} is not 1")
        x, w = _merge(x, w)
        x.flags.writeable = False
        w.flags.writeable = False
        self.positions = x
        self.weights = w

    @classmethod
    def dirac(cls, x: float) -> "DiscreteMeasure":
        return cls([x], [1.0])

    @classmethod
    def uniform(cls, lo: float, hi: float, n: int) -> "DiscreteMeasure":
        """``n`` equal atoms evenly spaced over ``[lo, hi]`` (endpoints included)."""
        if n == 1:
            return cls.dirac(0.5 * (lo + hi))
        return cls(np.linspace(lo, hi, n), np.full(n, 1.0 / n))

    @classmethod
    def empirical(cls, points) -> "DiscreteMeasure":
        pts = np.asarray(points, dtype=float).ravel()
        return cls(pts, np.full(pts.size, 1.0 / pts.size))

    def __len__(self):
        return self.positions.size

    def __repr__(self):
        return f"DiscreteMeasure(<{len(self)} atoms>)"

    @property
    def total_mass(self) -> float:
        return math.fsum(self.weights.tolist())

    def mass_within(self, center: float, radius: float) -> float:
        sel = np.abs(self.positions - center) <= radius
        return float(self.weights[sel].sum())

    def cdf(self, t) -> np.ndarray:
        """Right-continuous distribution function at ``t``."""
        cum = np.concatenate([[0.0], np.cumsum(self.weights)])
        return cum[np.searchsorted(self.positions, t, side="right")]


def _merge(x: np.ndarray, w: np.ndarray):
    keep = w > 0
    x, w = x[keep], w[keep]
    if x.size == 0:
        raise ValueError("all atoms have zero mass")
    ux, inv = np.unique(x, return_inverse=True)
    if ux.size == x.size:
        order = np.argsort(x, kind="stable")
        return x[order], w[order]
    return ux, np.bincount(inv, weights=w, minlength=ux.size)


def _from_trusted(x: np.ndarray, w: np.ndarray) -> DiscreteMeasure:
    # skips the mass check; used where mass is preserved by construction
    m = DiscreteMeasure.__new__(DiscreteMeasure)
    x, w = _merge(x, w)
    x.flags.writeable = False
    w.flags.writeable = False
    m.positions, m.weights = x, w
    return m


def consolidate(mu: DiscreteMeasure, grid: float, bounds: tuple[float, float]) -> DiscreteMeasure:
    """Snap every atom to the nearest point of ``lo + grid * Z`` inside ``[lo, hi]`` and merge.

    Each atom moves by at most ``grid / 2``, so the result is within ``grid / 2``
    of ``mu`` in Hutchinson distance.
    """
    if grid <= 0:
        return mu
    lo, hi = bounds
    snapped = lo + np.round((mu.positions - lo) / grid) * grid
    # the top grid point may overshoot hi; clipping moves the atom less, not more
    np.clip(snapped, lo, hi, out=snapped)
    return _from_trusted(snapped, mu.weights.copy())


def transfer_apply(model: IfsModel, mu: DiscreteMeasure, grid: float = 0.0) -> DiscreteMeasure:
    """One application of the transfer operator: ``sum_l p_l * (w_l)_* mu``.

    With ``grid > 0`` the result is consolidated onto a grid of that spacing.
    """
    if grid < 0:
        raise ValueError("grid must be nonnegative")
    xs, ws = [], []
    for p, m in zip(model.weights, model.maps):
        if p == 0.0:
            continue
        xs.append(np.interp(mu.positions, m.xs, m.ys))
        ws.append(p * mu.weights)
    out = _from_trusted(np.concatenate(xs), np.concatenate(ws))
    return consolidate(out, grid, model.bounds) if grid > 0 else out


def hutchinson_distance(mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
    """Hutchinson (Wasserstein-1) distance via ``∫ |F_mu - F_nu| dt``.

    On an interval the supremum over 1-Lipschitz test functions equals this
    integral; both CDFs are step functions so the integral is a finite sum over
    the merged atom locations.
    """
    t = np.union1d(mu.positions, nu.positions)
    if t.size < 2:
        return 0.0
    gap = np.abs(mu.cdf(t[:-1]) - nu.cdf(t[:-1]))
    return float(np.dot(gap, np.diff(t)))


def moment(mu: DiscreteMeasure, k: int) -> float:
    if k < 0:
        raise ValueError("moment order must be nonnegative")
    return math.fsum((mu.weights * mu.positions**k).tolist())


@dataclass
class FixedPointResult:
    measure: DiscreteMeasure
    history: list[float]
    atom_counts: list[int] = field(default_factory=list)
    converged: bool = False

    @property
    def iterations(self) -> int:
        return len(self.history)


def fixed_point(model: IfsModel, nu0: DiscreteMeasure | None = None, tol: float = 1e-6,
                max_iter: int = 10_000, grid: float = 1e-5) -> FixedPointResult:
    """Iterate the transfer operator until successive iterates are ``tol``-close.

    Non-convergence within ``max_iter`` is reported through ``converged=False``
    rather than raised; ``history`` holds the successive distances so callers
    can judge the run. The stopping rule is a Cauchy criterion, not a bound on
    the distance to the true invariant measure.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if not grid > 0:
        raise ValueError("grid must be positive (consolidation bounds the atom count)")
    if nu0 is None:
        lo, hi = model.bounds
        nu0 = DiscreteMeasure.dirac(0.5 * (lo + hi))
    mu = nu0
    res = FixedPointResult(measure=mu, history=[])
    for _ in range(max_iter):
        nxt = transfer_apply(model, mu, grid)
        d = hutchinson_distance(nxt, mu)
        res.history.append(d)
        res.atom_counts.append(len(nxt))
        mu = nxt
        if d < tol:
            res.converged = True
            break
    res.measure = mu
    return res
