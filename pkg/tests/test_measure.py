import numpy as np
import pytest
from scipy.stats import wasserstein_distance

from ifsdyn import (
    DiscreteMeasure,
    IfsModel,
    PiecewiseLinearMap,
    consolidate,
    fixed_point,
    hutchinson_distance,
    moment,
    transfer_apply,
)

from conftest import random_model


def random_measure(rng, n=None):
    n = n or int(rng.integers(1, 40))
    return DiscreteMeasure(rng.uniform(0, 1, n), rng.dirichlet(np.ones(n)))


def atoms(mu):
    return dict(zip(mu.positions.tolist(), mu.weights.tolist()))


def test_measure_construction():
    mu = DiscreteMeasure([0.5, 0.1, 0.5], [0.25, 0.5, 0.25])
    assert atoms(mu) == {0.1: 0.5, 0.5: 0.5}
    with pytest.raises(ValueError):
        DiscreteMeasure([0.1], [0.9])
    with pytest.raises(ValueError):
        DiscreteMeasure([0.1, 0.2], [1.5, -0.5])
    with pytest.raises(ValueError):
        DiscreteMeasure([], [])


def test_transfer_examples(ex6, cantor):
    assert atoms(transfer_apply(ex6, DiscreteMeasure.dirac(0.0))) == {0.0: 1.0}
    assert atoms(transfer_apply(ex6, DiscreteMeasure.dirac(0.5))) == {0.25: 0.5, 1.0: 0.5}
    out = transfer_apply(cantor, DiscreteMeasure.dirac(0.0))
    np.testing.assert_allclose(out.positions, [0, 2 / 3], atol=1e-15)
    np.testing.assert_allclose(out.weights, [0.5, 0.5])


def test_transfer_mass_and_support(rng):
    for _ in range(300):
        model = random_model(rng)
        mu = random_measure(rng)
        for grid in (0.0, 1e-3, 0.07):
            out = transfer_apply(model, mu, grid)
            assert abs(out.total_mass - 1.0) <= 1e-10
            assert out.positions.min() >= 0.0 and out.positions.max() <= 1.0


def test_transfer_matches_pushforward_integrals(rng):
    """∫ g d(T mu) = sum_l p_l ∫ g∘w_l d mu for test functions g."""
    for _ in range(100):
        model = random_model(rng)
        mu = random_measure(rng)
        out = transfer_apply(model, mu)
        for g in (np.cos, np.square, lambda x: np.abs(x - 0.3)):
            lhs = np.dot(out.weights, g(out.positions))
            rhs = sum(p * np.dot(mu.weights, g(m(mu.positions))) for p, m in zip(model.weights, model.maps))
            assert lhs == pytest.approx(rhs, abs=1e-12)


def test_hutchinson_examples():
    assert hutchinson_distance(DiscreteMeasure.dirac(0), DiscreteMeasure.dirac(1)) == 1.0
    half = DiscreteMeasure([0, 1], [0.5, 0.5])
    assert hutchinson_distance(DiscreteMeasure.dirac(0), half) == 0.5
    assert hutchinson_distance(half, half) == 0.0


def test_hutchinson_matches_scipy(rng):
    for _ in range(300):
        mu, nu = random_measure(rng), random_measure(rng)
        ref = wasserstein_distance(mu.positions, nu.positions, mu.weights, nu.weights)
        assert hutchinson_distance(mu, nu) == pytest.approx(ref, abs=1e-12)


def test_hutchinson_lipschitz_lower_bound(rng):
    """No 1-Lipschitz test function separates the measures by more than L."""
    for _ in range(200):
        mu, nu = random_measure(rng), random_measure(rng)
        L = hutchinson_distance(mu, nu)
        for c in rng.uniform(0, 1, 5):
            f = lambda x: np.abs(x - c)
            gap = abs(np.dot(mu.weights, f(mu.positions)) - np.dot(nu.weights, f(nu.positions)))
            assert gap <= L + 1e-12
        # f(x) = x is 1-Lipschitz
        assert L >= abs(moment(mu, 1) - moment(nu, 1)) - 1e-12


def test_hutchinson_metric_axioms(rng):
    for _ in range(1000):
        a, b, c = random_measure(rng), random_measure(rng), random_measure(rng)
        dab = hutchinson_distance(a, b)
        assert dab == hutchinson_distance(b, a)
        assert hutchinson_distance(a, a) == 0.0
        assert hutchinson_distance(a, c) <= dab + hutchinson_distance(b, c) + 1e-10


def test_consolidation_error_bound(rng):
    for _ in range(300):
        mu = random_measure(rng, 200)
        grid = float(rng.choice([1e-4, 1e-3, 0.013, 0.1, 0.3]))
        snapped = consolidate(mu, grid, (0.0, 1.0))
        assert hutchinson_distance(snapped, mu) <= grid / 2 + 1e-12
        k = (snapped.positions / grid)
        on_grid = np.isclose(k, np.round(k), atol=1e-9) | (snapped.positions == 1.0)
        assert on_grid.all()


def test_cantor_contraction(rng, cantor):
    for _ in range(100):
        mu, nu = random_measure(rng), random_measure(rng)
        lhs = hutchinson_distance(transfer_apply(cantor, mu), transfer_apply(cantor, nu))
        assert lhs <= hutchinson_distance(mu, nu) / 3 + 1e-9


def test_moment_examples():
    assert moment(DiscreteMeasure.dirac(0.7), 1) == 0.7
    assert moment(DiscreteMeasure([0, 1], [0.5, 0.5]), 2) == 0.5
    assert moment(DiscreteMeasure([0.2, 0.9], [0.3, 0.7]), 0) == pytest.approx(1.0)


def test_fixed_point_single_contraction():
    model = IfsModel((PiecewiseLinearMap.affine(0.5, 0.0),), (1.0,))
    res = fixed_point(model, DiscreteMeasure.dirac(1.0), tol=1e-6, grid=1e-6)
    assert res.converged
    assert res.measure.mass_within(0.0, 1e-6) >= 1 - 1e-6


def test_fixed_point_cantor(cantor):
    res = fixed_point(cantor, DiscreteMeasure.dirac(0.0), tol=1e-6, grid=1e-5)
    assert res.converged
    assert moment(res.measure, 1) == pytest.approx(0.5, abs=1e-3)
    assert moment(res.measure, 2) == pytest.approx(0.375, abs=1e-3)
    resid = hutchinson_distance(transfer_apply(cantor, res.measure, 1e-5), res.measure)
    assert resid <= 1e-6 + 1e-5


def test_fixed_point_example6(ex6):
    res = fixed_point(ex6, DiscreteMeasure.uniform(0, 1, 1000), tol=1e-6, grid=1e-4, max_iter=5000)
    h = np.array(res.history)
    tail = h[len(h) // 2:]
    assert np.all(np.diff(tail) <= 0)
    assert res.measure.mass_within(0.0, 0.01) >= 0.99
    resid = hutchinson_distance(transfer_apply(ex6, res.measure, 1e-4), res.measure)
    assert resid <= 1e-6 + 1e-4


def test_fixed_point_reports_nonconvergence(ex6):
    res = fixed_point(ex6, tol=1e-9, max_iter=3, grid=1e-4)
    assert not res.converged and res.iterations == 3
    with pytest.raises(ValueError):
        fixed_point(ex6, grid=0.0)
