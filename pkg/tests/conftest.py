import numpy as np
import pytest

from ifsdyn import IfsModel, PiecewiseLinearMap, cantor_ifs, example6, malicet_ifs

MASTER_SEED = 20261015


def random_pwl(rng, max_inner=3, bounds=(0.0, 1.0)):
    lo, hi = bounds
    k = int(rng.integers(0, max_inner + 1))
    xs = np.concatenate([[lo], np.sort(rng.uniform(lo, hi, k)), [hi]])
    xs = np.unique(xs)
    ys = rng.uniform(lo, hi, xs.size)
    return PiecewiseLinearMap(np.column_stack([xs, ys]), bounds=bounds)


def random_model(rng, n_maps=None, max_inner=2):
    n_maps = n_maps or int(rng.integers(1, 4))
    maps = tuple(random_pwl(rng, max_inner) for _ in range(n_maps))
    p = rng.dirichlet(np.ones(n_maps))
    p[-1] = 1.0 - p[:-1].sum()
    return IfsModel(maps, tuple(p))


@pytest.fixture
def rng():
    return np.random.default_rng(MASTER_SEED)


@pytest.fixture
def ex6():
    return example6()


@pytest.fixture
def cantor():
    return cantor_ifs()


@pytest.fixture
def malicet():
    return malicet_ifs()


@pytest.fixture
def constant_model():
    return IfsModel((PiecewiseLinearMap.constant(0.3),), (1.0,))


@pytest.fixture(params=["example6", "cantor", "malicet"])
def gallery_model(request):
    return {"example6": example6, "cantor": cantor_ifs, "malicet": malicet_ifs}[request.param]()
