"""Numerics for random iterated function systems on an interval.

Diameter diagnostics of random compositions, the transfer operator and its
invariant measure, chaos-game averages and the coding map, plus exact oracles
for small instances.
"""
from .diagnostics import (
    DiamSeries,
    EnumerationCapError,
    Estimate,
    diam_series,
    estimate_F_mass,
    estimate_G_mass,
    estimate_S_mass,
    lemma1_check,
)
from .ergodic import (
    AttractorSample,
    Monomial,
    PiecewiseLinearObservable,
    SkewState,
    attractor_sample,
    birkhoff_average,
    chaos_game,
    gamma,
    hausdorff_distance,
    orbit,
    skew_step,
)
from .gallery import (
    PRESETS,
    WalkDistribution,
    cantor_ifs,
    example6,
    example6_return_prob,
    example6_walk_dp,
    malicet_ifs,
    preset,
)
from .measure import (
    DiscreteMeasure,
    FixedPointResult,
    consolidate,
    fixed_point,
    hutchinson_distance,
    moment,
    transfer_apply,
)
from .phase_space import (
    DomainError,
    Interval,
    PiecewiseLinearMap,
    compose_image,
    compose_maps,
    evaluate,
    image_interval,
)
from .symbolic import (
    IfsModel,
    Word,
    WordSampler,
    cylinder_weight,
    enumerate_words,
    reverse,
    sample_word,
    shift,
    word_distance,
)

__version__ = "0.1.0"
