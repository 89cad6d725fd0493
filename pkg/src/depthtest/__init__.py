"""Depth-based nonparametric two-sample homogeneity tests."""

from .calibrate import (NullEnsemble, empirical_critical_value, empirical_pvalue, parametric_null,
                        permutation_null)
from .depth import MAHALANOBIS, PROJECTION, SPATIAL, DepthContext, DepthKind, DepthSpec, make_context
from .qindex import QPair, q_pair, quality_index, quality_index_bruteforce, relative_rank
from .sampler import MVN, Mixture, SeedSpec, mvn, sample
from .teststat import (StatSpec, TestResult, e_statistic, evaluate, m_statistic, r_statistic, region_boundary,
                       w_statistic)

__version__ = "0.1.0"


def two_sample_test(x, y, stat: StatSpec | None = None, depth: DepthSpec = MAHALANOBIS, alpha: float = 0.05,
                    permutations: int = 0, seed: int = 0, workers: int = 1) -> TestResult:
    """Run one two-sample test; ``permutations > 0`` adds a permutation p-value."""
    stat = stat or StatSpec.E()
    q = q_pair(x, y, depth)
    result = evaluate(q, stat, alpha)
    if permutations:
        ens = permutation_null(x, y, stat, depth, permutations, seed, workers)
        result = result.with_empirical(empirical_pvalue(result.value, ens))
    return result


__all__ = [
    "DepthContext", "DepthKind", "DepthSpec", "MAHALANOBIS", "MVN", "Mixture", "NullEnsemble", "PROJECTION",
    "QPair", "SPATIAL", "SeedSpec", "StatSpec", "TestResult", "e_statistic", "empirical_critical_value",
    "empirical_pvalue", "evaluate", "m_statistic", "make_context", "mvn", "parametric_null", "permutation_null",
    "q_pair", "quality_index", "quality_index_bruteforce", "r_statistic", "region_boundary", "relative_rank",
    "sample", "two_sample_test", "w_statistic",
]
