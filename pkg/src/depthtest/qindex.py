"""Relative deepness ranks and the Liu-Singh quality index."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .depth import MAHALANOBIS, DepthContext, DepthSpec, as_data_matrix, make_context
from .errors import DimensionMismatch, EmptyInput


@dataclass(frozen=True)
class QPair:
    """Quality indices in both orientations.

    ``q_fg`` uses the first sample as reference, ``q_gf`` the second.
    """

    q_fg: float
    q_gf: float
    m: int
    n: int
    depth: DepthSpec = MAHALANOBIS

    def __post_init__(self):
        for name in ("q_fg", "q_gf"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} = {v} outside [0, 1]")

    @property
    def centered(self) -> tuple[float, float]:
        return self.q_fg - 0.5, self.q_gf - 0.5


def _rank_counts(query_depths: np.ndarray, ctx: DepthContext) -> np.ndarray:
    # number of reference depths <= each query depth
    return np.searchsorted(ctx.sorted_reference_depths, query_depths, side="right")


def relative_rank(y, ctx: DepthContext) -> float:
    """Fraction of reference points whose depth does not exceed the depth of ``y``."""
    d_y = ctx.depths(np.atleast_1d(np.asarray(y, dtype=float)).reshape(1, -1))
    return int(_rank_counts(d_y, ctx)[0]) / ctx.m


def relative_ranks(points, ctx: DepthContext) -> np.ndarray:
    return _rank_counts(ctx.depths(points), ctx) / ctx.m


def _other_matrix(other, ctx: DepthContext) -> np.ndarray:
    y = as_data_matrix(other)
    if y.shape[0] == 0:
        raise EmptyInput("quality index over an empty sample")
    if y.shape[1] != ctx.d:
        raise DimensionMismatch(f"samples have dimensions {ctx.d} and {y.shape[1]}")
    return y


def quality_index_ctx(ctx: DepthContext, other) -> float:
    y = _other_matrix(other, ctx)
    total = int(_rank_counts(ctx.depths(y), ctx).sum())
    return total / (ctx.m * y.shape[0])


def quality_index(reference, other, spec: DepthSpec = MAHALANOBIS) -> float:
    """Mean relative rank of the rows of ``other`` with respect to ``reference``.

    Reference depths are sorted once and each query depth is located by binary
    search, giving O((m + n) log m) comparisons after the depth evaluations.
    """
    return quality_index_ctx(make_context(reference, spec), other)


def quality_index_bruteforce(reference, other, spec: DepthSpec = MAHALANOBIS) -> float:
    """Reference implementation of :func:`quality_index` by an explicit double loop."""
    ctx = make_context(reference, spec)
    y = _other_matrix(other, ctx)
    x = ctx.reference
    ref_depths = [float(ctx.depths(x[i:i + 1])[0]) for i in range(ctx.m)]
    total = 0
    for j in range(y.shape[0]):
        d_y = float(ctx.depths(y[j:j + 1])[0])
        for i in range(ctx.m):
            if ref_depths[i] <= d_y:
                total += 1
    return total / (ctx.m * y.shape[0])


def q_pair(sample_x, sample_y, spec: DepthSpec = MAHALANOBIS) -> QPair:
    x = as_data_matrix(sample_x)
    y = as_data_matrix(sample_y)
    if x.shape[1] != y.shape[1]:
        raise DimensionMismatch(f"samples have dimensions {x.shape[1]} and {y.shape[1]}")
    return QPair(
        quality_index(x, y, spec),
        quality_index(y, x, spec),
        x.shape[0],
        y.shape[0],
        spec,
    )
