"""Sample depth functions: Mahalanobis, spatial (L1) and projection depth.

A :class:`DepthContext` holds everything that depends only on the reference
sample (mean, covariance factor, projection directions with their medians
and MADs, and the depths of the reference points themselves), so that
repeated queries are cheap.

All kernels are written so that the depth of a row never depends on which
other rows are evaluated alongside it.  The quality index relies on this to
compare depth values for exact equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DegenerateSample, DimensionMismatch, DomainError, NotPositiveDefinite, TooFewRows, ZeroSpread
from .numkit import cholesky, forward_substitute
from .sampler import SeedSpec, standard_normals

# rows of queries handled per spatial-depth block; bounds peak memory
_SPATIAL_BLOCK_ELEMS = 4_000_000


class DepthKind(str, Enum):
    MAHALANOBIS = "mahalanobis"
    SPATIAL = "spatial"
    PROJECTION = "projection"


@dataclass(frozen=True)
class DepthSpec:
    kind: DepthKind = DepthKind.MAHALANOBIS
    directions: int = 500
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", DepthKind(self.kind))
        if self.kind is DepthKind.PROJECTION and self.directions < 1:
            raise DomainError("projection depth needs at least one direction")

    @property
    def label(self) -> str:
        return self.kind.value

    def to_dict(self) -> dict:
        doc = {"kind": self.kind.value}
        if self.kind is DepthKind.PROJECTION:
            doc.update(directions=self.directions, seed=self.seed)
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "DepthSpec":
        return cls(DepthKind(doc["kind"]), int(doc.get("directions", 500)), int(doc.get("seed", 0)))


MAHALANOBIS = DepthSpec(DepthKind.MAHALANOBIS)
SPATIAL = DepthSpec(DepthKind.SPATIAL)
PROJECTION = DepthSpec(DepthKind.PROJECTION)


@dataclass(frozen=True, eq=False)
class DepthContext:
    spec: DepthSpec
    reference: np.ndarray
    mean: np.ndarray
    chol: np.ndarray | None = None
    directions: np.ndarray | None = None
    proj_median: np.ndarray | None = None
    proj_mad: np.ndarray | None = None
    reference_depths: np.ndarray = field(default=None, repr=False)
    sorted_reference_depths: np.ndarray = field(default=None, repr=False)

    @property
    def m(self) -> int:
        return self.reference.shape[0]

    @property
    def d(self) -> int:
        return self.reference.shape[1]

    def depths(self, points) -> np.ndarray:
        return depths(points, self)


def as_data_matrix(sample) -> np.ndarray:
    a = np.asarray(sample, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2:
        raise DimensionMismatch(f"expected an n x d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError("sample has non-finite entries")
    return a


def unit_directions(d: int, count: int, seed: int) -> np.ndarray:
    """``count`` seeded uniform unit vectors in R^d (exactly ``[[1.0]]`` for d = 1)."""
    if d == 1:
        return np.ones((1, 1))
    rng = SeedSpec(seed, 0, (0x9D,)).generator()
    u = standard_normals(rng, count * d).reshape(count, d)
    return u / np.sqrt((u * u).sum(axis=1))[:, None]


def _project(points: np.ndarray, directions: np.ndarray) -> np.ndarray:
    # explicit accumulation over coordinates keeps each row independent of the batch
    out = points[:, 0, None] * directions[None, :, 0]
    for j in range(1, points.shape[1]):
        out = out + points[:, j, None] * directions[None, :, j]
    return out


def make_context(sample, spec: DepthSpec = MAHALANOBIS) -> DepthContext:
    """Precompute the reference-only quantities of ``spec`` for ``sample``.

    Raises
    ------
    TooFewRows
        Fewer than two observations.
    DegenerateSample
        Singular sample covariance (Mahalanobis only).
    ZeroSpread
        A projected sample has zero MAD (projection only).
    """
    ref = as_data_matrix(sample)
    m, d = ref.shape
    if m < 2:
        raise TooFewRows(f"reference sample needs at least 2 rows, got {m}")
    mean = ref.mean(axis=0)
    kw = {}
    if spec.kind is DepthKind.MAHALANOBIS:
        centered = ref - mean
        cov = centered.T @ centered / (m - 1)
        cov = 0.5 * (cov + cov.T)
        try:
            kw["chol"] = cholesky(cov)
        except NotPositiveDefinite as exc:
            raise DegenerateSample(f"sample covariance is singular: {exc}") from exc
    elif spec.kind is DepthKind.PROJECTION:
        dirs = unit_directions(d, spec.directions, spec.seed)
        proj = _project(ref, dirs)
        med = np.median(proj, axis=0)
        spread = np.median(np.abs(proj - med), axis=0)
        scale = float(np.max(np.abs(ref - mean)))
        if np.any(spread <= 1e-12 * scale):
            k = int(np.argmin(spread))
            raise ZeroSpread(f"projected sample along direction {k} has zero MAD")
        kw.update(directions=dirs, proj_median=med, proj_mad=spread)
    ctx = DepthContext(spec, ref, mean, **kw)
    ref_depths = depths(ref, ctx)
    object.__setattr__(ctx, "reference_depths", ref_depths)
    object.__setattr__(ctx, "sorted_reference_depths", np.sort(ref_depths))
    return ctx


def _check_points(points, ctx: DepthContext) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None] if ctx.d == 1 and pts.size != 1 else pts[None, :]
    if pts.ndim != 2 or pts.shape[1] != ctx.d:
        raise DimensionMismatch(f"points have shape {np.shape(points)}, reference dimension is {ctx.d}")
    return pts


def _mahalanobis(pts: np.ndarray, ctx: DepthContext) -> np.ndarray:
    z = forward_substitute(ctx.chol, pts - ctx.mean)
    q = z[:, 0] * z[:, 0]
    for j in range(1, z.shape[1]):
        q = q + z[:, j] * z[:, j]
    return 1.0 / (1.0 + q)


def _spatial(pts: np.ndarray, ctx: DepthContext) -> np.ndarray:
    ref_t = ctx.reference.T  # (d, m)
    m, d = ctx.m, ctx.d
    out = np.empty(pts.shape[0])
    block = max(1, _SPATIAL_BLOCK_ELEMS // (m * d))
    for start in range(0, pts.shape[0], block):
        q = pts[start:start + block]
        diff = q[:, :, None] - ref_t[None, :, :]  # (b, d, m)
        norm2 = diff[:, 0, :] * diff[:, 0, :]
        for j in range(1, d):
            norm2 = norm2 + diff[:, j, :] * diff[:, j, :]
        norm = np.sqrt(norm2)
        # coincident points contribute the zero vector; divisor stays m
        inv = np.divide(1.0, norm, out=np.zeros_like(norm), where=norm > 0)
        mean_unit = (diff * inv[:, None, :]).sum(axis=2) / m  # (b, d)
        length2 = mean_unit[:, 0] * mean_unit[:, 0]
        for j in range(1, d):
            length2 = length2 + mean_unit[:, j] * mean_unit[:, j]
        out[start:start + block] = 1.0 - np.sqrt(length2)
    return out


def _projection(pts: np.ndarray, ctx: DepthContext) -> np.ndarray:
    proj = _project(pts, ctx.directions)
    outlying = np.max(np.abs(proj - ctx.proj_median) / ctx.proj_mad, axis=1)
    return 1.0 / (1.0 + outlying)


_KERNELS = {
    DepthKind.MAHALANOBIS: _mahalanobis,
    DepthKind.SPATIAL: _spatial,
    DepthKind.PROJECTION: _projection,
}


def depths(points, ctx: DepthContext) -> np.ndarray:
    """Depth of every row of ``points`` with respect to the context's sample."""
    pts = _check_points(points, ctx)
    return _KERNELS[ctx.spec.kind](pts, ctx)


def _single(x, ctx: DepthContext, kind: DepthKind) -> float:
    if ctx.spec.kind is not kind:
        raise DomainError(f"context was built for {ctx.spec.kind.value} depth, not {kind.value}")
    pts = np.atleast_1d(np.asarray(x, dtype=float))
    if pts.ndim != 1 or pts.size != ctx.d:
        raise DimensionMismatch(f"point has dimension {pts.size}, reference dimension is {ctx.d}")
    return float(_KERNELS[kind](pts[None, :], ctx)[0])


def mahalanobis_depth(x, ctx: DepthContext) -> float:
    """``1 / (1 + (x - mean)' S^-1 (x - mean))`` with sample mean and covariance."""
    return _single(x, ctx, DepthKind.MAHALANOBIS)


def spatial_depth(x, ctx: DepthContext) -> float:
    return _single(x, ctx, DepthKind.SPATIAL)


def projection_depth(x, ctx: DepthContext) -> float:
    """``1 / (1 + O(x))`` with the outlyingness maximised over the context's directions."""
    return _single(x, ctx, DepthKind.PROJECTION)


def depth(x, ctx: DepthContext) -> float:
    return _single(x, ctx, ctx.spec.kind)
