"""Empirical null distributions, critical values and p-values.

Two ways of simulating the null are offered: permutations of the pooled
sample, and fresh draws from an explicit null distribution.  Each replicate
``b`` gets its own random stream derived from ``(master_seed, b)``, so an
ensemble is identical for any number of workers.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from functools import partial
from typing import Sequence

import numpy as np

from ._parallel import indexed_map
from .depth import DepthSpec, as_data_matrix
from .errors import DepthTestError, DimensionMismatch, DomainError, EmptyEnsemble, InsufficientReplicates, ReplicateError
from .qindex import QPair, q_pair
from .sampler import Distribution, SeedSpec, as_seed, sample
from .teststat import StatSpec, statistic

PERMUTATION = "permutation"
PARAMETRIC = "parametric"

_PERM_TAG = 0x50
_NULL_TAG = 0x4E


@dataclass(frozen=True, eq=False)
class NullEnsemble:
    spec: StatSpec
    replicates: np.ndarray
    method: str
    seed: SeedSpec
    m: int
    n: int
    depth: DepthSpec | None = None

    def __post_init__(self):
        r = np.asarray(self.replicates, dtype=float)
        if r.ndim != 1 or r.size < 1:
            raise EmptyEnsemble("a null ensemble needs at least one replicate")
        if not np.all(np.isfinite(r)) or np.any(r < 0):
            raise DomainError("replicates must be finite and non-negative")
        object.__setattr__(self, "replicates", r)

    @property
    def B(self) -> int:
        return self.replicates.size

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["replicate_index", "value"])
        for i, v in enumerate(self.replicates):
            w.writerow([i, repr(float(v))])
        return buf.getvalue()


def _guard(index: int, fn, *args):
    try:
        return fn(*args)
    except DepthTestError as exc:
        raise ReplicateError(index, exc) from exc


def _permutation_replicate(pooled: np.ndarray, m: int, depths: tuple[DepthSpec, ...], seed: SeedSpec,
                           b: int) -> tuple[QPair, ...]:
    rng = seed.stream(b).child(_PERM_TAG).generator()
    perm = rng.permutation(pooled.shape[0])
    x, y = pooled[perm[:m]], pooled[perm[m:]]
    return tuple(_guard(b, q_pair, x, y, d) for d in depths)


def _parametric_replicate(dist: Distribution, m: int, n: int, depths: tuple[DepthSpec, ...],
                          seed: SeedSpec, b: int) -> tuple[QPair, ...]:
    s = seed.stream(b).child(_NULL_TAG)
    x = sample(dist, m, s.child(0))
    y = sample(dist, n, s.child(1))
    return tuple(_guard(b, q_pair, x, y, d) for d in depths)


def permutation_qpairs(x, y, depths: Sequence[DepthSpec], B: int, seed, workers: int = 1) -> list[tuple[QPair, ...]]:
    """Q-pairs of ``B`` random relabellings of the pooled sample, one per depth."""
    x, y = as_data_matrix(x), as_data_matrix(y)
    if x.shape[1] != y.shape[1]:
        raise DimensionMismatch("samples differ in dimension")
    if B < 1:
        raise DomainError(f"B must be >= 1, got {B}")
    pooled = np.vstack([x, y])
    fn = partial(_permutation_replicate, pooled, x.shape[0], tuple(depths), as_seed(seed))
    return indexed_map(fn, B, workers)


def parametric_qpairs(dist: Distribution, m: int, n: int, depths: Sequence[DepthSpec], B: int, seed,
                      workers: int = 1) -> list[tuple[QPair, ...]]:
    """Q-pairs of ``B`` fresh sample pairs drawn from ``dist``, one per depth."""
    if B < 1:
        raise DomainError(f"B must be >= 1, got {B}")
    fn = partial(_parametric_replicate, dist, m, n, tuple(depths), as_seed(seed))
    return indexed_map(fn, B, workers)


def ensemble_from_qpairs(pairs: Sequence[QPair], spec: StatSpec, method: str, seed, depth=None) -> NullEnsemble:
    values = np.array([statistic(q, spec) for q in pairs])
    q0 = pairs[0]
    return NullEnsemble(spec.resolve(q0.m, q0.n), values, method, as_seed(seed), q0.m, q0.n, depth)


def permutation_null(x, y, spec: StatSpec, depth: DepthSpec, B: int, seed, workers: int = 1) -> NullEnsemble:
    pairs = [p[0] for p in permutation_qpairs(x, y, (depth,), B, seed, workers)]
    return ensemble_from_qpairs(pairs, spec, PERMUTATION, seed, depth)


def parametric_null(dist: Distribution, m: int, n: int, spec: StatSpec, depth: DepthSpec, B: int, seed,
                    workers: int = 1) -> NullEnsemble:
    pairs = [p[0] for p in parametric_qpairs(dist, m, n, (depth,), B, seed, workers)]
    return ensemble_from_qpairs(pairs, spec, PARAMETRIC, seed, depth)


def empirical_pvalue(observed: float, ensemble: NullEnsemble) -> float:
    """Add-one p-value ``(1 + #{replicate >= observed}) / (B + 1)``."""
    r = ensemble.replicates
    if r.size == 0:
        raise EmptyEnsemble("empty ensemble")
    return (1 + int(np.count_nonzero(r >= observed))) / (r.size + 1)


def empirical_critical_value(ensemble: NullEnsemble, alpha: float) -> float:
    """The ``ceil((1 - alpha)(B + 1))``-th order statistic, clamped to ``B``."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    B = ensemble.B
    if B < math.ceil(1.0 / alpha - 1e-9):
        raise InsufficientReplicates(f"B = {B} is too small for alpha = {alpha}")
    k = min(B, math.ceil((1.0 - alpha) * (B + 1) - 1e-9))
    return float(np.sort(ensemble.replicates)[k - 1])
