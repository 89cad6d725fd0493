"""Seeded generation of multivariate normals, normal mixtures and demo statistics.

Uniforms come from a counter-based Philox stream keyed by
``(master_seed, stream_id, *tag)``; normals are produced from them with the
Box-Muller transform, so a draw is a pure function of its seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BadWeights, DimensionMismatch, DomainError
from .numkit import cholesky


@dataclass(frozen=True)
class SeedSpec:
    """Address of an independent random stream.

    ``tag`` distinguishes sub-streams that belong to the same replication
    (for example the two samples of one Monte Carlo draw).
    """

    master_seed: int
    stream_id: int = 0
    tag: tuple[int, ...] = ()

    def child(self, *tag: int) -> "SeedSpec":
        return SeedSpec(self.master_seed, self.stream_id, self.tag + tuple(int(t) for t in tag))

    def stream(self, stream_id: int) -> "SeedSpec":
        return SeedSpec(self.master_seed, int(stream_id), self.tag)

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(
            entropy=int(self.master_seed) & (2**64 - 1),
            spawn_key=(int(self.stream_id), *self.tag),
        )
        return np.random.Generator(np.random.Philox(ss))


def as_seed(seed) -> SeedSpec:
    if isinstance(seed, SeedSpec):
        return seed
    return SeedSpec(int(seed))


def standard_normals(rng: np.random.Generator, size: int) -> np.ndarray:
    """``size`` standard normal deviates by Box-Muller from ``rng`` uniforms."""
    pairs = (size + 1) // 2
    u = rng.random((pairs, 2))
    radius = np.sqrt(-2.0 * np.log1p(-u[:, 0]))  # 1 - u in (0, 1]
    angle = 2.0 * np.pi * u[:, 1]
    z = np.empty((pairs, 2))
    z[:, 0] = radius * np.cos(angle)
    z[:, 1] = radius * np.sin(angle)
    return z.ravel()[:size]


@dataclass(frozen=True, eq=False)
class MVN:
    mean: np.ndarray
    cov: np.ndarray
    chol: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        cov = np.atleast_2d(np.asarray(self.cov, dtype=float))
        if mean.ndim != 1 or cov.shape != (mean.size, mean.size):
            raise DimensionMismatch(f"mean {mean.shape} and covariance {cov.shape} disagree")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "chol", cholesky(cov))

    @property
    def dim(self) -> int:
        return self.mean.size

    def __eq__(self, other):
        return (
            isinstance(other, MVN)
            and np.array_equal(self.mean, other.mean)
            and np.array_equal(self.cov, other.cov)
        )

    def to_dict(self) -> dict:
        return {"kind": "mvn", "mean": self.mean.tolist(), "cov": self.cov.tolist()}


@dataclass(frozen=True, eq=False)
class Mixture:
    weights: np.ndarray
    components: tuple[MVN, ...]

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).ravel()
        comps = tuple(self.components)
        if w.size != len(comps) or w.size == 0:
            raise BadWeights("need one weight per component")
        if np.any(w <= 0) or abs(w.sum() - 1.0) > 1e-12:
            raise BadWeights(f"weights must be positive and sum to 1, got {w.tolist()}")
        if len({c.dim for c in comps}) != 1:
            raise DimensionMismatch("mixture components differ in dimension")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "components", comps)

    @property
    def dim(self) -> int:
        return self.components[0].dim

    def __eq__(self, other):
        return (
            isinstance(other, Mixture)
            and np.array_equal(self.weights, other.weights)
            and self.components == other.components
        )

    def to_dict(self) -> dict:
        return {
            "kind": "mixture",
            "weights": self.weights.tolist(),
            "components": [c.to_dict() for c in self.components],
        }


Distribution = MVN | Mixture


def mvn(mean, cov) -> MVN:
    return MVN(np.asarray(mean, dtype=float), np.asarray(cov, dtype=float))


def standard_normal(d: int = 2) -> MVN:
    return MVN(np.zeros(d), np.eye(d))


def sample(dist: Distribution, count: int, seed) -> np.ndarray:
    """Draw ``count`` rows from ``dist``; deterministic in ``seed``."""
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    rng = as_seed(seed).generator()
    if isinstance(dist, MVN):
        z = standard_normals(rng, count * dist.dim).reshape(count, dist.dim)
        return dist.mean + z @ dist.chol.T
    # component labels first, then one block of normals for all points
    u = rng.random(count)
    labels = np.searchsorted(np.cumsum(dist.weights)[:-1], u, side="right")
    z = standard_normals(rng, count * dist.dim).reshape(count, dist.dim)
    out = np.empty_like(z)
    for k, comp in enumerate(dist.components):
        sel = labels == k
        out[sel] = comp.mean + z[sel] @ comp.chol.T
    return out


def alde_demo_pair(case: str, m: int, n: int, seed, mean: float = 2.0, spread: float = 3.0,
                   spread_is_variance: bool = True) -> tuple[float, float]:
    """One draw of the pair (mean of x, +/- pooled double sum over m + n).

    ``case`` is ``"I"`` (positive sign) or ``"II"`` (negative sign).  Both
    samples are i.i.d. normal with the given mean; ``spread`` is read as a
    variance unless ``spread_is_variance`` is false.
    """
    if case not in ("I", "II"):
        raise DomainError(f"case must be 'I' or 'II', got {case!r}")
    if m < 1 or n < 1:
        raise DomainError("m and n must be >= 1")
    sd = math.sqrt(spread) if spread_is_variance else float(spread)
    rng = as_seed(seed).generator()
    z = standard_normals(rng, m + n)
    x = mean + sd * z[:m]
    y = mean + sd * z[m:]
    h1 = float(x.mean())
    # sum_i sum_j (x_i + y_j) = n * sum(x) + m * sum(y)
    h2 = (n * x.sum() + m * y.sum()) / (m + n)
    if case == "II":
        h2 = -h2
    return h1, float(h2)


def dist_from_dict(doc: dict) -> Distribution:
    kind = doc["kind"]
    if kind == "mvn":
        return mvn(doc["mean"], doc["cov"])
    if kind == "mixture":
        return Mixture(np.asarray(doc["weights"], float), tuple(dist_from_dict(c) for c in doc["components"]))
    raise DomainError(f"unknown distribution kind {kind!r}")


def _iso(mean, var=1.0) -> MVN:
    return mvn(mean, var * np.eye(2))


# Mixture scenarios used for the off-null scatter clouds.
APPENDIX_B_F = Mixture(np.array([0.8, 0.2]), (_iso([0, 0]), _iso([15, 15])))
APPENDIX_B_G = {
    "green": Mixture(np.array([0.6, 0.4]), (_iso([5, 5]), _iso([-2, -2]))),
    "blue": Mixture(np.array([0.8, 0.2]), (_iso([4, 4], 0.9), _iso([-5, -5], 0.9))),
    "yellow": Mixture(np.array([0.8, 0.2]), (_iso([0, 0], 0.8), _iso([-12, -12], 0.7))),
    "brown": Mixture(np.array([0.8, 0.2]), (_iso([3, 3]), _iso([-1, -1], 2.0))),
    "red": Mixture(np.array([0.8, 0.2]), (_iso([7, 7]), _iso([-8, -8]))),
}

# Alternatives of the power study; F is N(0, I2) throughout.
ALTERNATIVES = {
    "scale": mvn([0, 0], [[1, 0.5], [0.5, 1]]),
    "location": mvn([0.35, 0.35], np.eye(2)),
    "scale_location": mvn([0.3, 0.3], [[1, 0.4], [0.4, 1]]),
}
