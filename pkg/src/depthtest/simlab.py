"""Monte Carlo campaigns for empirical size and power, plus scatter generators."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import partial
from typing import Sequence

import numpy as np

from ._parallel import indexed_map
from .calibrate import PARAMETRIC, ensemble_from_qpairs, empirical_critical_value, parametric_qpairs
from .depth import DepthSpec
from .errors import DepthTestError, DomainError
from .qindex import QPair, q_pair
from .sampler import APPENDIX_B_F, APPENDIX_B_G, Distribution, SeedSpec, alde_demo_pair, sample
from .teststat import StatSpec, evaluate, statistic

MAX_ERROR_FRACTION = 0.001
_ALT_TAG = 0x41
_SCATTER_TAG = 0x53


@dataclass(frozen=True)
class Calibration:
    """``asymptotic`` chi-square(1) critical values or ``empirical`` ones from ``B`` null draws."""

    mode: str = "asymptotic"
    B: int = 0

    def __post_init__(self):
        if self.mode not in ("asymptotic", "empirical"):
            raise DomainError(f"unknown calibration mode {self.mode!r}")
        if self.mode == "empirical" and self.B < 1:
            raise DomainError("empirical calibration needs B >= 1")

    @property
    def label(self) -> str:
        return "asymptotic" if self.mode == "asymptotic" else f"empirical(B={self.B})"


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    F: Distribution
    G: Distribution
    sizes: tuple[tuple[int, int], ...]
    depths: tuple[DepthSpec, ...]
    stats: tuple[StatSpec, ...]
    alpha: float = 0.05
    replications: int = 2000
    calibration: Calibration = field(default_factory=Calibration)
    master_seed: int = 0

    def __post_init__(self):
        if self.replications < 1:
            raise DomainError("replications must be >= 1")
        if not self.sizes:
            raise DomainError("at least one (m, n) size is required")
        if any(m < 2 or n < 2 for m, n in self.sizes):
            raise DomainError("sample sizes must be >= 2")
        if not 0.0 < self.alpha < 1.0:
            raise DomainError("alpha must lie in (0, 1)")
        if not self.depths or not self.stats:
            raise DomainError("need at least one depth and one statistic")
        if self.F.dim != self.G.dim:
            raise DomainError("F and G differ in dimension")


@dataclass(frozen=True)
class CampaignRow:
    scenario: str
    m: int
    n: int
    depth: str
    statistic: str
    parameter: str
    alpha: float
    calibration: str
    rejections: int
    reps: int
    seed: int

    @property
    def rejection_rate(self) -> float:
        return self.rejections / self.reps

    @property
    def stderr(self) -> float:
        p = self.rejection_rate
        return math.sqrt(p * (1.0 - p) / self.reps)


@dataclass(frozen=True)
class CampaignResult:
    rows: tuple[CampaignRow, ...]
    errors: int = 0

    def rate(self, depth: str, stat_label: str, m: int | None = None, n: int | None = None) -> float:
        for r in self.rows:
            if r.depth == depth and r.statistic == stat_label and (m is None or r.m == m) and (n is None or r.n == n):
                return r.rejection_rate
        raise KeyError((depth, stat_label, m, n))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CAMPAIGN_COLUMNS)
        for r in self.rows:
            w.writerow([r.scenario, r.m, r.n, r.depth, r.statistic, r.parameter, repr(float(r.alpha)), r.calibration,
                        repr(r.rejection_rate), repr(r.stderr), r.reps, r.seed])
        return buf.getvalue()


CAMPAIGN_COLUMNS = ["scenario", "m", "n", "depth", "statistic", "lambda_or_omega", "alpha", "calibration",
                    "rejection_rate", "stderr", "reps", "seed"]


class CampaignError(DepthTestError):
    pass


def _alt_replicate(F: Distribution, G: Distribution, m: int, n: int, depths: tuple[DepthSpec, ...],
                   seed: SeedSpec, r: int) -> tuple[QPair, ...] | None:
    s = seed.stream(r).child(_ALT_TAG)
    try:
        x = sample(F, m, s.child(0))
        y = sample(G, n, s.child(1))
        return tuple(q_pair(x, y, d) for d in depths)
    except DepthTestError:
        return None


def run_campaign(config: ScenarioConfig, workers: int = 1) -> CampaignResult:
    """Rejection rates of every (size, depth, statistic) cell of the scenario.

    Each replication draws ``x ~ F`` and ``y ~ G`` and evaluates all depths and
    statistics on the same pair.  With empirical calibration the critical
    values come from ``B`` draws with both samples from ``F``.
    """
    rows = []
    total_errors = 0
    for s_idx, (m, n) in enumerate(config.sizes):
        base = SeedSpec(config.master_seed, 0, (s_idx,))
        crit = {}
        if config.calibration.mode == "empirical":
            null = parametric_qpairs(config.F, m, n, config.depths, config.calibration.B, base, workers)
            for k, dspec in enumerate(config.depths):
                pairs = [p[k] for p in null]
                for spec in config.stats:
                    ens = ensemble_from_qpairs(pairs, spec, PARAMETRIC, base, dspec)
                    crit[k, spec] = empirical_critical_value(ens, config.alpha)
        fn = partial(_alt_replicate, config.F, config.G, m, n, config.depths, base)
        results = indexed_map(fn, config.replications, workers)
        good = [r for r in results if r is not None]
        errors = len(results) - len(good)
        if errors > MAX_ERROR_FRACTION * config.replications:
            raise CampaignError(f"{errors} of {config.replications} replications failed at m={m}, n={n}")
        total_errors += errors
        for k, dspec in enumerate(config.depths):
            for spec in config.stats:
                rejections = 0
                for pairs in good:
                    q = pairs[k]
                    if config.calibration.mode == "empirical":
                        rejections += statistic(q, spec) > crit[k, spec]
                    else:
                        rejections += evaluate(q, spec, config.alpha).reject
                rows.append(CampaignRow(config.name, m, n, dspec.label, spec.label, spec.parameter, config.alpha,
                                        config.calibration.label, int(rejections), len(good), config.master_seed))
    return CampaignResult(tuple(rows), total_errors)


def null_scatter(dist: Distribution, m: int, n: int, depth: DepthSpec, reps: int, seed, workers: int = 1) -> list[QPair]:
    """``reps`` Q-pairs with both samples drawn from ``dist``."""
    if reps < 1:
        raise DomainError("reps must be >= 1")
    base = SeedSpec(int(seed), 0, (_SCATTER_TAG,))
    return [p[0] for p in parametric_qpairs(dist, m, n, (depth,), reps, base, workers)]


def _mixture_replicate(G: Distribution, m: int, n: int, depth: DepthSpec, seed: SeedSpec, r: int) -> QPair:
    s = seed.stream(r)
    return q_pair(sample(APPENDIX_B_F, m, s.child(0)), sample(G, n, s.child(1)), depth)


def alternative_scatter(case: str, m: int, n: int, depth: DepthSpec, reps: int, seed, workers: int = 1) -> list[QPair]:
    """Q-pairs for one of the colour-coded mixture alternatives (green, blue, yellow, brown, red)."""
    if case not in APPENDIX_B_G:
        raise DomainError(f"unknown case {case!r}; expected one of {sorted(APPENDIX_B_G)}")
    if reps < 1:
        raise DomainError("reps must be >= 1")
    base = SeedSpec(int(seed), 0, (_SCATTER_TAG, 1))
    fn = partial(_mixture_replicate, APPENDIX_B_G[case], m, n, depth, base)
    return indexed_map(fn, reps, workers)


def _alde_replicate(case: str, m: int, n: int, spread_is_variance: bool, seed: SeedSpec, r: int):
    return alde_demo_pair(case, m, n, seed.stream(r), spread_is_variance=spread_is_variance)


def alde_scatter(case: str, m: int, n: int, reps: int, seed, spread_is_variance: bool = True,
                 workers: int = 1) -> list[tuple[float, float]]:
    if reps < 1:
        raise DomainError("reps must be >= 1")
    base = SeedSpec(int(seed), 0, (_SCATTER_TAG, 2))
    fn = partial(_alde_replicate, case, m, n, spread_is_variance, base)
    return indexed_map(fn, reps, workers)


def scatter_csv(pairs: Sequence[QPair]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["rep", "q_fg", "q_gf"])
    for i, q in enumerate(pairs):
        w.writerow([i, repr(float(q.q_fg)), repr(float(q.q_gf))])
    return buf.getvalue()


def alde_csv(pairs: Sequence[tuple[float, float]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["rep", "h1", "h2"])
    for i, (h1, h2) in enumerate(pairs):
        w.writerow([i, repr(float(h1)), repr(float(h2))])
    return buf.getvalue()


def boundary_csv(vertices: np.ndarray) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "q_fg", "q_gf"])
    for i, (u, v) in enumerate(np.asarray(vertices)):
        w.writerow([i, repr(float(u)), repr(float(v))])
    return buf.getvalue()
