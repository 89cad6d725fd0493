"""Test statistics built from a pair of quality indices.

Four statistics are provided, all quadratic in the centred pair
``(q_fg - 1/2, q_gf - 1/2)`` and scaled by ``12 m n / (m + n)``:

* ``W(omega)`` weighted average of the two squared deviations,
* ``M`` maximum of the two squared deviations,
* ``R(lambda, theta)`` rotated ellipse with axis ratio ``lambda``,
* ``E(lambda)`` the rotated ellipse at ``theta = pi / 4``.

Under homogeneity ``value / scale`` is asymptotically chi-square(1), where
``scale`` is ``1 + lambda - (1 - lambda) sin(2 theta)`` for R, ``2 lambda``
for E and 1 for W and M.  Large values reject.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .errors import DomainError
from .numkit import chi2_1_quantile, chi2_1_sf, sym2_eigh
from .qindex import QPair

DEFAULT_LAMBDA = 0.3
QUARTER_PI = math.pi / 4


@dataclass(frozen=True)
class StatSpec:
    """Which statistic to compute and its parameters.

    For ``W`` an ``omega`` of ``None`` means the size-balanced weight
    ``n / (m + n)``, resolved per sample pair by :meth:`resolve`.
    """

    kind: str
    omega: Optional[float] = None
    lam: Optional[float] = None
    theta: Optional[float] = None

    def __post_init__(self):
        kind = str(self.kind).upper()
        object.__setattr__(self, "kind", kind)
        if kind not in ("W", "M", "R", "E"):
            raise DomainError(f"unknown statistic {self.kind!r}")
        if kind == "W":
            if self.lam is not None or self.theta is not None:
                raise DomainError("W takes only omega")
            if self.omega is not None and not 0.0 <= self.omega <= 1.0:
                raise DomainError(f"omega must lie in [0, 1], got {self.omega}")
        elif kind == "M":
            if self.omega is not None or self.lam is not None or self.theta is not None:
                raise DomainError("M takes no parameters")
        else:
            if self.omega is not None:
                raise DomainError(f"{kind} takes no omega")
            if self.lam is None or not self.lam > 0 or not math.isfinite(self.lam):
                raise DomainError(f"lambda must be > 0, got {self.lam}")
            if kind == "E":
                if self.theta is not None:
                    raise DomainError("E fixes theta at pi/4")
            elif self.theta is None or not -math.pi / 2 <= self.theta <= math.pi / 2:
                raise DomainError(f"theta must lie in [-pi/2, pi/2], got {self.theta}")

    @classmethod
    def W(cls, omega: Optional[float] = None) -> "StatSpec":
        return cls("W", omega=omega)

    @classmethod
    def M(cls) -> "StatSpec":
        return cls("M")

    @classmethod
    def R(cls, lam: float, theta: float) -> "StatSpec":
        return cls("R", lam=lam, theta=theta)

    @classmethod
    def E(cls, lam: float = DEFAULT_LAMBDA) -> "StatSpec":
        return cls("E", lam=lam)

    def resolve(self, m: int, n: int) -> "StatSpec":
        if self.kind == "W" and self.omega is None:
            return StatSpec.W(n / (m + n))
        return self

    @property
    def angle(self) -> float:
        """Rotation angle of the equivalent R statistic."""
        if self.kind == "E":
            return QUARTER_PI
        return 0.0 if self.theta is None else self.theta

    def scale(self) -> float:
        if self.kind in ("W", "M"):
            return 1.0
        if self.kind == "E":
            return 2.0 * self.lam
        return null_scale(self.lam, self.theta)

    @property
    def label(self) -> str:
        if self.kind == "M":
            return "M"
        if self.kind == "W":
            return "W(n/(m+n))" if self.omega is None else f"W({self.omega:g})"
        if self.kind == "E":
            return f"E({self.lam:g})"
        return f"R({self.lam:g},{self.theta:g})"

    @property
    def parameter(self) -> str:
        """Compact lambda-or-omega field used in result tables."""
        if self.kind == "W":
            return "n/(m+n)" if self.omega is None else repr(float(self.omega))
        if self.kind == "M":
            return ""
        if self.kind == "E":
            return repr(float(self.lam))
        return f"{float(self.lam)!r};{float(self.theta)!r}"

    def to_dict(self) -> dict:
        doc = {"kind": self.kind}
        if self.kind == "W":
            doc["omega"] = "n/(m+n)" if self.omega is None else self.omega
        if self.lam is not None:
            doc["lambda"] = self.lam
        if self.theta is not None:
            doc["theta"] = self.theta
        return doc


@dataclass(frozen=True)
class TestResult:
    spec: StatSpec
    value: float
    scale: float
    p_asymptotic: float
    alpha: float
    reject: bool
    p_empirical: Optional[float] = None
    calibration: str = "asymptotic"

    __test__ = False  # not a pytest class

    def with_empirical(self, p: float, label: str = "permutation") -> "TestResult":
        return TestResult(self.spec, self.value, self.scale, self.p_asymptotic, self.alpha,
                          p <= self.alpha, p, label)

    def to_dict(self) -> dict:
        doc = asdict(self)
        doc["spec"] = self.spec.to_dict()
        doc["statistic"] = self.spec.label
        return doc


def null_scale(lam: float, theta: float) -> float:
    return 1.0 + lam - (1.0 - lam) * math.sin(2.0 * theta)


def ellipse_matrix(lam: float, theta: float) -> np.ndarray:
    """Quadratic-form matrix of the rotated ellipse; its eigenvalues are 1 and lambda."""
    if not lam > 0:
        raise DomainError(f"lambda must be > 0, got {lam}")
    c, s = math.cos(theta), math.sin(theta)
    off = (1.0 - lam) * s * c
    return np.array([[c * c + lam * s * s, off], [off, s * s + lam * c * c]])


def _factor(m: int, n: int) -> float:
    return 12.0 * m * n / (m + n)


def w_statistic(q: QPair, omega: float) -> float:
    if not 0.0 <= omega <= 1.0:
        raise DomainError(f"omega must lie in [0, 1], got {omega}")
    u, v = q.centered
    return _factor(q.m, q.n) * (omega * u * u + (1.0 - omega) * v * v)


def m_statistic(q: QPair) -> float:
    u, v = q.centered
    return _factor(q.m, q.n) * max(u * u, v * v)


def r_statistic(q: QPair, lam: float, theta: float) -> float:
    a = ellipse_matrix(lam, theta)
    u, v = q.centered
    # PSD form; clamp round-off below zero
    return max(0.0, _factor(q.m, q.n) * (a[0, 0] * u * u + 2.0 * a[0, 1] * u * v + a[1, 1] * v * v))


def e_statistic(q: QPair, lam: float) -> float:
    if not lam > 0:
        raise DomainError(f"lambda must be > 0, got {lam}")
    u, v = q.centered
    k = 6.0 * q.m * q.n / (q.m + q.n)
    return max(0.0, k * ((1.0 + lam) * u * u + (1.0 + lam) * v * v + 2.0 * (1.0 - lam) * u * v))


def statistic(q: QPair, spec: StatSpec) -> float:
    spec = spec.resolve(q.m, q.n)
    if spec.kind == "W":
        return w_statistic(q, spec.omega)
    if spec.kind == "M":
        return m_statistic(q)
    if spec.kind == "E":
        return e_statistic(q, spec.lam)
    return r_statistic(q, spec.lam, spec.theta)


def evaluate(q: QPair, spec: StatSpec, alpha: float = 0.05) -> TestResult:
    """Statistic value with its chi-square(1) asymptotic p-value and decision."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    spec = spec.resolve(q.m, q.n)
    value = statistic(q, spec)
    scale = spec.scale()
    p = chi2_1_sf(value / scale)
    return TestResult(spec, value, scale, p, alpha, p <= alpha)


def er_contains(u: float, v: float, m: int, n: int, theta: float, lam: float, c: float) -> bool:
    """Whether ``(u, v)`` lies in the elliptical region of the given parameters."""
    if not c > 0:
        raise DomainError(f"c must be > 0, got {c}")
    a = ellipse_matrix(lam, theta)
    form = a[0, 0] * u * u + 2.0 * a[0, 1] * u * v + a[1, 1] * v * v
    return m * n / (m + n) * form <= c


def critical_value(spec: StatSpec, m: int, n: int, alpha: float) -> float:
    """Asymptotic critical value ``scale * chi2_{1-alpha}(1)`` of the statistic."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    return spec.resolve(m, n).scale() * chi2_1_quantile(1.0 - alpha)


def _quadratic_matrix(spec: StatSpec) -> np.ndarray:
    if spec.kind == "W":
        if not 0.0 < spec.omega < 1.0:
            raise DomainError("W's region is unbounded for omega in {0, 1}")
        return np.diag([spec.omega, 1.0 - spec.omega])
    return ellipse_matrix(spec.lam, spec.angle)


def region_boundary(spec: StatSpec, m: int, n: int, alpha: float = 0.05, points: int = 512) -> np.ndarray:
    """Vertices of the non-rejection region's boundary in the (q_fg, q_gf) plane.

    Returns a ``(points, 2)`` array tracing the closed level set
    ``statistic == critical_value`` counter-clockwise around (1/2, 1/2):
    an ellipse for W, R and E and an axis-aligned square for M.
    """
    if points < 8:
        raise DomainError(f"need at least 8 boundary points, got {points}")
    spec = spec.resolve(m, n)
    level = critical_value(spec, m, n, alpha) / _factor(m, n)
    if spec.kind == "M":
        h = math.sqrt(level)
        # uniform arc-length walk around the square, starting at its right edge midpoint
        s = (np.arange(points) / points * 8.0 + 1.0) % 8.0
        side = np.floor(s / 2.0)
        t = s - 2.0 * side - 1.0
        u = np.where(side == 0, 1.0, np.where(side == 1, -t, np.where(side == 2, -1.0, t)))
        v = np.where(side == 0, t, np.where(side == 1, 1.0, np.where(side == 2, -t, -1.0)))
        return 0.5 + h * np.column_stack([u, v])
    vals, vecs = sym2_eigh(_quadratic_matrix(spec))
    phi = 2.0 * np.pi * np.arange(points) / points
    radii = np.sqrt(level / vals)
    offsets = (np.outer(np.cos(phi) * radii[1], vecs[:, 1]) + np.outer(np.sin(phi) * radii[0], vecs[:, 0]))
    return 0.5 + offsets


def anti_diagonal_intersections(spec: StatSpec, m: int, n: int, alpha: float = 0.05) -> np.ndarray:
    """The two boundary points on the line ``q_fg + q_gf = 1``.

    Solves ``statistic(1/2 + t, 1/2 - t) == critical_value`` for ``t > 0``.
    """
    spec = spec.resolve(m, n)
    level = critical_value(spec, m, n, alpha) / _factor(m, n)
    if spec.kind == "M":
        t = math.sqrt(level)
    else:
        a = _quadratic_matrix(spec)
        t = math.sqrt(level / (a[0, 0] + a[1, 1] - 2.0 * a[0, 1]))
    return np.array([[0.5 + t, 0.5 - t], [0.5 - t, 0.5 + t]])


def statistic_at(spec: StatSpec, m: int, n: int, q_fg: float, q_gf: float) -> float:
    """Statistic value at an arbitrary point of the (q_fg, q_gf) plane."""
    return statistic(QPair(float(q_fg), float(q_gf), m, n), spec)
