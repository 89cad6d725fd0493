"""Independent reference computations used by the tests."""

import math

import numpy as np


def erfc_reference(x: float) -> float:
    """erfc by Maclaurin series for x < 3 and a Lentz continued fraction beyond."""
    if x < 3.0:
        # erf(x) = 2/sqrt(pi) * sum (-1)^k x^(2k+1) / (k! (2k+1))
        total, term, k = 0.0, x, 0
        while True:
            add = term / (2 * k + 1)
            total += add
            if abs(add) <= 1e-17 * abs(total):
                break
            k += 1
            term *= -x * x / k
        return 1.0 - 2.0 / math.sqrt(math.pi) * total
    # erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    tiny = 1e-300
    f = x
    c, d = x, 0.0
    for k in range(1, 200):
        a = k / 2.0
        d = x + a * d
        d = 1.0 / (d if d != 0 else tiny)
        c = x + a / c
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return math.exp(-x * x) / math.sqrt(math.pi) / f


def chi2_1_sf_reference(x: float) -> float:
    return erfc_reference(math.sqrt(x / 2.0))


def chi2_1_cdf_reference(x: float) -> float:
    return 1.0 - chi2_1_sf_reference(x)


def ks_distance_chi2_1(values) -> float:
    """One-sample Kolmogorov-Smirnov distance to the chi-square(1) CDF."""
    v = np.sort(np.asarray(values, dtype=float))
    n = v.size
    cdf = np.array([chi2_1_cdf_reference(max(t, 0.0)) for t in v])
    upper = np.arange(1, n + 1) / n - cdf
    lower = cdf - np.arange(n) / n
    return float(max(upper.max(), lower.max()))


def ks_two_sample(a, b) -> float:
    a, b = np.sort(np.asarray(a, float)), np.sort(np.asarray(b, float))
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def mahalanobis_q_numpy(ref, other) -> float:
    """Quality index with Mahalanobis depth via numpy's inverse covariance."""
    def depth(q):
        d = q - ref.mean(axis=0)
        inv = np.linalg.inv(np.cov(ref, rowvar=False))
        return 1.0 / (1.0 + np.einsum("ij,jk,ik->i", d, inv, d))

    ranks = np.searchsorted(np.sort(depth(ref)), depth(other), side="right")
    return float(ranks.mean() / len(ref))
