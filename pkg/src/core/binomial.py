"""Binomial distribution functions evaluated in the log domain."""

import math

import numpy as np
from scipy.special import gammaln, logsumexp


def _window(n: int, p: float) -> tuple[int, int]:
    """
    Range [lo, hi] of counts carrying all but a negligible share of the mass.

    By Hoeffding's inequality P(|X - np| >= t) <= 2 exp(-2 t^2 / n); with
    t = 20 sqrt(n) + 10 the mass outside is below exp(-800).
    """
    half_width = math.ceil(20.0 * math.sqrt(n)) + 10
    mean = n * p
    return max(0, math.floor(mean - half_width)), min(n, math.ceil(mean + half_width))


def log_pmf_window(n: int, p: float) -> tuple[int, np.ndarray]:
    """
    Log probabilities of Bin(n, p) over the counts that matter.

    Args:
        n: Number of trials (n >= 0)
        p: Success probability in [0, 1]

    Returns:
        (start, log_pmf) where ``log_pmf[i]`` is ln P[X = start + i]
    """
    if p <= 0.0:
        return 0, np.zeros(1)
    if p >= 1.0:
        return n, np.zeros(1)

    lo, hi = _window(n, p)
    k = np.arange(lo, hi + 1, dtype=np.float64)
    log_choose = gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)
    return lo, log_choose + k * math.log(p) + (n - k) * math.log1p(-p)


def binomial_cdf(c: int, n: int, p: float) -> float:
    """
    P[Bin(n, p) <= c].

    The smaller tail is summed with ``logsumexp`` and the other obtained as
    its complement, so results near 0 keep their relative precision.

    Args:
        c: Count threshold, -1 <= c <= n
        n: Number of trials
        p: Success probability in [0, 1]

    Returns:
        Cumulative probability in [0, 1]; 0 for c = -1 and 1 for c = n
    """
    if c < 0:
        return 0.0
    if c >= n:
        return 1.0
    if p <= 0.0:
        return 1.0
    if p >= 1.0:
        return 0.0

    start, log_pmf = log_pmf_window(n, p)
    if c < start:
        return 0.0
    end = start + len(log_pmf) - 1
    if c >= end:
        return 1.0

    split = c - start + 1
    if c < n * p:
        return float(min(1.0, math.exp(logsumexp(log_pmf[:split]))))
    return float(min(1.0, max(0.0, -math.expm1(logsumexp(log_pmf[split:])))))


def binomial_sf(c: int, n: int, p: float) -> float:
    """P[Bin(n, p) > c], the complement of :func:`binomial_cdf`."""
    if c < 0:
        return 1.0
    if c >= n:
        return 0.0
    if p <= 0.0:
        return 0.0
    if p >= 1.0:
        return 1.0

    start, log_pmf = log_pmf_window(n, p)
    if c < start:
        return 1.0
    end = start + len(log_pmf) - 1
    if c >= end:
        return 0.0

    split = c - start + 1
    if c >= n * p:
        return float(min(1.0, math.exp(logsumexp(log_pmf[split:]))))
    return float(min(1.0, max(0.0, -math.expm1(logsumexp(log_pmf[:split])))))
