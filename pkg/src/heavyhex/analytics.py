"""Closed-form and numeric reference models.

* the three-site repetition model, where a majority vote fails when two or
  more sites flip, with persistent per-site rates ``eps_i = eps_bar + delta_i``;
* the mean of ``tau / |T1|`` for normally distributed ``T1``;
* two-step averaging of sweep results over device instances.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, stats

__all__ = [
    "repetition_error",
    "repetition_error_bruteforce",
    "repetition_avg",
    "repetition_variance_leading",
    "repetition_variance_exact",
    "repetition_instances",
    "reciprocal_normal_mean_numeric",
    "reciprocal_normal_mean_approx",
    "folded_normal_moments",
    "SweepStatistics",
    "aggregate_sweep",
]


def _rates(eps) -> np.ndarray:
    e = np.asarray(eps, dtype=float)
    if np.any((e < 0) | (e > 1)):
        raise ValueError("rates must lie in [0, 1]")
    return e


def repetition_error(eps) -> float:
    """Majority-vote failure probability of three sites with flip rates ``eps``."""
    e0, e1, e2 = _rates(eps)
    return float(e0 * e1 + e1 * e2 + e0 * e2 - 2 * e0 * e1 * e2)


def repetition_error_bruteforce(eps) -> float:
    """Same quantity for any odd number of sites, by summing all flip patterns."""
    e = _rates(eps)
    n = len(e)
    total = 0.0
    for pattern in itertools.product((0, 1), repeat=n):
        if 2 * sum(pattern) > n:
            total += math.prod(ei if f else 1 - ei for ei, f in zip(e, pattern))
    return total


def repetition_avg(eps_bar: float) -> float:
    """Instance average ``3 e^2 - 2 e^3``; it does not depend on the spread."""
    if not 0 <= eps_bar <= 1:
        raise ValueError("eps_bar must lie in [0, 1]")
    return 3 * eps_bar**2 - 2 * eps_bar**3


def repetition_variance_leading(eps_bar: float, sigma) -> float:
    """Instance variance of the failure rate kept to fourth order.

    ``sigma`` is one spread for all sites or one per site:
    ``4 e^2 sum(s_i^2) + sum_{i<j} s_i^2 s_j^2``, i.e. ``12 s^2 e^2 + 3 s^4``
    for identical sites.
    """
    s2 = np.broadcast_to(np.asarray(sigma, dtype=float) ** 2, (3,))
    if np.any(s2 < 0) or np.any(np.asarray(sigma) < 0):
        raise ValueError("sigma must be non-negative")
    cross = s2[0] * s2[1] + s2[1] * s2[2] + s2[0] * s2[2]
    return float(4 * eps_bar**2 * s2.sum() + cross)


def repetition_variance_exact(eps_bar: float, sigma: float) -> float:
    """All orders for identical Gaussian sites (no truncation)."""
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    e, s2 = eps_bar, sigma**2
    return (4 * s2**3 + s2**2 * (12 * e**2 - 12 * e + 3)
            + s2 * 12 * e**2 * (1 - e) ** 2)


def repetition_instances(eps_bar: float, alpha: float, n_instances: int,
                         rng: np.random.Generator) -> np.ndarray:
    """Failure rate ``E_j`` of ``n_instances`` devices with
    ``delta_i ~ N(0, (alpha eps_bar)^2)``.

    The polynomial is evaluated as is, without clipping the rates, so the
    average stays exactly ``3 e^2 - 2 e^3`` for every ``alpha``.
    """
    eps = eps_bar + rng.normal(0.0, alpha * eps_bar, size=(n_instances, 3))
    e0, e1, e2 = eps.T
    return e0 * e1 + e1 * e2 + e0 * e2 - 2 * e0 * e1 * e2


def reciprocal_normal_mean_numeric(tau: float, mu: float, sigma: float,
                                   floor: float = 1e-6, rtol: float = 1e-8) -> float:
    """Mean of ``tau / max(|T1|, floor)`` for ``T1 ~ N(mu, sigma^2)``.

    The density of ``|T1|`` (both tails folded onto the positive axis) is
    integrated against ``tau / x`` on ``[floor, mu + 10 sigma]``; draws below
    the floor contribute ``tau / floor`` times their probability, which is
    how the sampler treats them.
    """
    if floor <= 0:
        raise ValueError("floor must be positive")
    if mu <= 0 or tau <= 0 or sigma < 0:
        raise ValueError("need tau > 0, mu > 0, sigma >= 0")
    if sigma == 0:
        return tau / max(mu, floor)
    dist = stats.norm(mu, sigma)
    hi = mu + 10 * sigma
    if hi <= floor:
        return tau / floor

    def f(x):
        return tau / x * (dist.pdf(x) + dist.pdf(-x))

    # split at the peak so the adaptive rule sees it
    edges = sorted({floor, min(max(mu, floor), hi), hi})
    total, err = 0.0, 0.0
    for a, b in zip(edges, edges[1:]):
        res = integrate.quad(f, a, b, epsabs=0.0, epsrel=rtol, limit=500, full_output=True)
        if len(res) > 3:
            raise RuntimeError(f"quadrature did not converge: {res[3]}")
        val, e = res[0], res[1]
        total += val
        err += e
    if err > 10 * rtol * abs(total):
        raise RuntimeError(f"quadrature did not converge (error estimate {err:.3g})")
    below = dist.cdf(floor) - dist.cdf(-floor)
    return total + tau / floor * below


def reciprocal_normal_mean_approx(tau: float, mu: float, sigma: float) -> float:
    """Small-spread series ``tau (1/mu + sigma^2 / (8 mu^3))``."""
    return tau * (1 / mu + sigma**2 / (8 * mu**3))


def folded_normal_moments(mean: float, sigma: float) -> tuple[float, float]:
    """Mean and standard deviation of ``|N(mean, sigma^2)|``."""
    if sigma == 0:
        return abs(mean), 0.0
    z = mean / sigma
    m = sigma * math.sqrt(2 / math.pi) * math.exp(-z * z / 2) + mean * (1 - 2 * stats.norm.cdf(-z))
    var = mean**2 + sigma**2 - m**2
    return m, math.sqrt(max(var, 0.0))


@dataclass(frozen=True)
class SweepStatistics:
    """Two-step average over device instances.

    ``sigma_out`` is the instance-to-instance standard deviation of the
    per-instance rates (NaN and ``single_instance`` set when only one
    instance exists). ``se_mean`` is the standard error of ``grand_mean``.
    """

    instance_means: np.ndarray
    shots: np.ndarray
    grand_mean: float
    sigma_out: float
    se_mean: float
    se_sigma: float
    shot_se: np.ndarray
    single_instance: bool

    @property
    def n_instances(self) -> int:
        return len(self.instance_means)

    def as_dict(self) -> dict:
        return {
            "instance_means": [float(x) for x in self.instance_means],
            "grand_mean": self.grand_mean,
            "sigma_out": None if self.single_instance else self.sigma_out,
            "se_mean": self.se_mean,
            "se_sigma": None if self.single_instance else self.se_sigma,
        }


def aggregate_sweep(failures, shots) -> SweepStatistics:
    """Per-instance rates, their mean and their spread.

    ``shots`` is one count for all instances or one per instance.
    """
    fails = np.asarray(failures, dtype=float).ravel()
    if fails.size == 0:
        raise ValueError("need at least one instance")
    n = np.broadcast_to(np.asarray(shots, dtype=float), fails.shape).copy()
    if np.any(n <= 0) or np.any(fails < 0) or np.any(fails > n):
        raise ValueError("failure counts must lie in [0, shots] with shots > 0")
    rates = fails / n
    shot_se = np.sqrt(rates * (1 - rates) / n)
    grand = float(rates.mean())
    k = fails.size
    if k == 1:
        return SweepStatistics(rates, n, grand, math.nan, float(shot_se[0]), math.nan, shot_se, True)
    sd = float(rates.std(ddof=1))
    # the spread of instance means already contains the shot noise
    se_mean = max(sd, float(np.sqrt(np.mean(shot_se**2)))) / math.sqrt(k)
    se_sigma = sd / math.sqrt(2 * (k - 1))
    return SweepStatistics(rates, n, grand, sd, se_mean, se_sigma, shot_se, False)
