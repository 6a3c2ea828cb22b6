"""Exponential tail model, tail extraction, KS outlier scan and Gamma updates.

The excess distribution above a tail threshold ``u`` is modelled as an
exponential with scale ``sigma``. Its rate has a Gamma conjugate prior, so
all state reduces to the pair ``(alpha, beta)`` and the sufficient
statistics ``(n, s)`` of the observed excesses.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._kernels import neumaier_sum

# guards floor(m * p_u) against products like 0.29 * 100 = 28.999999999999996
_FLOOR_SLACK = 1e-9


@dataclass(frozen=True)
class ExpTail:
    """Exponential excess distribution ``G(y) = 1 - exp(-y / sigma)``."""

    sigma: float

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise ValueError(f"sigma must be positive and finite, got {self.sigma!r}")

    @property
    def rate(self) -> float:
        return 1.0 / self.sigma


@dataclass(frozen=True)
class GammaParams:
    """Shape/rate pair of the Gamma prior or posterior over the tail rate."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha >= 1):
            raise ValueError(f"alpha must be >= 1, got {self.alpha!r}")
        if not (math.isfinite(self.beta) and self.beta >= 0):
            raise ValueError(f"beta must be >= 0, got {self.beta!r}")


@dataclass(frozen=True)
class TailSample:
    """Tail threshold ``u`` and the ascending excesses above it."""

    u: float
    excesses: np.ndarray = field(repr=False)
    n: int
    s: float


def _sigma(tail) -> float:
    if isinstance(tail, ExpTail):
        return tail.sigma
    return ExpTail(float(tail)).sigma


def tail_size(m: int, p_u: float) -> int:
    """Number of tail samples ``floor(m * p_u)`` for a set of ``m`` scores."""
    if not 0 < p_u < 1:
        raise ValueError(f"p_u must lie in (0, 1), got {p_u!r}")
    return int(math.floor(m * p_u + _FLOOR_SLACK))


def exp_tail_cdf(y, tail):
    """CDF of the exponential excess distribution, ``1 - exp(-y / sigma)``.

    Accepts a scalar or an array for ``y``; ``tail`` is an :class:`ExpTail`
    or a bare scale.
    """
    sigma = _sigma(tail)
    arr = np.asarray(y, dtype=np.float64)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise ValueError("exp_tail_cdf is defined for y >= 0 only")
    out = -np.expm1(-arr / sigma)
    return float(out) if out.ndim == 0 else out


def cfar_offset(sigma: float, p_u: float, p_f: float) -> float:
    """Excess level above ``u`` whose exponential survival equals ``p_f / p_u``."""
    sigma = _sigma(sigma)
    if not (0 < p_f < p_u < 1):
        raise ValueError(f"need 0 < p_f < p_u < 1, got p_f={p_f!r}, p_u={p_u!r}")
    return sigma * math.log(p_u / p_f)


def find_tail(scores, p_u: float) -> TailSample:
    """Split ``scores`` at the (k+1)-th largest value, ``k = floor(m * p_u)``.

    Ties at the threshold are resolved by rank, so values equal to ``u`` that
    fall in the top ``k`` appear as zero excesses.
    """
    x = np.asarray(scores, dtype=np.float64).ravel()
    if x.size == 0:
        raise ValueError("find_tail needs at least one score")
    k = tail_size(x.size, p_u)
    if k < 1:
        raise ValueError(
            f"window of {x.size} samples is too short for p_u={p_u} (tail would be empty)"
        )
    top = np.sort(np.partition(x, x.size - k - 1)[x.size - k - 1:])
    u = float(top[0])
    excesses = top[1:] - u
    return TailSample(u=u, excesses=excesses, n=k, s=float(neumaier_sum(excesses)))


def ks_statistic(excesses, tail) -> float:
    """Two-sided Kolmogorov-Smirnov distance to the exponential tail.

    Evaluated exactly at both edges of every step of the empirical CDF.
    """
    x = np.sort(np.asarray(excesses, dtype=np.float64).ravel())
    if x.size == 0:
        raise ValueError("ks_statistic needs at least one excess")
    if x[0] < 0:
        raise ValueError("excesses must be non-negative")
    n = x.size
    g = -np.expm1(-x / _sigma(tail))
    i = np.arange(1, n + 1, dtype=np.float64)
    return float(max(np.max(i / n - g), np.max(g - (i - 1) / n)))


def ks_anomaly_scan(sorted_desc, k: int, n_a: int, sigma0: float | None = None) -> tuple[int, float]:
    """Pick how many of the largest scores to discard before fitting the tail.

    Candidate ``i`` (1-based) drops the ``i - 1`` largest scores and takes
    the KS distance of the excesses ``y[i..i+k] - y[i+k]`` to an exponential.
    With ``sigma0`` given, every candidate is compared against ``Exp(sigma0)``;
    with ``sigma0=None`` each candidate is compared against the exponential
    with its own mean excess, which is far more sensitive to a handful of
    gross outliers.

    Returns the minimizing ``i`` (smallest on ties) and the rejection
    threshold ``y[i]``.
    """
    y = np.asarray(sorted_desc, dtype=np.float64).ravel()
    if k < 1 or n_a < 1:
        raise ValueError(f"need k >= 1 and n_a >= 1, got k={k}, n_a={n_a}")
    if y.size < n_a + k + 1:
        raise ValueError(
            f"scan needs at least n_a + k + 1 = {n_a + k + 1} scores, got {y.size}"
        )
    if np.any(np.diff(y) > 0):
        raise ValueError("ks_anomaly_scan expects scores sorted in descending order")
    fixed = None if sigma0 is None else ExpTail(sigma0)
    best_i, best_d = 1, math.inf
    for i in range(1, n_a + 1):
        window = y[i - 1:i + k]
        excesses = window[::-1] - window[-1]
        if fixed is None:
            scale = neumaier_sum(excesses) / excesses.size
            if scale <= 0:
                continue
            d = ks_statistic(excesses, scale)
        else:
            d = ks_statistic(excesses, fixed)
        if d < best_d:
            best_i, best_d = i, d
    return best_i, float(y[best_i - 1])


def gamma_posterior(prior: GammaParams, n: int, s: float) -> GammaParams:
    """Conjugate update with ``n`` excesses summing to ``s``."""
    if n < 0 or s < 0:
        raise ValueError(f"need n >= 0 and s >= 0, got n={n!r}, s={s!r}")
    return GammaParams(prior.alpha + n, prior.beta + s)


def map_scale(params: GammaParams) -> float:
    """Tail scale estimate ``beta / (alpha - 1)``."""
    if params.alpha <= 1 or params.beta <= 0:
        raise ValueError(
            f"map_scale needs alpha > 1 and beta > 0, got ({params.alpha}, {params.beta})"
        )
    return params.beta / (params.alpha - 1)
