"""Per-sample score adaptation for a constant false-alarm rate.

Pipeline for one sequence:

1. orient the scores so anomalies sit in the upper tail;
2. scan the sequence tail with KS distances to find and reject gross
   outliers, then fold the cleaned tail into the trained prior;
3. for every sample, update that posterior with the tail of its window and
   shift the score so that thresholding at 0 alarms with probability p_f.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._kernels import neumaier_sum
from .sequence import LabeledSequence
from .tail import GammaParams, cfar_offset, ks_anomaly_scan, map_scale, tail_size
from .train import ORIENTATIONS
from .window import BOUNDARIES, WindowConfig, window_stats_all

# "refit": each scan candidate is tested against its own mean excess;
# "prior": every candidate is tested against the prior scale
KS_SCALES = ("refit", "prior")


@dataclass(frozen=True)
class AdaptConfig:
    p_u: float = 0.05
    p_f: float = 0.001
    w1: float = 100.0
    L: int = 101
    n_a: int = 12
    orientation: str = "anomaly_low"
    censor: bool = True
    boundary: str = "clamp"
    ks_scale: str = "refit"
    negate_output: bool = False
    diagnostics: bool = False

    def __post_init__(self):
        if not (0 < self.p_f < self.p_u < 1):
            raise ValueError(f"need 0 < p_f < p_u < 1, got p_f={self.p_f}, p_u={self.p_u}")
        if not (math.isfinite(self.w1) and self.w1 >= 0):
            raise ValueError(f"w1 must be >= 0, got {self.w1!r}")
        if self.n_a < 1:
            raise ValueError(f"n_a must be >= 1, got {self.n_a}")
        if self.orientation not in ORIENTATIONS:
            raise ValueError(f"orientation must be one of {ORIENTATIONS}")
        if self.boundary not in BOUNDARIES:
            raise ValueError(f"boundary must be one of {BOUNDARIES}")
        if self.ks_scale not in KS_SCALES:
            raise ValueError(f"ks_scale must be one of {KS_SCALES}")
        WindowConfig(self.L, self.p_u, None, self.boundary)


@dataclass
class AdaptedSequence:
    seq_id: str
    adapted_scores: np.ndarray
    u_prime: float
    sigma_seq: float
    posterior: GammaParams
    per_sample_sigma: np.ndarray | None = None
    per_sample_u: np.ndarray | None = None

    def __len__(self):
        return self.adapted_scores.shape[0]


def orient(scores, orientation: str) -> np.ndarray:
    """Map scores so that anomalies are large (negate ``anomaly_low`` input)."""
    x = np.asarray(scores, dtype=np.float64)
    if orientation == "anomaly_low":
        return -x
    if orientation == "anomaly_high":
        return x.copy()
    raise ValueError(f"orientation must be one of {ORIENTATIONS}, got {orientation!r}")


def sequence_posterior(oriented, prior: GammaParams, config: AdaptConfig) -> tuple[GammaParams, float]:
    """Fold the outlier-cleaned sequence tail into ``prior``.

    The tail enters with weight ``w1`` at its mean excess. Returns the
    posterior and the outlier rejection threshold ``u_prime``.
    """
    z = np.asarray(oriented, dtype=np.float64).ravel()
    k = tail_size(z.size, config.p_u)
    if k < 1 or z.size < config.n_a + k + 1:
        raise ValueError(
            f"sequence of {z.size} samples is too short for the outlier scan "
            f"(needs n_a + floor(N * p_u) + 1 with a non-empty tail)"
        )
    y = np.sort(z)[::-1]
    sigma0 = map_scale(prior) if config.ks_scale == "prior" else None
    i_hat, u_prime = ks_anomaly_scan(y, k, config.n_a, sigma0)
    top = y[i_hat - 1:i_hat + k]
    excesses = top[::-1] - top[-1]
    mean_excess = neumaier_sum(excesses) / excesses.size
    if mean_excess == 0 and prior.beta == 0:
        raise ValueError("degenerate sequence: zero tail excess under an improper prior")
    return GammaParams(prior.alpha + config.w1, prior.beta + config.w1 * mean_excess), u_prime


def adapt_scores(z, posterior: GammaParams, u_prime: float | None, config: AdaptConfig,
                 backend: str | None = None):
    """Windowed posterior update and CFAR shift of oriented scores ``z``.

    Returns ``(adapted, sigma, u)`` arrays in the anomaly-high orientation.
    """
    wcfg = WindowConfig(config.L, config.p_u, u_prime if config.censor else None, config.boundary)
    stats = window_stats_all(z, wcfg, backend=backend)
    alpha = posterior.alpha + stats.n
    beta = posterior.beta + stats.s
    if np.any(beta <= 0):
        raise ValueError("window posterior has beta = 0 (constant window under improper prior)")
    sigma = beta / (alpha - 1)
    offset = sigma * math.log(config.p_u / config.p_f)
    return (z - stats.u) - offset, sigma, stats.u


def adapt_sequence(seq, prior: GammaParams, config: AdaptConfig = AdaptConfig(),
                   backend: str | None = None) -> AdaptedSequence:
    """Adapt one sequence so that ``adapted > 0`` flags anomalies at rate ~p_f."""
    if not isinstance(seq, LabeledSequence):
        seq = LabeledSequence("seq", seq)
    if not np.all(np.isfinite(seq.scores)):
        raise ValueError(f"{seq.seq_id}: scores must be finite")
    if config.boundary == "clamp" and len(seq) < config.L:
        raise ValueError(f"{seq.seq_id}: {len(seq)} samples is shorter than the window L={config.L}")
    z = orient(seq.scores, config.orientation)
    posterior, u_prime = sequence_posterior(z, prior, config)
    adapted, sigma, u = adapt_scores(z, posterior, u_prime, config, backend=backend)
    if config.negate_output:
        adapted = -adapted
    return AdaptedSequence(
        seq_id=seq.seq_id,
        adapted_scores=adapted,
        u_prime=u_prime,
        sigma_seq=map_scale(posterior),
        posterior=posterior,
        per_sample_sigma=sigma if config.diagnostics else None,
        per_sample_u=u if config.diagnostics else None,
    )


def adapt_corpus(corpus, prior: GammaParams, config: AdaptConfig = AdaptConfig(),
                 jobs: int = 1, backend: str | None = None):
    """Adapt every sequence; returns ``(seq_id, AdaptedSequence | Exception)`` in input order."""

    def run(seq):
        try:
            return seq.seq_id, adapt_sequence(seq, prior, config, backend=backend)
        except ValueError as exc:
            return seq.seq_id, exc

    if jobs <= 1:
        return [run(seq) for seq in corpus]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run, corpus))
