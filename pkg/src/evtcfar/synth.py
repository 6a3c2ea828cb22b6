"""Synthetic labelled score sequences with slowly drifting nuisance location.

Scores follow the good-high convention of the fastener detector (anomalies
are *low*): ``x[t] = m[t] + eta[t]`` for normal samples and
``x[t] = m[t] + eta[t] - anomaly_offset`` for anomalies.

Random numbers
--------------
All randomness comes from uniform doubles of numpy's ``PCG64`` bit generator
seeded with ``seed`` (``Generator.random``: ``(next_uint64 >> 11) * 2**-53``),
shifted by ``2**-54`` into the open interval (0, 1). Draws are consumed in
three blocks, in this order:

1. location innovations: ``2 * n_steps`` uniforms, Box-Muller
   ``sqrt(-2 ln u1) * cos(2 pi u2)`` on consecutive pairs;
2. noise: ``n * noise_draws`` uniforms (see ``noise`` below);
3. anomaly flags: ``n`` uniforms, anomaly iff ``u < anomaly_rate``.

Noise families (``base_scale`` multiplies the unit draw):

* ``laplace`` (default): inverse CDF ``-sign(u - 1/2) ln(1 - 2|u - 1/2|)``.
  Both tails are exactly exponential.
* ``maxgauss``: maximum of ``pool`` Box-Muller normals, mimicking spatial
  max-pooling of detections (Gumbel domain of attraction).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ._kernels import ar1_path
from .sequence import CONDITIONS, LabeledSequence

NOISE_FAMILIES = ("laplace", "maxgauss")


@dataclass(frozen=True)
class SynthConfig:
    n: int = 10_000
    seed: int = 0
    drift_rate: float = 0.0
    drift_noise: float = 0.0
    base_scale: float = 1.0
    anomaly_rate: float = 0.0
    anomaly_offset: float = 6.0
    segment_len: int | None = None
    mean: float = 0.0
    noise: str = "laplace"
    pool: int = 4
    condition: str = "clear"
    seq_id: str | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if not 0 <= self.drift_rate < 1:
            raise ValueError("drift_rate must lie in [0, 1)")
        if self.drift_noise < 0 or self.base_scale <= 0:
            raise ValueError("drift_noise must be >= 0 and base_scale > 0")
        if not 0 <= self.anomaly_rate <= 1:
            raise ValueError("anomaly_rate must lie in [0, 1]")
        if self.anomaly_offset <= 0:
            raise ValueError("anomaly_offset must be positive")
        if self.segment_len is not None and self.segment_len < 1:
            raise ValueError("segment_len must be positive")
        if self.noise not in NOISE_FAMILIES:
            raise ValueError(f"noise must be one of {NOISE_FAMILIES}")
        if self.pool < 1:
            raise ValueError("pool must be positive")
        if self.condition not in CONDITIONS:
            raise ValueError(f"condition must be one of {CONDITIONS}")

    @property
    def noise_draws(self) -> int:
        return 1 if self.noise == "laplace" else 2 * self.pool


def _uniform(rng, size):
    return rng.random(size) + 2.0 ** -54


def _box_muller(u):
    u1, u2 = u[0::2], u[1::2]
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * math.pi * u2)


def _unit_noise(u, config: SynthConfig):
    if config.noise == "laplace":
        d = u - 0.5
        return -np.sign(d) * np.log1p(-2.0 * np.abs(d))
    g = _box_muller(u).reshape(config.n, config.pool)
    return g.max(axis=1)


def _n_steps(config: SynthConfig) -> int:
    return config.n if config.segment_len is None else -(-config.n // config.segment_len)


def _location(config: SynthConfig, innovations) -> np.ndarray:
    # piecewise constant when segment_len is set: one walk step per segment
    m = ar1_path(innovations, config.drift_rate, config.mean, config.mean)
    if config.segment_len is not None:
        m = np.repeat(m, config.segment_len)[:config.n]
    return m


def generate(config: SynthConfig) -> LabeledSequence:
    """Draw one labelled sequence; identical output for identical config."""
    rng = np.random.Generator(np.random.PCG64(config.seed))
    innovations = config.drift_noise * _box_muller(_uniform(rng, 2 * _n_steps(config)))
    noise = config.base_scale * _unit_noise(_uniform(rng, config.n * config.noise_draws), config)
    labels = (_uniform(rng, config.n) < config.anomaly_rate).astype(np.int8)
    x = _location(config, innovations) + noise - config.anomaly_offset * labels
    return LabeledSequence(
        seq_id=config.seq_id or f"synth-{config.seed}",
        scores=x,
        labels=labels,
        condition=np.full(config.n, config.condition, dtype=object),
    )


def generate_corpus(base: SynthConfig, seeds) -> list[LabeledSequence]:
    return [generate(replace(base, seed=int(s), seq_id=f"{base.seq_id or 'synth'}-{s}"))
            for s in seeds]
