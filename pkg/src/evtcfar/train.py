"""Learn the Gamma prior over the tail scale from a labelled training corpus."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .sequence import LabeledSequence
from .tail import GammaParams, find_tail, tail_size

log = logging.getLogger(__name__)

ORIENTATIONS = ("anomaly_low", "anomaly_high")


@dataclass(frozen=True)
class TrainConfig:
    p_u: float = 0.05
    w0: float = 400.0
    orientation: str = "anomaly_low"
    clear_only: bool = False

    def __post_init__(self):
        tail_size(1, self.p_u)
        if not (math.isfinite(self.w0) and self.w0 > 0):
            raise ValueError(f"w0 must be positive, got {self.w0!r}")
        if self.orientation not in ORIENTATIONS:
            raise ValueError(f"orientation must be one of {ORIENTATIONS}")


@dataclass(frozen=True)
class TrainResult:
    prior: GammaParams
    n: int
    s: float
    used: tuple[str, ...]
    skipped: tuple[str, ...]


def _negatives(seq: LabeledSequence, config: TrainConfig) -> np.ndarray:
    keep = seq.labels == 0
    if config.clear_only:
        keep &= seq.condition == "clear"
    x = seq.scores[keep]
    return -x if config.orientation == "anomaly_low" else x


def fit_tail_stats(corpus, config: TrainConfig = TrainConfig(), exclude=()) -> TrainResult:
    """Pool per-sequence tail counts and excess sums over the negatives.

    Sequences whose negatives are too few for a non-empty tail are skipped
    with a warning; a sequence with no negatives at all is an error.
    """
    exclude = set(exclude)
    n_total = 0
    sums = []
    used, skipped = [], []
    for seq in corpus:
        if seq.seq_id in exclude:
            continue
        g = _negatives(seq, config)
        if g.size == 0:
            raise ValueError(f"sequence {seq.seq_id!r} has no negative samples")
        if tail_size(g.size, config.p_u) < 1:
            log.warning("skipping %s: %d negatives is too few for p_u=%g",
                        seq.seq_id, g.size, config.p_u)
            skipped.append(seq.seq_id)
            continue
        t = find_tail(g, config.p_u)
        n_total += t.n
        sums.append(t.s)
        used.append(seq.seq_id)
    if n_total == 0:
        raise ValueError("no tail samples found in the training corpus")
    # fsum is exactly rounded, so the pooled sum does not depend on corpus order
    s_total = math.fsum(sums)
    prior = GammaParams(1.0 + config.w0, config.w0 * s_total / n_total)
    return TrainResult(prior, n_total, s_total, tuple(used), tuple(skipped))


def train(corpus, config: TrainConfig = TrainConfig(), exclude=()) -> GammaParams:
    """Gamma prior with ``w0`` pseudo-samples at the pooled mean tail excess."""
    return fit_tail_stats(corpus, config, exclude).prior
