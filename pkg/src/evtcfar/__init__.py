"""Bayesian extreme-value score adaptation for constant false-alarm rate detection."""
from ._backend import BACKEND
from .adapt import AdaptConfig, AdaptedSequence, adapt_corpus, adapt_sequence, orient, sequence_posterior
from .evaluate import RocCurve, far_dispersion, pd_at_pfa, roc
from .sequence import LabeledSequence
from .synth import SynthConfig, generate
from .tail import (
    ExpTail,
    GammaParams,
    TailSample,
    cfar_offset,
    exp_tail_cdf,
    find_tail,
    gamma_posterior,
    ks_anomaly_scan,
    ks_statistic,
    map_scale,
)
from .train import TrainConfig, train
from .window import TailWindow, WindowConfig, incremental_update, window_stats_all

__version__ = "0.1.0"
