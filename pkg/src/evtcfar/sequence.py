from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

CONDITIONS = ("clear", "switch", "ballast", "lubricator")


@dataclass
class LabeledSequence:
    """Scores from one pass, in capture order, with labels and conditions.

    ``labels`` are 0 for normal and 1 for anomaly; ``condition`` holds one
    of :data:`CONDITIONS` per sample.
    """

    seq_id: str
    scores: np.ndarray
    labels: np.ndarray = None
    condition: np.ndarray = None
    frame_index: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        self.scores = np.asarray(self.scores, dtype=np.float64).ravel()
        n = self.scores.shape[0]
        if self.labels is None:
            self.labels = np.zeros(n, dtype=np.int8)
        self.labels = np.asarray(self.labels).astype(np.int8, copy=False).ravel()
        if self.condition is None:
            self.condition = np.full(n, "clear", dtype=object)
        self.condition = np.asarray(self.condition, dtype=object).ravel()
        if self.frame_index is None:
            self.frame_index = np.arange(n, dtype=np.int64)
        self.frame_index = np.asarray(self.frame_index, dtype=np.int64).ravel()
        for name in ("labels", "condition", "frame_index"):
            if getattr(self, name).shape[0] != n:
                raise ValueError(f"{self.seq_id}: {name} length does not match scores")
        if not np.isin(self.labels, (0, 1)).all():
            raise ValueError(f"{self.seq_id}: labels must be 0 or 1")
        unknown = set(self.condition.tolist()) - set(CONDITIONS)
        if unknown:
            raise ValueError(f"{self.seq_id}: unknown condition(s) {sorted(unknown)}")
        if n > 1 and np.any(np.diff(self.frame_index) <= 0):
            raise ValueError(f"{self.seq_id}: frame_index must be strictly increasing")

    def __len__(self):
        return self.scores.shape[0]
