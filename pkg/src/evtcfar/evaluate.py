"""ROC curves, detection rate at a fixed false-alarm rate, and FAR dispersion.

Scores are anomaly-high throughout: a sample alarms when ``score > threshold``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SUBSETS = {
    "clear": ("clear",),
    "clear+switch": ("clear", "switch"),
    "all": ("clear", "switch", "ballast", "lubricator"),
}


@dataclass(frozen=True)
class RocCurve:
    """Operating points ordered by descending threshold.

    One point per distinct score value plus a final ``-inf`` threshold at
    which everything alarms.
    """

    thresholds: np.ndarray
    pfa: np.ndarray
    pd: np.ndarray
    n_pos: int
    n_neg: int

    def __len__(self):
        return self.thresholds.shape[0]

    def points(self):
        return list(zip(self.thresholds.tolist(), self.pfa.tolist(), self.pd.tolist()))


def _split(scores, labels):
    x = np.asarray(scores, dtype=np.float64).ravel()
    y = np.asarray(labels).ravel()
    if x.shape != y.shape:
        raise ValueError("scores and labels must have the same length")
    if not np.isin(y, (0, 1)).all():
        raise ValueError("labels must be 0 or 1")
    return x[y == 1], x[y == 0]


def roc(scores, labels) -> RocCurve:
    pos, neg = _split(scores, labels)
    if pos.size == 0 or neg.size == 0:
        raise ValueError("roc needs at least one positive and one negative sample")
    thresholds = np.unique(np.concatenate([pos, neg]))[::-1]
    pos.sort()
    neg.sort()
    above_pos = pos.size - np.searchsorted(pos, thresholds, side="right")
    above_neg = neg.size - np.searchsorted(neg, thresholds, side="right")
    return RocCurve(
        thresholds=np.append(thresholds, -np.inf),
        pfa=np.append(above_neg / neg.size, 1.0),
        pd=np.append(above_pos / pos.size, 1.0),
        n_pos=int(pos.size),
        n_neg=int(neg.size),
    )


def rates_at(scores, labels, threshold: float) -> tuple[float, float]:
    """``(pfa, pd)`` of the rule ``score > threshold``."""
    pos, neg = _split(scores, labels)
    return float(np.mean(neg > threshold)), float(np.mean(pos > threshold))


def pd_at_pfa(curve: RocCurve, target_pfa: float) -> tuple[float, float]:
    """Detection rate at the lowest threshold whose PFA does not exceed the target.

    No interpolation between points: the achieved PFA is returned alongside
    so small fixtures can be read correctly.
    """
    ok = np.flatnonzero(curve.pfa <= target_pfa)
    if ok.size == 0:
        return 0.0, 0.0
    j = ok[-1]
    return float(curve.pd[j]), float(curve.pfa[j])


def far_dispersion(adapted, labels, block_len: int = 1000) -> tuple[np.ndarray, float]:
    """Alarm rate (``adapted > 0``) of the negatives in consecutive blocks.

    Negatives are taken in sequence order and cut into blocks of
    ``block_len``; a trailing partial block is dropped unless it is the only
    one. Returns the per-block rates and their (population) variance.
    """
    if block_len < 1:
        raise ValueError("block_len must be positive")
    _, neg = _split(adapted, labels)
    alarms = (neg > 0).astype(np.float64)
    n_full = alarms.size // block_len
    if n_full == 0:
        per_block = np.array([alarms.mean()]) if alarms.size else np.zeros(0)
    else:
        per_block = alarms[:n_full * block_len].reshape(n_full, block_len).mean(axis=1)
    variance = float(per_block.var()) if per_block.size else 0.0
    return per_block, variance


def subset_mask(condition, subset: str) -> np.ndarray:
    if subset not in SUBSETS:
        raise ValueError(f"subset must be one of {tuple(SUBSETS)}, got {subset!r}")
    return np.isin(np.asarray(condition, dtype=object), SUBSETS[subset])


def comparison_report(rows) -> str:
    """Plain-text table: condition x PFA x method.

    ``rows`` holds ``(condition, pfa, {method: pd})`` tuples.
    """
    rows = list(rows)
    methods = []
    for _, _, res in rows:
        methods.extend(m for m in res if m not in methods)
    head = ["Condition", "PFA"] + methods
    body = []
    for cond, pfa, res in rows:
        cells = [cond, f"{100 * pfa:.2f}%"]
        cells += [f"{100 * res[m]:.2f}%" if m in res and res[m] is not None else "--"
                  for m in methods]
        body.append(cells)
    widths = [max(len(r[i]) for r in [head] + body) for i in range(len(head))]

    def fmt(cells):
        return " | ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()

    rule = "-+-".join("-" * w for w in widths)
    lines = [fmt(head), rule]
    prev = None
    for cells in body:
        if prev is not None and cells[0] != prev:
            lines.append(rule)
        lines.append(fmt(cells if cells[0] != prev else [""] + cells[1:]))
        prev = cells[0]
    return "\n".join(lines) + "\n"
