"""Sliding-window tail statistics.

For every sample ``i`` of a sequence, report the tail threshold ``u``, the
tail count ``n`` and the excess sum ``s`` of the length-``L`` window
associated with ``i``. Two interchangeable paths compute the same numbers
bit for bit:

* ``numba``: one pass over the sequence keeping the window as a sorted
  buffer (binary-search insert/remove).
* ``numpy``: vectorized ``np.partition`` over chunks of a strided window view.

:class:`TailWindow` exposes the incremental multiset directly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from . import _backend
from ._kernels import (
    sliding_tail_stats,
    sorted_insert,
    sorted_remove,
    tail_of_sorted,
)
from .tail import _FLOOR_SLACK, TailSample, find_tail, tail_size

BOUNDARIES = ("clamp", "shrink")
_CHUNK = 16384


@dataclass(frozen=True)
class WindowConfig:
    L: int = 101
    p_u: float = 0.05
    censor_at: float | None = None
    boundary: str = "clamp"

    def __post_init__(self):
        if self.L < 1 or self.L % 2 == 0:
            raise ValueError(f"window length L must be odd and positive, got {self.L}")
        if tail_size(self.L, self.p_u) < 1:
            raise ValueError(
                f"L={self.L} is too short for p_u={self.p_u}: need L >= {math.ceil(1 / self.p_u)}"
            )
        if self.boundary not in BOUNDARIES:
            raise ValueError(f"boundary must be one of {BOUNDARIES}, got {self.boundary!r}")

    @property
    def half(self) -> int:
        return (self.L - 1) // 2


@dataclass(frozen=True)
class WindowTailStats:
    """Per-sample window tail statistics, one entry per center index."""

    u: np.ndarray
    n: np.ndarray
    s: np.ndarray
    lo: np.ndarray
    hi: np.ndarray

    def __len__(self):
        return self.u.shape[0]

    def at(self, i: int) -> tuple[float, int, float]:
        return float(self.u[i]), int(self.n[i]), float(self.s[i])


def window_bounds(N: int, config: WindowConfig) -> tuple[np.ndarray, np.ndarray]:
    """Half-open ``[lo, hi)`` window for every center index."""
    h = config.half
    centers = np.arange(N, dtype=np.int64)
    if config.boundary == "clamp":
        if N < config.L:
            raise ValueError(f"sequence of length {N} is shorter than the window L={config.L}")
        lo = np.clip(centers - h, 0, N - config.L)
        return lo, lo + config.L
    lo = np.maximum(centers - h, 0)
    hi = np.minimum(centers + h + 1, N)
    return lo, hi


def _prepare(scores, config: WindowConfig) -> np.ndarray:
    x = np.ascontiguousarray(scores, dtype=np.float64).ravel()
    if not np.all(np.isfinite(x)):
        raise ValueError("scores must be finite")
    if config.censor_at is not None:
        x = np.minimum(x, config.censor_at)
    return x


def _tail_counts(lo, hi, p_u):
    lengths = hi - lo
    k = np.floor(lengths * p_u + _FLOOR_SLACK).astype(np.int64)
    if np.any(k < 1):
        bad = int(np.argmax(k < 1))
        raise ValueError(
            f"window at index {bad} has {int(lengths[bad])} samples, too few for p_u={p_u}"
        )
    return k


def _stats_numba(x, lo, hi, k):
    u = np.empty(lo.shape[0])
    s = np.empty(lo.shape[0])
    sliding_tail_stats(x, lo, hi, k, u, s)
    return u, s


def _tail_rows(top):
    """Threshold and compensated excess sum of each row of ascending top values."""
    u = top[:, 0].copy()
    s = np.zeros(top.shape[0])
    c = np.zeros(top.shape[0])
    for j in range(1, top.shape[1]):
        v = top[:, j] - u
        t = s + v
        c += np.where(np.abs(s) >= np.abs(v), (s - t) + v, (v - t) + s)
        s = t
    return u, s + c


def _stats_numpy(x, lo, hi, k):
    n_win = lo.shape[0]
    u = np.empty(n_win)
    s = np.empty(n_win)
    lengths = hi - lo
    for m in np.unique(lengths):
        m = int(m)
        idx = np.flatnonzero(lengths == m)
        kk = int(k[idx[0]])
        # identical windows (clamped edges) are computed once
        starts, inverse = np.unique(lo[idx], return_inverse=True)
        view = sliding_window_view(x, m)
        us = np.empty(starts.shape[0])
        ss = np.empty(starts.shape[0])
        for a in range(0, starts.shape[0], _CHUNK):
            rows = view[starts[a:a + _CHUNK]]
            top = np.sort(np.partition(rows, m - kk - 1, axis=1)[:, m - kk - 1:], axis=1)
            us[a:a + _CHUNK], ss[a:a + _CHUNK] = _tail_rows(top)
        u[idx] = us[inverse]
        s[idx] = ss[inverse]
    return u, s


def window_stats_all(scores, config: WindowConfig, backend: str | None = None) -> WindowTailStats:
    """Tail statistics of the window around every sample of ``scores``.

    Equivalent to running :func:`~evtcfar.tail.find_tail` on each window
    (after clipping values above ``config.censor_at``, when set).
    """
    x = _prepare(scores, config)
    lo, hi = window_bounds(x.shape[0], config)
    k = _tail_counts(lo, hi, config.p_u)
    if _backend.resolve(backend) == "numba":
        u, s = _stats_numba(x, lo, hi, k)
    else:
        u, s = _stats_numpy(x, lo, hi, k)
    return WindowTailStats(u=u, n=k, s=s, lo=lo, hi=hi)


def naive_window_stats(scores, config: WindowConfig) -> WindowTailStats:
    """Reference implementation: sort every window independently."""
    x = _prepare(scores, config)
    lo, hi = window_bounds(x.shape[0], config)
    u = np.empty(x.shape[0])
    n = np.empty(x.shape[0], dtype=np.int64)
    s = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        t = find_tail(x[lo[i]:hi[i]], config.p_u)
        u[i], n[i], s[i] = t.u, t.n, t.s
    return WindowTailStats(u=u, n=n, s=s, lo=lo, hi=hi)


class TailWindow:
    """Mutable multiset of window values with O(log L) tail queries.

    >>> w = TailWindow(range(1, 101), p_u=0.05)
    >>> w.update(remove=1, insert=101).query().u
    96.0
    """

    def __init__(self, values=(), p_u: float = 0.05, capacity: int | None = None):
        vals = np.sort(np.asarray(values, dtype=np.float64).ravel())
        if not np.all(np.isfinite(vals)):
            raise ValueError("window values must be finite")
        tail_size(1, p_u)  # validates p_u
        self.p_u = p_u
        cap = max(capacity or 0, vals.size, 16)
        self._buf = np.empty(cap + 1)
        self._buf[:vals.size] = vals
        self._m = vals.size

    def __len__(self):
        return self._m

    def values(self) -> np.ndarray:
        return self._buf[:self._m].copy()

    def insert(self, value: float) -> TailWindow:
        value = float(value)
        if not math.isfinite(value):
            raise ValueError("window values must be finite")
        if self._m + 1 >= self._buf.shape[0]:
            grown = np.empty(2 * self._buf.shape[0])
            grown[:self._m] = self._buf[:self._m]
            self._buf = grown
        self._m = sorted_insert(self._buf, self._m, value)
        return self

    def remove(self, value: float) -> TailWindow:
        m = sorted_remove(self._buf, self._m, float(value))
        if m < 0:
            raise KeyError(f"{value!r} is not in the window")
        self._m = m
        return self

    def update(self, remove: float, insert: float) -> TailWindow:
        """Slide by one sample: drop ``remove`` and add ``insert``."""
        if not math.isfinite(float(insert)):
            raise ValueError("window values must be finite")
        return self.remove(remove).insert(insert)

    def query(self) -> TailSample:
        k = tail_size(self._m, self.p_u)
        if k < 1:
            raise ValueError(f"window of {self._m} values is too short for p_u={self.p_u}")
        u, s = tail_of_sorted(self._buf, self._m, k)
        excesses = self._buf[self._m - k:self._m] - u
        return TailSample(u=float(u), excesses=excesses, n=k, s=float(s))


def incremental_update(state: TailWindow, remove: float, insert: float) -> TailWindow:
    """Functional spelling of :meth:`TailWindow.update`."""
    return state.update(remove, insert)
