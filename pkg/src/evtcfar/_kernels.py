"""Scalar kernels shared by the tail statistics and the window engine.

Every routine here performs the same floating-point operations in the same
order as its vectorized numpy counterpart in :mod:`evtcfar.window`, so both
backends produce bit-identical output.
"""
import numpy as np

from ._backend import njit


@njit(cache=True, nogil=True)
def neumaier_sum(values):
    """Compensated (Kahan-Babuska) sum, in the order given."""
    s = 0.0
    c = 0.0
    for i in range(values.shape[0]):
        v = values[i]
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
    return s + c


@njit(cache=True, nogil=True)
def tail_of_sorted(buf, m, k):
    """Threshold and excess sum for the top ``k`` of ``buf[:m]`` (ascending).

    The threshold is the (k+1)-th largest value; excesses are summed from the
    smallest upwards.
    """
    u = buf[m - k - 1]
    s = 0.0
    c = 0.0
    for j in range(m - k, m):
        v = buf[j] - u
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
    return u, s + c


@njit(cache=True, nogil=True)
def sorted_insert(buf, m, value):
    # upper bound, so equal values keep arrival order
    lo = 0
    hi = m
    while lo < hi:
        mid = (lo + hi) >> 1
        if buf[mid] <= value:
            lo = mid + 1
        else:
            hi = mid
    for j in range(m, lo, -1):
        buf[j] = buf[j - 1]
    buf[lo] = value
    return m + 1


@njit(cache=True, nogil=True)
def sorted_remove(buf, m, value):
    """Remove one copy of ``value``; returns the new size or -1 if absent."""
    lo = 0
    hi = m
    while lo < hi:
        mid = (lo + hi) >> 1
        if buf[mid] < value:
            lo = mid + 1
        else:
            hi = mid
    if lo == m or buf[lo] != value:
        return -1
    for j in range(lo, m - 1):
        buf[j] = buf[j + 1]
    return m - 1


@njit(cache=True, nogil=True)
def sliding_tail_stats(x, lo, hi, k, u_out, s_out):
    """Tail threshold and excess sum for windows ``x[lo[c]:hi[c]]``.

    ``lo`` and ``hi`` must be nondecreasing; ``k[c]`` is the tail size of
    window ``c``. Each step costs O(log L) comparisons plus an element shift.
    """
    cap = 1
    for c in range(lo.shape[0]):
        if hi[c] - lo[c] + 1 > cap:
            cap = hi[c] - lo[c] + 1
    buf = np.empty(cap, dtype=np.float64)
    m = 0
    cur_lo = lo[0]
    cur_hi = lo[0]
    for c in range(lo.shape[0]):
        while cur_hi < hi[c]:
            m = sorted_insert(buf, m, x[cur_hi])
            cur_hi += 1
        while cur_lo < lo[c]:
            m = sorted_remove(buf, m, x[cur_lo])
            cur_lo += 1
        u, s = tail_of_sorted(buf, m, k[c])
        u_out[c] = u
        s_out[c] = s


@njit(cache=True, nogil=True)
def ar1_path(innovations, phi, mean, start):
    """Mean-reverting walk ``m[t] = m[t-1] + phi * (mean - m[t-1]) + eps[t]``."""
    out = np.empty(innovations.shape[0], dtype=np.float64)
    prev = start
    for t in range(innovations.shape[0]):
        prev = prev + phi * (mean - prev) + innovations[t]
        out[t] = prev
    return out
