"""Causal convolution machinery shared by every recurrence in the package.

All solvers reduce to the lower-triangular linear recurrence

    x[m] = (f[m] + sum_{s<m} w[m - s] * x[s]) / d,    m >= 1,

with ``x[0]`` given.  ``x`` and ``f`` may carry a trailing axis of independent
paths.  The history sum is either evaluated directly (O(N^2)) or by a
divide-and-conquer scheme in which the contribution of a finished half to the
unfinished half is a single FFT convolution, giving O(N log^2 N).  The leaves
of the recursion are ``block`` samples long and are always evaluated directly,
so results are deterministic for a fixed block size.
"""

from __future__ import annotations

import numba
import numpy as np
from scipy import fft as sfft

DEFAULT_BLOCK = 4096


@numba.njit(cache=True, nogil=True)
def _leaf_1d(x, f, w, d, acc, lo, hi):
    start = lo if lo > 0 else 1
    for i in range(start, hi):
        s = acc[i]
        for j in range(lo, i):
            s += w[i - j] * x[j]
        x[i] = (f[i] + s) / d


@numba.njit(cache=True, nogil=True)
def _leaf_2d(x, f, w, d, acc, lo, hi):
    npaths = x.shape[1]
    start = lo if lo > 0 else 1
    for i in range(start, hi):
        for p in range(npaths):
            s = acc[i, p]
            for j in range(lo, i):
                s += w[i - j] * x[j, p]
            x[i, p] = (f[i, p] + s) / d


def _fft_conv_tail(seg, wseg, first, count):
    """Return ``(seg * wseg)[first:first+count]`` along axis 0 via real FFTs."""
    n = seg.shape[0] + wseg.shape[0] - 1
    nfft = sfft.next_fast_len(n, real=True)
    sw = sfft.rfft(wseg, nfft)
    ss = sfft.rfft(seg, nfft, axis=0)
    if seg.ndim == 2:
        sw = sw[:, None]
    out = sfft.irfft(ss * sw, nfft, axis=0)
    return out[first:first + count]


def causal_solve(w, f, x0, d=1.0, fft=True, block=DEFAULT_BLOCK):
    """Solve ``x[m] = (f[m] + sum_{s<m} w[m-s] x[s]) / d`` for ``m = 1..N-1``.

    Parameters
    ----------
    w : array_like, shape (N,)
        Lag weights; ``w[0]`` is never used.
    f : array_like, shape (N,) or (N, P)
        Forcing.  ``f[0]`` is ignored.
    x0 : float or array_like of shape (P,)
        Initial value(s).
    d : float
        Diagonal divisor, must be nonzero.
    fft : bool
        Use the divide-and-conquer FFT path instead of direct summation.
    block : int
        Leaf size of the FFT path.

    Returns
    -------
    numpy.ndarray
        Array with the shape of ``f``.
    """
    w = np.ascontiguousarray(w, dtype=float)
    f = np.ascontiguousarray(f, dtype=float)
    n = f.shape[0]
    if w.shape[0] < n:
        raise ValueError("weight array shorter than the requested horizon")
    if d == 0.0:
        raise ZeroDivisionError("diagonal divisor is zero")
    x = np.zeros_like(f)
    x[0] = x0
    acc = np.zeros_like(f)
    leaf = _leaf_2d if f.ndim == 2 else _leaf_1d
    if n == 1:
        return x
    if not fft or n <= block:
        leaf(x, f, w, float(d), acc, 0, n)
        return x

    # iterative post-order traversal keeps the recursion depth out of Python
    stack = [(0, n, False)]
    while stack:
        lo, hi, merged = stack.pop()
        if hi - lo <= block:
            leaf(x, f, w, float(d), acc, lo, hi)
            continue
        mid = (lo + hi) // 2
        if not merged:
            stack.append((lo, hi, True))
            stack.append((lo, mid, False))
            continue
        # left half [lo, mid) is final; push its influence onto [mid, hi)
        seg = x[lo:mid]
        wseg = w[: hi - lo]
        acc[mid:hi] += _fft_conv_tail(seg, wseg, mid - lo, hi - mid)
        stack.append((mid, hi, False))
    return x


def causal_convolve(w, x, fft=True):
    """Return ``y[m] = sum_{s=0}^{m} w[m-s] x[s]`` for ``m < len(x)``."""
    w = np.asarray(w, dtype=float)
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    if fft:
        return _fft_conv_tail(x, w[:n], 0, n)
    out = np.empty(n)
    for m in range(n):
        out[m] = np.dot(w[m::-1], x[: m + 1])
    return out


def lagged_products(x, lags, length=None):
    """Return ``sum_{s<length} x[s] x[s+lag]`` for each lag (direct dot products)."""
    x = np.asarray(x, dtype=float)
    out = np.empty(len(lags))
    for i, lag in enumerate(lags):
        m = x.shape[0] - lag if length is None else length
        out[i] = np.dot(x[:m], x[lag:lag + m])
    return out
