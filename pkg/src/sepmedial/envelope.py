"""Lower and upper envelopes of integer parabola families, one row at a time.

A row of heights ``h[y]`` defines the parabolas ``h[y] + (j - y)**2``
(lower envelope, distance transforms) or ``f[x] - (j - x)**2`` (upper
envelope, reverse distance transforms). Both are computed in O(n) by the
stack-of-apexes scan: ``s`` holds the apexes still on the envelope and
``t[q]`` the first position where ``s[q]`` wins.

On exact ties the earlier (smaller) apex keeps the position: the pop test is
strict and separators are the *last* position where the left parabola is
still at least as good. Separators use floor division with a positive
divisor, which is what numpy/numba ``//`` does for int64.

The ``*_pass`` functions apply a kernel to every row of an int64 array
along one axis, in place, optionally carrying a provenance array along
(``prov[p]`` is replaced by ``prov`` of the winning apex on the row).
"""
import numpy as np
from numba import njit, prange

from .errors import ContractError
from .grid import axis_view

#: absolute bound on heights accepted by the public 1D kernels
HEIGHT_BOUND = 2 ** 60


@njit(cache=True, nogil=True)
def _lower_row(h, out, win, s, t):
    n = h.shape[0]
    q = 0
    s[0] = 0
    t[0] = 0
    pushes = 1
    pops = 0
    for u in range(1, n):
        while q >= 0:
            a = s[q]
            x = t[q]
            if h[a] + (x - a) * (x - a) > h[u] + (x - u) * (x - u):
                q -= 1
                pops += 1
            else:
                break
        if q < 0:
            q = 0
            s[0] = u
            pushes += 1
        else:
            a = s[q]
            w = 1 + (u * u - a * a + h[u] - h[a]) // (2 * (u - a))
            if w < n:
                q += 1
                s[q] = u
                t[q] = w
                pushes += 1
    for j in range(n - 1, -1, -1):
        a = s[q]
        out[j] = h[a] + (j - a) * (j - a)
        win[j] = a
        if j == t[q]:
            q -= 1
    return pushes, pops


@njit(cache=True, nogil=True)
def _upper_row(f, out, win, s, t):
    n = f.shape[0]
    q = 0
    s[0] = 0
    t[0] = 0
    pushes = 1
    pops = 0
    for u in range(1, n):
        while q >= 0:
            a = s[q]
            x = t[q]
            if f[a] - (x - a) * (x - a) < f[u] - (x - u) * (x - u):
                q -= 1
                pops += 1
            else:
                break
        if q < 0:
            q = 0
            s[0] = u
            pushes += 1
        else:
            a = s[q]
            w = 1 + (f[a] - f[u] + u * u - a * a) // (2 * (u - a))
            if w < n:
                q += 1
                s[q] = u
                t[q] = w
                pushes += 1
    for j in range(n - 1, -1, -1):
        a = s[q]
        out[j] = f[a] - (j - a) * (j - a)
        win[j] = a
        if j == t[q]:
            q -= 1
    return pushes, pops


BLOCK = 64  # adjacent rows gathered together so each cache line is read once


@njit(parallel=True, cache=True)
def _pass(view, prov, upper, track):
    outer, n, inner = view.shape
    nblk = (inner + BLOCK - 1) // BLOCK
    for idx in prange(outer * nblk):
        i = idx // nblk
        m0 = (idx % nblk) * BLOCK
        nb = min(BLOCK, inner - m0)
        h = np.empty((nb, n), np.int64)
        out = np.empty((nb, n), np.int64)
        win = np.empty((nb, n), np.int64)
        s = np.empty(n, np.int64)
        t = np.empty(n, np.int64)
        for j in range(n):
            for k in range(nb):
                h[k, j] = view[i, j, m0 + k]
        for k in range(nb):
            if upper:
                _upper_row(h[k], out[k], win[k], s, t)
            else:
                _lower_row(h[k], out[k], win[k], s, t)
        for j in range(n):
            for k in range(nb):
                view[i, j, m0 + k] = out[k, j]
        if track:
            for j in range(n):
                for k in range(nb):
                    h[k, j] = prov[i, j, m0 + k]
            for j in range(n):
                for k in range(nb):
                    prov[i, j, m0 + k] = h[k, win[k, j]]


_NO_PROV = np.zeros((1, 1, 1), dtype=np.int64)


def _apply(arr, axis, prov, upper):
    if not (arr.dtype == np.int64 and arr.flags.c_contiguous):
        raise ContractError("envelope passes need a C-contiguous int64 array")
    view = axis_view(arr, axis)
    if prov is None:
        _pass(view, _NO_PROV, upper, False)
    else:
        if prov.shape != arr.shape or not prov.flags.c_contiguous:
            raise ContractError("provenance array must match the value array")
        _pass(view, axis_view(prov, axis), upper, True)


def lower_pass(arr, axis, prov=None):
    """Replace every row along ``axis`` by its lower envelope, in place."""
    _apply(arr, axis, prov, False)


def upper_pass(arr, axis, prov=None):
    """Replace every row along ``axis`` by its upper envelope, in place."""
    _apply(arr, axis, prov, True)


def _row_input(heights):
    h = np.ascontiguousarray(heights, dtype=np.int64)
    if h.ndim != 1 or h.shape[0] == 0:
        raise ContractError("envelope kernels need a non-empty 1D row")
    if np.abs(h).max() > HEIGHT_BOUND:
        raise ContractError("height outside the supported range")
    n = h.shape[0]
    return h, np.empty(n, np.int64), np.empty(n, np.int64), np.empty(n, np.int64), np.empty(n, np.int64)


def lower_envelope(heights, return_counts=False):
    """``out[j] = min_y heights[y] + (j - y)**2`` for a single row.

    With ``return_counts`` the result is ``(out, win, (pushes, pops))`` where
    ``win[j]`` is the apex attaining ``out[j]``.
    """
    h, out, win, s, t = _row_input(heights)
    if h.min() < 0:
        raise ContractError("lower envelope heights must be non-negative")
    counts = _lower_row(h, out, win, s, t)
    if return_counts:
        return out, win, counts
    return out


def upper_envelope(heights, return_counts=False):
    """``out[j] = max_x heights[x] - (j - x)**2`` and the winning apex ``win[j]``."""
    h, out, win, s, t = _row_input(heights)
    counts = _upper_row(h, out, win, s, t)
    if return_counts:
        return out, win, counts
    return out, win
