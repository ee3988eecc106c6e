"""Exact squared Euclidean distance transform and Voronoi labeling.

The first axis is handled by a two-scan 1D distance transform, every
further axis by a lower-envelope pass. All values are int64; a cell with
no reachable background holds ``inf_value(extents)``.
"""
from dataclasses import dataclass

import numpy as np
from numba import njit, prange

from .balls import BallSet
from .envelope import BLOCK, lower_pass
from .errors import DomainError
from .grid import as_binary, axis_view, inf_value


@dataclass
class SdtResult:
    dist: np.ndarray
    infinite: bool


@njit(parallel=True, cache=True)
def _edt_first_axis(img, out, prov, lin, inf, track):
    outer, n, inner = img.shape
    nblk = (inner + BLOCK - 1) // BLOCK
    for idx in prange(outer * nblk):
        i = idx // nblk
        m0 = (idx % nblk) * BLOCK
        nb = min(BLOCK, inner - m0)
        fg = np.empty((nb, n), np.bool_)
        near = np.empty((nb, n), np.int64)
        for j in range(n):
            for k in range(nb):
                fg[k, j] = img[i, j, m0 + k]
        for k in range(nb):
            last = -1
            for j in range(n):
                if not fg[k, j]:
                    last = j
                near[k, j] = last
            nxt = -1
            for j in range(n - 1, -1, -1):
                if not fg[k, j]:
                    nxt = j
                # left neighbour wins ties
                if nxt >= 0 and (near[k, j] < 0 or nxt - j < j - near[k, j]):
                    near[k, j] = nxt
        for j in range(n):
            for k in range(nb):
                b = near[k, j]
                out[i, j, m0 + k] = inf if b < 0 else (j - b) * (j - b)
        if track:
            for j in range(n):
                for k in range(nb):
                    b = near[k, j]
                    prov[i, j, m0 + k] = lin[i, b, m0 + k] if b >= 0 else -1


def _separable(image, track, order=None):
    img = as_binary(image)
    ext = img.shape
    inf = inf_value(ext)
    d = len(ext)
    order = tuple(range(d)) if order is None else tuple(order)
    if sorted(order) != list(range(d)):
        raise ValueError(f"axis order {order} is not a permutation")
    dist = np.empty(ext, dtype=np.int64)
    if track:
        lin = linear_indices(ext)
        prov = np.empty(ext, dtype=np.int64)
        _edt_first_axis(axis_view(img, order[0]), axis_view(dist, order[0]),
                        axis_view(prov, order[0]), axis_view(lin, order[0]), inf, True)
    else:
        prov = None
        dummy = np.zeros((1, 1, 1), np.int64)
        _edt_first_axis(axis_view(img, order[0]), axis_view(dist, order[0]),
                        dummy, dummy, inf, False)
    for axis in order[1:]:
        lower_pass(dist, axis, prov)
    infinite = bool(img.all())
    if infinite:
        dist.fill(inf)
    return dist, prov, infinite


def linear_indices(extents):
    """int64 array holding each cell's own linear index (axis 0 fastest)."""
    n = int(np.prod(extents))
    return np.ascontiguousarray(np.arange(n, dtype=np.int64).reshape(extents, order="F"))


def sdt(image, axis_order=None):
    """Squared distance from every cell to the nearest background cell.

    ``axis_order`` permutes the separable passes; the result does not
    depend on it.
    """
    dist, _, infinite = _separable(image, False, axis_order)
    return SdtResult(dist, infinite)


def voronoi_labeling(image):
    """Linear index of a nearest background cell, for every cell.

    Ties between equidistant background cells are broken deterministically
    by the envelope scans (earlier position wins on each axis).
    """
    img = as_binary(image)
    if img.all():
        raise DomainError("Voronoi labeling needs at least one background cell")
    _, prov, _ = _separable(img, True)
    return prov


def balls_of(image, sdtres):
    """One ball ``(p, dist(p))`` per foreground cell, ordered by linear index."""
    img = as_binary(image)
    if sdtres.infinite:
        raise DomainError("image has no background; distances are infinite")
    if sdtres.dist.shape != img.shape:
        raise DomainError("distance map does not match the image extents")
    # ravel in F order so ball order follows the linear index
    mask = img.ravel(order="F")
    centers = np.argwhere(img.transpose(*reversed(range(img.ndim))))[:, ::-1]
    radii = sdtres.dist.ravel(order="F")[mask]
    return BallSet(centers.astype(np.int64), radii.astype(np.int64))
