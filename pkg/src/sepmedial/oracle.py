"""Brute-force reference implementations.

Nothing here shares code with the separable algorithms: every result is a
direct min / max / argmin over explicit cell and ball lists. Sizes are
guarded because the costs are quadratic.
"""
import numpy as np

from .balls import BallSet
from .errors import DomainError

SDT_GUARD = 10 ** 6
DMA_GUARD = 10 ** 5
_BUDGET = 2 ** 24  # pairwise entries per block


def _coords(shape):
    # (N, d) coordinates in linear-index order (axis 0 fastest)
    grids = np.meshgrid(*[np.arange(n) for n in shape], indexing="ij")
    return np.stack([g.ravel(order="F") for g in grids], axis=1).astype(np.int64)


def _block(n, d):
    return max(1, _BUDGET // max(1, n * d))


def _guard(n, limit):
    if n > limit:
        raise DomainError(f"brute force oracle limited to {limit} cells, got {n}")


def _unflatten(values, shape):
    return np.ascontiguousarray(values.reshape(shape, order="F"))


def brute_sdt(image):
    img = np.asarray(image, dtype=bool)
    _guard(img.size, SDT_GUARD)
    pts = _coords(img.shape)
    bg = pts[~img.ravel(order="F")]
    inf = sum((n - 1) ** 2 for n in img.shape) + 1
    out = np.full(len(pts), inf, dtype=np.int64)
    if len(bg):
        step = _block(len(bg), img.ndim)
        for i in range(0, len(pts), step):
            p = pts[i:i + step]
            d2 = ((p[:, None, :] - bg[None, :, :]) ** 2).sum(-1)
            out[i:i + step] = d2.min(axis=1)
    return _unflatten(out, img.shape)


def brute_redt(balls, extents):
    """``max(f(s) - |p - s|**2)`` over seeds: squared radii at centers, 0 elsewhere."""
    shape = tuple(extents)
    _guard(int(np.prod(shape)), SDT_GUARD)
    pts = _coords(shape)
    seeds = np.zeros(len(pts), dtype=np.int64)
    strides = np.cumprod((1,) + shape[:-1])
    if len(balls):
        seeds[balls.centers @ strides] = balls.radii
    out = np.empty(len(pts), dtype=np.int64)
    step = _block(len(pts), len(shape))
    for i in range(0, len(pts), step):
        p = pts[i:i + step]
        d2 = ((p[:, None, :] - pts[None, :, :]) ** 2).sum(-1)
        out[i:i + step] = (seeds[None, :] - d2).max(axis=1)
    return _unflatten(out, shape)


def brute_union(balls, extents):
    """Union of the open balls ``|p - c|**2 < r`` by direct membership tests."""
    shape = tuple(extents)
    pts = _coords(shape)
    inside = np.zeros(len(pts), dtype=bool)
    for c, r in zip(balls.centers, balls.radii):
        inside |= ((pts - c) ** 2).sum(1) < r
    return _unflatten(inside, shape)


def _ball_masks(centers, radii, pts):
    d2 = ((centers[:, None, :] - pts[None, :, :]) ** 2).sum(-1)
    return d2 < radii[:, None]


def brute_dma(image):
    """Discretely maximal balls among all distance-map balls.

    A ball is the set of grid cells strictly inside it. It is dropped when
    that set is a proper subset of another ball's set. Balls with identical
    sets are the same discrete ball and are all kept.
    """
    img = np.asarray(image, dtype=bool)
    _guard(img.size, DMA_GUARD)
    dist = brute_sdt(img)
    if img.all():
        raise DomainError("image has no background cell")
    pts = _coords(img.shape)
    fg = img.ravel(order="F")
    centers = pts[fg]
    radii = dist.ravel(order="F")[fg]
    if len(centers) == 0:
        return BallSet.empty(img.ndim)
    masks = _ball_masks(centers, radii, pts).astype(np.float32)
    sizes = masks.sum(axis=1)
    inter = masks @ masks.T
    contained = (inter == sizes[:, None]) & (sizes[None, :] > sizes[:, None])
    maximal = ~contained.any(axis=1)
    return BallSet(centers[maximal], radii[maximal])


def brute_power_label(balls, extents):
    """Argmin of the power ``|p - c|**2 - r`` per cell.

    Returns ``(labels, ties)``; on ties the smallest ball index wins and the
    cell is flagged in ``ties``.
    """
    shape = tuple(extents)
    _guard(int(np.prod(shape)), SDT_GUARD)
    pts = _coords(shape)
    if len(balls) == 0:
        return _unflatten(np.full(len(pts), -1, np.int64), shape), _unflatten(np.zeros(len(pts), bool), shape)
    power = ((pts[:, None, :] - balls.centers[None, :, :]) ** 2).sum(-1) - balls.radii[None, :]
    labels = power.argmin(axis=1)
    best = power.min(axis=1)
    ties = (power == best[:, None]).sum(axis=1) > 1
    return _unflatten(labels.astype(np.int64), shape), _unflatten(ties, shape)
