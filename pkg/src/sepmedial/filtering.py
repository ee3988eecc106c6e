"""Thickness / covering measurements of medial balls and threshold filtering.

Each ball gets its radius ``rho = sqrt(r)`` and its covering ``kappa``: the
number of shape cells whose power label is that ball. Both are normalized,
``rho`` by a diameter of the shape and ``kappa`` by the shape's cell count,
and a ball is kept when both normalized values reach their thresholds.
Removing a ball loses at most ``kappa`` cells of the reconstruction.
"""
import math
from dataclasses import dataclass

import numpy as np

from .balls import BallSet
from .errors import ContractError, DomainError
from .grid import as_binary
from .redt import power_labeling, reconstruct

DIAMETER_MODES = ("bbox", "exact", "maxball")


@dataclass
class MeasuredBall:
    center: tuple
    r: int
    rho: float
    kappa: int
    rho_norm: float
    kappa_norm: float


@dataclass
class FilterParams:
    rho0: float = 0.0
    kappa0: float = 0.0

    def __post_init__(self):
        for name in ("rho0", "kappa0"):
            v = float(getattr(self, name))
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and non-negative, got {v}")
            setattr(self, name, v)


def shape_diameter(image, mode="bbox"):
    """Diameter of the foreground.

    ``bbox`` is the diagonal of the bounding box of the foreground cells,
    ``exact`` the largest distance between two foreground cells (found
    among convex hull vertices). ``maxball`` is not a shape diameter and is
    only handled by :func:`measure`.
    """
    img = as_binary(image)
    pts = np.argwhere(img)
    if len(pts) == 0:
        raise DomainError("empty foreground has no diameter")
    if mode == "bbox":
        span = pts.max(axis=0) - pts.min(axis=0)
        return float(np.sqrt((span.astype(np.float64) ** 2).sum()))
    if mode != "exact":
        raise ValueError(f"unknown diameter mode {mode!r}, expected one of {DIAMETER_MODES}")
    return _max_pairwise(pts)


def _max_pairwise(pts):
    from scipy.spatial import ConvexHull, QhullError
    from scipy.spatial.distance import pdist

    cand = pts
    if pts.shape[1] > 1 and len(pts) > pts.shape[1] + 1:
        try:
            cand = pts[ConvexHull(pts).vertices]
        except QhullError:
            # flat point set: extreme points of each axis are not enough,
            # fall back to the cells on the bounding box faces
            lo, hi = pts.min(axis=0), pts.max(axis=0)
            cand = pts[((pts == lo) | (pts == hi)).any(axis=1)]
    if len(cand) < 2:
        return 0.0
    best = 0.0
    cand = cand.astype(np.float64)
    for i in range(0, len(cand), 2048):
        chunk = cand[i:]
        if len(chunk) <= 2048:
            best = max(best, pdist(chunk).max())
            break
        d2 = ((chunk[:2048, None, :] - chunk[None, :, :]) ** 2).sum(-1)
        best = max(best, float(np.sqrt(d2.max())))
    return float(best)


def measure(rdma_balls, image, diameter="bbox"):
    """Measure every ball of a set that reconstructs ``image``."""
    img = as_binary(image)
    area = int(img.sum())
    if area == 0:
        raise DomainError("empty foreground")
    if len(rdma_balls) == 0:
        raise ContractError("no balls given for a non-empty shape")
    field = power_labeling(rdma_balls, img.shape)
    covered = field.value > 0
    kappa = np.bincount(field.owner[covered], minlength=len(rdma_balls))
    if diameter == "maxball":
        # rho normalized by the thickest ball, so the largest rho_norm is 1
        diam = math.sqrt(int(rdma_balls.radii.max()))
    else:
        diam = shape_diameter(img, diameter)
    out = []
    for (c, r), k in zip(rdma_balls.pairs(), kappa):
        rho = math.sqrt(r)
        out.append(MeasuredBall(c, r, rho, int(k), rho / diam if diam > 0 else 0.0, int(k) / area))
    return out


def renormalize(measured, diameter, area):
    """Recompute the normalized columns for another diameter / area."""
    return [MeasuredBall(m.center, m.r, m.rho, m.kappa,
                         m.rho / diameter if diameter > 0 else 0.0, m.kappa / area)
            for m in measured]


def filter_balls(measured, params):
    keep = [m for m in measured if m.rho_norm >= params.rho0 and m.kappa_norm >= params.kappa0]
    return _to_ballset(keep, measured)


def _to_ballset(kept, measured):
    d = len(measured[0].center) if measured else 1
    if not kept:
        return BallSet.empty(d)
    return BallSet(np.array([m.center for m in kept], dtype=np.int64),
                   np.array([m.r for m in kept], dtype=np.int64))


def filtered_reconstruct(measured, params, extents):
    """Reconstruct the filtered set.

    Returns ``(image, lost_cells)`` where ``lost_cells`` counts the covered
    cells of the full set that the filtered set no longer covers.
    """
    full = reconstruct(_to_ballset(measured, measured), extents)
    kept = reconstruct(filter_balls(measured, params), extents)
    return kept, int(full.sum()) - int(kept.sum())
