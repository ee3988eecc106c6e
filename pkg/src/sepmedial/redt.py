"""Reverse Euclidean distance transform and power labeling.

Every ball ``(c, r)`` seeds the height ``r`` at its center; an upper
envelope pass per axis then yields ``max_balls (r - |p - c|**2)`` at every
cell, together with the ball attaining it. That ball is the power-diagram
label of the cell, since the power of ``p`` w.r.t. a ball is exactly
``|p - c|**2 - r``.
"""
from dataclasses import dataclass

import numpy as np

from .balls import BallSet
from .envelope import upper_pass
from .grid import NONE, check_extents, inf_value


@dataclass
class PowerField:
    """Result of :func:`redt_map`.

    value
        ``max(f(s) - |p - s|**2)`` over the seed image ``f`` that holds the
        squared radii at ball centers and 0 elsewhere. Positive exactly on
        the union of the balls.
    power
        ``max_i (r_i - |p - c_i|**2)`` over the balls alone, i.e. minus the
        minimal power. Unclamped; :data:`~sepmedial.grid.NONE`-owned cells
        (empty ball set) hold a large negative sentinel.
    owner
        index into the ball set of a ball attaining ``power``.
    """
    value: np.ndarray
    power: np.ndarray
    owner: np.ndarray

    @property
    def covered(self):
        return self.value > 0


def redt_map(balls, extents):
    ext = check_extents(extents)
    balls.validate(ext)
    # stand-in height for cells without a ball: below anything a real ball
    # can produce anywhere on the grid, so the owner is always a ball
    floor = -inf_value(ext)
    power = np.full(ext, floor, dtype=np.int64)
    owner = np.full(ext, NONE, dtype=np.int64)
    if len(balls):
        idx = tuple(balls.centers.T)
        power[idx] = balls.radii
        owner[idx] = np.arange(len(balls), dtype=np.int64)
        for axis in range(len(ext)):
            upper_pass(power, axis, owner)
    # seeds of height 0 everywhere else can only lift the result to 0
    value = np.maximum(power, 0)
    return PowerField(value, power, owner)


def power_labeling(balls, extents):
    """Same computation as :func:`redt_map`; the labels are ``owner``."""
    return redt_map(balls, extents)


def reconstruct(balls, extents):
    """Union of the open discrete balls, as a bool image."""
    return redt_map(balls, extents).covered


__all__ = ["BallSet", "PowerField", "redt_map", "power_labeling", "reconstruct"]
