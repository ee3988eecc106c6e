"""Ball sets: integer centers with integer squared radii."""
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

#: largest squared radius accepted, keeps envelope arithmetic inside int64
MAX_RADIUS = 2 ** 58


@dataclass
class BallSet:
    """Balls ``{p : |p - center|**2 < radius}``.

    ``centers`` is an ``(m, d)`` int64 array and ``radii`` the matching
    ``(m,)`` squared radii.
    """
    centers: np.ndarray
    radii: np.ndarray

    def __post_init__(self):
        self.centers = np.asarray(self.centers, dtype=np.int64)
        self.radii = np.asarray(self.radii, dtype=np.int64).reshape(-1)
        if self.centers.ndim != 2:
            self.centers = self.centers.reshape(len(self.radii), -1)
        if self.centers.shape[0] != self.radii.shape[0]:
            raise ValueError("centers and radii have different lengths")

    @classmethod
    def empty(cls, d):
        return cls(np.zeros((0, d), np.int64), np.zeros(0, np.int64))

    @classmethod
    def from_pairs(cls, pairs, d=None):
        pairs = list(pairs)
        if not pairs:
            return cls.empty(d or 1)
        centers = [tuple(np.atleast_1d(c)) for c, _ in pairs]
        return cls(np.array(centers, dtype=np.int64), np.array([r for _, r in pairs]))

    def __len__(self):
        return self.radii.shape[0]

    @property
    def dim(self):
        return self.centers.shape[1]

    def pairs(self):
        """``[(center_tuple, radius), ...]`` for comparisons and printing."""
        return [(tuple(int(v) for v in c), int(r)) for c, r in zip(self.centers, self.radii)]

    def subset(self, mask_or_index):
        return BallSet(self.centers[mask_or_index], self.radii[mask_or_index])

    def validate(self, extents):
        """Raise :class:`DomainError` unless the set fits ``extents``."""
        ext = np.asarray(extents, dtype=np.int64)
        if len(self) == 0:
            return
        if self.dim != len(ext):
            raise DomainError(f"balls are {self.dim}-dimensional, grid is {len(ext)}-dimensional")
        if (self.radii < 1).any():
            raise DomainError("squared radii must be >= 1")
        if (self.radii > MAX_RADIUS).any():
            raise DomainError("squared radius too large")
        if ((self.centers < 0) | (self.centers >= ext)).any():
            raise DomainError("ball center outside the grid")
        if len(np.unique(self.centers, axis=0)) != len(self):
            raise DomainError("two balls share a center")
