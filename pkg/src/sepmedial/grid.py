"""Dense d-dimensional grids and row addressing.

Grids are plain numpy arrays whose shape is the extents tuple
``(n_0, ..., n_{d-1})``. Binary images are ``bool`` arrays, scalar fields
are ``int64`` and site grids are ``int64`` with :data:`NONE` for "no site".

Linear cell indices follow the row-major convention with axis 0 varying
fastest, i.e. ``index = c_0 + n_0 * (c_1 + n_1 * (c_2 + ...))``. This is
the numpy ``order="F"`` ravel of the coordinates, independent of how the
array happens to be laid out in memory.
"""
from dataclasses import dataclass
from math import prod

import numpy as np

MAX_DIM = 8
MAX_AXIS_SIZE = 2 ** 20

#: site index meaning "no site"
NONE = -1


def check_extents(extents):
    """Validate and normalise an extents sequence to a tuple of ints."""
    ext = tuple(int(n) for n in extents)
    if not 1 <= len(ext) <= MAX_DIM:
        raise ValueError(f"dimension must be in [1, {MAX_DIM}], got {len(ext)}")
    for n in ext:
        if not 1 <= n <= MAX_AXIS_SIZE:
            raise ValueError(f"axis size must be in [1, {MAX_AXIS_SIZE}], got {n}")
    if prod(ext) >= 2 ** 64:
        raise ValueError("total cell count does not fit in 64 bits")
    return ext


def max_sqdist(extents):
    """Largest squared distance between two cells of the grid."""
    return sum((n - 1) ** 2 for n in extents)


def inf_value(extents):
    """The "no background reachable" marker: one past :func:`max_sqdist`."""
    return max_sqdist(extents) + 1


def linear_index(extents, coords):
    ext = check_extents(extents)
    if len(coords) != len(ext):
        raise IndexError(f"expected {len(ext)} coordinates, got {len(coords)}")
    idx = 0
    stride = 1
    for c, n in zip(coords, ext):
        c = int(c)
        if not 0 <= c < n:
            raise IndexError(f"coordinate {c} out of range [0, {n})")
        idx += c * stride
        stride *= n
    return idx


def coords_of(extents, index):
    ext = check_extents(extents)
    index = int(index)
    if not 0 <= index < prod(ext):
        raise IndexError(f"index {index} out of range")
    out = []
    for n in ext:
        index, c = divmod(index, n)
        out.append(c)
    return tuple(out)


def strides_of(extents):
    """Linear-index stride of each axis."""
    out = []
    s = 1
    for n in extents:
        out.append(s)
        s *= n
    return tuple(out)


@dataclass(frozen=True)
class Row:
    """One 1D line of cells along ``axis``.

    Cell ``i`` of the row has coordinates ``base`` with ``base[axis] = i``
    and linear index ``start + i * stride``.
    """
    axis: int
    base: tuple
    start: int
    stride: int
    length: int

    def indices(self):
        return self.start + self.stride * np.arange(self.length, dtype=np.int64)


def rows(extents, axis):
    """Yield every :class:`Row` of the grid along ``axis``."""
    ext = check_extents(extents)
    if not 0 <= axis < len(ext):
        raise IndexError(f"axis {axis} out of range for dimension {len(ext)}")
    strides = strides_of(ext)
    others = [k for k in range(len(ext)) if k != axis]
    for rest in np.ndindex(*[ext[k] for k in reversed(others)]):
        base = [0] * len(ext)
        for k, c in zip(reversed(others), rest):
            base[k] = c
        start = sum(c * s for c, s in zip(base, strides))
        yield Row(axis, tuple(base), start, strides[axis], ext[axis])


def axis_view(arr, axis):
    """View a C-contiguous array as ``(outer, n_axis, inner)``.

    Row ``(i, :, m)`` of the result is the line along ``axis``; the kernels
    in :mod:`sepmedial.envelope` iterate over ``outer * inner`` of them.
    """
    shape = arr.shape
    outer = prod(shape[:axis])
    inner = prod(shape[axis + 1:])
    return arr.reshape(outer, shape[axis], inner)


def as_binary(image):
    img = np.asarray(image)
    if img.dtype != np.bool_:
        img = img != 0
    check_extents(img.shape)
    return np.ascontiguousarray(img)


def cell_coords(extents):
    """``(N, d)`` array of all cell coordinates, ordered by linear index."""
    ext = tuple(extents)
    grids = np.meshgrid(*[np.arange(n, dtype=np.int64) for n in ext], indexing="ij")
    return np.stack([g.ravel(order="F") for g in grids], axis=1)
