"""Skeleton (Sk) extraction and its reduction to a discrete medial axis.

Sk keeps every distance-map ball whose paraboloid ``r - |p - c|**2``
reaches the upper envelope of all of them at some cell where the envelope
is positive. Ties count: every co-maximal ball is kept.

The reduction then looks at each grid row along each axis. Every Sk ball
meeting the row cuts it in a discrete segment (clipped to the grid);
segments nested in the previous survivor of a left-to-right scan are
dropped and identical segments collapse into one group flagged "double".
A ball is kept if it is the only member of a surviving group on at least
one row. Double groups none of whose members was kept anywhere get one
member back, so every covered cell stays covered.
"""
import numpy as np
from numba import njit, prange

from .balls import BallSet
from .envelope import _upper_row, upper_pass
from .errors import DomainError
from .grid import NONE, as_binary, axis_view, check_extents, inf_value
from .redt import reconstruct, redt_map
from .sdt import balls_of, sdt

REDUCTIONS = ("intersect", "centers")
TIE_MODES = ("all", "first")


def sk_extract(image, ties="all"):
    """Sk balls of a binary image, ordered by center linear index.

    ``ties="first"`` keeps a single envelope winner per cell (the one the
    stack scan picks) instead of every co-maximal ball.
    """
    if ties not in TIE_MODES:
        raise ValueError(f"unknown tie mode {ties!r}, expected one of {TIE_MODES}")
    img = as_binary(image)
    if img.all():
        raise DomainError("image has no background cell")
    balls = balls_of(img, sdt(img))
    if len(balls) == 0:
        return balls
    if ties == "first":
        field = redt_map(balls, img.shape)
        owners = np.unique(field.owner[field.value > 0])
        return balls.subset(owners)
    return balls.subset(touching_balls(balls, img.shape))


@njit(parallel=True, cache=True)
def _mark_pass(gin, gout, alive_out, alive_in):
    outer, n, inner = gin.shape
    for idx in prange(outer * inner):
        i = idx // inner
        m = idx % inner
        f = np.empty(n, np.int64)
        fr = np.empty(n, np.int64)
        out = np.empty(n, np.int64)
        wl = np.empty(n, np.int64)
        wr = np.empty(n, np.int64)
        s = np.empty(n, np.int64)
        t = np.empty(n, np.int64)
        any_alive = False
        for j in range(n):
            f[j] = gin[i, j, m]
            fr[n - 1 - j] = f[j]
            any_alive = any_alive or alive_out[i, j, m]
        if not any_alive:
            continue
        # leftmost and rightmost attaining apex bracket every co-maximal one
        _upper_row(f, out, wl, s, t)
        _upper_row(fr, out, wr, s, t)
        for j in range(n):
            if not alive_out[i, j, m]:
                continue
            target = gout[i, j, m]
            lo = wl[j]
            hi = n - 1 - wr[n - 1 - j]
            for x in range(lo, hi + 1):
                if f[x] - (j - x) * (j - x) == target:
                    alive_in[i, x, m] = True


def touching_balls(balls, extents):
    """Indices of balls whose paraboloid attains the positive envelope somewhere.

    The envelope is built axis by axis; walking the passes backwards from
    the positive cells marks every apex attaining the maximum, down to the
    seeds.
    """
    ext = check_extents(extents)
    balls.validate(ext)
    d = len(ext)
    level = np.full(ext, -inf_value(ext), dtype=np.int64)
    if len(balls):
        level[tuple(balls.centers.T)] = balls.radii
    levels = [level]
    for axis in range(d):
        level = level.copy()
        upper_pass(level, axis)
        levels.append(level)
    alive = levels[-1] > 0
    for axis in reversed(range(d)):
        below = np.zeros(ext, dtype=np.bool_)
        _mark_pass(axis_view(levels[axis], axis), axis_view(levels[axis + 1], axis),
                   axis_view(alive, axis), axis_view(below, axis))
        alive = below
    return np.flatnonzero(alive[tuple(balls.centers.T)]) if len(balls) else np.zeros(0, np.int64)


@njit(cache=True, nogil=True)
def _isqrt(x):
    r = np.int64(np.sqrt(np.float64(x)))
    while r * r > x:
        r -= 1
    while (r + 1) * (r + 1) <= x:
        r += 1
    return r


@njit(cache=True)
def _bucket(centers, radii, ext, axis, centers_only, counts, start, seg_l, seg_r, seg_ball, fill):
    """Enumerate (row, segment) pairs; count them or write them to CSR slots."""
    m, d = centers.shape
    others = np.empty(d - 1, np.int64)
    k = 0
    for j in range(d):
        if j != axis:
            others[k] = j
            k += 1
    ostride = np.empty(d - 1, np.int64)
    s = 1
    for k in range(d - 1):
        ostride[k] = s
        s *= ext[others[k]]
    lo = np.empty(d - 1, np.int64)
    hi = np.empty(d - 1, np.int64)
    cur = np.empty(d - 1, np.int64)
    for b in range(m):
        r = radii[b]
        ca = centers[b, axis]
        reach = 0 if centers_only else _isqrt(r - 1)
        for k in range(d - 1):
            c = centers[b, others[k]]
            lo[k] = max(c - reach, 0)
            hi[k] = min(c + reach, ext[others[k]] - 1)
            cur[k] = lo[k]
        while True:
            off2 = 0
            row = 0
            for k in range(d - 1):
                dv = cur[k] - centers[b, others[k]]
                off2 += dv * dv
                row += cur[k] * ostride[k]
            reff = r - off2
            if reff >= 1:
                big_r = _isqrt(reff - 1)
                if fill:
                    slot = start[row] + counts[row]
                    seg_l[slot] = max(ca - big_r, 0)
                    seg_r[slot] = min(ca + big_r, ext[axis] - 1)
                    seg_ball[slot] = b
                counts[row] += 1
            # odometer step over the other axes
            k = 0
            while k < d - 1:
                cur[k] += 1
                if cur[k] <= hi[k]:
                    break
                cur[k] = lo[k]
                k += 1
            if k == d - 1:
                break


@njit(parallel=True, cache=True)
def _reduce_rows(start, seg_l, seg_r, seg_ball, keep, head):
    nrows = start.shape[0] - 1
    pushes = 0
    for row in prange(nrows):
        a = start[row]
        cnt = start[row + 1] - a
        if cnt == 0:
            continue
        lmin = seg_l[a]
        lmax = seg_l[a]
        for i in range(a, a + cnt):
            lmin = min(lmin, seg_l[i])
            lmax = max(lmax, seg_l[i])
        # per left end: the longest segment, how often it occurs, its first slot.
        # Shorter segments with the same left end are nested in it, so walking
        # left ends in order is the (left asc, right desc) scan.
        w = lmax - lmin + 1
        best = np.full(w, lmin - 1, np.int64)
        mult = np.zeros(w, np.int64)
        first = np.empty(w, np.int64)
        for i in range(a, a + cnt):
            u = seg_l[i] - lmin
            if seg_r[i] > best[u]:
                best[u] = seg_r[i]
                mult[u] = 1
                first[u] = i
            elif seg_r[i] == best[u]:
                mult[u] += 1
        pushed = np.zeros(w, np.bool_)
        top_l = 0
        top_r = 0
        q = -1
        for u in range(w):
            if mult[u] == 0:
                continue
            l = u + lmin
            r = best[u]
            if q >= 0 and top_l <= l and r <= top_r:
                continue
            q += 1
            top_l = l
            top_r = r
            pushed[u] = True
            pushes += 1
            if mult[u] == 1:
                keep[seg_ball[first[u]]] = True
        for i in range(a, a + cnt):
            u = seg_l[i] - lmin
            if pushed[u] and mult[u] > 1 and seg_r[i] == best[u]:
                # remember the double group so it can be rescued later
                head[i] = first[u]
    return pushes


@njit(cache=True)
def _inside(ca, ra, cb, rb, ext):
    """Every in-grid cell of ball a is a cell of ball b."""
    d = ca.shape[0]
    reach = _isqrt(ra - 1)
    lo = np.empty(d, np.int64)
    hi = np.empty(d, np.int64)
    cur = np.empty(d, np.int64)
    for k in range(d):
        lo[k] = max(ca[k] - reach, 0)
        hi[k] = min(ca[k] + reach, ext[k] - 1)
        cur[k] = lo[k]
    while True:
        da = 0
        db = 0
        for k in range(d):
            da += (cur[k] - ca[k]) ** 2
            db += (cur[k] - cb[k]) ** 2
        if da < ra and db >= rb:
            return False
        k = 0
        while k < d:
            cur[k] += 1
            if cur[k] <= hi[k]:
                break
            cur[k] = lo[k]
            k += 1
        if k == d:
            return True


@njit(cache=True)
def _paint(c, r, ext, cstride, cover):
    d = c.shape[0]
    reach = _isqrt(r - 1)
    lo = np.empty(d, np.int64)
    hi = np.empty(d, np.int64)
    cur = np.empty(d, np.int64)
    for k in range(d):
        lo[k] = max(c[k] - reach, 0)
        hi[k] = min(c[k] + reach, ext[k] - 1)
        cur[k] = lo[k]
    while True:
        d2 = 0
        flat = 0
        for k in range(d):
            d2 += (cur[k] - c[k]) ** 2
            flat += cur[k] * cstride[k]
        if d2 < r:
            cover[flat] = True
        k = 0
        while k < d:
            cur[k] += 1
            if cur[k] <= hi[k]:
                break
            cur[k] = lo[k]
            k += 1
        if k == d:
            return


@njit(cache=True)
def _rescue(gstart, gmem, gbase, gstep, glo, ghi, centers, radii, ext, cstride, cover, keep):
    """Keep one member of each double group whose segment still has an uncovered cell."""
    rescued = 0
    for g in range(gstart.shape[0] - 1):
        hole = False
        for j in range(glo[g], ghi[g] + 1):
            if not cover[gbase[g] + j * gstep[g]]:
                hole = True
                break
        if not hole:
            continue
        a, b = gstart[g], gstart[g + 1]
        best = -1
        for u in range(a, b):
            x = gmem[u]
            dominated = False
            for v in range(a, b):
                y = gmem[v]
                if y != x and _inside(centers[x], radii[x], centers[y], radii[y], ext) \
                        and not _inside(centers[y], radii[y], centers[x], radii[x], ext):
                    dominated = True
                    break
            if dominated:
                continue
            if best < 0 or radii[x] > radii[best] or (radii[x] == radii[best] and x < best):
                best = x
        keep[best] = True
        _paint(centers[best], radii[best], ext, cstride, cover)
        rescued += 1
    return rescued


def _groups(head, start, seg_l, seg_r, seg_ball, ext, axis):
    """Double groups of one axis as (members, row base, step, lo, hi) arrays."""
    idx = np.flatnonzero(head >= 0)
    order = np.argsort(head[idx], kind="stable")
    heads = head[idx][order]
    members = seg_ball[idx][order]
    firsts = np.flatnonzero(np.r_[True, np.diff(heads) != 0]) if len(heads) else np.zeros(0, np.int64)
    lead = heads[firsts]
    rows = np.searchsorted(start, lead, side="right") - 1
    others = [k for k in range(len(ext)) if k != axis]
    cstride = np.asarray(_c_strides(ext))
    base = np.zeros(len(lead), np.int64)
    if others:
        coords = np.unravel_index(rows, [ext[k] for k in others], order="F")
        for k, co in zip(others, coords):
            base += co * cstride[k]
    n = ext[axis]
    lo = np.clip(seg_l[lead], 0, n - 1)
    hi = np.clip(seg_r[lead], 0, n - 1)
    sizes = np.diff(np.r_[firsts, len(heads)])
    return members, sizes, base, np.full(len(lead), cstride[axis], np.int64), lo, hi


def _c_strides(ext):
    out = [1] * len(ext)
    for k in range(len(ext) - 2, -1, -1):
        out[k] = out[k + 1] * ext[k + 1]
    return out


def rdma_reduce(sk, extents, reduction="intersect", return_stats=False):
    """Drop the Sk balls whose discrete segments are nested on every row.

    ``reduction="centers"`` only lets a ball take part in the rows through
    its own center; the default also uses every row the ball crosses.
    With ``return_stats`` a dict with the number of emitted segments and
    stack pushes is returned as well.
    """
    if reduction not in REDUCTIONS:
        raise ValueError(f"unknown reduction {reduction!r}, expected one of {REDUCTIONS}")
    ext = check_extents(extents)
    sk.validate(ext)
    m = len(sk)
    keep = np.zeros(m, dtype=np.bool_)
    emitted = pushes = rescued = 0
    groups = []
    if m:
        ext_arr = np.asarray(ext, dtype=np.int64)
        centers_only = reduction == "centers"
        for axis in range(len(ext)):
            nrows = int(np.prod(ext)) // ext[axis]
            counts = np.zeros(nrows, np.int64)
            dummy = np.zeros(0, np.int64)
            _bucket(sk.centers, sk.radii, ext_arr, axis, centers_only,
                    counts, counts, dummy, dummy, dummy, False)
            start = np.zeros(nrows + 1, np.int64)
            np.cumsum(counts, out=start[1:])
            total = int(start[-1])
            seg_l = np.empty(total, np.int64)
            seg_r = np.empty(total, np.int64)
            seg_ball = np.empty(total, np.int64)
            counts[:] = 0
            _bucket(sk.centers, sk.radii, ext_arr, axis, centers_only,
                    counts, start, seg_l, seg_r, seg_ball, True)
            head = np.full(total, -1, np.int64)
            pushes += _reduce_rows(start, seg_l, seg_r, seg_ball, keep, head)
            groups.append(_groups(head, start, seg_l, seg_r, seg_ball, ext, axis))
            emitted += total
        # double groups left without a kept member may leave holes
        gmem, sizes, gbase, gstep, glo, ghi = (np.concatenate(parts) for parts in zip(*groups))
        gstart = np.zeros(len(sizes) + 1, np.int64)
        np.cumsum(sizes, out=gstart[1:])
        cover = reconstruct(sk.subset(keep), ext).ravel()
        rescued = _rescue(gstart, gmem, gbase, gstep, glo, ghi, sk.centers, sk.radii,
                          ext_arr, np.asarray(_c_strides(ext), np.int64), cover, keep)
    out = sk.subset(keep)
    if return_stats:
        return out, {"emitted": emitted, "pushes": pushes, "rescued": int(rescued)}
    return out


def rdma(image, reduction="intersect"):
    img = as_binary(image)
    return rdma_reduce(sk_extract(img), img.shape, reduction)
