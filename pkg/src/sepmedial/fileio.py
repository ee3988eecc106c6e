"""Grid, ball and measurement file formats.

GDF1 grid container::

    GDF1 <KIND> <d> <n_0> ... <n_{d-1}>\\n<payload>

``KIND`` is ``BIN`` (one byte per cell, 0 or 1), ``S64`` (little-endian
int64) or ``SITE`` (little-endian int64, -1 for no site). The payload lists
cells by linear index, axis 0 fastest.

Ball files are text: a ``BALLS <d>`` header, then one ball per line as
``d`` center coordinates followed by the squared radius. Lines starting
with ``#`` are comments.

2D grids can also be read and written as PGM (P2 / P5); axis 0 is the
image width.
"""
import ast
import csv
import io
import math
import re

import numpy as np

from .balls import BallSet
from .errors import FormatError
from .filtering import MeasuredBall
from .grid import MAX_DIM, check_extents

GDF_MAGIC = b"GDF1"
_KINDS = {"BIN": np.dtype(np.uint8), "S64": np.dtype("<i8"), "SITE": np.dtype("<i8")}
_MAX_HEADER = 512


def _read_bytes(path):
    with open(path, "rb") as fh:
        return fh.read()


def _write_bytes(path, data):
    with open(path, "wb") as fh:
        fh.write(data)


# --- GDF1 -----------------------------------------------------------------

def grid_kind(grid):
    arr = np.asarray(grid)
    if arr.dtype == np.bool_:
        return "BIN"
    return "S64"


def encode_grid(grid, kind=None):
    arr = np.asarray(grid)
    kind = kind or grid_kind(arr)
    if kind not in _KINDS:
        raise ValueError(f"unknown grid kind {kind!r}")
    ext = check_extents(arr.shape)
    header = " ".join(["GDF1", kind, str(len(ext))] + [str(n) for n in ext]) + "\n"
    flat = arr.ravel(order="F")
    if kind == "BIN":
        payload = flat.astype(bool).astype(np.uint8).tobytes()
    else:
        payload = flat.astype("<i8").tobytes()
    return header.encode("ascii") + payload


def decode_grid(data):
    """Parse GDF1 bytes into ``(array, kind)``."""
    if not data.startswith(GDF_MAGIC):
        raise FormatError("missing GDF1 magic", 0)
    end = data.find(b"\n", 0, _MAX_HEADER)
    if end < 0:
        raise FormatError("unterminated GDF1 header", min(len(data), _MAX_HEADER))
    try:
        fields = data[:end].decode("ascii").split()
    except UnicodeDecodeError:
        raise FormatError("non-ASCII GDF1 header", 0) from None
    if len(fields) < 4:
        raise FormatError("truncated GDF1 header", end)
    kind = fields[1]
    if kind not in _KINDS:
        raise FormatError(f"unknown grid kind {kind!r}", 5)
    try:
        d = int(fields[2])
        ext = tuple(int(v) for v in fields[3:])
    except ValueError:
        raise FormatError("non-integer size in GDF1 header", 0) from None
    if not 1 <= d <= MAX_DIM or len(ext) != d:
        raise FormatError(f"header declares d={d} with {len(ext)} sizes", 0)
    try:
        ext = check_extents(ext)
    except ValueError as exc:
        raise FormatError(str(exc), 0) from None
    dtype = _KINDS[kind]
    start = end + 1
    ncell = math.prod(ext)
    expected = ncell * dtype.itemsize
    if len(data) - start != expected:
        raise FormatError(f"payload has {len(data) - start} bytes, expected {expected}",
                          start + min(len(data) - start, expected))
    flat = np.frombuffer(data, dtype=dtype, count=ncell, offset=start)
    if kind == "BIN":
        bad = np.flatnonzero(flat > 1)
        if len(bad):
            raise FormatError("BIN payload value other than 0/1", start + int(bad[0]))
        arr = flat.astype(bool)
    else:
        arr = flat.astype(np.int64)
        if kind == "SITE":
            bad = np.flatnonzero(arr < -1)
            if len(bad):
                raise FormatError("negative site index", start + 8 * int(bad[0]))
    return np.ascontiguousarray(arr.reshape(ext, order="F")), kind


def write_grid(path, grid, kind=None):
    _write_bytes(path, encode_grid(grid, kind))


def read_grid(path):
    return decode_grid(_read_bytes(path))[0]


# --- PGM ------------------------------------------------------------------

_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def decode_pgm(data):
    """PGM bytes to an int64 array of shape ``(width, height)``."""
    pos = 0
    vals = []
    for _ in range(4):
        m = _TOKEN.match(data, pos)
        if not m:
            raise FormatError("truncated PGM header", pos)
        vals.append((m.group(1), m.start(1)))
        pos = m.end()
    magic = vals[0][0]
    if magic not in (b"P2", b"P5"):
        raise FormatError("not a P2/P5 PGM file", 0)
    try:
        width, height, maxval = (int(v) for v, _ in vals[1:])
    except ValueError:
        raise FormatError("non-integer PGM header field", vals[1][1]) from None
    if width < 1 or height < 1 or not 1 <= maxval <= 65535:
        raise FormatError("PGM size or maxval out of range", vals[1][1])
    n = width * height
    if magic == b"P5":
        start = pos + 1  # single whitespace byte after maxval
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype(np.uint8)
        need = n * dtype.itemsize
        if len(data) - start < need:
            raise FormatError(f"PGM raster has {len(data) - start} bytes, expected {need}", len(data))
        flat = np.frombuffer(data, dtype=dtype, count=n, offset=start).astype(np.int64)
        over = np.flatnonzero(flat > maxval)
        if len(over):
            raise FormatError("PGM sample above maxval", start + dtype.itemsize * int(over[0]))
    else:
        flat = np.empty(n, np.int64)
        for i in range(n):
            m = _TOKEN.match(data, pos)
            if not m:
                raise FormatError("truncated PGM raster", pos)
            try:
                v = int(m.group(1))
            except ValueError:
                raise FormatError("non-integer PGM sample", m.start(1)) from None
            if not 0 <= v <= maxval:
                raise FormatError("PGM sample out of range", m.start(1))
            flat[i] = v
            pos = m.end()
    # PGM rasters run along x first, matching axis-0-fastest order
    return np.ascontiguousarray(flat.reshape((width, height), order="F"))


def encode_pgm(grid, plain=False):
    arr = np.asarray(grid)
    if arr.ndim != 2:
        raise ValueError("PGM holds 2D grids only")
    width, height = arr.shape
    if arr.dtype == np.bool_:
        vals = arr.astype(np.int64) * 255
        maxval = 255
    else:
        vals = arr.astype(np.int64)
        if vals.size and (vals.min() < 0 or vals.max() > 65535):
            raise ValueError("values outside 0..65535 need the GDF1 format")
        maxval = 65535
    flat = vals.ravel(order="F")
    if plain:
        body = "\n".join(" ".join(str(v) for v in flat[j * width:(j + 1) * width]) for j in range(height))
        return f"P2\n{width} {height}\n{maxval}\n{body}\n".encode("ascii")
    dtype = np.uint8 if maxval == 255 else np.dtype(">u2")
    return f"P5\n{width} {height}\n{maxval}\n".encode("ascii") + flat.astype(dtype).tobytes()


def write_pgm(path, grid, plain=False):
    _write_bytes(path, encode_pgm(grid, plain))


def read_pgm(path, binary=True):
    arr = decode_pgm(_read_bytes(path))
    return arr != 0 if binary else arr


def read_image(path):
    """Binary image from a GDF1 (``BIN``) or PGM file; nonzero is foreground."""
    data = _read_bytes(path)
    if data.startswith(GDF_MAGIC):
        arr, kind = decode_grid(data)
        if kind != "BIN":
            raise FormatError(f"expected a BIN grid, found {kind}", 5)
        return arr
    if data[:2] in (b"P2", b"P5"):
        return decode_pgm(data) != 0
    raise FormatError("unrecognised image format", 0)


def write_output_grid(path, grid, kind=None):
    """GDF1 unless ``path`` ends in ``.pgm``."""
    if str(path).lower().endswith(".pgm"):
        write_pgm(path, grid)
    else:
        write_grid(path, grid, kind)


# --- ball files -----------------------------------------------------------

def encode_balls(balls):
    lines = [f"BALLS {balls.dim}"]
    for c, r in zip(balls.centers, balls.radii):
        lines.append(" ".join(str(int(v)) for v in c) + f" {int(r)}")
    return ("\n".join(lines) + "\n").encode("ascii")


def decode_balls(data):
    text_pos = 0
    d = None
    rows = []
    for raw in data.splitlines(keepends=True):
        line = raw.strip()
        offset = text_pos
        text_pos += len(raw)
        if not line or line.startswith(b"#"):
            continue
        fields = line.split()
        if d is None:
            if fields[0] != b"BALLS" or len(fields) != 2:
                raise FormatError("expected 'BALLS <d>' header", offset)
            try:
                d = int(fields[1])
            except ValueError:
                raise FormatError("non-integer dimension", offset) from None
            if not 1 <= d <= MAX_DIM:
                raise FormatError(f"dimension {d} out of range", offset)
            continue
        if len(fields) != d + 1:
            raise FormatError(f"expected {d + 1} integers per ball", offset)
        try:
            vals = [int(v) for v in fields]
        except ValueError:
            raise FormatError("non-integer ball field", offset) from None
        if vals[-1] < 1:
            raise FormatError("squared radius must be >= 1", offset)
        rows.append(vals)
    if d is None:
        raise FormatError("missing 'BALLS <d>' header", 0)
    if not rows:
        return BallSet.empty(d)
    arr = np.array(rows, dtype=np.int64)
    return BallSet(arr[:, :d], arr[:, d])


def write_balls(path, balls):
    _write_bytes(path, encode_balls(balls))


def read_balls(path):
    return decode_balls(_read_bytes(path))


def is_ball_file(path):
    with open(path, "rb") as fh:
        head = fh.read(64)
    return head.lstrip().startswith((b"BALLS", b"#"))


# --- measurement CSV ------------------------------------------------------

def encode_measurements(measured, meta=None):
    """CSV text; ``meta`` (a dict) goes in a leading ``#`` comment line."""
    buf = io.StringIO()
    if meta:
        buf.write("# " + " ".join(f"{k}={v!r}" for k, v in meta.items()) + "\n")
    d = len(measured[0].center) if measured else 0
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index"] + [f"c{k}" for k in range(d)] + ["r", "rho", "kappa", "rho_norm", "kappa_norm"])
    for i, m in enumerate(measured):
        w.writerow([i, *m.center, m.r, repr(m.rho), m.kappa, repr(m.rho_norm), repr(m.kappa_norm)])
    return buf.getvalue().encode("ascii")


def decode_measurements(data):
    """Inverse of :func:`encode_measurements`: ``(measured, meta)``."""
    text = data.decode("ascii")
    meta = {}
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            for item in line[1:].split():
                k, _, v = item.partition("=")
                try:
                    meta[k] = ast.literal_eval(v)
                except (ValueError, SyntaxError):
                    raise FormatError(f"bad metadata item {item!r}", text.find(item)) from None
        elif line.strip():
            body.append(line)
    if not body:
        raise FormatError("missing CSV header", 0)
    reader = csv.reader(body)
    header = next(reader)
    d = sum(1 for h in header if re.fullmatch(r"c\d+", h))
    if header != ["index"] + [f"c{k}" for k in range(d)] + ["r", "rho", "kappa", "rho_norm", "kappa_norm"]:
        raise FormatError("unexpected CSV columns", text.find(body[0]))
    out = []
    for row in reader:
        try:
            center = tuple(int(v) for v in row[1:1 + d])
            r, rho, kappa, rn, kn = row[1 + d:]
            out.append(MeasuredBall(center, int(r), float(rho), int(kappa), float(rn), float(kn)))
        except ValueError:
            raise FormatError(f"malformed CSV row {row!r}", text.find(",".join(row))) from None
    return out, meta


def write_measurements(path, measured, meta=None):
    _write_bytes(path, encode_measurements(measured, meta))


def read_measurements(path):
    return decode_measurements(_read_bytes(path))
