"""binvox-v1 compatible run-length grid files.

Layout: header lines ``#binvox 1``, ``dim D H W``, ``translate tx ty tz``,
``scale s``, ``data``, then a payload of (value, count) byte pairs with
count <= 255. Cells are ordered y-fastest, then z, then x. Files written
here use maximal runs, so write(read(f)) is byte-identical for such files.
"""

from __future__ import annotations

import numpy as np

from .errors import FormatError
from .grid import GridTransform, VoxelGrid


class BinvoxHeaderError(FormatError):
    """Missing or malformed header line."""


class BinvoxRunOverflowError(FormatError):
    """Run-length payload describes more cells than the grid holds."""


class BinvoxTruncatedError(FormatError):
    """Payload ended before the grid was filled."""


def _flat_file_order(data):
    # (W, H, D) indexed [x, y, z] -> file order x, z, y with y fastest
    return np.ascontiguousarray(data.transpose(0, 2, 1)).ravel()


def write_grid(path, grid):
    w, h, d = grid.dims
    flat = _flat_file_order(grid.data).astype(np.uint8)
    tx, ty, tz = (float(v) for v in grid.transform.translation)
    header = (
        "#binvox 1\n"
        f"dim {d} {h} {w}\n"
        f"translate {tx!r} {ty!r} {tz!r}\n"
        f"scale {float(grid.transform.scale)!r}\n"
        "data\n"
    )
    runs = bytearray()
    if flat.size:
        change = np.flatnonzero(np.diff(flat))
        starts = np.concatenate([[0], change + 1])
        ends = np.concatenate([change + 1, [flat.size]])
        for s, e in zip(starts, ends):
            val = int(flat[s])
            n = int(e - s)
            while n > 0:
                c = min(n, 255)
                runs.append(val)
                runs.append(c)
                n -= c
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(bytes(runs))


def read_grid(path):
    with open(path, "rb") as fh:
        raw = fh.read()

    def next_line(buf, pos):
        nl = buf.find(b"\n", pos)
        if nl < 0:
            raise BinvoxHeaderError("unterminated header line")
        return buf[pos:nl].decode("ascii", errors="replace"), nl + 1

    pos = 0
    line, pos = next_line(raw, pos)
    if line.split() != ["#binvox", "1"]:
        raise BinvoxHeaderError(f"bad magic line {line!r}")
    dims = translate = scale = None
    while True:
        line, pos = next_line(raw, pos)
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "dim":
            if len(parts) != 4:
                raise BinvoxHeaderError(f"bad dim line {line!r}")
            try:
                d, h, w = (int(p) for p in parts[1:])
            except ValueError as exc:
                raise BinvoxHeaderError(f"bad dim line {line!r}") from exc
            if min(d, h, w) < 1:
                raise BinvoxHeaderError("dims must be positive")
            dims = (w, h, d)
        elif parts[0] == "translate":
            if len(parts) != 4:
                raise BinvoxHeaderError(f"bad translate line {line!r}")
            translate = tuple(float(p) for p in parts[1:])
        elif parts[0] == "scale":
            if len(parts) != 2:
                raise BinvoxHeaderError(f"bad scale line {line!r}")
            scale = float(parts[1])
        elif parts[0] == "data":
            break
        else:
            raise BinvoxHeaderError(f"unexpected header line {line!r}")
    if dims is None:
        raise BinvoxHeaderError("missing dim line")
    if translate is None:
        translate = (0.0, 0.0, 0.0)
    if scale is None:
        scale = 1.0

    w, h, d = dims
    total = w * h * d
    payload = np.frombuffer(raw, dtype=np.uint8, offset=pos)
    if payload.size % 2 != 0:
        raise BinvoxTruncatedError("odd payload byte count")
    vals = payload[0::2].astype(np.int64)
    counts = payload[1::2].astype(np.int64)
    if (counts == 0).any():
        raise BinvoxRunOverflowError("zero-length run in payload")
    if counts.sum() > total:
        raise BinvoxRunOverflowError(
            f"runs describe {int(counts.sum())} cells, grid holds {total}")
    if counts.sum() < total:
        raise BinvoxTruncatedError(
            f"runs describe {int(counts.sum())} cells, grid holds {total}")
    flat = np.repeat(vals, counts).astype(bool)
    data = flat.reshape(w, d, h).transpose(0, 2, 1)
    return VoxelGrid(data, GridTransform(scale, translate))
