"""Field serialization: CSV (x, value columns) and a compact binary dump.

Binary layout, little-endian: magic b"NLKG", version u16, kind u16
(0 real scalar, 1 complex scalar, 2 real pair, 3 complex pair), boundary u16
(0 periodic, 1 clamped), reserved u16, n u32, h f64, half_width f64, then the
payload as raw f64 (complex data interleaved re/im, pairs first component
then second).
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import NlkgError
from .grid import Field, Grid, StatePair

_MAGIC = b"NLKG"
_VERSION = 1
_HEADER = struct.Struct("<4sHHHHIdd")


def _kind_of(obj) -> int:
    if isinstance(obj, Field):
        return 1 if obj.is_complex else 0
    if isinstance(obj, StatePair):
        return 3 if (obj.first.is_complex or obj.second.is_complex) else 2
    raise TypeError("expected Field or StatePair")


def _payload(obj, complex_: bool) -> np.ndarray:
    comps = [obj.values] if isinstance(obj, Field) else [obj.f1, obj.f2]
    parts = []
    for c in comps:
        if complex_:
            c = np.asarray(c, dtype=np.complex128)
            inter = np.empty(2 * c.size)
            inter[0::2], inter[1::2] = c.real, c.imag
            parts.append(inter)
        else:
            parts.append(np.asarray(c, dtype=np.float64))
    return np.concatenate(parts)


def write_binary(obj, path) -> None:
    kind = _kind_of(obj)
    grid = obj.grid
    b = 0 if grid.boundary == "periodic" else 1
    head = _HEADER.pack(_MAGIC, _VERSION, kind, b, 0, grid.n, grid.h,
                        grid.half_width)
    data = _payload(obj, complex_=bool(kind & 1)).astype("<f8").tobytes()
    Path(path).write_bytes(head + data)


def read_binary(path):
    raw = Path(path).read_bytes()
    magic, version, kind, b, _, n, h, half_width = _HEADER.unpack_from(raw)
    if magic != _MAGIC:
        raise NlkgError(f"{path}: bad magic {magic!r}")
    if version != _VERSION:
        raise NlkgError(f"{path}: unsupported dump version {version}")
    grid = Grid(half_width, n, "periodic" if b == 0 else "clamped")
    payload = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)

    def decode(seg):
        if kind & 1:
            return seg[0::2] + 1j * seg[1::2]
        return seg.copy()

    per = 2 * n if kind & 1 else n
    if kind in (0, 1):
        if payload.size != per:
            raise NlkgError(f"{path}: truncated payload")
        return Field(grid, decode(payload))
    if payload.size != 2 * per:
        raise NlkgError(f"{path}: truncated payload")
    return StatePair(Field(grid, decode(payload[:per])),
                     Field(grid, decode(payload[per:])))


def write_csv(obj, path) -> None:
    grid = obj.grid
    if isinstance(obj, Field):
        cols = {"value": obj.values}
    else:
        cols = {"first": obj.f1, "second": obj.f2}
    names, arrays = ["x"], [grid.x]
    for name, arr in cols.items():
        if np.iscomplexobj(arr):
            names += [f"{name}_re", f"{name}_im"]
            arrays += [arr.real, arr.imag]
        else:
            names.append(name)
            arrays.append(arr)
    with open(path, "w") as fh:
        fh.write(",".join(names) + "\n")
        for row in zip(*arrays):
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
