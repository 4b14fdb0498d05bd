"""Bit-exact field snapshot files (JFLD format).

Layout, all integers little-endian:

    bytes 0..3    magic "JFLD"
    u32           version, currently 1
    4 x u32       grid dimensions n1..n4
    u32           component count: 1 for a scalar field, 4 for a
                  Hermitian matrix field (a11, a22, Re a12, Im a12)
    f64[...]      IEEE-754 little-endian samples

Samples are stored one component at a time; within a component the grid
order is the canonical C order of the package (x4 index fastest).
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import SnapshotFormatError
from .hermitian import Herm2

MAGIC = b"JFLD"
VERSION = 1

_HEADER = struct.Struct("<4sI4II")


def write_scalar_field(path, f: np.ndarray) -> None:
    f = np.ascontiguousarray(f, dtype=np.float64)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, *f.shape, 1))
        fh.write(f.astype("<f8").tobytes())


def write_form_field(path, x: Herm2) -> None:
    a11 = np.ascontiguousarray(x.a11, dtype=np.float64)
    shape = a11.shape
    comps = (a11,
             np.ascontiguousarray(x.a22, dtype=np.float64),
             np.ascontiguousarray(np.real(x.a12), dtype=np.float64),
             np.ascontiguousarray(np.imag(x.a12), dtype=np.float64))
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, *shape, 4))
        for c in comps:
            fh.write(c.astype("<f8").tobytes())


def read_snapshot(path):
    """Read a JFLD file; returns an ndarray (scalar) or a Herm2 (form)."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise SnapshotFormatError(f"{path}: truncated header")
    magic, version, n1, n2, n3, n4, count = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise SnapshotFormatError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise SnapshotFormatError(f"{path}: unsupported version {version}")
    if count not in (1, 4):
        raise SnapshotFormatError(f"{path}: bad component count {count}")
    shape = (n1, n2, n3, n4)
    npts = n1 * n2 * n3 * n4
    expected = _HEADER.size + 8 * npts * count
    if len(raw) != expected:
        raise SnapshotFormatError(
            f"{path}: expected {expected} bytes, got {len(raw)}")
    data = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    if count == 1:
        return data.reshape(shape).astype(np.float64)
    comps = data.reshape(4, *shape).astype(np.float64)
    return Herm2(comps[0], comps[1], comps[2] + 1j * comps[3])
