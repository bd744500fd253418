"""Binary checkpoint format.

Layout, all integers little-endian::

    b"RXPJ"                      magic
    u32  version                 currently 1
    u64  total_bytes             size of the whole file
    u32  header_len
    header_len bytes             UTF-8 JSON metadata (vocab, dims, config echo, ...)
    u32  n_tensors
    n_tensors times:
        u32 name_len, name bytes (UTF-8)
        u32 ndim, ndim x u32 shape
        prod(shape) x f32        row-major
"""
from __future__ import annotations

import io
import json
import struct
from typing import Dict, Tuple

import numpy as np

from ..errors import CheckpointError

MAGIC = b"RXPJ"
VERSION = 1
_PREFIX = struct.Struct("<4sIQ")


def dumps(params: Dict[str, np.ndarray], metadata: dict) -> bytes:
    body = io.BytesIO()
    header = json.dumps(metadata, sort_keys=True, indent=1).encode("utf-8")
    body.write(struct.pack("<I", len(header)))
    body.write(header)
    body.write(struct.pack("<I", len(params)))
    for name in sorted(params):
        arr = np.asarray(params[name], dtype="<f4")
        raw = name.encode("utf-8")
        body.write(struct.pack("<I", len(raw)))
        body.write(raw)
        body.write(struct.pack("<I", arr.ndim))
        body.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
        body.write(arr.tobytes(order="C"))
    payload = body.getvalue()
    return _PREFIX.pack(MAGIC, VERSION, _PREFIX.size + len(payload)) + payload


def loads(blob: bytes) -> Tuple[Dict[str, np.ndarray], dict]:
    if len(blob) < _PREFIX.size:
        raise CheckpointError("file too short for a checkpoint header")
    magic, version, total = _PREFIX.unpack_from(blob, 0)
    if magic != MAGIC:
        raise CheckpointError(f"bad magic {magic!r}")
    if version != VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}")
    if total != len(blob):
        raise CheckpointError(f"size mismatch: header says {total} bytes, file has {len(blob)}")
    pos = _PREFIX.size

    def take(fmt):
        nonlocal pos
        vals = struct.unpack_from(fmt, blob, pos)
        pos += struct.calcsize(fmt)
        return vals

    try:
        (hlen,) = take("<I")
        metadata = json.loads(blob[pos:pos + hlen].decode("utf-8"))
        pos += hlen
        (n,) = take("<I")
        params = {}
        for _ in range(n):
            (nlen,) = take("<I")
            name = blob[pos:pos + nlen].decode("utf-8")
            pos += nlen
            (ndim,) = take("<I")
            shape = take(f"<{ndim}I") if ndim else ()
            count = int(np.prod(shape)) if shape else 1
            arr = np.frombuffer(blob, dtype="<f4", count=count, offset=pos).reshape(shape)
            pos += 4 * count
            params[name] = arr.astype(np.float32)
    except (struct.error, ValueError, UnicodeDecodeError) as exc:
        raise CheckpointError(f"corrupt checkpoint: {exc}") from exc
    if pos != len(blob):
        raise CheckpointError(f"{len(blob) - pos} trailing bytes after last tensor")
    return params, metadata


def save(path, params: Dict[str, np.ndarray], metadata: dict) -> None:
    with open(path, "wb") as fh:
        fh.write(dumps(params, metadata))


def load(path) -> Tuple[Dict[str, np.ndarray], dict]:
    with open(path, "rb") as fh:
        return loads(fh.read())
