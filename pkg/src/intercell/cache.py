"""Binary cache for expensive artifacts (typical sets, averaged panels).

Files live under $INTERCELL_CACHE_DIR (default ~/.cache/intercell), keyed
by a SHA-256 of the canonical text describing what was computed. Format:
magic, format version, a JSON table of array names/dtypes/shapes, then the
raw little-endian buffers. Any mismatch (magic, version, truncation) is a
miss and the caller recomputes; caches are an optimization, never a source
of truth.
"""

from __future__ import annotations

import hashlib
import json
import os
import struct
from pathlib import Path

import numpy as np

MAGIC = b"ICAC"
VERSION = 1

ENV_VAR = "INTERCELL_CACHE_DIR"


def cache_dir() -> Path:
    root = os.environ.get(ENV_VAR)
    if root:
        return Path(root)
    return Path.home() / ".cache" / "intercell"


def cache_key(label: str) -> str:
    return hashlib.sha256(label.encode()).hexdigest()


def cache_put(label: str, arrays: dict) -> Path:
    path = cache_dir() / (cache_key(label) + ".bin")
    path.parent.mkdir(parents=True, exist_ok=True)
    table = []
    blobs = []
    for name, arr in arrays.items():
        arr = np.ascontiguousarray(arr)
        le = arr.astype(arr.dtype.newbyteorder("<"), copy=False)
        table.append({"name": name, "dtype": str(arr.dtype), "shape": list(arr.shape)})
        blobs.append(le.tobytes())
    header = json.dumps(table).encode()
    tmp = path.with_suffix(".tmp")
    with open(tmp, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", VERSION, len(header)))
        fh.write(header)
        for blob in blobs:
            fh.write(blob)
    os.replace(tmp, path)
    return path


def cache_get(label: str) -> dict | None:
    path = cache_dir() / (cache_key(label) + ".bin")
    try:
        raw = path.read_bytes()
    except OSError:
        return None
    if len(raw) < 12 or raw[:4] != MAGIC:
        return None
    version, hlen = struct.unpack("<II", raw[4:12])
    if version != VERSION or len(raw) < 12 + hlen:
        return None
    try:
        table = json.loads(raw[12:12 + hlen])
    except ValueError:
        return None
    out = {}
    off = 12 + hlen
    for entry in table:
        dt = np.dtype(entry["dtype"]).newbyteorder("<")
        n = int(np.prod(entry["shape"], dtype=np.int64)) * dt.itemsize
        if off + n > len(raw):
            return None
        arr = np.frombuffer(raw[off:off + n], dtype=dt).reshape(entry["shape"])
        out[entry["name"]] = arr.astype(arr.dtype.newbyteorder("="))
        off += n
    return out
