"""Binary Cayley-table cache ("QGL1").

Layout, little-endian throughout::

    b"QGL1"                      magic
    u8                           family tag (index into FAMILIES)
    u64                          order n
    u32 * n*n                    multiplication table, row-major
    u32 * n                      inverse table
    u32                          class count r
    r * (u32 size, u32 * size)   conjugacy classes
    u32 count, count * (u32 len, utf-8 bytes)   element labels
    u32                          CRC-32C of every preceding byte
"""

from __future__ import annotations

import hashlib
import os
import struct
from pathlib import Path

import crc32c
import numpy as np

from .groups import FAMILIES, GroupTable

MAGIC = b"QGL1"


class CacheError(Exception):
    code = "cache-error"


class BadMagic(CacheError):
    code = "bad-magic"


class Truncated(CacheError):
    code = "truncated"


class ChecksumMismatch(CacheError):
    code = "checksum-mismatch"


def encode_group(G: GroupTable) -> bytes:
    n = G.n
    parts = [
        MAGIC,
        struct.pack("<BQ", FAMILIES.index(G.family), n),
        np.ascontiguousarray(G.mul, dtype="<u4").tobytes(),
        np.ascontiguousarray(G.inv, dtype="<u4").tobytes(),
        struct.pack("<I", len(G.conj_classes)),
    ]
    for cell in G.conj_classes:
        parts.append(struct.pack("<I", len(cell)))
        parts.append(np.asarray(cell, dtype="<u4").tobytes())
    parts.append(struct.pack("<I", len(G.labels)))
    for lab in G.labels:
        raw = lab.encode("utf-8")
        parts.append(struct.pack("<I", len(raw)) + raw)
    body = b"".join(parts)
    return body + struct.pack("<I", crc32c.crc32c(body))


class _Reader:
    def __init__(self, buf: bytes):
        self.buf = buf
        self.pos = 0

    def take(self, size: int) -> bytes:
        if self.pos + size > len(self.buf):
            raise Truncated(f"truncated cache: need {size} bytes at offset {self.pos}")
        out = self.buf[self.pos : self.pos + size]
        self.pos += size
        return out

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    def u32_array(self, count: int) -> np.ndarray:
        return np.frombuffer(self.take(4 * count), dtype="<u4")


def decode_group(data: bytes) -> GroupTable:
    if len(data) < 4 or data[:4] != MAGIC:
        raise BadMagic("bad magic: not a QGL1 cache file")
    if len(data) < 8:
        raise Truncated("truncated cache: missing checksum")
    body, (stored,) = data[:-4], struct.unpack("<I", data[-4:])
    r = _Reader(body)
    r.take(4)
    tag, n = r.unpack("<BQ")
    if tag >= len(FAMILIES):
        raise CacheError(f"unknown family tag {tag}")
    mul = r.u32_array(n * n).astype(np.int32).reshape(n, n)
    inv = r.u32_array(n).astype(np.int32)
    (ncls,) = r.unpack("<I")
    classes = []
    for _ in range(ncls):
        (size,) = r.unpack("<I")
        classes.append(tuple(int(v) for v in r.u32_array(size)))
    (nlab,) = r.unpack("<I")
    labels = []
    for _ in range(nlab):
        (ln,) = r.unpack("<I")
        labels.append(r.take(ln).decode("utf-8"))
    if r.pos != len(body):
        raise CacheError("trailing bytes before checksum")
    if crc32c.crc32c(body) != stored:
        raise ChecksumMismatch("checksum mismatch")
    mul.setflags(write=False)
    inv.setflags(write=False)
    return GroupTable(mul, inv, tuple(labels), tuple(classes), FAMILIES[tag])


def cayley_cache_write(G: GroupTable, path) -> None:
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(encode_group(G))
    os.replace(tmp, path)


def cayley_cache_read(path) -> GroupTable:
    return decode_group(Path(path).read_bytes())


def cache_path(cache_dir, spec: str) -> Path:
    digest = hashlib.sha256(spec.strip().encode()).hexdigest()[:16]
    return Path(cache_dir) / f"{digest}.qgl"


def load_group(spec: str, cache_dir=None):
    """Build the group for spec, going through the on-disk cache when given one.

    Products are rebuilt from their cached factor so they keep factor references.
    """
    from .groups import build_product, parse_group_spec

    spec = spec.strip()
    if cache_dir is None:
        return parse_group_spec(spec)
    if spec.startswith("prod:"):
        base = load_group(spec[5:], cache_dir)
        return build_product(base, base)
    path = cache_path(cache_dir, spec)
    if path.exists():
        try:
            return cayley_cache_read(path)
        except CacheError:
            pass  # stale or corrupt; rebuild
    G = parse_group_spec(spec)
    Path(cache_dir).mkdir(parents=True, exist_ok=True)
    cayley_cache_write(G, path)
    return G
