import struct

import crc32c
import numpy as np
import pytest

from conftest import group
from qrgroups.cache import (
    BadMagic,
    ChecksumMismatch,
    Truncated,
    cache_path,
    cayley_cache_read,
    cayley_cache_write,
    decode_group,
    encode_group,
    load_group,
)
from qrgroups.groups import build_cyclic


@pytest.mark.parametrize("spec", ["psl2:7", "sym:4", "cyclic:1", "sl2:3"])
def test_round_trip(tmp_path, spec):
    G = group(spec)
    path = tmp_path / "g.qgl"
    cayley_cache_write(G, path)
    H = cayley_cache_read(path)
    assert H == G
    assert np.array_equal(H.mul, G.mul)
    assert H.conj_classes == G.conj_classes
    assert H.labels == G.labels
    assert H.family == G.family


def test_header_layout():
    data = encode_group(build_cyclic(3))
    assert data[:4] == b"QGL1"
    tag, n = struct.unpack("<BQ", data[4:13])
    assert n == 3
    assert np.array_equal(np.frombuffer(data[13 : 13 + 36], "<u4").reshape(3, 3), [[0, 1, 2], [1, 2, 0], [2, 0, 1]])
    assert struct.unpack("<I", data[-4:])[0] == crc32c.crc32c(data[:-4])


def test_crc32c_check_value():
    # standard Castagnoli check value
    assert crc32c.crc32c(b"123456789") == 0xE3069283


def test_empty_file_is_bad_magic(tmp_path):
    path = tmp_path / "empty.qgl"
    path.write_bytes(b"")
    with pytest.raises(BadMagic) as exc:
        cayley_cache_read(path)
    assert exc.value.code == "bad-magic"
    with pytest.raises(BadMagic):
        decode_group(b"QGL2" + encode_group(build_cyclic(2))[4:])


def test_corrupted_checksum(tmp_path):
    data = bytearray(encode_group(group("psl2:5")))
    data[-1] ^= 0xFF
    with pytest.raises(ChecksumMismatch) as exc:
        decode_group(bytes(data))
    assert exc.value.code == "checksum-mismatch"


def test_corrupted_table_byte():
    data = bytearray(encode_group(group("psl2:5")))
    data[13 + 4 * 61] ^= 0x01  # inside the multiplication table
    with pytest.raises(ChecksumMismatch):
        decode_group(bytes(data))


@pytest.mark.parametrize("cut", [6, 20, 150, -5])
def test_truncated(cut):
    data = encode_group(group("sym:3"))
    with pytest.raises(Truncated) as exc:
        decode_group(data[:cut])
    assert exc.value.code == "truncated"


def test_load_group_uses_cache(tmp_path):
    G = load_group("psl2:5", tmp_path)
    path = cache_path(tmp_path, "psl2:5")
    assert path.exists()
    again = load_group("psl2:5", tmp_path)
    assert again == G
    P = load_group("prod:psl2:5", tmp_path)
    assert P.factors[0] == G and P.n == 3600
