"""Container and frames file round trips, plus deliberate corruption.

Packing oracle for [0, 1, -1, 0, 1]: trits map to the 2-bit fields
00, 01, 10, 00, 01 placed at bit offsets 0, 2, 4, 6 within each byte, so
byte 0 = 01<<2 | 10<<4 = 0b00100100 = 36 and byte 1 = 0b00000001 = 1.
"""

from __future__ import annotations

import struct

import numpy as np
import pytest

from treecodec import (
    CodeParams,
    build_codebook,
    build_struct_table,
    gen_radical_codes,
    load_codebook,
    parse_ids,
    read_frames,
    save_codebook,
    write_frames,
)
from treecodec.errors import CorruptError, VersionMismatchError
from treecodec.storage import (
    _CHECKSUM_BYTES,
    _HEADER,
    _checksum,
    codebook_from_bytes,
    codebook_to_bytes,
    pack_trits,
    packed_row_bytes,
    unpack_trits,
)

PARAMS = CodeParams(depth=3, struct_bits=4, radical_bits=6, max_radicals=4)


def _codebook(seed=0, labels=("好", "的", "人")):
    codes = gen_radical_codes(list("abcde"), PARAMS.radical_bits, seed=seed)
    entries = list(zip(labels, map(parse_ids, ("⿰ab", "⿱cd", "⿲abc"))))
    return build_codebook(entries, build_struct_table(PARAMS), codes, PARAMS, seed=seed)


def test_pack_trits_oracle():
    packed = pack_trits(np.array([0, 1, -1, 0, 1], dtype=np.int8))
    assert packed.tolist() == [36, 1]


def test_packed_row_bytes():
    assert [packed_row_bytes(n) for n in (1, 4, 5, 384)] == [1, 1, 2, 96]


def test_pack_unpack_round_trip():
    rng = np.random.default_rng(0)
    for n in (1, 3, 4, 7, 36, 384):
        values = rng.integers(-1, 2, size=(5, n)).astype(np.int8)
        assert np.array_equal(unpack_trits(pack_trits(values), n), values)


def test_pack_rejects_non_trits():
    with pytest.raises(ValueError):
        pack_trits(np.array([0, 2], dtype=np.int8))


def test_unpack_rejects_invalid_field():
    with pytest.raises(CorruptError, match="bit pattern"):
        unpack_trits(np.array([0b00000011], dtype=np.uint8), 1)


def test_unpack_rejects_dirty_padding():
    # One trit per byte leaves three padding fields that must stay zero.
    with pytest.raises(CorruptError, match="padding"):
        unpack_trits(np.array([0b00000100], dtype=np.uint8), 1)


def test_codebook_round_trip(tmp_path):
    cb = _codebook()
    path = tmp_path / "cb.tcbk"
    save_codebook(cb, path)
    assert load_codebook(path) == cb


def test_serialization_is_byte_deterministic():
    assert codebook_to_bytes(_codebook()) == codebook_to_bytes(_codebook())


def test_round_trip_without_seed():
    cb = _codebook()
    cb.seed = None
    data = codebook_to_bytes(cb)
    back = codebook_from_bytes(data)
    assert back.seed is None
    assert back == cb


def test_multibyte_labels_round_trip():
    cb = _codebook(labels=("好", "𠀀", "a"))  # BMP, astral, ASCII
    assert codebook_from_bytes(codebook_to_bytes(cb)).labels == ("好", "𠀀", "a")


def test_truncated_file():
    data = codebook_to_bytes(_codebook())
    with pytest.raises(CorruptError):
        codebook_from_bytes(data[:-1])
    with pytest.raises(CorruptError, match="short"):
        codebook_from_bytes(data[:10])


def test_bit_flip_detected():
    data = bytearray(codebook_to_bytes(_codebook()))
    data[len(data) // 2] ^= 0x40
    with pytest.raises(CorruptError):
        codebook_from_bytes(bytes(data))


def _reseal(payload: bytes) -> bytes:
    return payload + _checksum(payload)


def test_bad_magic_behind_valid_checksum():
    data = codebook_to_bytes(_codebook())
    payload = bytearray(data[:-_CHECKSUM_BYTES])
    payload[0:4] = b"NOPE"
    with pytest.raises(CorruptError, match="magic"):
        codebook_from_bytes(_reseal(bytes(payload)))


def test_version_mismatch():
    data = codebook_to_bytes(_codebook())
    payload = bytearray(data[:-_CHECKSUM_BYTES])
    payload[4:6] = struct.pack("<H", 2)
    with pytest.raises(VersionMismatchError, match="2"):
        codebook_from_bytes(_reseal(bytes(payload)))


def test_inflated_char_count():
    # Claiming one more character makes the label table read into the
    # matrix region; whatever it finds there cannot add up.
    data = codebook_to_bytes(_codebook())
    payload = bytearray(data[:-_CHECKSUM_BYTES])
    offset = 4 + 2 + 1 + 2 + 2 + 2 + 4  # through code_length
    (n_chars,) = struct.unpack_from("<I", payload, offset)
    struct.pack_into("<I", payload, offset, n_chars + 1)
    with pytest.raises(CorruptError):
        codebook_from_bytes(_reseal(bytes(payload)))


def test_bad_layout_params_rejected():
    data = codebook_to_bytes(_codebook())
    payload = bytearray(data[:-_CHECKSUM_BYTES])
    payload[6] = 1  # depth below the supported range
    with pytest.raises(CorruptError, match="layout"):
        codebook_from_bytes(_reseal(bytes(payload)))


def test_header_size_frozen():
    # 4s + H + B + 3H + 2I + Q + I = 4+2+1+6+8+8+4 = 33 bytes; a change
    # here is a format break and must come with a version bump.
    assert _HEADER.size == 33


def test_frames_bin_round_trip(tmp_path):
    frames = np.arange(12, dtype=np.float32).reshape(3, 4) / 7
    path = tmp_path / "frames.bin"
    write_frames(path, frames, fmt="bin")
    back = read_frames(path)
    assert back.dtype == np.float32
    assert np.array_equal(back, frames)


def test_frames_tsv_round_trip(tmp_path):
    frames = np.array([[0.5, -1.25], [3.0, 0.0]], dtype=np.float32)
    path = tmp_path / "frames.tsv"
    write_frames(path, frames, fmt="tsv")
    assert np.array_equal(read_frames(path), frames)


def test_frames_format_by_extension(tmp_path):
    frames = np.ones((2, 2), dtype=np.float32)
    tsv = tmp_path / "f.txt"
    write_frames(tsv, frames, fmt="tsv")
    assert np.array_equal(read_frames(tsv), frames)  # .txt reads as text
    bin_path = tmp_path / "f.frames"
    write_frames(bin_path, frames, fmt="bin")
    assert np.array_equal(read_frames(bin_path), frames)


def test_frames_explicit_format_overrides_extension(tmp_path):
    frames = np.ones((2, 3), dtype=np.float32)
    odd = tmp_path / "f.tsv"
    write_frames(odd, frames, fmt="bin")
    assert np.array_equal(read_frames(odd, "bin"), frames)


def test_frames_truncated_bin(tmp_path):
    path = tmp_path / "f.bin"
    write_frames(path, np.ones((2, 3), dtype=np.float32), fmt="bin")
    data = path.read_bytes()
    path.write_bytes(data[:-2])
    with pytest.raises(CorruptError, match="bytes"):
        read_frames(path)
    path.write_bytes(data[:3])
    with pytest.raises(CorruptError, match="header"):
        read_frames(path)


def test_frames_ragged_tsv(tmp_path):
    path = tmp_path / "f.tsv"
    path.write_text("1.0\t2.0\n3.0\n", encoding="utf-8")
    with pytest.raises(CorruptError, match="ragged"):
        read_frames(path)


def test_frames_non_numeric_tsv(tmp_path):
    path = tmp_path / "f.tsv"
    path.write_text("1.0\tx\n", encoding="utf-8")
    with pytest.raises(CorruptError, match="f.tsv:1"):
        read_frames(path)


def test_frames_bad_format_args(tmp_path):
    with pytest.raises(ValueError):
        write_frames(tmp_path / "f", np.ones(3, dtype=np.float32), fmt="bin")
    with pytest.raises(ValueError):
        write_frames(tmp_path / "f", np.ones((2, 2)), fmt="npz")
