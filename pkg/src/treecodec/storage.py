"""Serialized file formats: codebook containers and frame matrices.

Codebook container (all integers little-endian):

    magic     4 bytes  b"TCBK"
    version   u16      currently 1
    depth     u8
    struct_bits    u16
    radical_bits   u16
    max_radicals   u16
    code_length    u32
    n_chars        u32
    seed           u64   meaningful only when flags bit 0 is set
    flags          u32   bit 0: seed present
    labels    n_chars records of u16 byte length + UTF-8 bytes
    matrix    n_chars rows, each ceil(code_length / 4) bytes of packed trits
    blank     one packed row
    checksum  8 bytes, BLAKE2b-64 of everything before it

Trits pack four to a byte, low bits first: trit ``i`` occupies bits
``2*(i % 4)`` of byte ``i // 4`` as 00 = 0, 01 = +1, 10 = -1.  The layout has
no platform-dependent field, so equal codebooks serialize to equal bytes
everywhere.

Frame matrix file (binary form): u32 code length ``t``, u32 frame count
``W``, then ``t * W`` row-major float32 values, i.e. ``t`` rows of ``W``
columns with one column per frame.  The TSV form mirrors it: ``t`` lines of
``W`` tab-separated numbers.
"""

from __future__ import annotations

import hashlib
import struct

import numpy as np

from .codebook import Codebook
from .embed import CodeParams
from .errors import CorruptError, TreecodecError, VersionMismatchError

MAGIC = b"TCBK"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sHBHHHIIQI")
_CHECKSUM_BYTES = 8
_FLAG_SEED = 1

_SHIFTS = np.array([0, 2, 4, 6], dtype=np.uint8)


def _checksum(data: bytes) -> bytes:
    return hashlib.blake2b(data, digest_size=_CHECKSUM_BYTES).digest()


def packed_row_bytes(n_trits: int) -> int:
    return (n_trits + 3) // 4


def pack_trits(values: np.ndarray) -> np.ndarray:
    """Pack ternary values (last axis) into bytes, four trits per byte."""
    values = np.asarray(values)
    if not np.isin(values, (-1, 0, 1)).all():
        raise ValueError("trit values must be -1, 0, or +1")
    mapped = np.zeros(values.shape, dtype=np.uint8)
    mapped[values == 1] = 0b01
    mapped[values == -1] = 0b10
    n = values.shape[-1]
    pad = (-n) % 4
    if pad:
        mapped = np.concatenate(
            [mapped, np.zeros(values.shape[:-1] + (pad,), dtype=np.uint8)], axis=-1
        )
    grouped = mapped.reshape(values.shape[:-1] + ((n + pad) // 4, 4))
    return np.bitwise_or.reduce(grouped << _SHIFTS, axis=-1)


def unpack_trits(packed: np.ndarray, n_trits: int) -> np.ndarray:
    """Inverse of :func:`pack_trits`; rejects the unused bit pattern 11."""
    packed = np.asarray(packed, dtype=np.uint8)
    fields = (packed[..., :, None] >> _SHIFTS) & 0b11
    fields = fields.reshape(packed.shape[:-1] + (packed.shape[-1] * 4,))
    flat, tail = fields[..., :n_trits], fields[..., n_trits:]
    if (flat == 0b11).any():
        raise CorruptError("invalid trit bit pattern")
    if tail.any():
        raise CorruptError("nonzero padding bits in packed trits")
    out = np.zeros(flat.shape, dtype=np.int8)
    out[flat == 0b01] = 1
    out[flat == 0b10] = -1
    return out


def codebook_to_bytes(cb: Codebook) -> bytes:
    p = cb.params
    flags = _FLAG_SEED if cb.seed is not None else 0
    parts = [
        _HEADER.pack(
            MAGIC,
            FORMAT_VERSION,
            p.depth,
            p.struct_bits,
            p.radical_bits,
            p.max_radicals,
            p.code_length,
            cb.n_chars,
            cb.seed if cb.seed is not None else 0,
            flags,
        )
    ]
    for label in cb.labels:
        raw = label.encode("utf-8")
        if len(raw) > 0xFFFF:
            raise ValueError(f"label too long to serialize: {label!r}")
        parts.append(struct.pack("<H", len(raw)))
        parts.append(raw)
    parts.append(pack_trits(cb.matrix).tobytes())
    parts.append(pack_trits(cb.blank_row).tobytes())
    payload = b"".join(parts)
    return payload + _checksum(payload)


def codebook_from_bytes(data: bytes) -> Codebook:
    if len(data) < _HEADER.size + _CHECKSUM_BYTES:
        raise CorruptError(f"file too short ({len(data)} bytes)")
    payload, stored = data[:-_CHECKSUM_BYTES], data[-_CHECKSUM_BYTES:]
    if _checksum(payload) != stored:
        raise CorruptError("checksum mismatch")
    (
        magic,
        version,
        depth,
        struct_bits,
        radical_bits,
        max_radicals,
        code_length,
        n_chars,
        seed,
        flags,
    ) = _HEADER.unpack_from(payload)
    if magic != MAGIC:
        raise CorruptError(f"bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise VersionMismatchError(
            f"format version {version}, this build reads {FORMAT_VERSION}"
        )
    try:
        params = CodeParams(depth, struct_bits, radical_bits, max_radicals)
    except ValueError as exc:
        raise CorruptError(f"invalid layout parameters: {exc}") from None
    if params.code_length != code_length:
        raise CorruptError(
            f"stored code_length {code_length} != derived {params.code_length}"
        )

    pos = _HEADER.size
    labels = []
    for _ in range(n_chars):
        if pos + 2 > len(payload):
            raise CorruptError("label table overruns file")
        (nbytes,) = struct.unpack_from("<H", payload, pos)
        pos += 2
        if pos + nbytes > len(payload):
            raise CorruptError("label table overruns file")
        try:
            labels.append(payload[pos : pos + nbytes].decode("utf-8"))
        except UnicodeDecodeError as exc:
            raise CorruptError(f"label is not UTF-8: {exc}") from None
        pos += nbytes

    row_bytes = packed_row_bytes(code_length)
    need = (n_chars + 1) * row_bytes
    if len(payload) - pos != need:
        raise CorruptError(
            f"matrix region is {len(payload) - pos} bytes, expected {need}"
        )
    packed = np.frombuffer(payload, dtype=np.uint8, count=need, offset=pos)
    packed = packed.reshape(n_chars + 1, row_bytes)
    rows = unpack_trits(packed, code_length)
    try:
        return Codebook(
            params,
            tuple(labels),
            rows[:n_chars].copy(),
            rows[n_chars].copy(),
            seed=int(seed) if flags & _FLAG_SEED else None,
        )
    except TreecodecError as exc:
        raise CorruptError(f"inconsistent codebook content: {exc}") from None


def save_codebook(cb: Codebook, path) -> None:
    with open(path, "wb") as fh:
        fh.write(codebook_to_bytes(cb))


def load_codebook(path) -> Codebook:
    with open(path, "rb") as fh:
        return codebook_from_bytes(fh.read())


# --- frame matrices ----------------------------------------------------------

_FRAMES_HEADER = struct.Struct("<II")


def write_frames(path, frames: np.ndarray, fmt: str = "bin") -> None:
    """Write a (code_length, n_frames) matrix in binary or TSV form."""
    frames = np.asarray(frames)
    if frames.ndim != 2:
        raise ValueError(f"frames must be 2-D, got shape {frames.shape}")
    if fmt == "bin":
        t, w = frames.shape
        with open(path, "wb") as fh:
            fh.write(_FRAMES_HEADER.pack(t, w))
            fh.write(np.ascontiguousarray(frames, dtype="<f4").tobytes())
    elif fmt == "tsv":
        with open(path, "w", encoding="utf-8") as fh:
            for row in frames:
                fh.write("\t".join(repr(float(v)) for v in row) + "\n")
    else:
        raise ValueError(f"unknown frames format {fmt!r}")


def read_frames(path, fmt: str | None = None) -> np.ndarray:
    """Read a frame matrix; format inferred from the extension when not given.

    ``.tsv``/``.txt``/``.csv`` read as text, anything else as binary.
    """
    if fmt is None:
        fmt = "tsv" if str(path).lower().endswith((".tsv", ".txt", ".csv")) else "bin"
    if fmt == "bin":
        with open(path, "rb") as fh:
            head = fh.read(_FRAMES_HEADER.size)
            if len(head) != _FRAMES_HEADER.size:
                raise CorruptError(f"{path}: truncated frames header")
            t, w = _FRAMES_HEADER.unpack(head)
            body = fh.read()
        if len(body) != 4 * t * w:
            raise CorruptError(
                f"{path}: frames body is {len(body)} bytes, expected {4 * t * w}"
            )
        return np.frombuffer(body, dtype="<f4").reshape(t, w).astype(np.float32)
    if fmt == "tsv":
        rows = []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    rows.append([float(v) for v in line.split("\t")])
                except ValueError as exc:
                    raise CorruptError(f"{path}:{lineno}: {exc}") from None
        if not rows or len({len(r) for r in rows}) != 1:
            raise CorruptError(f"{path}: empty or ragged frame matrix")
        return np.array(rows, dtype=np.float32)
    raise ValueError(f"unknown frames format {fmt!r}")
