"""The .wvt tensor container: a small, fixed binary layout.

Layout (all integers little-endian):

==========  =====================================================
bytes       field
==========  =====================================================
4           magic ``WVLT``
1           format version (currently 1)
1           dtype code: 1 = float32, 2 = int32
2           tensor count (uint16)
per tensor:
1           ndim (uint8)
4 * ndim    dims (uint32 each)
4           metadata byte length (uint32)
...         metadata, UTF-8 ``key=value`` lines
...         payload, row-major, prod(dims) * 4 bytes
==========  =====================================================

Readers validate every declared length against the remaining bytes before
touching the payload, so corrupt headers surface as CorruptContainer
rather than crashes or oversized allocations.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO, Sequence

import numpy as np

from .errors import CorruptContainer, VersionMismatch

MAGIC = b"WVLT"
VERSION = 1
FILE_EXTENSION = ".wvt"

_DTYPE_CODES = {1: np.dtype("<f4"), 2: np.dtype("<i4")}
_CODE_FOR_KIND = {"f": 1, "i": 2}


@dataclass
class TensorRecord:
    """One tensor plus its key=value metadata."""

    data: np.ndarray
    metadata: dict[str, str] = field(default_factory=dict)


def _wire_dtype(records: Sequence[TensorRecord]) -> np.dtype:
    kinds = {np.asarray(r.data).dtype.kind for r in records}
    if not kinds <= {"f", "i"}:
        raise ValueError(f"container holds float32/int32 tensors only, got kinds {kinds}")
    if len(kinds) > 1:
        raise ValueError("all tensors in one container must share a dtype")
    return _DTYPE_CODES[_CODE_FOR_KIND[kinds.pop()]]


def _encode_metadata(metadata: dict[str, str]) -> bytes:
    lines = []
    for key, value in metadata.items():
        key, value = str(key), str(value)
        if "=" in key or "\n" in key or "\n" in value:
            raise ValueError(f"metadata entry {key!r} contains reserved characters")
        lines.append(f"{key}={value}")
    return "\n".join(lines).encode("utf-8")


def encode_container(records: Sequence[TensorRecord]) -> bytes:
    """Serialize records to container bytes (float32 for an empty list)."""
    wire = _wire_dtype(records) if records else _DTYPE_CODES[1]
    code = 1 if wire.kind == "f" else 2
    if len(records) > 0xFFFF:
        raise ValueError("container holds at most 65535 tensors")
    parts = [struct.pack("<4sBBH", MAGIC, VERSION, code, len(records))]
    for record in records:
        arr = np.ascontiguousarray(np.asarray(record.data), dtype=wire)
        if arr.ndim > 255:
            raise ValueError("tensor rank exceeds 255")
        meta = _encode_metadata(record.metadata)
        parts.append(struct.pack("<B", arr.ndim))
        parts.append(struct.pack(f"<{arr.ndim}I", *arr.shape))
        parts.append(struct.pack("<I", len(meta)))
        parts.append(meta)
        parts.append(arr.tobytes())
    return b"".join(parts)


def decode_container(data: bytes) -> list[TensorRecord]:
    """Parse container bytes; every record owns a copy of its payload."""
    view = memoryview(data)

    def take(pos: int, count: int, what: str) -> int:
        end = pos + count
        if end > len(view):
            raise CorruptContainer(f"truncated while reading {what}")
        return end

    take(0, 8, "header")
    magic, version, code, count = struct.unpack_from("<4sBBH", view, 0)
    if magic != MAGIC:
        raise CorruptContainer(f"bad magic {bytes(magic)!r}")
    if version != VERSION:
        raise VersionMismatch(f"unsupported container version {version}")
    dtype = _DTYPE_CODES.get(code)
    if dtype is None:
        raise CorruptContainer(f"unknown dtype code {code}")

    records: list[TensorRecord] = []
    pos = 8
    for index in range(count):
        end = take(pos, 1, f"tensor {index} rank")
        (ndim,) = struct.unpack_from("<B", view, pos)
        pos = end
        end = take(pos, 4 * ndim, f"tensor {index} dims")
        dims = struct.unpack_from(f"<{ndim}I", view, pos)
        pos = end
        end = take(pos, 4, f"tensor {index} metadata length")
        (meta_len,) = struct.unpack_from("<I", view, pos)
        pos = end
        end = take(pos, meta_len, f"tensor {index} metadata")
        try:
            meta_text = bytes(view[pos:end]).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise CorruptContainer(f"tensor {index} metadata is not UTF-8") from exc
        metadata: dict[str, str] = {}
        for line in meta_text.splitlines():
            key, sep, value = line.partition("=")
            if not sep:
                raise CorruptContainer(f"tensor {index} metadata line {line!r} lacks '='")
            metadata[key] = value
        pos = end
        payload = math.prod(dims) * dtype.itemsize
        end = take(pos, payload, f"tensor {index} payload")
        arr = np.frombuffer(view, dtype=dtype, count=math.prod(dims), offset=pos)
        records.append(TensorRecord(arr.reshape(dims).copy(), metadata))
        pos = end
    if pos != len(view):
        raise CorruptContainer(f"{len(view) - pos} trailing bytes after last tensor")
    return records


def write_container(records: Sequence[TensorRecord], sink: BinaryIO | str | Path) -> int:
    """Write records to a path or binary stream; returns bytes written."""
    blob = encode_container(records)
    if isinstance(sink, (str, Path)):
        Path(sink).write_bytes(blob)
    else:
        sink.write(blob)
    return len(blob)


def read_container(source: bytes | bytearray | BinaryIO | str | Path) -> list[TensorRecord]:
    """Read records from bytes, a path, or a binary stream."""
    if isinstance(source, (bytes, bytearray, memoryview)):
        return decode_container(bytes(source))
    if isinstance(source, (str, Path)):
        return decode_container(Path(source).read_bytes())
    return decode_container(source.read())
