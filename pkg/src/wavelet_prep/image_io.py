"""Image decoding into planar buffers.

Supported inputs: binary PGM (P5, 8- and 16-bit) decoded by a built-in
parser, and PNG via Pillow. 16-bit samples are preserved exactly; 16-bit
RGB PNGs are rejected rather than silently truncated (Pillow would drop
them to 8 bits).
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass

import numpy as np

from .errors import DecodeError, UnsupportedFormat

_PGM_MAGIC = b"P5"
_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


@dataclass
class ImageBuffer:
    """Decoded raster: planar, row-major, one plane per channel.

    ``samples`` has shape (channels, height, width) and dtype uint8,
    uint16, or float32.
    """

    width: int
    height: int
    channels: int
    samples: np.ndarray

    def __post_init__(self) -> None:
        if self.samples.shape != (self.channels, self.height, self.width):
            raise ValueError(
                f"samples shape {self.samples.shape} does not match "
                f"({self.channels}, {self.height}, {self.width})"
            )
        if self.samples.dtype not in (np.uint8, np.uint16, np.float32):
            raise ValueError(f"unsupported sample dtype {self.samples.dtype}")

    @property
    def bit_depth(self) -> str:
        return {np.uint8: "8", np.uint16: "16", np.float32: "float32"}[self.samples.dtype.type]

    @property
    def max_value(self) -> float:
        """Largest representable sample value, used by normalization."""
        if self.samples.dtype == np.uint8:
            return 255.0
        if self.samples.dtype == np.uint16:
            return 65535.0
        return 1.0


def buffer_from_array(array: np.ndarray, bit_depth: str | None = None) -> ImageBuffer:
    """Wrap a (H, W) or (C, H, W) array as an ImageBuffer.

    Integer arrays default to 8-bit unless ``bit_depth`` says otherwise;
    float arrays become float32 planes.
    """
    a = np.asarray(array)
    if a.ndim == 2:
        a = a[None, :, :]
    if a.ndim != 3:
        raise ValueError(f"expected a 2D or 3D array, got ndim={a.ndim}")
    if np.issubdtype(a.dtype, np.floating):
        planes = a.astype(np.float32)
    else:
        depth = bit_depth or "8"
        dtype = {"8": np.uint8, "16": np.uint16}.get(depth)
        if dtype is None:
            raise ValueError(f"unsupported bit depth {bit_depth!r} for integer samples")
        info = np.iinfo(dtype)
        if a.size and (a.min() < 0 or a.max() > info.max):
            raise ValueError(f"integer samples out of range for {depth}-bit storage")
        planes = a.astype(dtype)
    c, h, w = planes.shape
    return ImageBuffer(width=w, height=h, channels=c, samples=planes)


def _parse_pgm(data: bytes) -> ImageBuffer:
    pos = 2  # past "P5"
    fields: list[int] = []

    def skip_separators(p: int) -> int:
        while p < len(data):
            if data[p : p + 1].isspace():
                p += 1
            elif data[p : p + 1] == b"#":
                while p < len(data) and data[p] not in (0x0A, 0x0D):
                    p += 1
            else:
                break
        return p

    while len(fields) < 3:
        pos = skip_separators(pos)
        start = pos
        while pos < len(data) and data[pos : pos + 1].isdigit():
            pos += 1
        if start == pos:
            raise DecodeError("malformed PGM header")
        fields.append(int(data[start:pos]))
    if pos >= len(data) or not data[pos : pos + 1].isspace():
        raise DecodeError("PGM header not terminated by whitespace")
    pos += 1

    width, height, maxval = fields
    if width < 1 or height < 1:
        raise DecodeError(f"invalid PGM dimensions {width}x{height}")
    if not 0 < maxval < 65536:
        raise DecodeError(f"invalid PGM maxval {maxval}")
    # 16-bit PGM samples are big-endian two-byte words
    wide = maxval > 255
    expected = width * height * (2 if wide else 1)
    payload = data[pos : pos + expected]
    if len(payload) != expected:
        raise DecodeError(f"PGM payload truncated: {len(payload)} of {expected} bytes")
    if wide:
        samples = np.frombuffer(payload, dtype=">u2").astype(np.uint16)
    else:
        samples = np.frombuffer(payload, dtype=np.uint8).copy()
    return ImageBuffer(width, height, 1, samples.reshape(1, height, width))


def _png_header(data: bytes) -> tuple[int, int]:
    """(bit_depth, color_type) from IHDR, before handing off to Pillow."""
    if len(data) < 26 or data[12:16] != b"IHDR":
        raise DecodeError("PNG missing IHDR chunk")
    bit_depth, color_type = struct.unpack_from("BB", data, 24)
    return bit_depth, color_type


def _parse_png(data: bytes) -> ImageBuffer:
    from PIL import Image, UnidentifiedImageError

    bit_depth, color_type = _png_header(data)
    if bit_depth == 16 and color_type in (2, 6):
        raise UnsupportedFormat("16-bit color PNG is not supported (decoder would truncate)")
    try:
        with Image.open(io.BytesIO(data)) as img:
            img.load()
            mode = img.mode
            if mode in ("P", "1"):
                img = img.convert("L")
                mode = "L"
            if mode == "L":
                arr = np.asarray(img, dtype=np.uint8)[None, :, :]
            elif mode in ("I", "I;16"):
                arr = np.asarray(img, dtype=np.uint32)
                if arr.size and arr.max() > 65535:
                    raise UnsupportedFormat("PNG samples exceed 16-bit range")
                arr = arr.astype(np.uint16)[None, :, :]
            elif mode in ("RGB", "RGBA"):
                arr = np.asarray(img, dtype=np.uint8).transpose(2, 0, 1)
            else:
                raise UnsupportedFormat(f"unsupported PNG mode {mode!r}")
    except UnsupportedFormat:
        raise
    except UnidentifiedImageError as exc:
        raise DecodeError(f"PNG could not be identified: {exc}") from exc
    except Exception as exc:  # Pillow raises OSError/SyntaxError on truncation
        raise DecodeError(f"PNG decode failed: {exc}") from exc
    c, h, w = arr.shape
    return ImageBuffer(width=w, height=h, channels=c, samples=np.ascontiguousarray(arr))


def decode_image(data: bytes) -> ImageBuffer:
    """Decode PGM or PNG bytes into a planar buffer.

    Raises DecodeError on malformed input and UnsupportedFormat when the
    format is recognized but outside the supported set; never returns a
    partially filled buffer.
    """
    if data.startswith(_PGM_MAGIC):
        return _parse_pgm(data)
    if data.startswith(_PNG_MAGIC):
        return _parse_png(data)
    head = data[:8].hex() if data else "<empty>"
    raise UnsupportedFormat(f"unrecognized image format (leading bytes {head})")


def encode_pgm(buffer: ImageBuffer) -> bytes:
    """Serialize a single-channel 8/16-bit buffer as binary PGM."""
    if buffer.channels != 1:
        raise ValueError("PGM holds exactly one channel")
    plane = buffer.samples[0]
    if plane.dtype == np.uint8:
        maxval, payload = 255, plane.tobytes()
    elif plane.dtype == np.uint16:
        maxval, payload = 65535, plane.astype(">u2").tobytes()
    else:
        raise ValueError("PGM requires 8- or 16-bit samples")
    header = f"P5\n{buffer.width} {buffer.height}\n{maxval}\n".encode()
    return header + payload
