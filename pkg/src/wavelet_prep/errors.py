"""Exception types shared across the library.

Class names are part of the public contract: they cross the CLI, the HTTP
service, and the container reader unchanged, so clients in other languages
can match on them.
"""


class WaveletPrepError(Exception):
    """Base class for every error raised by this package."""


class OddLengthError(WaveletPrepError):
    """1D transform input has odd length."""


class DegenerateSignal(WaveletPrepError):
    """Signal too short to transform (length < 2)."""


class LengthMismatch(WaveletPrepError):
    """Low and high subband lengths differ."""


class OddDimensionError(WaveletPrepError):
    """2D transform input has an odd width or height."""


class DimensionMismatch(WaveletPrepError):
    """Subband planes do not share a common shape."""


class DepthTooLarge(WaveletPrepError):
    """Plane dimensions are not divisible by 2**depth."""


class DegenerateDimension(WaveletPrepError):
    """Resize source smaller than 2 pixels along an axis."""


class DecodeError(WaveletPrepError):
    """Image bytes could not be decoded."""


class UnsupportedFormat(DecodeError):
    """Image format recognized but not supported."""


class ConfigError(WaveletPrepError):
    """Invalid pipeline configuration."""


class EmptyMask(ConfigError):
    """Channel mask selects no subbands."""


class CorruptContainer(WaveletPrepError):
    """Tensor container bytes are structurally invalid."""


class VersionMismatch(CorruptContainer):
    """Tensor container declares an unsupported format version."""
