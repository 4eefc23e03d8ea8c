"""Separable LeGall 5/3 forward and inverse transforms.

Two execution modes:

* ``float``: direct convolve-and-decimate analysis in float64, with the
  synthesis implemented as the exact algebraic inverse of the lifting
  ladder. Roundtrips are exact up to float64 rounding.
* ``reversible``: the integer lifting ladder
  ``d[n] = x[2n+1] - floor((x[2n] + x[2n+2]) / 2)``,
  ``s[n] = x[2n] + floor((d[n-1] + d[n] + 2) / 4)``,
  which is bit-exactly invertible over integers. The high band carries the
  doubled (jpeg2000-scaled) detail regardless of the configured float
  convention, since the halved taps admit no integer ladder.

Boundaries use whole-sample symmetric extension (``x[-k] = x[k]``,
``x[N-1+k] = x[N-1-k]``). Low-pass outputs are anchored at even input
indices, high-pass outputs at odd ones. 2D transforms filter rows first
(along x), then columns; subband names give the row filter first.

Everything is a pure function over caller-owned arrays; nothing in this
module mutates its inputs or holds global state. The 2D kernels run along
either axis directly instead of transposing, and integer lifting picks an
int32 or int64 working type from the observed sample range (int32 keeps
>= 16 guard bits for anything below 2**15).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateSignal,
    DepthTooLarge,
    DimensionMismatch,
    LengthMismatch,
    OddDimensionError,
    OddLengthError,
)
from .filters import PAPER_BANK, FilterBank

WHOLE_SAMPLE_SYMMETRIC = "whole_sample_symmetric"

MODES = ("float", "reversible")

SUBBAND_ORDER = ("LL", "HL", "LH", "HH")

# Inputs to the integer ladder must leave headroom for coefficient growth;
# int64 minus this bound gives > 20 guard bits even after deep recursion,
# and anything below _INT32_LIMIT keeps >= 16 guard bits in int32.
_LIFT_INPUT_LIMIT = 1 << 40
_INT32_LIMIT = 1 << 15


def _sl(axis: int, s: slice) -> tuple:
    """Index tuple selecting ``s`` along the leading or trailing axis."""
    return (s,) if axis == 0 else (Ellipsis, s)


def _sym_indices(n: int, left: int, right: int) -> np.ndarray:
    idx = np.arange(-left, n + right)
    if n == 1:
        return np.zeros_like(idx)
    period = 2 * (n - 1)
    idx = idx % period
    return np.where(idx < n, idx, period - idx)


def _extend(a: np.ndarray, axis: int, left: int, right: int) -> np.ndarray:
    """Whole-sample symmetric extension along one axis."""
    return np.take(a, _sym_indices(a.shape[axis], left, right), axis=axis)


def _analyze(a: np.ndarray, bank: FilterBank, axis: int) -> tuple[np.ndarray, np.ndarray]:
    """Convolve-and-decimate along ``axis``. Length there must be even."""
    m = a.shape[axis] // 2
    ext = _extend(np.asarray(a, dtype=np.float64), axis, 2, 1)
    # low tap k lands on extended position 2i + k (anchor 2i, center index 2);
    # high tap k on 2i + 1 + k - center, i.e. 2i + k + 2 for the 5/3 banks
    low = None
    lo_off = 2 - bank.lowpass_center_index
    for k, c in enumerate(bank.lowpass_taps):
        start = k + lo_off
        term = c * ext[_sl(axis, slice(start, start + 2 * m - 1, 2))]
        low = term if low is None else low + term
    high = None
    hi_off = 3 - bank.highpass_center_index
    for k, c in enumerate(bank.highpass_taps):
        start = k + hi_off
        term = c * ext[_sl(axis, slice(start, start + 2 * m - 1, 2))]
        high = term if high is None else high + term
    return low, high


def _shift_down(a: np.ndarray, axis: int) -> np.ndarray:
    """a[i+1] with the last sample repeated (half-sample right extension)."""
    out = np.empty_like(a)
    out[_sl(axis, slice(None, -1))] = a[_sl(axis, slice(1, None))]
    out[_sl(axis, slice(-1, None))] = a[_sl(axis, slice(-1, None))]
    return out


def _shift_up(a: np.ndarray, axis: int) -> np.ndarray:
    """a[i-1] with the first sample repeated (half-sample left extension)."""
    out = np.empty_like(a)
    out[_sl(axis, slice(1, None))] = a[_sl(axis, slice(None, -1))]
    out[_sl(axis, slice(0, 1))] = a[_sl(axis, slice(0, 1))]
    return out


def _synthesize(low: np.ndarray, high: np.ndarray, bank: FilterBank, axis: int) -> np.ndarray:
    """Invert the analysis ladder along ``axis``, in float64."""
    d = np.asarray(high, dtype=np.float64)
    if bank.highpass_gain != 1.0:
        d = d / bank.highpass_gain
    s = np.asarray(low, dtype=np.float64)
    even = s - 0.25 * (_shift_up(d, axis) + d)
    odd = d + 0.5 * (even + _shift_down(even, axis))
    shape = list(low.shape)
    shape[axis] *= 2
    out = np.empty(shape, dtype=np.float64)
    out[_sl(axis, slice(0, None, 2))] = even
    out[_sl(axis, slice(1, None, 2))] = odd
    return out


def _lift_forward(a: np.ndarray, axis: int) -> tuple[np.ndarray, np.ndarray]:
    """Integer lifting along ``axis``; input must be an integer array."""
    even = a[_sl(axis, slice(0, None, 2))]
    odd = a[_sl(axis, slice(1, None, 2))]
    t = _shift_down(even, axis)
    t += even
    t //= 2
    d = odd - t
    s = _shift_up(d, axis)
    s += d
    s += 2
    s //= 4
    s += even
    return s, d


def _lift_inverse(s: np.ndarray, d: np.ndarray, axis: int) -> np.ndarray:
    t = _shift_up(d, axis)
    t += d
    t += 2
    t //= 4
    even = s - t
    odd = _shift_down(even, axis)
    odd += even
    odd //= 2
    odd += d
    shape = list(s.shape)
    shape[axis] *= 2
    out = np.empty(shape, dtype=s.dtype)
    out[_sl(axis, slice(0, None, 2))] = even
    out[_sl(axis, slice(1, None, 2))] = odd
    return out


def _working_int(arrays: tuple[np.ndarray, ...]) -> type:
    """Pick the integer working type from the observed sample range."""
    peak = max(int(np.abs(a).max()) if a.size else 0 for a in arrays)
    if peak >= _LIFT_INPUT_LIMIT:
        raise OverflowError("integer samples exceed the supported working range")
    return np.int32 if peak < _INT32_LIMIT else np.int64


def _require_extension(extension: str) -> None:
    if extension != WHOLE_SAMPLE_SYMMETRIC:
        raise ValueError(f"unsupported boundary extension {extension!r}")


def _check_even_length(n: int) -> None:
    if n < 2:
        raise DegenerateSignal(f"signal length {n} < 2")
    if n % 2:
        raise OddLengthError(f"signal length {n} is odd")


def analyze_1d(
    signal,
    bank: FilterBank = PAPER_BANK,
    extension: str = WHOLE_SAMPLE_SYMMETRIC,
) -> tuple[np.ndarray, np.ndarray]:
    """Split an even-length signal into half-rate low and high bands.

    Returns ``(low, high)``, each of length ``len(signal) // 2``, computed
    by direct convolution against the bank's taps on the symmetrically
    extended signal.
    """
    _require_extension(extension)
    x = np.asarray(signal, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("analyze_1d expects a 1D signal")
    _check_even_length(x.shape[-1])
    if not np.all(np.isfinite(x)):
        raise ValueError("signal contains non-finite samples")
    return _analyze(x, bank, axis=-1)


def synthesize_1d(
    low,
    high,
    bank: FilterBank = PAPER_BANK,
    extension: str = WHOLE_SAMPLE_SYMMETRIC,
) -> np.ndarray:
    """Reassemble a signal from its low and high bands (float mode)."""
    _require_extension(extension)
    lo = np.asarray(low, dtype=np.float64)
    hi = np.asarray(high, dtype=np.float64)
    if lo.ndim != 1 or hi.ndim != 1:
        raise ValueError("synthesize_1d expects 1D bands")
    if lo.shape != hi.shape:
        raise LengthMismatch(f"low length {lo.shape[0]} != high length {hi.shape[0]}")
    if lo.shape[0] < 1:
        raise DegenerateSignal("bands must hold at least one sample")
    return _synthesize(lo, hi, bank, axis=-1)


def lift_forward_1d(signal) -> tuple[np.ndarray, np.ndarray]:
    """Reversible integer analysis. Returns integer ``(low, high)``."""
    x = np.asarray(signal)
    if x.ndim != 1:
        raise ValueError("lift_forward_1d expects a 1D signal")
    if not np.issubdtype(x.dtype, np.integer):
        raise TypeError("reversible lifting requires integer samples")
    _check_even_length(x.shape[-1])
    x = x.astype(_working_int((x,)), copy=False)
    return _lift_forward(x, axis=-1)


def lift_inverse_1d(low, high) -> np.ndarray:
    """Bit-exact inverse of :func:`lift_forward_1d`."""
    s = np.asarray(low)
    d = np.asarray(high)
    if s.shape != d.shape:
        raise LengthMismatch(f"low length {s.shape} != high length {d.shape}")
    if not (np.issubdtype(s.dtype, np.integer) and np.issubdtype(d.dtype, np.integer)):
        raise TypeError("reversible lifting requires integer samples")
    if s.ndim != 1 or s.shape[0] < 1:
        raise DegenerateSignal("bands must hold at least one sample")
    work = _working_int((s, d))
    return _lift_inverse(s.astype(work, copy=False), d.astype(work, copy=False), axis=-1)


@dataclass
class SubbandSet:
    """One decomposition level: four planes of shape (h/2, w/2).

    Subband names give the filter applied along rows (x) first, then along
    columns (y): ``hl`` is row-high-pass, column-low-pass.
    """

    ll: np.ndarray
    hl: np.ndarray
    lh: np.ndarray
    hh: np.ndarray
    level: int = 1
    source_dims: tuple[int, int] = field(default=None)  # (width, height)

    def __post_init__(self) -> None:
        shapes = {p.shape for p in (self.ll, self.hl, self.lh, self.hh)}
        if len(shapes) != 1:
            raise DimensionMismatch(f"subband planes disagree on shape: {sorted(shapes)}")
        h2, w2 = self.ll.shape
        if self.source_dims is None:
            self.source_dims = (2 * w2, 2 * h2)

    @property
    def planes(self) -> dict[str, np.ndarray]:
        return {"LL": self.ll, "HL": self.hl, "LH": self.lh, "HH": self.hh}


@dataclass
class MultiLevelDecomposition:
    """Dyadic recursion: level k+1 decomposes level k's LL plane."""

    levels: list[SubbandSet]

    @property
    def depth(self) -> int:
        return len(self.levels)


def _check_plane(plane: np.ndarray) -> None:
    if plane.ndim != 2:
        raise ValueError(f"expected a 2D plane, got ndim={plane.ndim}")
    h, w = plane.shape
    if h < 2 or w < 2:
        raise DegenerateSignal(f"plane dims {w}x{h} below the 2x2 minimum")
    if h % 2 or w % 2:
        raise OddDimensionError(f"plane dims {w}x{h} must both be even")


def forward_2d(
    plane,
    mode: str = "float",
    bank: FilterBank = PAPER_BANK,
    order: str = "rows_first",
) -> SubbandSet:
    """One dyadic decomposition level of an even-dimension plane.

    ``order`` selects which axis is filtered first; it exists to exercise
    separability and only applies to float mode. Reversible mode is defined
    with the canonical rows-first traversal.
    """
    plane = np.asarray(plane)
    _check_plane(plane)
    h, w = plane.shape
    if mode == "reversible":
        if order != "rows_first":
            raise ValueError("reversible mode fixes rows-first traversal")
        if not np.issubdtype(plane.dtype, np.integer):
            raise TypeError("reversible mode requires an integer plane")
        p = plane.astype(_working_int((plane,)), copy=False)
        l0, h0 = _lift_forward(p, axis=-1)
        ll, lh = _lift_forward(l0, axis=0)
        hl, hh = _lift_forward(h0, axis=0)
        return SubbandSet(ll, hl, lh, hh, source_dims=(w, h))
    if mode != "float":
        raise ValueError(f"unknown mode {mode!r}")
    p = np.asarray(plane, dtype=np.float64)
    if order == "rows_first":
        l0, h0 = _analyze(p, bank, axis=-1)
        ll, lh = _analyze(l0, bank, axis=0)
        hl, hh = _analyze(h0, bank, axis=0)
    elif order == "cols_first":
        low, high = _analyze(p, bank, axis=0)
        ll, hl = _analyze(low, bank, axis=-1)
        lh, hh = _analyze(high, bank, axis=-1)
    else:
        raise ValueError(f"unknown traversal order {order!r}")
    return SubbandSet(ll, hl, lh, hh, source_dims=(w, h))


def inverse_2d(
    subbands: SubbandSet,
    mode: str = "float",
    bank: FilterBank = PAPER_BANK,
) -> np.ndarray:
    """Recover the plane a :class:`SubbandSet` was produced from.

    Float mode reproduces the input within float64 rounding; reversible
    mode is bit-exact on integer subbands.
    """
    sb = subbands
    planes = (sb.ll, sb.hl, sb.lh, sb.hh)
    shapes = {p.shape for p in planes}
    if len(shapes) != 1:
        raise DimensionMismatch(f"subband planes disagree on shape: {sorted(shapes)}")
    if mode == "reversible":
        if not all(np.issubdtype(p.dtype, np.integer) for p in planes):
            raise TypeError("reversible mode requires integer subbands")
        work = _working_int(planes)
        ll, hl, lh, hh = (p.astype(work, copy=False) for p in planes)
        l0 = _lift_inverse(ll, lh, axis=0)
        h0 = _lift_inverse(hl, hh, axis=0)
        return _lift_inverse(l0, h0, axis=-1)
    if mode != "float":
        raise ValueError(f"unknown mode {mode!r}")
    l0 = _synthesize(sb.ll, sb.lh, bank, axis=0)
    h0 = _synthesize(sb.hl, sb.hh, bank, axis=0)
    return _synthesize(l0, h0, bank, axis=-1)


def decompose_multi_level(
    plane,
    depth: int,
    mode: str = "float",
    bank: FilterBank = PAPER_BANK,
) -> MultiLevelDecomposition:
    """Recursively decompose; level k+1 consumes level k's LL plane."""
    plane = np.asarray(plane)
    _check_plane(plane)
    if depth < 1:
        raise ValueError("depth must be >= 1")
    h, w = plane.shape
    step = 1 << depth
    if h % step or w % step:
        raise DepthTooLarge(f"plane dims {w}x{h} not divisible by 2**{depth}")
    levels: list[SubbandSet] = []
    current = plane
    for k in range(depth):
        sb = forward_2d(current, mode=mode, bank=bank)
        sb.level = k + 1
        levels.append(sb)
        current = sb.ll
    return MultiLevelDecomposition(levels)


def reconstruct_multi_level(
    decomposition: MultiLevelDecomposition,
    mode: str = "float",
    bank: FilterBank = PAPER_BANK,
) -> np.ndarray:
    """Invert :func:`decompose_multi_level` from the deepest level up."""
    levels = decomposition.levels
    if not levels:
        raise ValueError("decomposition holds no levels")
    current = levels[-1].ll
    for sb in reversed(levels):
        merged = SubbandSet(current, sb.hl, sb.lh, sb.hh, level=sb.level)
        current = inverse_2d(merged, mode=mode, bank=bank)
    return current
