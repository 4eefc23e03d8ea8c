"""Bilinear resampling with half-pixel center alignment.

Output pixel ``i`` samples source coordinate ``(i + 0.5) * (src / dst) - 0.5``
clamped to the valid range, then blends the four neighbors. The same kernel
serves both up- and down-scaling. The blend is evaluated in lerp form
(``a + t * (b - a)``) so constant inputs pass through exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDimension


@dataclass(frozen=True)
class ResizeSpec:
    """Target dimensions for a resample.

    Any positive target works; the subband pipeline always asks for the
    even (2W, 2H) shape, and the baseline path may ask for odd dims such
    as 299x299.
    """

    target_width: int
    target_height: int
    sampling_convention: str = "half_pixel"

    def __post_init__(self) -> None:
        if self.target_width < 1 or self.target_height < 1:
            raise ValueError("target dims must be positive")
        if self.sampling_convention != "half_pixel":
            raise ValueError(f"unsupported sampling convention {self.sampling_convention!r}")


def _axis_weights(src: int, dst: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    coords = (np.arange(dst, dtype=np.float64) + 0.5) * (src / dst) - 0.5
    coords = np.clip(coords, 0.0, src - 1.0)
    i0 = np.floor(coords).astype(np.intp)
    i1 = np.minimum(i0 + 1, src - 1)
    return i0, i1, coords - i0


def resize_bilinear(plane, spec: ResizeSpec) -> np.ndarray:
    """Resample a 2D plane to ``(spec.target_height, spec.target_width)``.

    Rows are gathered and blended along y first, then columns along x; both
    steps are lerps, so each output stays a convex blend of its neighbors
    and constants pass through unchanged.
    """
    p = np.asarray(plane, dtype=np.float64)
    if p.ndim != 2:
        raise ValueError(f"expected a 2D plane, got ndim={p.ndim}")
    h, w = p.shape
    if h < 2 or w < 2:
        raise DegenerateDimension(f"source dims {w}x{h} below the 2x2 minimum")
    x0, x1, fx = _axis_weights(w, spec.target_width)
    y0, y1, fy = _axis_weights(h, spec.target_height)
    rows = p[y0]
    if fy.any():
        delta = p[y1]
        delta -= rows
        delta *= fy[:, None]
        rows += delta
    out = rows[:, x0]
    if fx.any():
        delta = rows[:, x1]
        delta -= out
        delta *= fx
        out += delta
    return out
