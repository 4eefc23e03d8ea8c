"""wavelet-prep: LeGall 5/3 subband down-sampling for CNN input pipelines.

A target of (W, H) resizes sources to (2W, 2H) with half-pixel bilinear
interpolation, then one dyadic 5/3 decomposition yields four (W, H)
coefficient planes per source channel. In reversible mode the packed
tensor carries every bit of the resized image.

The array-level entry points below mirror the CLI and the HTTP service;
training code can call them directly on numpy arrays.
"""

from __future__ import annotations

import numpy as np

from . import errors
from .container import TensorRecord, read_container, write_container
from .dwt import (
    MultiLevelDecomposition,
    SubbandSet,
    analyze_1d,
    decompose_multi_level,
    forward_2d,
    inverse_2d,
    lift_forward_1d,
    lift_inverse_1d,
    reconstruct_multi_level,
    synthesize_1d,
)
from .filters import JPEG2000_BANK, PAPER_BANK, FilterBank, filter_bank
from .image_io import ImageBuffer, buffer_from_array, decode_image, encode_pgm
from .pipeline import (
    BatchReport,
    PackedTensor,
    PipelineConfig,
    apply_channel_mask,
    config_from_dict,
    normalize,
    preprocess_batch,
    reconstruct_planes,
    transform_input_planes,
)
from .pipeline import preprocess_baseline as _preprocess_baseline_impl
from .pipeline import preprocess_image as _preprocess_image_impl
from .resize import ResizeSpec, resize_bilinear

__version__ = "0.1.0"


def _as_buffer(image, bit_depth=None) -> ImageBuffer:
    if isinstance(image, ImageBuffer):
        return image
    return buffer_from_array(np.asarray(image), bit_depth)


def _as_config(config) -> PipelineConfig:
    if isinstance(config, PipelineConfig):
        return config
    return config_from_dict(dict(config))


def preprocess(image, config, bit_depth=None) -> list[PackedTensor]:
    """Full pipeline on an ImageBuffer or a (H, W) / (C, H, W) array.

    ``config`` is a PipelineConfig or a mapping with the same field names.
    """
    return _preprocess_image_impl(_as_buffer(image, bit_depth), _as_config(config))


def preprocess_baseline(image, config, bit_depth=None) -> list[PackedTensor]:
    """Plain bilinear downsample to (W, H), no subband decomposition."""
    return _preprocess_baseline_impl(_as_buffer(image, bit_depth), _as_config(config))


def forward2d(plane, mode: str = "float", convention: str = "paper") -> SubbandSet:
    """One decomposition level of a 2D plane."""
    return forward_2d(plane, mode=mode, bank=filter_bank(convention))


def inverse2d(subbands, mode: str = "float", convention: str = "paper") -> np.ndarray:
    """Invert :func:`forward2d`; accepts a SubbandSet or (ll, hl, lh, hh)."""
    if not isinstance(subbands, SubbandSet):
        ll, hl, lh, hh = (np.asarray(p) for p in subbands)
        subbands = SubbandSet(ll, hl, lh, hh)
    return inverse_2d(subbands, mode=mode, bank=filter_bank(convention))


preprocess_image = _preprocess_image_impl

__all__ = [
    "BatchReport",
    "FilterBank",
    "ImageBuffer",
    "JPEG2000_BANK",
    "MultiLevelDecomposition",
    "PAPER_BANK",
    "PackedTensor",
    "PipelineConfig",
    "ResizeSpec",
    "SubbandSet",
    "TensorRecord",
    "analyze_1d",
    "apply_channel_mask",
    "buffer_from_array",
    "config_from_dict",
    "decode_image",
    "decompose_multi_level",
    "encode_pgm",
    "errors",
    "filter_bank",
    "forward2d",
    "forward_2d",
    "inverse2d",
    "inverse_2d",
    "lift_forward_1d",
    "lift_inverse_1d",
    "normalize",
    "preprocess",
    "preprocess_baseline",
    "preprocess_batch",
    "preprocess_image",
    "read_container",
    "reconstruct_multi_level",
    "reconstruct_planes",
    "resize_bilinear",
    "synthesize_1d",
    "transform_input_planes",
    "write_container",
    "__version__",
]
