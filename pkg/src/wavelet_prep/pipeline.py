"""End-to-end preprocessing: decode -> grayscale policy -> 2x bilinear
resize -> dyadic decomposition -> channel masking -> packed tensors.

A configured target of (W, H) resizes the source to (2W, 2H) first, so one
decomposition level lands exactly on the network's input dims while keeping
every coefficient needed to rebuild the resized plane.

Packing layout: with ``levels=1`` a single tensor of shape
(|mask| * source_channels, H, W) holds the masked subbands in canonical
LL, HL, LH, HH order, grouped per source channel. With deeper recursion the
deepest LL stack and one detail tensor per level are stored as separate
tensors in the same container (planes of different sizes never share a
tensor); detail tensors run from the deepest level to level 1.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .container import TensorRecord, write_container
from .dwt import (
    SUBBAND_ORDER,
    SubbandSet,
    decompose_multi_level,
    inverse_2d,
)
from .errors import ConfigError, CorruptContainer, EmptyMask, WaveletPrepError
from .filters import CONVENTIONS, filter_bank
from .image_io import ImageBuffer, decode_image
from .resize import ResizeSpec, resize_bilinear

MODES = ("float", "reversible")
NORMALIZATIONS = ("raw", "unit_interval", "per_channel_affine")
COLOR_POLICIES = ("grayscale_single_plane", "per_channel_fanout")

IMAGE_SUFFIXES = (".pgm", ".png")

# Rec. 601 luma weights for the grayscale conversion of color inputs.
_LUMA = (0.299, 0.587, 0.114)


@dataclass
class PipelineConfig:
    """Everything the preprocessing pipeline needs to know.

    ``network_input_dims`` is (W, H) in pixels; any positive integers work
    (odd targets like 299 included) because the transform always runs on
    the even (2W, 2H) resample. In reversible mode the resized plane is
    rounded to integers before the transform, and the lifting ladder
    ignores ``scaling_convention``.
    """

    network_input_dims: tuple[int, int]
    mode: str = "reversible"
    levels: int = 1
    channel_mask: tuple[str, ...] = SUBBAND_ORDER
    normalization: str = "raw"
    color_policy: str = "grayscale_single_plane"
    scaling_convention: str = "paper"

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        dims = tuple(self.network_input_dims)
        if len(dims) != 2 or not all(isinstance(v, int) and v >= 1 for v in dims):
            raise ConfigError(f"network_input_dims must be two positive integers, got {dims}")
        self.network_input_dims = dims
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not isinstance(self.levels, int) or self.levels < 1:
            raise ConfigError(f"levels must be a positive integer, got {self.levels!r}")
        mask = tuple(self.channel_mask)
        unknown = [m for m in mask if m not in SUBBAND_ORDER]
        if unknown:
            raise ConfigError(f"unknown subbands in channel mask: {unknown}")
        if not mask:
            raise EmptyMask("channel mask selects no subbands")
        self.channel_mask = tuple(n for n in SUBBAND_ORDER if n in mask)
        if self.normalization not in NORMALIZATIONS:
            raise ConfigError(f"normalization must be one of {NORMALIZATIONS}")
        if self.color_policy not in COLOR_POLICIES:
            raise ConfigError(f"color_policy must be one of {COLOR_POLICIES}")
        if self.scaling_convention not in CONVENTIONS:
            raise ConfigError(f"scaling_convention must be one of {CONVENTIONS}")
        w, h = dims
        step = 1 << self.levels
        if (2 * w) % step or (2 * h) % step:
            raise ConfigError(
                f"resized dims {2 * w}x{2 * h} not divisible by 2**{self.levels}; "
                f"lower levels or adjust the target size"
            )

    @property
    def resize_spec(self) -> ResizeSpec:
        w, h = self.network_input_dims
        return ResizeSpec(target_width=2 * w, target_height=2 * h)


_CONFIG_KEYS = (
    "network_input_dims",
    "mode",
    "levels",
    "channel_mask",
    "normalization",
    "color_policy",
    "scaling_convention",
)


def config_from_dict(values: dict) -> PipelineConfig:
    """Build a config from a flat mapping mirroring the field names."""
    unknown = sorted(set(values) - set(_CONFIG_KEYS))
    if unknown:
        raise ConfigError(f"unknown config key {unknown[0]!r}")
    if "network_input_dims" not in values:
        raise ConfigError("config requires network_input_dims")
    kwargs = dict(values)
    dims = kwargs["network_input_dims"]
    try:
        kwargs["network_input_dims"] = tuple(int(v) for v in dims)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad network_input_dims {dims!r}") from exc
    if "channel_mask" in kwargs:
        mask = kwargs["channel_mask"]
        if isinstance(mask, str):
            mask = [m for m in mask.split(",") if m]
        kwargs["channel_mask"] = tuple(str(m).upper() for m in mask)
    if "levels" in kwargs:
        try:
            kwargs["levels"] = int(kwargs["levels"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad levels {kwargs['levels']!r}") from exc
    return PipelineConfig(**kwargs)


@dataclass
class PackedTensor:
    """A (channels, H, W) stack plus the metadata that travels with it.

    ``data`` stays float64 in float mode for accumulation accuracy; the
    container layer stores float32 (or int32 in reversible raw mode).
    """

    data: np.ndarray
    metadata: dict[str, str] = field(default_factory=dict)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(self.data.shape)

    @property
    def wire_dtype(self) -> str:
        return "int32" if np.issubdtype(self.data.dtype, np.integer) else "float32"


def apply_channel_mask(subbands: SubbandSet, mask: Iterable[str]) -> list[np.ndarray]:
    """Masked planes in canonical LL, HL, LH, HH order."""
    wanted = {str(m).upper() for m in mask}
    unknown = wanted - set(SUBBAND_ORDER)
    if unknown:
        raise ConfigError(f"unknown subbands in channel mask: {sorted(unknown)}")
    if not wanted:
        raise EmptyMask("channel mask selects no subbands")
    planes = subbands.planes
    return [planes[name] for name in SUBBAND_ORDER if name in wanted]


def _image_planes(image: ImageBuffer, policy: str) -> list[np.ndarray]:
    s = image.samples.astype(np.float64)
    if policy == "grayscale_single_plane":
        if image.channels >= 3:
            return [_LUMA[0] * s[0] + _LUMA[1] * s[1] + _LUMA[2] * s[2]]
        return [s[0]]
    return [s[c] for c in range(image.channels)]


def _base_metadata(config: PipelineConfig, image: ImageBuffer, source: str, planes: int) -> dict[str, str]:
    w, h = config.network_input_dims
    meta = {
        "mode": config.mode,
        "levels": str(config.levels),
        "mask": ",".join(config.channel_mask),
        "convention": config.scaling_convention,
        "normalization": config.normalization,
        "color": config.color_policy,
        "network_dims": f"{w}x{h}",
        "source_channels": str(planes),
        "source_max": repr(image.max_value),
    }
    if source:
        meta["source"] = source
    return meta


def _quantize(plane: np.ndarray, image: ImageBuffer) -> np.ndarray:
    """Round a resized plane to the narrowest safe integer working type."""
    rounded = np.rint(plane)
    peak = float(np.abs(rounded).max()) if image.samples.dtype == np.float32 else image.max_value
    return rounded.astype(np.int32 if peak < 2**15 else np.int64)


def _stack(planes: Sequence[np.ndarray], reversible: bool) -> np.ndarray:
    data = np.stack(planes)
    if not reversible:
        return data
    if data.size and np.abs(data).max() >= 2**31:
        raise OverflowError("coefficients exceed int32 storage range")
    return data.astype(np.int32, copy=False)


def transform_input_planes(image: ImageBuffer, config: PipelineConfig) -> list[np.ndarray]:
    """The planes the transform actually consumes: color policy applied,
    resized to (2W, 2H), rounded to integers in reversible mode.

    Reconstruction checks compare against exactly these planes, since the
    lossless guarantee starts after the (inherently lossy) resample.
    """
    config.validate()
    reversible = config.mode == "reversible"
    spec = config.resize_spec
    target_shape = (spec.target_height, spec.target_width)
    out = []
    for plane in _image_planes(image, config.color_policy):
        # same-size input: the half-pixel map is the identity, skip the kernel
        resized = plane if plane.shape == target_shape else resize_bilinear(plane, spec)
        out.append(_quantize(resized, image) if reversible else resized)
    return out


def preprocess_image(
    image: ImageBuffer,
    config: PipelineConfig,
    source: str = "",
) -> list[PackedTensor]:
    """Run the full pipeline on one decoded image.

    Returns one tensor for ``levels=1``; deeper configs add one tensor per
    detail level plus the deepest LL stack (see module docstring).
    """
    config.validate()
    bank = filter_bank(config.scaling_convention)
    reversible = config.mode == "reversible"
    planes = transform_input_planes(image, config)
    decomps = [
        decompose_multi_level(p, config.levels, mode=config.mode, bank=bank) for p in planes
    ]
    meta = _base_metadata(config, image, source, len(planes))
    tensors: list[PackedTensor] = []
    if config.levels == 1:
        stack = [
            plane
            for decomp in decomps
            for plane in apply_channel_mask(decomp.levels[0], config.channel_mask)
        ]
        tensors.append(PackedTensor(_stack(stack, reversible), dict(meta, kind="subbands", level="1")))
    else:
        if "LL" in config.channel_mask:
            deepest = [decomp.levels[-1].ll for decomp in decomps]
            tensors.append(
                PackedTensor(_stack(deepest, reversible), dict(meta, kind="ll", level=str(config.levels)))
            )
        detail_names = [n for n in config.channel_mask if n != "LL"]
        if detail_names:
            for level in range(config.levels, 0, -1):
                stack = [
                    decomp.levels[level - 1].planes[name]
                    for decomp in decomps
                    for name in detail_names
                ]
                tensors.append(
                    PackedTensor(
                        _stack(stack, reversible),
                        dict(meta, kind="details", level=str(level), mask=",".join(detail_names)),
                    )
                )
    return [normalize(t, config.normalization) for t in tensors]


def preprocess_baseline(
    image: ImageBuffer,
    config: PipelineConfig,
    source: str = "",
) -> list[PackedTensor]:
    """Plain bilinear downsample to (W, H): the no-DWT comparison path."""
    config.validate()
    w, h = config.network_input_dims
    spec = ResizeSpec(target_width=w, target_height=h)
    reversible = config.mode == "reversible"
    planes = []
    for plane in _image_planes(image, config.color_policy):
        resized = resize_bilinear(plane, spec)
        planes.append(_quantize(resized, image) if reversible else resized)
    meta = _base_metadata(config, image, source, len(planes))
    tensor = PackedTensor(_stack(planes, reversible), dict(meta, kind="baseline", level="0", mask=""))
    return [normalize(tensor, config.normalization)]


def normalize(tensor: PackedTensor, policy: str) -> PackedTensor:
    """Apply a normalization policy, recording constants for inversion.

    ``raw`` returns the tensor untouched. ``unit_interval`` divides by the
    source's max representable value. ``per_channel_affine`` maps each
    channel to zero mean / unit variance; zero-variance channels fall back
    to shift-only and are flagged in the metadata.
    """
    if policy not in NORMALIZATIONS:
        raise ConfigError(f"normalization must be one of {NORMALIZATIONS}")
    meta = dict(tensor.metadata, normalization=policy)
    if policy == "raw":
        return replace(tensor, metadata=meta)
    data = tensor.data.astype(np.float64)
    if not np.all(np.isfinite(data)):
        raise ValueError("cannot normalize a tensor with non-finite values")
    if policy == "unit_interval":
        scale = float(meta.get("source_max", "255.0"))
        meta["norm_scale"] = repr(scale)
        return PackedTensor(data / scale, meta)
    flat = data.reshape(data.shape[0], -1)
    means = flat.mean(axis=1)
    stds = flat.std(axis=1)
    degenerate = np.flatnonzero(stds == 0.0)
    stds = np.where(stds == 0.0, 1.0, stds)
    out = (data - means[:, None, None]) / stds[:, None, None]
    for i, (m, s) in enumerate(zip(means, stds)):
        meta[f"norm_mean_{i}"] = repr(float(m))
        meta[f"norm_std_{i}"] = repr(float(s))
    if degenerate.size:
        meta["norm_zero_variance"] = ",".join(str(int(i)) for i in degenerate)
    return PackedTensor(out, meta)


def to_records(tensors: Sequence[PackedTensor]) -> list[TensorRecord]:
    """Cast packed tensors to their container wire dtypes."""
    records = []
    for t in tensors:
        if t.wire_dtype == "int32":
            records.append(TensorRecord(t.data.astype(np.int32, copy=False), dict(t.metadata)))
        else:
            records.append(TensorRecord(t.data.astype(np.float32), dict(t.metadata)))
    return records


def from_records(records: Sequence[TensorRecord]) -> list[PackedTensor]:
    return [PackedTensor(r.data, dict(r.metadata)) for r in records]


def _meta(tensor: PackedTensor, key: str) -> str:
    try:
        return tensor.metadata[key]
    except KeyError as exc:
        raise CorruptContainer(f"tensor metadata missing {key!r}") from exc


def _denormalize(tensor: PackedTensor) -> np.ndarray:
    policy = tensor.metadata.get("normalization", "raw")
    reversible = _meta(tensor, "mode") == "reversible"
    data = tensor.data.astype(np.float64)
    if policy == "raw":
        restored = data
    elif policy == "unit_interval":
        restored = data * float(_meta(tensor, "norm_scale"))
    elif policy == "per_channel_affine":
        means = np.array([float(_meta(tensor, f"norm_mean_{i}")) for i in range(data.shape[0])])
        stds = np.array([float(_meta(tensor, f"norm_std_{i}")) for i in range(data.shape[0])])
        restored = data * stds[:, None, None] + means[:, None, None]
    else:
        raise CorruptContainer(f"unknown normalization {policy!r} in metadata")
    return np.rint(restored).astype(np.int64) if reversible else restored


def reconstruct_planes(tensors: Sequence[PackedTensor]) -> list[np.ndarray]:
    """Invert a full-mask packed result back to the resized source planes.

    Returns one (2H, 2W) plane per source channel: int64 for reversible
    tensors (bit-exact), float64 otherwise.
    """
    if not tensors:
        raise ValueError("no tensors to reconstruct from")
    first = tensors[0]
    mode = _meta(first, "mode")
    bank = filter_bank(_meta(first, "convention"))
    levels = int(_meta(first, "levels"))
    channels = int(_meta(first, "source_channels"))
    mask = tuple(m for m in _meta(first, "mask").split(",") if m)
    kinds = {t.metadata.get("kind", "") for t in tensors}
    if "baseline" in kinds:
        raise ValueError("baseline tensors carry no subbands to invert")

    if levels == 1:
        data = _denormalize(first)
        if set(mask) != set(SUBBAND_ORDER):
            raise ValueError(f"reconstruction requires the full mask, got {mask}")
        if data.shape[0] != 4 * channels:
            raise CorruptContainer(
                f"expected {4 * channels} planes for {channels} source channels, got {data.shape[0]}"
            )
        out = []
        for c in range(channels):
            ll, hl, lh, hh = data[4 * c : 4 * c + 4]
            out.append(inverse_2d(SubbandSet(ll, hl, lh, hh), mode=mode, bank=bank))
        return out

    by_kind: dict[tuple[str, int], np.ndarray] = {}
    for t in tensors:
        by_kind[(_meta(t, "kind"), int(_meta(t, "level")))] = _denormalize(t)
    try:
        current = [by_kind[("ll", levels)][c] for c in range(channels)]
    except KeyError as exc:
        raise ValueError("reconstruction requires the deepest LL tensor") from exc
    for level in range(levels, 0, -1):
        details = by_kind.get(("details", level))
        if details is None or details.shape[0] != 3 * channels:
            raise ValueError(f"reconstruction requires full detail planes at level {level}")
        for c in range(channels):
            hl, lh, hh = details[3 * c : 3 * c + 3]
            current[c] = inverse_2d(SubbandSet(current[c], hl, lh, hh), mode=mode, bank=bank)
    return current


@dataclass
class FileOutcome:
    source: str
    output: str | None = None
    error: str | None = None
    message: str | None = None
    megapixels: float = 0.0

    @property
    def ok(self) -> bool:
        return self.error is None

    def to_dict(self) -> dict:
        d = {"source": self.source, "ok": self.ok, "megapixels": round(self.megapixels, 6)}
        if self.output is not None:
            d["output"] = self.output
        if self.error is not None:
            d["error"] = self.error
            d["message"] = self.message or ""
        return d


@dataclass
class BatchReport:
    outcomes: list[FileOutcome]
    wall_seconds: float

    @property
    def successes(self) -> list[FileOutcome]:
        return [o for o in self.outcomes if o.ok]

    @property
    def failures(self) -> list[FileOutcome]:
        return [o for o in self.outcomes if not o.ok]

    @property
    def megapixels(self) -> float:
        return sum(o.megapixels for o in self.successes)

    @property
    def throughput(self) -> float:
        """Megapixels per second over the whole batch."""
        return self.megapixels / self.wall_seconds if self.wall_seconds > 0 else 0.0

    def to_dict(self) -> dict:
        return {
            "files": len(self.outcomes),
            "succeeded": len(self.successes),
            "failed": len(self.failures),
            "wall_seconds": round(self.wall_seconds, 6),
            "megapixels": round(self.megapixels, 6),
            "megapixels_per_second": round(self.throughput, 3),
        }


def list_images(input_dir: str | Path) -> list[Path]:
    root = Path(input_dir)
    if not root.is_dir():
        raise FileNotFoundError(f"input directory {root} does not exist")
    return sorted(p for p in root.iterdir() if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES)


def preprocess_batch(
    input_dir: str | Path,
    output_dir: str | Path,
    config: PipelineConfig,
    parallelism: int = 1,
    baseline: bool = False,
) -> BatchReport:
    """Convert every image in a directory to a .wvt container.

    Per-file failures are recorded in the report and never abort the batch;
    only top-level I/O problems (unreadable input dir, unwritable output
    dir) raise.
    """
    files = list_images(input_dir)
    out_root = Path(output_dir)
    out_root.mkdir(parents=True, exist_ok=True)
    run = preprocess_baseline if baseline else preprocess_image

    def work(path: Path) -> FileOutcome:
        try:
            image = decode_image(path.read_bytes())
            tensors = run(image, config, source=path.name)
            target = out_root / (path.stem + ".wvt")
            write_container(to_records(tensors), target)
            return FileOutcome(
                source=str(path),
                output=str(target),
                megapixels=image.width * image.height / 1e6,
            )
        except (WaveletPrepError, OverflowError, OSError, ValueError) as exc:
            return FileOutcome(source=str(path), error=type(exc).__name__, message=str(exc))

    start = time.perf_counter()
    if parallelism > 1 and len(files) > 1:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            outcomes = list(pool.map(work, files))
    else:
        outcomes = [work(path) for path in files]
    return BatchReport(outcomes=outcomes, wall_seconds=time.perf_counter() - start)
