"""Reproducible throughput measurement for the preprocessing stages.

Inputs are deterministic synthetic noise (seeded generator), so figures
can be compared across runs and machines without any dataset. Warmup
iterations run every stage once before timing; reported figures are the
median over the timed iterations, in megapixels per second of source
pixels.
"""

from __future__ import annotations

import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np

from .dwt import forward_2d
from .filters import filter_bank
from .image_io import ImageBuffer, buffer_from_array
from .pipeline import PipelineConfig, preprocess_image
from .resize import ResizeSpec, resize_bilinear

DEFAULT_SEED = 20230517


def synthetic_image(width: int, height: int, bit_depth: str = "8", seed: int = DEFAULT_SEED) -> ImageBuffer:
    """Deterministic uniform-noise image for benchmarking."""
    rng = np.random.default_rng(seed)
    top = 65536 if bit_depth == "16" else 256
    return buffer_from_array(rng.integers(0, top, size=(height, width)), bit_depth)


def _time_median(fn: Callable[[], object], iterations: int, warmup: int) -> float:
    for _ in range(warmup):
        fn()
    samples = []
    for _ in range(iterations):
        start = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - start)
    return statistics.median(samples)


def run_benchmarks(
    network_dims: tuple[int, int],
    modes: tuple[str, ...] = ("reversible",),
    iterations: int = 5,
    warmup: int = 1,
    jobs: int = 1,
    input_dims: tuple[int, int] = (1024, 1024),
    seed: int = DEFAULT_SEED,
) -> list[dict]:
    """Measure resize, one-level forward transform, and the full pipeline.

    Returns one record per stage with megapixels/s of source pixels.
    ``jobs > 1`` adds a parallel full-pipeline figure over ``jobs``
    concurrently processed images.
    """
    w, h = network_dims
    iw, ih = input_dims
    image = synthetic_image(iw, ih, seed=seed)
    source_mp = iw * ih / 1e6
    plane = image.samples[0].astype(np.float64)
    spec = ResizeSpec(target_width=2 * w, target_height=2 * h)
    results: list[dict] = []

    def record(stage: str, mode: str, seconds: float, megapixels: float, workers: int = 1) -> None:
        results.append(
            {
                "stage": stage,
                "mode": mode,
                "input_dims": f"{iw}x{ih}",
                "network_dims": f"{w}x{h}",
                "iterations": iterations,
                "jobs": workers,
                "seconds": round(seconds, 6),
                "megapixels_per_second": round(megapixels / seconds, 3) if seconds > 0 else float("inf"),
            }
        )

    seconds = _time_median(lambda: resize_bilinear(plane, spec), iterations, warmup)
    record("resize", "float", seconds, source_mp)

    transform_mp = (2 * w) * (2 * h) / 1e6
    for mode in modes:
        if mode == "reversible":
            tplane = np.rint(resize_bilinear(plane, spec)).astype(np.int32)
        else:
            tplane = resize_bilinear(plane, spec)
        bank = filter_bank("paper")
        seconds = _time_median(lambda: forward_2d(tplane, mode=mode, bank=bank), iterations, warmup)
        record("forward2d", mode, seconds, transform_mp)

    for mode in modes:
        config = PipelineConfig(network_input_dims=(w, h), mode=mode)
        seconds = _time_median(lambda: preprocess_image(image, config), iterations, warmup)
        record("pipeline", mode, seconds, source_mp)
        if jobs > 1:
            images = [synthetic_image(iw, ih, seed=seed + i) for i in range(jobs)]

            def parallel() -> None:
                with ThreadPoolExecutor(max_workers=jobs) as pool:
                    list(pool.map(lambda im: preprocess_image(im, config), images))

            seconds = _time_median(parallel, iterations, warmup)
            record("pipeline", mode, seconds, source_mp * jobs, workers=jobs)

    return results
