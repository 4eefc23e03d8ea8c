from __future__ import annotations

import numpy as np
import pytest

from wavelet_prep.image_io import ImageBuffer, buffer_from_array, encode_pgm


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(0xC0FFEE)


def make_gray(rng: np.random.Generator, width: int, height: int, bit_depth: str = "8") -> ImageBuffer:
    top = 65536 if bit_depth == "16" else 256
    return buffer_from_array(rng.integers(0, top, size=(height, width)), bit_depth)


def make_rgb(rng: np.random.Generator, width: int, height: int) -> ImageBuffer:
    return buffer_from_array(rng.integers(0, 256, size=(3, height, width)), "8")


def write_pgm_dir(directory, images: dict[str, ImageBuffer]) -> None:
    for name, image in images.items():
        (directory / name).write_bytes(encode_pgm(image))
