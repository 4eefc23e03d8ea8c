"""HTTP service wrapping the preprocessing core for long-running use.

Arrays travel as .wvt container bytes (application/octet-stream) in both
directions, so results are bit-exact across the wire and any client with
a container parser can talk to the service. Configuration rides in query
parameters whose names mirror PipelineConfig fields. Domain errors map to
HTTP 400 with the exception class name in the payload, letting clients
rethrow by name.

Run directly with ``python -m wavelet_prep.service [--port N]`` or point
uvicorn at ``wavelet_prep.service:app``.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import __version__
from .container import TensorRecord, decode_container, encode_container
from .dwt import SUBBAND_ORDER, SubbandSet, forward_2d, inverse_2d
from .errors import ConfigError, CorruptContainer, WaveletPrepError
from .filters import filter_bank
from .image_io import buffer_from_array, decode_image
from .pipeline import (
    config_from_dict,
    preprocess_baseline,
    preprocess_image,
    to_records,
)

_OCTET = "application/octet-stream"


class HealthResponse(BaseModel):
    status: str
    name: str
    version: str


class FilterBankResponse(BaseModel):
    scaling_convention: str
    lowpass_taps: list[float]
    highpass_taps: list[float]
    lowpass_center_index: int
    highpass_center_index: int


class ErrorResponse(BaseModel):
    error: str
    detail: str


def _config(
    width: int,
    height: int,
    mode: str,
    levels: int,
    channel_mask: str,
    normalization: str,
    color_policy: str,
    scaling_convention: str,
):
    return config_from_dict(
        {
            "network_input_dims": (width, height),
            "mode": mode,
            "levels": levels,
            "channel_mask": channel_mask,
            "normalization": normalization,
            "color_policy": color_policy,
            "scaling_convention": scaling_convention,
        }
    )


def _image_from_body(body: bytes, bit_depth: str) -> tuple:
    records = decode_container(body)
    if len(records) != 1:
        raise ConfigError(f"expected exactly one input tensor, got {len(records)}")
    array = records[0].data
    if array.ndim not in (2, 3):
        raise ConfigError(f"input tensor must be 2D or 3D, got ndim={array.ndim}")
    return buffer_from_array(array, bit_depth if array.dtype.kind == "i" else None)


def _plane_from_body(body: bytes) -> np.ndarray:
    records = decode_container(body)
    if len(records) != 1:
        raise ConfigError(f"expected exactly one plane tensor, got {len(records)}")
    plane = records[0].data
    if plane.ndim != 2:
        raise ConfigError(f"plane tensor must be 2D, got ndim={plane.ndim}")
    return plane


def create_app() -> FastAPI:
    app = FastAPI(title="wavelet-prep", version=__version__)

    @app.exception_handler(WaveletPrepError)
    async def domain_error(request: Request, exc: WaveletPrepError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"error": type(exc).__name__, "detail": str(exc)})

    @app.exception_handler(OverflowError)
    async def overflow_error(request: Request, exc: OverflowError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"error": "OverflowError", "detail": str(exc)})

    @app.exception_handler(ValueError)
    async def value_error(request: Request, exc: ValueError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"error": "ValueError", "detail": str(exc)})

    @app.get("/health", response_model=HealthResponse)
    async def health() -> HealthResponse:
        return HealthResponse(status="ok", name="wavelet-prep", version=__version__)

    @app.get("/v1/filters", response_model=FilterBankResponse,
             responses={400: {"model": ErrorResponse}})
    async def filters(scaling_convention: str = "paper") -> FilterBankResponse:
        try:
            bank = filter_bank(scaling_convention)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return FilterBankResponse(
            scaling_convention=bank.scaling_convention,
            lowpass_taps=list(bank.lowpass_taps),
            highpass_taps=list(bank.highpass_taps),
            lowpass_center_index=bank.lowpass_center_index,
            highpass_center_index=bank.highpass_center_index,
        )

    def _preprocess_response(tensors) -> Response:
        return Response(content=encode_container(to_records(tensors)), media_type=_OCTET)

    @app.post("/v1/preprocess", responses={400: {"model": ErrorResponse}})
    async def preprocess_array(
        request: Request,
        width: int,
        height: int,
        mode: str = "reversible",
        levels: int = 1,
        channel_mask: str = "LL,HL,LH,HH",
        normalization: str = "raw",
        color_policy: str = "grayscale_single_plane",
        scaling_convention: str = "paper",
        bit_depth: str = "8",
        baseline: bool = False,
    ) -> Response:
        config = _config(width, height, mode, levels, channel_mask,
                         normalization, color_policy, scaling_convention)
        image = _image_from_body(await request.body(), bit_depth)
        run = preprocess_baseline if baseline else preprocess_image
        return _preprocess_response(run(image, config, source="array"))

    @app.post("/v1/preprocess/image", responses={400: {"model": ErrorResponse}})
    async def preprocess_image_file(
        request: Request,
        width: int,
        height: int,
        mode: str = "reversible",
        levels: int = 1,
        channel_mask: str = "LL,HL,LH,HH",
        normalization: str = "raw",
        color_policy: str = "grayscale_single_plane",
        scaling_convention: str = "paper",
        baseline: bool = False,
    ) -> Response:
        config = _config(width, height, mode, levels, channel_mask,
                         normalization, color_policy, scaling_convention)
        image = decode_image(await request.body())
        run = preprocess_baseline if baseline else preprocess_image
        return _preprocess_response(run(image, config, source="upload"))

    @app.post("/v1/forward2d", responses={400: {"model": ErrorResponse}})
    async def forward2d_endpoint(
        request: Request,
        mode: str = "reversible",
        scaling_convention: str = "paper",
    ) -> Response:
        plane = _plane_from_body(await request.body())
        subbands = forward_2d(plane, mode=mode, bank=filter_bank(scaling_convention))
        records = [
            TensorRecord(
                subbands.planes[name].astype(np.int32 if mode == "reversible" else np.float32),
                {"subband": name, "mode": mode, "convention": scaling_convention},
            )
            for name in SUBBAND_ORDER
        ]
        return Response(content=encode_container(records), media_type=_OCTET)

    @app.post("/v1/inverse2d", responses={400: {"model": ErrorResponse}})
    async def inverse2d_endpoint(
        request: Request,
        mode: str = "reversible",
        scaling_convention: str = "paper",
    ) -> Response:
        records = decode_container(await request.body())
        if len(records) != 4:
            raise ConfigError(f"expected four subband tensors, got {len(records)}")
        by_name = {r.metadata.get("subband", ""): r.data for r in records}
        if set(by_name) == set(SUBBAND_ORDER):
            planes = [by_name[name] for name in SUBBAND_ORDER]
        else:
            planes = [r.data for r in records]  # positional LL, HL, LH, HH
        subbands = SubbandSet(*planes)
        plane = inverse_2d(subbands, mode=mode, bank=filter_bank(scaling_convention))
        out = plane.astype(np.int32) if mode == "reversible" else plane.astype(np.float32)
        record = TensorRecord(out, {"mode": mode, "convention": scaling_convention})
        return Response(content=encode_container([record]), media_type=_OCTET)

    return app


app = create_app()


if __name__ == "__main__":
    import argparse

    import uvicorn

    cli = argparse.ArgumentParser(description="Run the wavelet-prep HTTP service")
    cli.add_argument("--host", default="127.0.0.1")
    cli.add_argument("--port", type=int, default=8000)
    opts = cli.parse_args()
    uvicorn.run(app, host=opts.host, port=opts.port, log_level="warning")
