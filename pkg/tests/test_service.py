import numpy as np
import pytest
from fastapi.testclient import TestClient

from wavelet_prep.container import TensorRecord, decode_container, encode_container
from wavelet_prep.image_io import buffer_from_array, encode_pgm
from wavelet_prep.pipeline import PipelineConfig, preprocess_image, to_records
from wavelet_prep.service import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def tensor_body(array: np.ndarray) -> bytes:
    return encode_container([TensorRecord(array)])


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    payload = response.json()
    assert payload["status"] == "ok"
    assert payload["name"] == "wavelet-prep"


def test_filters_paper_convention(client):
    payload = client.get("/v1/filters").json()
    assert payload["highpass_taps"] == [-0.25, 0.5, -0.25]
    assert payload["lowpass_taps"] == [-0.125, 0.25, 0.75, 0.25, -0.125]


def test_filters_jpeg2000_convention(client):
    payload = client.get("/v1/filters", params={"scaling_convention": "jpeg2000"}).json()
    assert payload["highpass_taps"] == [-0.5, 1.0, -0.5]


def test_filters_unknown_convention(client):
    response = client.get("/v1/filters", params={"scaling_convention": "haar"})
    assert response.status_code == 400
    assert response.json()["error"] == "ConfigError"


def test_preprocess_matches_direct_pipeline(client, rng):
    array = rng.integers(0, 256, size=(52, 44)).astype(np.int32)
    response = client.post("/v1/preprocess", params={"width": 16, "height": 16},
                           content=tensor_body(array))
    assert response.status_code == 200
    served = decode_container(response.content)
    direct = to_records(preprocess_image(
        buffer_from_array(array, "8"),
        PipelineConfig(network_input_dims=(16, 16)),
        source="array",
    ))
    assert len(served) == len(direct) == 1
    assert served[0].data.dtype == np.int32
    assert np.array_equal(served[0].data, direct[0].data)
    assert served[0].metadata == direct[0].metadata


def test_preprocess_float_mode(client, rng):
    array = rng.integers(0, 256, size=(52, 44)).astype(np.int32)
    response = client.post("/v1/preprocess",
                           params={"width": 16, "height": 16, "mode": "float"},
                           content=tensor_body(array))
    record = decode_container(response.content)[0]
    assert record.data.dtype == np.float32
    assert record.data.shape == (4, 16, 16)


def test_preprocess_baseline_flag(client, rng):
    array = rng.integers(0, 256, size=(52, 44)).astype(np.int32)
    response = client.post("/v1/preprocess",
                           params={"width": 16, "height": 16, "baseline": "true"},
                           content=tensor_body(array))
    record = decode_container(response.content)[0]
    assert record.data.shape == (1, 16, 16)
    assert record.metadata["kind"] == "baseline"


def test_preprocess_image_file_endpoint(client, rng):
    image = buffer_from_array(rng.integers(0, 256, size=(40, 40)), "8")
    response = client.post("/v1/preprocess/image", params={"width": 16, "height": 16},
                           content=encode_pgm(image))
    assert response.status_code == 200
    record = decode_container(response.content)[0]
    assert record.data.shape == (4, 16, 16)
    direct = to_records(preprocess_image(
        image, PipelineConfig(network_input_dims=(16, 16)), source="upload"))
    assert np.array_equal(record.data, direct[0].data)


def test_preprocess_rgb_fanout(client, rng):
    array = rng.integers(0, 256, size=(3, 40, 40)).astype(np.int32)
    response = client.post(
        "/v1/preprocess",
        params={"width": 16, "height": 16, "color_policy": "per_channel_fanout"},
        content=tensor_body(array),
    )
    assert decode_container(response.content)[0].data.shape == (12, 16, 16)


def test_forward_inverse_wire_roundtrip(client, rng):
    plane = rng.integers(0, 65536, size=(48, 32)).astype(np.int32)
    forward = client.post("/v1/forward2d", params={"mode": "reversible"},
                          content=tensor_body(plane))
    assert forward.status_code == 200
    subbands = decode_container(forward.content)
    assert [r.metadata["subband"] for r in subbands] == ["LL", "HL", "LH", "HH"]
    assert all(r.data.shape == (24, 16) for r in subbands)
    inverse = client.post("/v1/inverse2d", params={"mode": "reversible"},
                          content=forward.content)
    assert inverse.status_code == 200
    recovered = decode_container(inverse.content)[0].data
    assert np.array_equal(recovered, plane)


def test_error_names_cross_the_boundary(client, rng):
    array = rng.integers(0, 256, size=(52, 44)).astype(np.int32)
    body = tensor_body(array)

    response = client.post("/v1/preprocess", params={"width": 0, "height": 16}, content=body)
    assert (response.status_code, response.json()["error"]) == (400, "ConfigError")

    odd = tensor_body(rng.integers(0, 9, size=(7, 8)).astype(np.int32))
    response = client.post("/v1/forward2d", params={"mode": "reversible"}, content=odd)
    assert (response.status_code, response.json()["error"]) == (400, "OddDimensionError")

    response = client.post("/v1/forward2d", content=body[:11])
    assert (response.status_code, response.json()["error"]) == (400, "CorruptContainer")

    response = client.post("/v1/preprocess", params={"width": 16, "height": 16},
                           content=encode_container([]))
    assert (response.status_code, response.json()["error"]) == (400, "ConfigError")

    stale = bytearray(body)
    stale[4] = 9  # unsupported container version
    response = client.post("/v1/preprocess", params={"width": 16, "height": 16},
                           content=bytes(stale))
    assert (response.status_code, response.json()["error"]) == (400, "VersionMismatch")


def test_inverse_requires_four_subbands(client, rng):
    plane = rng.integers(0, 9, size=(8, 8)).astype(np.int32)
    response = client.post("/v1/inverse2d", content=tensor_body(plane))
    assert (response.status_code, response.json()["error"]) == (400, "ConfigError")
