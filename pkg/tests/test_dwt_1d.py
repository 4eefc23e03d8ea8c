import numpy as np
import pytest

import oracles
from wavelet_prep.dwt import analyze_1d, synthesize_1d
from wavelet_prep.errors import DegenerateSignal, LengthMismatch, OddLengthError
from wavelet_prep.filters import JPEG2000_BANK, PAPER_BANK


def test_constant_signal():
    low, high = analyze_1d([5, 5, 5, 5, 5, 5])
    assert np.array_equal(low, [5, 5, 5])
    assert np.array_equal(high, [0, 0, 0])


def test_unit_impulse_matches_direct_convolution_oracle():
    signal = [0, 0, 1, 0, 0, 0]
    low, high = analyze_1d(signal)
    # frozen from the materialized-extension oracle
    assert np.array_equal(low, [-0.25, 0.75, -0.125])
    assert np.array_equal(high, [-0.25, -0.25, 0.0])
    oracle_low, oracle_high = oracles.analyze_1d_direct(signal)
    assert np.array_equal(low, oracle_low)
    assert np.array_equal(high, oracle_high)


@pytest.mark.parametrize("n", [2, 4, 6, 16, 64, 254])
def test_random_signals_match_oracle(rng, n):
    for bank, taps in ((PAPER_BANK, oracles.HIGHPASS_HALVED), (JPEG2000_BANK, oracles.HIGHPASS_DOUBLED)):
        x = rng.random(n)
        low, high = analyze_1d(x, bank)
        oracle_low, oracle_high = oracles.analyze_1d_direct(x, taps)
        assert np.abs(low - oracle_low).max() < 1e-12
        assert np.abs(high - oracle_high).max() < 1e-12


def test_odd_length_rejected():
    with pytest.raises(OddLengthError):
        analyze_1d([1.0, 2.0, 3.0])


def test_too_short_rejected():
    with pytest.raises(DegenerateSignal):
        analyze_1d([1.0])


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        analyze_1d([1.0, np.nan, 0.0, 0.0])


def test_unsupported_extension_rejected():
    with pytest.raises(ValueError):
        analyze_1d([1.0, 2.0], extension="periodic")


def test_constant_roundtrip():
    out = synthesize_1d([5, 5, 5], [0, 0, 0])
    assert np.array_equal(out, [5, 5, 5, 5, 5, 5])


def test_impulse_roundtrip():
    signal = np.array([0.0, 0.0, 1.0, 0.0, 0.0, 0.0])
    out = synthesize_1d(*analyze_1d(signal))
    assert np.abs(out - signal).max() < 1e-12


def test_random_roundtrip_256(rng):
    x = rng.random(256)
    for bank in (PAPER_BANK, JPEG2000_BANK):
        out = synthesize_1d(*analyze_1d(x, bank), bank)
        assert np.abs(out - x).max() < 1e-10


@pytest.mark.parametrize("n", [2, 4, 10, 62, 100])
def test_roundtrip_many_lengths(rng, n):
    x = rng.random(n) * 255
    out = synthesize_1d(*analyze_1d(x))
    assert np.abs(out - x).max() < 1e-10


def test_synthesize_length_mismatch():
    with pytest.raises(LengthMismatch):
        synthesize_1d([1.0, 2.0], [0.0])


def test_synthesize_empty_bands():
    with pytest.raises(DegenerateSignal):
        synthesize_1d([], [])


def test_minimal_band_roundtrip():
    x = np.array([3.0, 9.0])
    out = synthesize_1d(*analyze_1d(x))
    assert np.abs(out - x).max() < 1e-12
