import numpy as np
import pytest

import oracles
from wavelet_prep.dwt import lift_forward_1d, lift_inverse_1d
from wavelet_prep.errors import DegenerateSignal, LengthMismatch, OddLengthError


def test_constant():
    s, d = lift_forward_1d(np.array([7, 7, 7, 7]))
    assert np.array_equal(s, [7, 7])
    assert np.array_equal(d, [0, 0])


def test_ramp_matches_literal_oracle():
    ramp = np.arange(6)
    s, d = lift_forward_1d(ramp)
    # frozen from the literal two-step lifting oracle
    assert np.array_equal(s, [0, 2, 4])
    assert np.array_equal(d, [0, 0, 1])
    oracle_s, oracle_d = oracles.lift_forward_direct(ramp)
    assert np.array_equal(s, oracle_s)
    assert np.array_equal(d, oracle_d)


def test_ramp_inverse():
    assert np.array_equal(lift_inverse_1d(np.array([0, 2, 4]), np.array([0, 0, 1])), np.arange(6))


def test_constant_inverse():
    assert np.array_equal(lift_inverse_1d(np.array([7, 7]), np.array([0, 0])), [7, 7, 7, 7])


def test_random_signals_match_oracle(rng):
    for _ in range(50):
        n = 2 * int(rng.integers(1, 40))
        x = rng.integers(-512, 512, size=n)
        s, d = lift_forward_1d(x)
        oracle_s, oracle_d = oracles.lift_forward_direct(x)
        assert np.array_equal(s, oracle_s)
        assert np.array_equal(d, oracle_d)
        assert np.array_equal(lift_inverse_1d(s, d), oracles.lift_inverse_direct(s, d))


def test_roundtrip_1000_random_8bit_signals(rng):
    for _ in range(1000):
        n = 2 * int(rng.integers(1, 257))  # even lengths in [2, 512]
        x = rng.integers(0, 256, size=n)
        s, d = lift_forward_1d(x)
        assert np.array_equal(lift_inverse_1d(s, d), x)


def test_roundtrip_16bit_signals(rng):
    for _ in range(200):
        n = 2 * int(rng.integers(1, 129))
        x = rng.integers(0, 65536, size=n)
        s, d = lift_forward_1d(x)
        assert np.array_equal(lift_inverse_1d(s, d), x)


def test_negative_samples_roundtrip(rng):
    x = rng.integers(-(2**20), 2**20, size=128)
    s, d = lift_forward_1d(x)
    assert np.array_equal(lift_inverse_1d(s, d), x)


def test_odd_length_rejected():
    with pytest.raises(OddLengthError):
        lift_forward_1d(np.array([1, 2, 3]))


def test_short_signal_rejected():
    with pytest.raises(DegenerateSignal):
        lift_forward_1d(np.array([1]))


def test_float_input_rejected():
    with pytest.raises(TypeError):
        lift_forward_1d(np.array([1.0, 2.0]))


def test_inverse_length_mismatch():
    with pytest.raises(LengthMismatch):
        lift_inverse_1d(np.array([1, 2]), np.array([0]))


def test_working_range_guard():
    with pytest.raises(OverflowError):
        lift_forward_1d(np.array([0, 1 << 41]))
