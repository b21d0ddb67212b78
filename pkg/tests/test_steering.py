import numpy as np
import pytest

from sparsenav.errors import ConfigError
from sparsenav.steering import SteeringParams, compute_turn

PARAMS = SteeringParams(alpha=1.0, v_test=0.2)


def test_symmetric_novelty_goes_straight():
    assert compute_turn(7.0, 7.0, PARAMS).omega == 0.0


def test_direct_arithmetic():
    assert compute_turn(3.0, 1.0, PARAMS).omega == pytest.approx(0.5)


def test_both_zero_goes_straight():
    assert compute_turn(0.0, 0.0, PARAMS).omega == 0.0


def test_command_carries_test_speed():
    assert compute_turn(1.0, 2.0, PARAMS).v == 0.2


def test_negative_novelty_rejected():
    with pytest.raises(ValueError):
        compute_turn(-1.0, 2.0, PARAMS)
    with pytest.raises(ValueError):
        compute_turn(1.0, -2.0, PARAMS)


def test_nonfinite_novelty_rejected():
    with pytest.raises(ValueError):
        compute_turn(float("nan"), 1.0, PARAMS)


def test_alpha_must_be_positive():
    with pytest.raises(ConfigError):
        SteeringParams(alpha=0.0)


def test_antisymmetry_boundedness_scale_invariance():
    rng = np.random.default_rng(17)
    params = SteeringParams(alpha=1.7, v_test=0.2)
    for _ in range(1000):
        a, b = rng.uniform(0, 1000, 2)
        fwd = compute_turn(a, b, params).omega
        assert fwd == -compute_turn(b, a, params).omega
        assert abs(fwd) <= params.alpha
        c = rng.uniform(0.01, 100)
        assert compute_turn(c * a, c * b, params).omega == pytest.approx(fwd, rel=1e-12)


def test_sign_follows_novelty_difference():
    assert compute_turn(5.0, 1.0, PARAMS).omega > 0
    assert compute_turn(1.0, 5.0, PARAMS).omega < 0
