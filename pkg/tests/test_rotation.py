import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from schrolet.rotation import Rotation, random_rotation


@settings(max_examples=30)
@given(a=st.floats(-np.pi, np.pi), b=st.floats(0.01, np.pi - 0.01), g=st.floats(-np.pi, np.pi))
def test_euler_round_trip(a, b, g):
    R = Rotation.from_euler(a, b, g)
    assert Rotation.from_euler(*R.euler).close_to(R, 1e-12)


@pytest.mark.parametrize("b", [0.0, np.pi])
def test_euler_gimbal_lock(b):
    R = Rotation.from_euler(0.4, b, -1.1)
    assert Rotation.from_euler(*R.euler).close_to(R, 1e-12)


@given(st.integers(0, 2 ** 31))
def test_random_rotations_are_proper(seed):
    rng = np.random.default_rng(seed)
    for d in (2, 3):
        m = random_rotation(d, rng).matrix
        assert np.allclose(m @ m.T, np.eye(d), atol=1e-13)
        assert np.linalg.det(m) == pytest.approx(1.0, abs=1e-13)


def test_planar_angle_and_inverse():
    R = Rotation.from_angle(0.3)
    assert R.angle == pytest.approx(0.3)
    assert (R @ R.inv()).close_to(Rotation.identity(2))
    assert np.allclose(R.apply(np.array([1.0, 0.0])), [np.cos(0.3), np.sin(0.3)])


def test_validation():
    with pytest.raises(ValueError):
        Rotation(2, np.eye(3))
    with pytest.raises(ValueError):
        Rotation.from_angle(0.1) @ Rotation.identity(3)
    with pytest.raises(ValueError):
        Rotation.identity(3).angle
