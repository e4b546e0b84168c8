import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from schrolet.group import GroupElement, mult
from schrolet.harmonics import AngularLabel, labels_2d, labels_3d
from schrolet.radial import make_log_grid
from schrolet.rep import (CartesianSignal, OffGridError, ResolutionError, SequenceSignal, check_resolution,
                          disintegration_check, from_sequence, j_inverse_roundtrip, pi_hat_apply,
                          pi_prime_apply, propagate, roundtrip_error, to_sequence)
from schrolet.rotation import Rotation, random_rotation


def radial_bump(r2):
    # compactly supported in log(omega): |log2 omega| < 2
    t = np.log2(np.maximum(r2, 1e-300)) / 2
    return np.where(np.abs(t) < 1, (1 - t * t) ** 8, 0.0)


def ring(pts):
    r2 = np.sum(pts ** 2, axis=-1)
    return radial_bump(r2) * (1 + pts[..., 0] + 1j * pts[..., 1] ** 2)


def ring3(pts):
    r2 = np.sum(pts ** 2, axis=-1)
    x, y, z = pts[..., 0], pts[..., 1], pts[..., 2]
    return radial_bump(r2) * (1 + x * z + 1j * y ** 3 - 0.5j * z)


def pi_hat_exact(x, fn, d):
    def out(pts):
        src = np.sqrt(x.a) * (pts @ x.R.matrix)
        return x.a ** (d / 4) * np.exp(-2j * np.pi * x.b * np.sum(pts ** 2, -1)) * fn(src)
    return out


@settings(max_examples=20, deadline=None)
@given(b1=st.floats(-3, 3), b2=st.floats(-3, 3))
def test_propagator_group_law_and_unitarity(b1, b2):
    f = CartesianSignal.from_callable(2, 32, 3.0, ring)
    two = propagate(propagate(f, b1), b2)
    one = propagate(f, b1 + b2)
    assert np.max(np.abs(two.values - one.values)) < 1e-13
    assert propagate(f, b1).norm_sq() == pytest.approx(f.norm_sq(), rel=1e-13)


def test_pi_hat_rotation_covariance_on_grid():
    f = CartesianSignal.from_callable(2, 128, 3.0, ring)
    x = GroupElement(0.2, 1.0, Rotation.from_angle(0.7))
    got = pi_hat_apply(x, f)
    exact = CartesianSignal.from_callable(2, 128, 3.0, pi_hat_exact(x, ring, 2))
    assert np.max(np.abs(got.values - exact.values)) < 1e-4


def test_pi_hat_detects_support_leaving_window():
    f = CartesianSignal.from_callable(2, 64, 1.5, ring)
    with pytest.raises(OffGridError):
        pi_hat_apply(GroupElement(0.0, 0.25, Rotation.identity(2)), f)


@pytest.mark.parametrize("d,fn,labels", [(2, ring, labels_2d(-3, 3)), (3, ring3, labels_3d(3))])
def test_adapter_intertwines_exactly_with_evaluators(d, fn, labels):
    grid = make_log_grid(-6, 5, 4, 8)
    rng = np.random.default_rng(5)
    x = GroupElement(0.37, 2 ** 0.75, random_rotation(d, rng))
    lhs = to_sequence(None, labels, grid, evaluator=pi_hat_exact(x, fn, d))
    res = pi_prime_apply(x, to_sequence(None, labels, grid, evaluator=fn))
    assert res.dropped_mass == 0.0
    assert (lhs - res.signal).norm() < 1e-12 * lhs.norm()


def test_adapter_is_isometric():
    grid = make_log_grid(-8, 5, 4, 16)
    seq = to_sequence(None, labels_2d(-3, 3), grid, evaluator=ring)
    ref = CartesianSignal.from_callable(2, 512, 4.0, ring)
    assert seq.norm_sq() == pytest.approx(ref.norm_sq(), rel=1e-8)


def test_adapter_round_trip_on_samples():
    f = CartesianSignal.from_callable(2, 128, 2.5, ring)
    assert roundtrip_error(f, labels_2d(-4, 4), make_log_grid(-10, 3, 8, 8)) < 1e-4


def test_resolution_guard():
    f = CartesianSignal.from_callable(2, 16, 2.5, ring)
    with pytest.raises(ResolutionError):
        check_resolution(f, labels_2d(-6, 6))
    assert check_resolution(f, labels_2d(0, 0)) == float("inf")


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2 ** 31), d=st.sampled_from([2, 3]))
def test_pi_prime_is_a_representation(seed, d):
    rng = np.random.default_rng(seed)
    grid = make_log_grid(-8, 8, 4, 4)
    labels = labels_2d(-2, 2) if d == 2 else labels_3d(2)
    f = to_sequence(None, labels, grid, evaluator=ring if d == 2 else ring3)
    x = GroupElement(rng.normal(), 2 ** (rng.integers(-4, 5) / 4), random_rotation(d, rng))
    y = GroupElement(rng.normal(), 2 ** (rng.integers(-4, 5) / 4), random_rotation(d, rng))
    lhs = pi_prime_apply(x, pi_prime_apply(y, f).signal).signal
    rhs = pi_prime_apply(mult(x, y), f).signal
    assert (lhs - rhs).norm() < 1e-11 * f.norm()
    assert pi_prime_apply(x, f).signal.norm() == pytest.approx(f.norm(), rel=1e-11)


def test_pi_prime_rejects_off_lattice_dilations():
    grid = make_log_grid(-2, 0, 4, 2)
    f = SequenceSignal.zeros(2, grid, labels_2d(0, 0))
    with pytest.raises(ValueError):
        pi_prime_apply(GroupElement(0.0, 1.1, Rotation.identity(2)), f)


def test_sequence_algebra():
    grid = make_log_grid(-2, 0, 2, 2)
    f = to_sequence(None, labels_2d(-1, 1), grid, evaluator=ring)
    assert (f + f).norm_sq() == pytest.approx(4 * f.norm_sq())
    assert (f - f).norm_sq() == 0
    assert f.inner(2j * f) == pytest.approx(-2j * f.norm_sq())
    assert f.project(labels_2d(0, 0)).labels == [AngularLabel(2, 0)]
    with pytest.raises(ValueError):
        SequenceSignal(2, grid, {AngularLabel(2, 0): np.zeros((1, 3))})


@pytest.mark.parametrize("d", [2, 3])
def test_disintegration(d):
    bump = lambda p: np.maximum(0.0, 1 - np.sum(p ** 2, -1)) ** 6 * (1 + p[..., 0] ** 2)
    lhs, rhs = disintegration_check(bump, d, 1.0)
    assert lhs == pytest.approx(rhs, rel=1e-9)


def test_j_inverse_exponent():
    assert j_inverse_roundtrip(3, 0.25) < 1e-14
    assert j_inverse_roundtrip(2, 0.0) < 1e-14
    assert j_inverse_roundtrip(3, 1.0) > 1.0


def test_from_sequence_zero_outside_grid_band():
    grid = make_log_grid(-1, 0, 2, 4)
    g = to_sequence(None, labels_2d(0, 0), grid, evaluator=lambda p: np.ones(p.shape[:-1]))
    f = from_sequence(g, 32, 2.0)
    r2 = np.sum(f.coords() ** 2, -1)
    assert np.all(f.values[(r2 < 0.49) | (r2 > 1.01)] == 0)
