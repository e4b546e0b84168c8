from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from schrolet.profiles import (SampledProfile, ShannonProfile, exp2_of, normalize, overlap_measure,
                               shift_intervals)
from schrolet.radial import RadialFunction, make_log_grid
from schrolet.oracle import dyadic_sum_at


@given(st.integers(-40, 40), st.sampled_from([1, 2, 3, 4, 8]))
def test_exp2_of_recovers_rational_exponents(p, q):
    assert exp2_of(2.0 ** (p / q)) == Fraction(p, q)


@pytest.mark.parametrize("bad", [0.0, -1.0, float("nan"), 3.0])
def test_exp2_of_rejects(bad):
    with pytest.raises(ValueError):
        exp2_of(bad)


def test_overlap_is_exact_on_touching_intervals():
    a = [(Fraction(-1), Fraction(0))]
    assert overlap_measure(a, shift_intervals(a, Fraction(1))) == 0.0
    assert overlap_measure(a, shift_intervals(a, Fraction(1, 2))) == pytest.approx(1 - 2 ** -0.5)


def test_shannon_profile_half_open():
    p = ShannonProfile(0.5)
    assert p(np.array([0.4999, 0.5, 0.75, 1.0])).tolist() == [0, 0.5, 0.5, 0]
    assert p.dyadic_sum_sq() == 0.25 and p.log_norm_sq() == pytest.approx(0.25 * np.log(2))


@given(st.floats(1e-6, 1e6))
def test_shannon_dyadic_sum_matches_brute_force(omega):
    p = ShannonProfile(0.5)
    assert dyadic_sum_at(p, omega) == pytest.approx(p.dyadic_sum_sq(), abs=1e-15)


def test_normalize_hits_one_over_L():
    for L in (1, 2, 4, 7):
        assert normalize(ShannonProfile(3.0), L).dyadic_sum_sq() == pytest.approx(1 / L)


def test_values_on_grid_is_the_dilated_indicator():
    g = make_log_grid(-4, 2, 4, 3)
    v = ShannonProfile(1.0).values_on(g, Fraction(-2))
    expected = ShannonProfile(1.0)(g.points * 4)
    assert np.array_equal(v, expected)


def test_sampled_profile_reads_support_and_matches_shannon():
    g = make_log_grid(-3, 1, 4, 8)
    f = RadialFunction.from_callable(g, lambda w: ((w >= 0.5) & (w < 1)).astype(float))
    sp = SampledProfile(f)
    assert sp.support == [(Fraction(-1), Fraction(0))]
    assert sp.log_norm_sq() == pytest.approx(np.log(2), rel=1e-13)
    assert sp.dyadic_sum_sq() == pytest.approx(1.0, rel=1e-13)
    assert np.allclose(sp.values_on(g, Fraction(1, 2)), ShannonProfile(1.0).values_on(g, Fraction(1, 2)))
    assert normalize(sp, 4).dyadic_sum_sq() == pytest.approx(0.25, rel=1e-13)
    with pytest.raises(ValueError):
        normalize(sp.scaled(0.0), 2)
