import numpy as np
import pytest

from schrolet.admissible import build_generator_2d
from schrolet.group import make_finite_subgroup, multiplicities
from schrolet.harmonics import AngularLabel, dim_h
from schrolet.oracle import (brute_multiplicity, dyadic_sum_at, gram_parseval, harmonic_dimension,
                             shannon_band_frame)
from schrolet.radial import make_log_grid

SUBGROUPS_3D = [("cyclic-3D-z", 1), ("cyclic-3D-z", 2), ("cyclic-3D-z", 3), ("dihedral-3D", 2),
                ("dihedral-3D", 3), ("dihedral-3D", 4)]


def test_band_frame_is_parseval():
    vecs, w = shannon_band_frame(256)
    r = gram_parseval(vecs, w)
    assert r["dim"] == 256 and r["n_vectors"] == 512
    assert r["max_offdiag_residual"] < 1e-12 and r["operator_norm_residual"] < 1e-12


def test_removing_one_vector_breaks_parseval():
    vecs, w = shannon_band_frame(256)
    r = gram_parseval(vecs[1:], w)
    # the missing vector has squared norm 1/2 on the band [1/2, 1)
    assert r["operator_norm_residual"] == pytest.approx(0.5, abs=1e-10)
    assert r["max_offdiag_residual"] == pytest.approx(1 / 512, abs=1e-12)


def test_gram_on_sequence_signals():
    grid = make_log_grid(-1, 0, 1, 8)
    g = build_generator_2d(L=1, n_range=(0, 0))
    vecs = [g.frame_vector(grid, 0, k, 0) for k in range(-4, 4)]
    r = gram_parseval(vecs)
    arr = np.array([v.components[v.labels[0]][0] for v in vecs])
    assert r == gram_parseval(arr, grid.point_weights)
    assert r["dim"] == 8


def test_gram_limits_and_input_checks():
    with pytest.raises(ValueError):
        gram_parseval(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        gram_parseval(np.zeros((2001, 2)), np.ones(2))


@pytest.mark.parametrize("d,i", [(2, 0), (2, 3), (3, 0), (3, 4), (3, 6), (4, 3)])
def test_harmonic_dimension_matches_formula(d, i):
    assert harmonic_dimension(d, i) == dim_h(d, i)


@pytest.mark.parametrize("kind,param", SUBGROUPS_3D)
def test_brute_multiplicity_equals_character_route(kind, param):
    F = make_finite_subgroup(kind, param)
    for i in range(7):
        lab = AngularLabel(3, i)
        m = multiplicities(F, lab)
        assert brute_multiplicity(F, lab) == m
        assert sum(m[c.name] * c.dim for c in F.irreps) == 2 * i + 1


@pytest.mark.parametrize("L", [1, 2, 4, 5])
def test_brute_multiplicity_planar(L):
    F = make_finite_subgroup("cyclic-2D", L)
    for n in range(-4, 5):
        lab = AngularLabel(2, n)
        assert brute_multiplicity(F, lab) == multiplicities(F, lab)


def test_brute_multiplicity_range():
    with pytest.raises(ValueError):
        brute_multiplicity(make_finite_subgroup("cyclic-3D-z", 2), AngularLabel(3, 7))


def test_dyadic_sum_brute():
    from schrolet.profiles import ShannonProfile
    assert dyadic_sum_at(ShannonProfile(0.5), 3.7) == 0.25
    assert dyadic_sum_at(ShannonProfile(0.5), 0.0) == 0.0
