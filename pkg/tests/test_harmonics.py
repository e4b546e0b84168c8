import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from schrolet.harmonics import (AngularLabel, dim_h, labels_2d, labels_3d, rho_matrix, sph_basis_eval,
                                sphere_quadrature, wigner_small_d)
from schrolet.rotation import Rotation, random_rotation

angles = st.floats(-np.pi, np.pi)


@pytest.mark.parametrize("d,i,expected", [(2, 0, 1), (2, 5, 2), (3, 4, 9), (4, 3, 16), (5, 2, 14)])
def test_dim_h_frozen(d, i, expected):
    assert dim_h(d, i) == expected


def test_label_validation():
    with pytest.raises(ValueError):
        AngularLabel(3, -1)
    with pytest.raises(ValueError):
        AngularLabel(4, 0)
    assert AngularLabel(3, 2).dim == 5 and list(AngularLabel(3, 1).ms) == [-1, 0, 1]
    assert [l.index for l in labels_2d(-1, 1)] == [-1, 0, 1] and len(labels_3d(3)) == 4


def test_wigner_d_degree_one_closed_form():
    b = 0.7
    d = wigner_small_d(1, b)
    expected = np.array([[(1 + np.cos(b)) / 2, np.sin(b) / np.sqrt(2), (1 - np.cos(b)) / 2],
                         [-np.sin(b) / np.sqrt(2), np.cos(b), np.sin(b) / np.sqrt(2)],
                         [(1 - np.cos(b)) / 2, -np.sin(b) / np.sqrt(2), (1 + np.cos(b)) / 2]])
    assert np.allclose(d, expected, atol=1e-15)


@settings(max_examples=20, deadline=None)
@given(i=st.integers(0, 6), seed=st.integers(0, 2 ** 31))
def test_rho_is_unitary_homomorphism(i, seed):
    rng = np.random.default_rng(seed)
    lab = AngularLabel(3, i)
    R1, R2 = random_rotation(3, rng), random_rotation(3, rng)
    D1, D2 = rho_matrix(lab, R1), rho_matrix(lab, R2)
    assert np.allclose(D1.conj().T @ D1, np.eye(lab.dim), atol=1e-12)
    assert np.allclose(rho_matrix(lab, R1 @ R2), D1 @ D2, atol=1e-11)


@settings(max_examples=20, deadline=None)
@given(i=st.integers(0, 5), seed=st.integers(0, 2 ** 31))
def test_rho_acts_on_coordinates(i, seed):
    rng = np.random.default_rng(seed)
    lab = AngularLabel(3, i)
    R = random_rotation(3, rng)
    pts = rng.normal(size=(7, 3))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    Y = np.stack([sph_basis_eval(lab, m, pts) for m in lab.ms], axis=-1)
    Yr = np.stack([sph_basis_eval(lab, m, R.inv().apply(pts)) for m in lab.ms], axis=-1)
    assert np.allclose(Yr, Y @ rho_matrix(lab, R), atol=1e-11)


@given(n=st.integers(-8, 8), phi=angles, theta=angles)
def test_planar_rho(n, phi, theta):
    lab = AngularLabel(2, n)
    R = Rotation.from_angle(phi)
    lhs = sph_basis_eval(lab, 0, theta - phi)
    assert lhs == pytest.approx(sph_basis_eval(lab, 0, theta) * rho_matrix(lab, R)[0, 0], abs=1e-13)


def test_sphere_quadrature_orthonormality():
    pts, w = sphere_quadrature(8)
    assert w.sum() == pytest.approx(4 * np.pi, rel=1e-14)
    basis = np.stack([sph_basis_eval(AngularLabel(3, i), m, pts) for i in range(4) for m in range(-i, i + 1)], 1)
    gram = basis.conj().T @ (w[:, None] * basis)
    assert np.allclose(gram, np.eye(16), atol=1e-13)


def test_basis_eval_range_checks():
    with pytest.raises(ValueError):
        sph_basis_eval(AngularLabel(2, 1), 1, 0.0)
    with pytest.raises(ValueError):
        sph_basis_eval(AngularLabel(3, 1), 2, np.array([0, 0, 1.0]))
    with pytest.raises(ValueError):
        rho_matrix(AngularLabel(3, 1), Rotation.from_angle(0.1))
