import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from schrolet.group import (GroupElement, IrrepTableError, inverse, isotypic, make_finite_subgroup, mult,
                            multiplicities, rho_on_subgroup, schur_check, section, trivial_subgroup, w_vector)
from schrolet.harmonics import AngularLabel, rho_matrix
from schrolet.rotation import Rotation, random_rotation

SUBGROUPS = [("cyclic-2D", 1), ("cyclic-2D", 4), ("cyclic-2D", 5), ("cyclic-3D-z", 2), ("cyclic-3D-z", 3),
             ("dihedral-3D", 2), ("dihedral-3D", 3), ("dihedral-3D", 4)]


def _element(d, rng):
    return GroupElement(rng.normal(), float(np.exp(rng.normal())), random_rotation(d, rng))


@settings(max_examples=25)
@given(seed=st.integers(0, 2 ** 31), d=st.sampled_from([2, 3]))
def test_group_axioms(seed, d):
    rng = np.random.default_rng(seed)
    x, y, z = (_element(d, rng) for _ in range(3))
    assert mult(mult(x, y), z).close_to(mult(x, mult(y, z)), 1e-9)
    assert mult(x, inverse(x)).close_to(GroupElement.identity(d), 1e-12)
    assert mult(GroupElement.identity(d), x).close_to(x, 0)


def test_product_formula():
    R = Rotation.from_angle(0.5)
    x = GroupElement(1.0, 2.0, R)
    y = GroupElement(3.0, 0.5, R)
    p = mult(x, y)
    assert (p.b, p.a) == (7.0, 1.0) and p.R.close_to(Rotation.from_angle(1.0))


def test_section_is_inverse_frequency():
    assert section(4.0) == 0.25
    with pytest.raises(ValueError):
        section(0.0)


@pytest.mark.parametrize("kind,param", SUBGROUPS)
def test_subgroup_closed_and_irreps_orthonormal(kind, param):
    F = make_finite_subgroup(kind, param)
    table = F.multiplication_table()
    assert all(sorted(row) == list(range(F.order)) for row in table)
    chars = np.array([c.character() for c in F.irreps])
    assert np.allclose(chars.conj() @ chars.T / F.order, np.eye(len(F.irreps)), atol=1e-12)
    assert sum(c.dim ** 2 for c in F.irreps) == F.order
    for c in F.irreps:  # homomorphism
        for i in range(F.order):
            for j in range(F.order):
                assert np.allclose(c.matrices[table[i, j]], c.matrices[i] @ c.matrices[j], atol=1e-12)


def test_character_table_frozen_d3():
    t = make_finite_subgroup("dihedral-3D", 3).character_table()
    assert t["order"] == 6 and sorted(t["class_sizes"]) == [1, 2, 3]
    assert [round(x[0]) for x in t["characters"]["E1"]] == [2, -1, 0]


@pytest.mark.parametrize("kind,param,i,expected", [
    ("cyclic-3D-z", 2, 2, {"chi0": 3, "chi1": 2}),
    ("dihedral-3D", 3, 1, {"A1": 0, "A2": 1, "E1": 1}),
    ("dihedral-3D", 3, 2, {"A1": 1, "A2": 0, "E1": 2}),
    ("cyclic-2D", 4, -3, {"chi0": 0, "chi1": 1, "chi2": 0, "chi3": 0}),
])
def test_multiplicities_frozen(kind, param, i, expected):
    d = 2 if kind == "cyclic-2D" else 3
    assert multiplicities(make_finite_subgroup(kind, param), AngularLabel(d, i)) == expected


@pytest.mark.parametrize("kind,param", SUBGROUPS[3:])
@pytest.mark.parametrize("i", range(6))
def test_isotypic_blocks_intertwine(kind, param, i):
    F = make_finite_subgroup(kind, param)
    lab = AngularLabel(3, i)
    iso = isotypic(F, lab)
    rhos = rho_on_subgroup(F, lab)
    U = np.concatenate([b.basis for b in iso.blocks], axis=1)
    assert U.shape == (lab.dim, lab.dim)
    assert np.allclose(U.conj().T @ U, np.eye(lab.dim), atol=1e-10)
    for b in iso.blocks:
        chi = F.irreps[F.irrep_index(b.chi)]
        for r, cm in zip(rhos, chi.matrices):
            assert np.allclose(r @ b.basis, b.basis @ cm, atol=1e-10)


def test_trivial_subgroup_and_errors():
    assert trivial_subgroup(3).order == 1
    with pytest.raises(ValueError):
        make_finite_subgroup("icosahedral", 1)
    with pytest.raises(ValueError):
        make_finite_subgroup("dihedral-3D", 1)
    F = make_finite_subgroup("cyclic-2D", 3)
    with pytest.raises(KeyError):
        F.irrep_index("E1")


def test_broken_irrep_table_is_detected():
    F = make_finite_subgroup("cyclic-2D", 4)
    F2 = type(F)(F.kind, F.param, F.elements, F.irreps[:3])
    with pytest.raises(IrrepTableError):
        multiplicities(F2, AngularLabel(2, 3))


def test_w_vector_norm():
    assert np.vdot(w_vector(2, 2), w_vector(2, 2)).real == pytest.approx(2.0)
    assert np.vdot(w_vector(2, 1), w_vector(2, 2)) == 0


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2 ** 31))
def test_schur_relations(seed):
    rng = np.random.default_rng(seed)
    F = make_finite_subgroup("dihedral-3D", 4)
    names = [c.name for c in F.irreps]
    a, b = rng.choice(names, 2)
    da, db = (F.irreps[F.irrep_index(n)].dim for n in (a, b))
    vec = lambda n: rng.normal(size=n) + 1j * rng.normal(size=n)
    w, u, wp, up = vec(da), vec(da), vec(db), vec(db)
    val = schur_check(F, a, b, w, wp, u, up)
    expected = np.vdot(u, up) * np.vdot(wp, w) / da if a == b else 0.0
    assert abs(val - expected) < 1e-12 * (1 + abs(expected))


def test_rho_restricted_to_cyclic_matches_characters():
    F = make_finite_subgroup("cyclic-2D", 4)
    for n in range(-5, 6):
        lab = AngularLabel(2, n)
        chi = F.irreps[n % 4]
        assert np.allclose([rho_matrix(lab, g)[0, 0] for g in F.elements], chi.character(), atol=1e-12)
