import numpy as np
import pytest

from schrolet.admissible import build_generator_2d
from schrolet.continuous import (QuadSpec, WeilQuad, _voice_lines, poly_bump, reproducing_check, rotation_rule,
                                 voice, weil_constant, weil_test_functions, write_voice_csv)
from schrolet.frame import band_trig_signal
from schrolet.group import GroupElement
from schrolet.harmonics import AngularLabel, labels_2d, rho_matrix
from schrolet.radial import make_log_grid
from schrolet.rotation import Rotation

LN2 = np.log(2)


@pytest.mark.parametrize("d,n", [(2, 7), (3, 4)])
def test_rotation_rule_is_normalised_and_exact(d, n):
    rots, w = rotation_rule(d, n)
    assert w.sum() == pytest.approx(1.0, abs=1e-14)
    lab = AngularLabel(d, 1 if d == 3 else 2)
    # Haar average of a non-trivial irreducible matrix vanishes
    avg = sum(wi * rho_matrix(lab, R) for R, wi in zip(rots, w))
    assert np.abs(avg).max() < 1e-13


def test_voice_lines_match_pointwise_voice(rng):
    grid = make_log_grid(-3, -1, 16, 16)
    g = build_generator_2d(L=2, n_range=(-1, 1), constant=1 / np.sqrt(LN2))
    f = band_trig_signal(grid, g.labels, [-3, -2], rng)
    q = QuadSpec(4, 1.0, -1, 1, 2, 2)
    rots, _ = rotation_rule(2, 2)
    for a, r_idx, bs, vals in _voice_lines(f, g, q, rots):
        if vals is None:
            continue
        for idx in (0, 3, len(bs) - 1):
            x = GroupElement(bs[idx], a, rots[r_idx])
            if grid.shift_for(a) is not None:
                assert vals[idx] == pytest.approx(voice(f, g, x), abs=1e-12)


def _repro_setup(rng, c):
    grid = make_log_grid(-3, -1, 8, 16)
    g = build_generator_2d(L=1, n_range=(-1, 1), constant=c)
    f = band_trig_signal(grid, labels_2d(-1, 1), [-3, -2], rng)
    return f, g, QuadSpec(64, 1.0, -14, 18, 4, 4)


def test_reproducing_ratio_tracks_admissibility_constant(rng):
    f, g, q = _repro_setup(rng, 1 / np.sqrt(LN2))
    good = reproducing_check(f, g, q)
    assert good["window_resolved"]
    assert abs(good["ratio"] - 1) < 0.05
    bad = reproducing_check(f, g.scaled(np.sqrt(2)), q)
    assert bad["ratio"] == pytest.approx(2 * good["ratio"], rel=1e-12)


def test_voice_csv(tmp_path, rng):
    f, g, q = _repro_setup(rng, 1.0)
    q = QuadSpec(2, 1.0, 0, 1, 2, 2)
    write_voice_csv(tmp_path / "v.csv", f, g, q)
    lines = (tmp_path / "v.csv").read_text().splitlines()
    assert lines[0] == "b,a,phi,abs2" and len(lines) > 1


def test_quadspec_validation():
    with pytest.raises(ValueError):
        QuadSpec(1, 0, 0, 1, 1, 1)
    assert QuadSpec(2, 1, 0, 1, 1, 1).refined(4).u_max == 8


@pytest.mark.parametrize("case", range(3))
def test_weil_constant_converges(case):
    name, (lo, hi), fn = weil_test_functions()[case]
    q = WeilQuad(np.exp(lo), np.exp(hi))
    errs = [abs(weil_constant(fn, q) - 1), abs(weil_constant(fn, q.refined()) - 1)]
    assert errs[0] < 1e-3 and errs[1] < errs[0] / 10


def test_weil_constant_3d():
    fn = lambda a, R: poly_bump(np.log(a), -1, 1) * (1 + R.matrix[2, 2] ** 2)
    assert weil_constant(fn, WeilQuad(np.exp(-1), np.e, panels=8), d=3) == pytest.approx(1, abs=1e-6)


def test_weil_degenerate():
    with pytest.raises(ValueError):
        weil_constant(lambda a, R: 0 * a, WeilQuad(0.5, 2.0))
