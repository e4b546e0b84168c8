import numpy as np
import pytest

from schrolet import io as sio
from schrolet.admissible import build_generator_2d
from schrolet.frame import SamplingGrid, analyze, band_trig_signal
from schrolet.harmonics import labels_3d
from schrolet.radial import RadialFunction, make_log_grid
from schrolet.rep import CartesianSignal


def test_radial_round_trip(tmp_path, rng):
    g = make_log_grid(-2, 1, 2, 3)
    f = RadialFunction(g, rng.normal(size=g.size) + 1j * rng.normal(size=g.size))
    sio.write_radial(tmp_path / "r.csv", f)
    back = sio.read_radial(tmp_path / "r.csv")
    assert back.grid == g and np.array_equal(back.values, f.values)


def test_sequence_round_trip_3d(tmp_path, rng):
    grid = make_log_grid(-3, -1, 2, 2)
    f = band_trig_signal(grid, labels_3d(2), [-3], rng)
    sio.write_sequence(tmp_path / "s.csv", f)
    back = sio.read_sequence(tmp_path / "s.csv")
    assert back.labels == f.labels
    assert all(np.array_equal(back.components[l], f.components[l]) for l in f.labels)


def test_cartesian_round_trip(tmp_path, rng):
    f = CartesianSignal(2, 8, 1.5, rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8)))
    sio.write_cartesian(tmp_path / "c.bin", f)
    back = sio.read_cartesian(tmp_path / "c.bin")
    assert (back.N, back.Xi) == (8, 1.5) and np.array_equal(back.values, f.values)


def test_coefficient_round_trip(tmp_path, rng):
    grid = make_log_grid(-3, -1, 8, 8)
    g = build_generator_2d(L=2, n_range=(-1, 1))
    s = SamplingGrid.for_generator(g, grid, (0, 2), 3)
    c = analyze(band_trig_signal(grid, g.labels, [-3], rng), g, s)
    sio.write_coefficients(tmp_path / "c.csv", c)
    back = sio.read_coefficients(tmp_path / "c.csv")
    assert back.K == c.K
    assert all(np.array_equal(back.data[j], c.data[j]) for j in c.data)


def test_schema_errors_name_the_field(tmp_path):
    with pytest.raises(sio.SchemaError, match=r"grid\.Q: missing"):
        sio.grid_from_header({"omega_min_exp": 0, "omega_max_exp": 1})
    with pytest.raises(sio.SchemaError, match="must be an integer"):
        sio.grid_from_header({"omega_min_exp": 0, "omega_max_exp": 1, "Q": 1.5})
    p = tmp_path / "bad.csv"
    p.write_text("no header\n")
    with pytest.raises(sio.SchemaError):
        sio.read_radial(p)
