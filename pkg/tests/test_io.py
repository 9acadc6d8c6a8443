from __future__ import annotations

import json
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from padic_spectral import io
from padic_spectral.bases import enumerate_phi_basis
from padic_spectral.fourier import dft_forward
from padic_spectral.functions import GridFunction
from padic_spectral.operators import KernelSpec
from padic_spectral.padic import enumerate_cosets
from padic_spectral.scalars import QuadScalar


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_seventeen_digits_round_trip(x):
    assert float(io.fmt_float(x)) == x
    assert float(json.loads(io.dumps({"x": x}))["x"]) == x


def test_dumps_is_valid_json():
    doc = {"a": [1, 2.5, "s"], "b": {"c": [[0.1, 0.2]], "d": None, "e": True}, "f": []}
    assert json.loads(io.dumps(doc)) == doc


def test_exact_function_round_trip(tmp_path):
    grid = enumerate_cosets(3, 1, -1)
    f = GridFunction.from_values(grid, [QuadScalar(F(i, 7), F(-i, 5), 3) for i in range(9)])
    path = tmp_path / "f.json"
    io.write_function(path, f)
    doc = json.loads(path.read_text())
    assert doc["role"] == "function" and doc["backend"] == "exact"
    assert doc["values"][1] == ["1/7", "-1/5"]
    g = io.read_function(path)
    assert g.grid == grid and g.equals(f)


def test_float_function_round_trip_is_bit_exact(tmp_path, rng):
    grid = enumerate_cosets(2, 2, -1)
    f = GridFunction(grid, rng.standard_normal(8) + 1j * rng.standard_normal(8))
    io.write_function(tmp_path / "f.json", f)
    g = io.read_function(tmp_path / "f.json")
    assert np.array_equal(g.data, f.data)
    io.write_function(tmp_path / "g.json", g)
    assert (tmp_path / "f.json").read_bytes() == (tmp_path / "g.json").read_bytes()


def test_spectrum_round_trip(tmp_path, rng):
    grid = enumerate_cosets(3, 0, -2)
    s = dft_forward(GridFunction(grid, rng.standard_normal(9)))
    io.write_spectrum(tmp_path / "s.json", s)
    doc = json.loads((tmp_path / "s.json").read_text())
    assert doc["role"] == "frequencies" and doc["frequencies"][1] == "1/9"
    back = io.read_spectrum(tmp_path / "s.json")
    assert np.array_equal(back.values, s.values)


def test_reading_wrong_role(tmp_path, rng):
    grid = enumerate_cosets(2, 1, 0)
    io.write_spectrum(tmp_path / "s.json", dft_forward(GridFunction(grid, np.ones(2))))
    with pytest.raises(io.FormatError):
        io.read_function(tmp_path / "s.json")


@pytest.mark.parametrize("doc", [
    {"p": 2, "r": 1, "l": 0, "backend": "exact", "values": [["1", "0"]]},
    {"p": 2, "r": 1, "backend": "exact", "values": []},
    {"p": 2, "r": 1, "l": 0, "backend": "decimal", "values": [[1, 0], [0, 0]]},
])
def test_malformed_function_documents(doc):
    with pytest.raises(io.FormatError):
        io.function_from_document(doc)


def test_invalid_json(tmp_path):
    (tmp_path / "bad.json").write_text("{not json")
    with pytest.raises(io.FormatError):
        io.read_function(tmp_path / "bad.json")


def test_basis_dump():
    doc = io.basis_document(enumerate_phi_basis(enumerate_cosets(2, 1, 0), alpha=1))
    assert [e["kind"] for e in doc["elements"]] == ["constant", "phi"]
    assert doc["elements"][1]["eigenvalue"] == "-2/3"
    assert doc["elements"][1]["values"] == [["0", "1/2"], ["0", "-1/2"]]


def test_kernel_spec_round_trip(tmp_path):
    spec = KernelSpec(3, -1, 1, {-1: F(2), 0: F(1, 3), 1: F(5)},
                      {(0, F(1, 3)): F(7), (-1, F(2, 9)): F(1, 11)})
    io.write_kernel_spec(tmp_path / "k.json", spec)
    back = io.read_kernel_spec(tmp_path / "k.json")
    assert back.defaults == spec.defaults and back.overrides == spec.overrides
    assert (back.gamma_min, back.gamma_max) == (-1, 1)


def test_kernel_spec_with_float_values():
    doc = {"p": 2, "gamma_min": 0, "gamma_max": 1,
           "scales": [{"gamma": 0, "default": 0.25, "overrides": [{"n": "1/2", "value": 1.5}]}]}
    spec = io.kernel_spec_from_document(doc)
    assert spec.coefficient(0, F(1, 2)) == 1.5 and spec.coefficient(1, 0) == 0
    assert not spec.exact


def test_csv_and_svg():
    text = io.timeseries_csv([0, 1], np.array([[1.0, 0.0], [0.75, 0.25]]), ["v0", "v1"])
    assert text.splitlines() == ["t,v0,v1", "0,1,0", "1,0.75,0.25"]
    svg = io.svg_plot({"s": ([0, 1, 2], [1, 0.5, 0.25])}, title="decay")
    assert svg.startswith("<svg") and "polyline" in svg and svg.rstrip().endswith("</svg>")


def test_atomic_write_leaves_no_temp_files(tmp_path):
    target = tmp_path / "out.txt"
    io.atomic_write(target, "one")
    io.atomic_write(target, "two")
    assert target.read_text() == "two"
    assert [p.name for p in tmp_path.iterdir()] == ["out.txt"]
