"""Tests for settings loading and CoeffSeq file handling."""

import json
import math

import numpy as np
import pytest

from zerotap.errors import InputFormatError
from zerotap.io import dumps, load_coeffseq, write_json
from zerotap.roots import SolverOptions
from zerotap.series import geometric_partial_sum, hardy, random_roots_disk
from zerotap.settings import deep_merge, load_settings


def test_default_settings():
    settings = load_settings()
    assert settings.solver.max_iter == 200
    assert settings.solver.residual_tol_log == pytest.approx(math.log(1e-10))
    assert settings.solver.options() == SolverOptions()
    assert settings.profile.default_grid == (-1.0, 2.0)
    assert settings.detector.gap_factor == 1.05
    assert settings.detector.max_slope_tol == 0.5
    assert settings.plots.enabled
    assert "uniform_circle_atoms" not in settings.metrics.model_dump()


def test_user_settings_override_a_subset(tmp_path):
    path = write_json(tmp_path / "user.json", {"solver": {"max_iter": 50}, "plots": {"enabled": False}})
    settings = load_settings(path)
    assert settings.solver.max_iter == 50
    assert settings.solver.residual_tol_log == pytest.approx(math.log(1e-10))
    assert not settings.plots.enabled
    assert settings.metrics.annulus_delta == 0.1


def test_invalid_setting_names_the_field(tmp_path):
    path = write_json(tmp_path / "user.json", {"detector": {"gap_factor": 0.5}})
    with pytest.raises(InputFormatError, match=r"field detector\.gap_factor"):
        load_settings(path)
    path = write_json(tmp_path / "user2.json", {"solver": {"residual_tol_log": 1.0}})
    with pytest.raises(InputFormatError, match=r"field solver\.residual_tol_log"):
        load_settings(path)
    path = write_json(tmp_path / "user3.json", {"profile": {"default_grid": [2.0, 1.0]}})
    with pytest.raises(InputFormatError, match=r"field profile\.default_grid"):
        load_settings(path)
    path = write_json(tmp_path / "user4.json", {"detector": {"max_slope_tol": 0.0}})
    with pytest.raises(InputFormatError, match=r"field detector\.max_slope_tol"):
        load_settings(path)


def test_malformed_settings_report_line(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "solver": {\n    "max_iter": ,\n  }\n}\n')
    with pytest.raises(InputFormatError, match="line 3"):
        load_settings(path)
    with pytest.raises(InputFormatError, match="file not found"):
        load_settings(tmp_path / "missing.json")


def test_deep_merge_leaves_inputs_alone():
    base = {"a": {"b": 1, "c": 2}, "d": 3}
    merged = deep_merge(base, {"a": {"b": 10}, "e": 4})
    assert merged == {"a": {"b": 10, "c": 2}, "d": 3, "e": 4}
    assert base == {"a": {"b": 1, "c": 2}, "d": 3}


def test_coeffseq_file_round_trip(coeffseq_file):
    f = geometric_partial_sum(5)
    g = load_coeffseq(coeffseq_file(f))
    assert (g.label, g.n, g.V, g.degree, g.truncated) == (f.label, f.n, f.V, f.degree, f.truncated)
    np.testing.assert_array_equal(g.coeffs.to_complex(), f.coeffs.to_complex())


def test_round_trip_keeps_extreme_coefficients_and_roots(coeffseq_file):
    h = hardy(0.5, 20)
    g = load_coeffseq(coeffseq_file(h, "hardy.json"))
    np.testing.assert_array_equal(g.log_abs_coeffs(), h.log_abs_coeffs())
    assert g.truncated and not g.normalized
    d = random_roots_disk(10, seed=1)
    e = load_coeffseq(coeffseq_file(d, "disk.json"))
    np.testing.assert_array_equal(e.roots, d.roots)


def test_declared_degree_must_match(tmp_path):
    data = geometric_partial_sum(5).to_json()
    data["degree"] = 3
    path = write_json(tmp_path / "bad.json", data)
    with pytest.raises(InputFormatError, match="field degree: declared 3"):
        load_coeffseq(path)


def test_missing_and_invalid_fields(tmp_path):
    data = geometric_partial_sum(3).to_json()
    del data["V"]
    with pytest.raises(InputFormatError, match="field V"):
        load_coeffseq(write_json(tmp_path / "no_v.json", data))

    data = geometric_partial_sum(3).to_json()
    data["coeffs"][1]["re"]["m"] = "many"
    with pytest.raises(InputFormatError, match=r"field coeffs\.1\.re\.m"):
        load_coeffseq(write_json(tmp_path / "bad_m.json", data))

    data = geometric_partial_sum(3).to_json()
    for c in data["coeffs"]:
        c["re"]["m"] = 0.0
    with pytest.raises(InputFormatError, match="field coeffs"):
        load_coeffseq(write_json(tmp_path / "zero.json", data))


def test_malformed_coeffseq_reports_line(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"label": "x",\n "n": 2,\n "V": oops}\n')
    with pytest.raises(InputFormatError, match="line 3"):
        load_coeffseq(path)


def test_dumps_is_stable():
    text = dumps({"b": np.float64(1.5), "a": np.arange(3), "c": 1 + 2j})
    assert text.endswith("\n")
    data = json.loads(text)
    assert list(data) == ["a", "b", "c"]
    assert data == {"a": [0, 1, 2], "b": 1.5, "c": {"re": 1.0, "im": 2.0}}
    with pytest.raises(TypeError):
        dumps({"x": object()})
