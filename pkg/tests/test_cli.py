import csv
import io
import json
import math

import pytest

from tmslab import io as tio
from tmslab import spaces as sp
from tmslab.cli import run_command
from tmslab.corpus import ENTRIES, entry_ids
from tmslab.errors import SpecError


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_command(argv, out, err)
    return code, out.getvalue(), err.getvalue()


def test_schema_validation_reports_every_error():
    with pytest.raises(SpecError) as exc:
        tio.validate({"kind": "circle", "metric": "taxicab"}, "space")
    assert "space document is invalid" in str(exc.value)


def test_load_documents():
    s = tio.load_space('{"kind": "real_interval", "a": 0, "b": "inf", "closed_left": true}')
    assert s.b == math.inf
    assert tio.load_space("circle") == sp.Circle("arc")
    assert tio.load_shape('{"shape": "interval", "a": 0, "b": 1}') == sp.Interval(0, 1)
    f = tio.load_function("sin")
    assert f.name == "sin"


def test_inf_roundtrip():
    text = tio.dumps({"x": math.inf, "y": [-math.inf, 1.5]})
    assert json.loads(text) == {"x": "inf", "y": ["-inf", 1.5]}


def test_schema_dir_override(tmp_path, monkeypatch):
    monkeypatch.setenv("TMSLAB_SCHEMA_DIR", str(tmp_path))
    with pytest.raises(SpecError):
        tio.load_schema("space")


def test_spaces_list_csv():
    code, out, _ = run(["spaces", "list", "--format", "csv"])
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["id", "expected", "actual", "detail"]
    assert {r[0] for r in rows[1:]} == set(sp.NAMED_SPACES)


def test_measure_estimate_and_budget_zero():
    ball = '{"shape": "ball", "center": [0, 0], "radius": 0.3}'
    code, out, _ = run(["measure", "estimate", "--space", "plane", "--set", ball, "--kind", "diam",
                        "--budget", "1000", "--tol", "1e-6"])
    doc = json.loads(out)
    assert code == 0 and doc["results"][0]["detail"]["upper"] == pytest.approx(0.6)
    tio.validate(doc, "report")
    code, _, err = run(["measure", "estimate", "--space", "plane", "--set", ball, "--budget", "0"])
    assert code == 2 and "budget" in err


def test_malformed_spec_exit_2():
    code, _, err = run(["tms", "check", "--space", '{"kind": "circle", "metric": 3}',
                        "--measure", "diam"])
    assert code == 2 and "invalid" in err
    code, _, _ = run(["tms", "check", "--space", "{not json", "--measure", "diam"])
    assert code == 2
    code, _, _ = run(["frobnicate"])
    assert code == 2


def test_tms_counting_expected_failure():
    code, out, _ = run(["tms", "check", "--space", "real", "--measure", "counting",
                        "--samples", "20", "--seed", "7", "--format", "csv"])
    assert code == 0 and "tms_fails_axiom(2)" in out
    code, _, _ = run(["tms", "check", "--space", "real", "--measure", "counting", "--samples", "20",
                      "--expect", "tms_passes"])
    assert code == 1


def test_ac_commands():
    code, out, _ = run(["ac", "analyze", "--fn", "sin", "--space", "real", "--measure", "lebesgue",
                        "--eps", "0.01"])
    assert code == 0 and json.loads(out)["results"][0]["actual"] == "certified"
    code, out, _ = run(["ac", "falsify", "--fn", "x_sin_inv_x", "--eps", "0.5",
                        "--deltas", "1e-1,1e-2,1e-3,1e-4"])
    doc = json.loads(out)
    assert code == 0 and len(doc["results"][0]["detail"]["witnesses"]) == 4
    code, _, _ = run(["ac", "falsify", "--fn", "sin", "--eps", "0.1"])
    assert code == 1


def test_linear_check(tmp_path):
    p = tmp_path / "func.json"
    p.write_text('{"kind": "functional", "coefficients": [3, 4], "norm": "l2"}')
    code, out, _ = run(["linear", "check", "--map", str(p), "--eps", "0.01"])
    doc = json.loads(out)
    assert code == 0
    assert doc["results"][0]["detail"]["norm_estimate"]["upper"] == pytest.approx(5)


def test_unwritable_output():
    code, _, err = run(["spaces", "list", "--out", "/nonexistent/dir/report.json"])
    assert code == 2 and "cannot write" in err


def test_single_verdict_one_row_csv(tmp_path):
    out = tmp_path / "r.csv"
    code, _, _ = run(["ac", "analyze", "--fn", "cos", "--format", "csv", "--out", str(out)])
    rows = list(csv.reader(out.open()))
    assert code == 0 and len(rows) == 2


def test_reproduce_subset_roundtrip(tmp_path):
    out = tmp_path / "r.json"
    ids = "ac_sin,tms_counting,linear_functional"
    code, _, _ = run(["paper", "reproduce", "--seed", "7", "--only", ids, "--out", str(out)])
    doc = json.loads(out.read_text())
    tio.validate(doc, "report")
    assert code == 0 and [r["id"] for r in doc["results"]] == sorted(ids.split(","))
    code, _, _ = run(["paper", "reproduce", "--only", "no_such_entry"])
    assert code == 2


REQUIRED_FIXTURES = {
    # tms fixtures
    "tms_real_lebesgue", "tms_unit_interval_lebesgue", "tms_plane_lebesgue", "tms_circle_diam",
    "tms_plane_diam", "tms_counting", "tms_circle_planar_lebesgue", "tms_open_restriction",
    # measure fixtures
    "measure_outer_axioms", "measure_separated_additivity", "measure_diameter_identity",
    "measure_caratheodory_interval", "pseudometric_real",
    # absolute continuity fixtures
    "ac_identity", "ac_sin", "ac_cos", "ac_sqrt_half_line", "ac_density_symmetric",
    "ac_projection_diam", "ac_complex_identity_circle", "ac_x_sin_inv_x", "ac_square_real",
    "ac_projection_lebesgue", "ac_projection_constancy", "ac_cantor_standard",
    "ac_equivalence_unit_interval", "ac_algebra_sum", "ac_algebra_scale", "ac_algebra_product",
    "ac_algebra_reciprocal", "ac_algebra_abs",
    # linear fixtures
    "linear_functional", "linear_addition", "linear_scalar", "linear_integration",
    "linear_holder", "linear_norm_function", "linear_composition",
}


def test_corpus_coverage():
    missing = REQUIRED_FIXTURES - set(entry_ids())
    assert not missing, f"fixtures without a corpus entry: {sorted(missing)}"
    assert len(set(entry_ids())) == len(ENTRIES)
    for e in ENTRIES:
        assert e.source and e.expected
