import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from isomax import serialization as ser
from isomax.cli import main
from isomax.fixtures import emit_fixture, fixture, fixture_names, parse_fixture
from isomax.invariants import tuples_equivalent
from isomax.models import build_isotropy_maximal_model, decompose_almost
from isomax.sampling import random_symplectic_trig_form, random_valid_tuple

from conftest import rng_from, seeds


def roundtrip(obj_json):
    return ser.loads(ser.dumps(obj_json))


# ---------------------------------------------------------------------------
# schemas


@pytest.mark.parametrize("name", fixture_names())
def test_fixture_round_trip(name):
    data = emit_fixture(name)
    assert parse_fixture(name, roundtrip(data)) == fixture(name)
    assert emit_fixture(name) == data


def test_fixture_examples():
    assert emit_fixture("example-2.3") == {"dim_M": 4, "dim_T": 3, "dim_stabilizer": 0}
    assert emit_fixture("example-3.3") == {"dim_M": 4, "dim_T": 1, "dim_stabilizer": 0}
    sq = emit_fixture("unit-square")
    assert sq["dim"] == 2 and {f["offset"] for f in sq["facets"]} == {"1/2"}
    with pytest.raises(KeyError):
        fixture("no-such-fixture")


@given(seeds)
def test_tuple_round_trip(seed):
    t = random_valid_tuple(rng_from(seed), max_dim=4, max_toric_dim=3)
    back = ser.tuple_from_json(roundtrip(ser.tuple_to_json(t)))
    assert back == t
    assert tuples_equivalent(back, t)


@given(seeds)
def test_model_round_trip(seed):
    t = random_valid_tuple(rng_from(seed), max_dim=4, max_toric_dim=3, cls=None)
    try:
        m = decompose_almost(t)
    except ValueError:
        m = build_isotropy_maximal_model(*_im_pair(seed))
    assert ser.model_from_json(roundtrip(ser.model_to_json(m))) == m


def _im_pair(seed):
    from isomax.sampling import random_isotropy_maximal_pair

    return random_isotropy_maximal_pair(rng_from(seed), max_toric_dim=3, max_dim=4)


@given(seeds)
def test_moser_form_round_trip(seed):
    w = random_symplectic_trig_form(rng_from(seed))
    assert ser.moser_form_from_json(roundtrip(ser.moser_form_to_json(w))) == w


def test_json_numbers_are_exact():
    data = ser.loads('{"n": 1, "coeffs": [{"i": 1, "modes": [{"freq": 0, "cos": 1}, {"freq": 1, "sin": 0.3}]}]}')
    w = ser.moser_form_from_json(data)
    assert w.coeffs[0].modes[1].sin == Fraction(3, 10)


@pytest.mark.parametrize(
    "decoder, data, path",
    [
        (ser.form_from_json, [[0, 1], [1, 0]], "sigma"),
        (ser.form_from_json, [[0, "a"], [0, 0]], "sigma[0][1]"),
        (ser.polytope_from_json, {"dim": 2, "facets": [{"normal": [1], "offset": "0"}]}, "delta.facets[0].normal"),
        (ser.polytope_from_json, {"dim": 1, "facets": [{"normal": [2], "offset": "1"}]}, "delta.facets[0]"),
        (ser.sublattice_from_json, {"ambient": 2, "basis": [[2, 0]]}, "t_h"),
        (ser.tuple_from_json, {"sigma": [[0]], "t_h": {"ambient": 1, "basis": []}}, "delta"),
        (ser.moser_form_from_json, {"n": 1, "coeffs": [{"i": 2, "modes": []}]}, "coeffs[0].i"),
    ],
)
def test_schema_errors_name_the_path(decoder, data, path):
    with pytest.raises(ser.SchemaError) as err:
        decoder(data)
    assert err.value.path == path


# ---------------------------------------------------------------------------
# CLI


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else ser.dumps(obj))
    return str(p)


def test_cli_classify_orbit(tmp_path, capsys):
    f = write(tmp_path, "o.json", emit_fixture("example-2.3"))
    code, rep = run(capsys, "classify", f)
    assert code == 0 and rep["class"] == "StrictlyAlmostIsotropyMaximal"
    f = write(tmp_path, "o.json", emit_fixture("example-3.3"))
    code, rep = run(capsys, "classify", f)
    assert code == 1 and rep["class"] == "NotAlmostIsotropyMaximal"
    f = write(tmp_path, "o.json", {"dim_M": 4, "dim_T": 3, "dim_stabilizer": 2})
    code, rep = run(capsys, "classify", f)
    assert code == 1 and "SliceBoundViolated" in rep["error"]


def test_cli_classify_tuple(tmp_path, capsys):
    f = write(tmp_path, "t.json", emit_fixture("toric-square"))
    code, rep = run(capsys, "classify", f)
    assert code == 0 and rep == {"kind": "tuple", "valid": True, "class": "IsotropyMaximal", "manifold_dimension": 4}
    bad = emit_fixture("toric-square")
    bad["delta"] = ser.polytope_to_json(fixture("standard-simplex"))
    f = write(tmp_path, "t.json", bad)
    code, rep = run(capsys, "classify", f)
    assert code == 1 and rep["valid"] is False and "Delta not centered" in rep["diagnostics"]


def test_cli_validate_delzant(tmp_path, capsys):
    f = write(tmp_path, "p.json", emit_fixture("triangle-x2y"))
    code, rep = run(capsys, "validate-delzant", f)
    assert code == 1
    assert rep["failing_vertices"] == [{"vertex": ["0", "1"], "reason": "normals have determinant -2"}]
    f = write(tmp_path, "p.json", emit_fixture("standard-simplex"))
    code, rep = run(capsys, "validate-delzant", f)
    assert code == 0 and rep["centroid"] == ["1/3", "1/3"]
    f = write(tmp_path, "p.json", {"dim": 2, "facets": [{"normal": [-1, 0], "offset": 0}]})
    code, rep = run(capsys, "validate-delzant", f)
    assert code == 1 and rep["error"].startswith("Unbounded")


def test_cli_equivalent(tmp_path, capsys):
    a = write(tmp_path, "a.json", emit_fixture("sphere-times-torus"))
    code, rep = run(capsys, "equivalent", a, a)
    assert code == 0 and rep["equivalent"]
    t = fixture("sphere-times-torus")
    b = write(tmp_path, "b.json", ser.tuple_to_json(type(t)(t.sigma.scaled(2), t.t_h, t.delta)))
    code, rep = run(capsys, "equivalent", a, b)
    assert code == 1 and not rep["equivalent"]


def test_cli_models(tmp_path, capsys):
    t = fixture("sphere-times-torus")
    f = write(tmp_path, "m.json", {"sigma": ser.form_to_json(t.sigma), "delta": ser.polytope_to_json(t.delta)})
    code, rep = run(capsys, "build-model", f)
    assert code == 0 and rep["manifold_dimension"] == 4
    f = write(tmp_path, "e.json", emit_fixture("example-2.3-tuple"))
    code, rep = run(capsys, "decompose", f)
    assert code == 0 and rep["acting_codimension"] == 1
    code, rep = run(capsys, "extend", f)
    assert code == 0 and rep["class"] == "IsotropyMaximal" and rep["dim_T"] == 4
    f = write(tmp_path, "s.json", emit_fixture("toric-square"))
    code, rep = run(capsys, "extend", f)
    assert code == 1


def test_cli_moser(tmp_path, capsys):
    f = write(tmp_path, "w.json", emit_fixture("moser-invariant"))
    code, rep = run(capsys, "moser-verify", f, "--steps", "20", "--samples", "8")
    assert code == 0 and rep["flow_pullback_error"] < 1e-12
    f = write(tmp_path, "w.json", emit_fixture("moser-degenerate"))
    code, rep = run(capsys, "moser-verify", f)
    assert code == 1 and rep["passed"] is False
    f = write(tmp_path, "w.json", emit_fixture("moser-n1"))
    code, rep = run(capsys, "moser-verify", f, "--steps", "5", "--samples", "8", "--tol", "1e-12")
    assert code == 1 and rep["failures"]


def test_cli_output_file(tmp_path, capsys):
    out = tmp_path / "report.json"
    assert main(["-o", str(out), "fixture", "unit-square"]) == 0
    assert json.loads(out.read_text()) == emit_fixture("unit-square")
    assert capsys.readouterr().out == ""


def test_cli_malformed(tmp_path, capsys):
    f = write(tmp_path, "bad.json", '{\n  "dim_M": 4,\n  oops\n}')
    code, rep = run(capsys, "classify", f)
    assert code == 2 and ":3:3:" in rep["error"]
    code, rep = run(capsys, "classify", str(tmp_path / "missing.json"))
    assert code == 2
    f = write(tmp_path, "bad.json", {"sigma": [[0, "x"], [0, 0]], "t_h": {"ambient": 2, "basis": []}, "delta": {"dim": 0, "facets": []}})
    code, rep = run(capsys, "classify", f)
    assert code == 2 and "sigma[0][1]" in rep["error"]
    code, rep = run(capsys, "fixture", "no-such-fixture")
    assert code == 2
    code, rep = run(capsys, "no-such-command")
    assert code == 2
    assert "error" in rep


json_values = st.recursive(
    st.none() | st.booleans() | st.integers(-5, 5) | st.text(max_size=4),
    lambda inner: st.lists(inner, max_size=3) | st.dictionaries(
        st.sampled_from(["dim", "facets", "sigma", "t_h", "delta", "n", "coeffs", "dim_M", "dim_T", "dim_stabilizer", "normal", "offset"]),
        inner,
        max_size=4,
    ),
    max_leaves=12,
)

COMMANDS = ["validate-delzant", "classify", "build-model", "decompose", "extend", "moser-verify"]


@given(st.sampled_from(COMMANDS), json_values)
def test_exit_code_contract(tmp_path_factory, command, value):
    path = tmp_path_factory.mktemp("fuzz") / "in.json"
    path.write_text(json.dumps(value))
    argv = [command, str(path)]
    if command == "moser-verify":
        argv += ["--steps", "4", "--samples", "4"]
    assert main(argv) in (0, 1, 2)


@given(st.sampled_from(fixture_names()), st.sampled_from(COMMANDS))
def test_exit_code_contract_on_fixtures(tmp_path_factory, name, command):
    path = tmp_path_factory.mktemp("fx") / "in.json"
    path.write_text(ser.dumps(emit_fixture(name)))
    argv = [command, str(path)]
    if command == "moser-verify":
        argv += ["--steps", "20", "--samples", "8"]
    assert main(argv) in (0, 1, 2)
