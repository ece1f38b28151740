import json

import jsonschema
import pytest

from slcurv.cli import load_schema, main

SCHEMA = load_schema()

COMMANDS = [
    ["invert", "--matrix", "[[2, 0.5], [0.5, 1]]", "--theta", "1.2"],
    ["eval", "--family", "tube", "--R", "0.3", "--rho", "1.5"],
    ["revolve", "--family", "geodesic-sphere-init", "--R", "0.7", "--s-max", "1.0", "--samples", "11"],
    ["revolve", "--family", "tube-init", "--R", "0.4", "--s-max", "0.5", "--samples", "21"],
    ["revolve", "--family", "equidistant-init", "--R", "0.5", "--s-max", "0.5", "--samples", "21"],
    ["lift-check", "--family", "equidistant", "--R", "0.5", "--points", "2"],
    ["linearize", "--family", "geodesic-sphere", "--R", "1.5"],
    ["continue", "--R", "0.5", "--steps", "2", "--grid", "51"],
    ["continue", "--eps-max", "50", "--steps", "1", "--grid", "51"],
    ["tube-family", "--n", "2", "--levels", "3"],
    ["solve-dirichlet", "--preset", "aniso2d", "--nodes", "9", "--full"],
    ["verify", "--suite", "elliptic"],
]


def test_schema_is_valid_draft():
    jsonschema.Draft202012Validator.check_schema(SCHEMA)


@pytest.mark.parametrize("argv", COMMANDS, ids=lambda a: "-".join(a[:2]))
def test_output_validates(argv, capsys):
    code = main(argv)
    assert code in (0, 1)
    doc = json.loads(capsys.readouterr().out)
    jsonschema.validate(doc, SCHEMA)
    assert doc["command"] == argv[0]


def test_schema_rejects_broken_report():
    bad = {"version": "1.0.0", "schema_version": "1.0", "command": "invert", "theta": 1.0}
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(bad, SCHEMA)
    bad = {"version": "1.0.0", "schema_version": "2.0", "command": "invert", "r": 1.0, "theta": 1.0}
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(bad, SCHEMA)


def test_written_file_matches_stdout(tmp_path, capsys):
    argv = ["invert", "--eigs", "1,2,3", "--theta", "2"]
    main(argv)
    printed = capsys.readouterr().out
    out = tmp_path / "r.json"
    assert main(argv + ["--out", str(out)]) == 0
    assert json.loads(out.read_text()) == json.loads(printed)
