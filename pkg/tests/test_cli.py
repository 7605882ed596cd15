import json

from dcohom.cli import main
from dcohom.engine import ResultDocument, emit, parse_space_expr, run_command


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_dr_text(capsys):
    code, out, _ = run_cli(capsys, "dr", "torus(1)")
    assert code == 0
    assert "[1, 1]" in out
    assert "status: ok" in out


def test_cli_json_deterministic(capsys):
    code1, out1, _ = run_cli(capsys, "dr", "affine(2)", "--json")
    code2, out2, _ = run_cli(capsys, "dr", "affine(2)", "--json")
    assert code1 == code2 == 0
    assert out1 == out2  # byte-for-byte


def test_cli_json_round_trip(capsys):
    code, out, _ = run_cli(capsys, "hh", "torus(1)", "--json", "--window", "4")
    assert code == 0
    doc = ResultDocument.from_json_dict(json.loads(out))
    assert emit(doc, True).decode() == out


def test_cli_parse_error_exit_code(capsys):
    code, _, err = run_cli(capsys, "dr", "nonsense(1)")
    assert code == 2
    assert "ParseError" in err


def test_cli_not_squarefree_exit_code(capsys):
    code, _, _ = run_cli(capsys, "dr", "localized(f = x1^2 + 2*x1 + 1)")
    assert code == 3


def test_cli_unsupported_space_exit_code(capsys):
    code, _, _ = run_cli(capsys, "hh", "product(localized(f = x1^2 + 1), affine(1))")
    assert code == 4


def test_cli_deform_witness(capsys):
    code, out, _ = run_cli(capsys, "deform", "affine(2)", "--omega", "dx1^dx2", "--window", "3")
    assert code == 0
    assert "x1*dx2" in out


def test_cli_vdb(capsys):
    code, out, _ = run_cli(capsys, "vdb", "torus(1)", "--window", "4")
    assert code == 0
    assert "HH^n = HH_{2r-n}" in out


def test_emit_round_trip_contract():
    doc = run_command("dr", parse_space_expr("torus(1)"), window=4)
    blob = emit(doc, True)
    assert ResultDocument.from_json_dict(json.loads(blob)) == doc


def test_emit_empty_tables_valid():
    doc = ResultDocument(command="dr", space="affine(1)")
    body = json.loads(emit(doc, True))
    assert body["dims"] == {}
    assert body["witnesses"] == []


def test_resolution_check_cli(capsys):
    code, out, _ = run_cli(capsys, "resolution-check", "affine(1)", "--window", "3")
    assert code == 0
    assert "status: ok" in out


def test_cli_hhom_highlights_hh0(capsys):
    code, out, _ = run_cli(capsys, "hhom", "affine(1)", "--window", "4")
    assert code == 0
    assert "[0, 0, 1]" in out
    assert "HH_0 = 0" in out
