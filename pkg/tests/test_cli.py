import json
from fractions import Fraction

import pytest
from click.testing import CliRunner

from frobsub import coxeter
from frobsub.cli import UsageError, emit, jsonable, main
from frobsub.exactcore import PuiseuxPolynomial
from frobsub.submanifold import SubmanifoldMap


def run(*args):
    return CliRunner().invoke(main, list(args))


def test_catalog_list_tsv():
    r = run("--format", "tsv", "catalog", "list")
    assert r.exit_code == 0
    lines = r.output.splitlines()
    assert lines[0] == "name\texponents\th\tdim"
    assert "H3\t2 6 10\t10\t3" in lines


def test_check_wdvv_h3():
    assert run("check", "wdvv", "H3").exit_code == 0


def test_check_euler_json():
    r = run("--format", "json", "check", "euler", "H3")
    assert r.exit_code == 0
    assert json.loads(r.output)["d_F"] == "22"


def test_unknown_entry_is_input_error():
    r = run("check", "wdvv", "E8")
    assert r.exit_code == 2
    assert "unknown catalog entry" in r.output


def test_bad_flag_is_usage_error():
    assert run("gw", "cp2", "--max-n", "0").exit_code == 2
    assert run("gw", "cp2").exit_code == 2
    assert run("--format", "xml", "catalog", "list").exit_code == 2


def test_tsv_for_non_table_is_usage_error():
    r = run("--format", "tsv", "check", "wdvv", "H3")
    assert r.exit_code == 2


def test_natural_roots_h3():
    r = run("natural-roots", "H3", "--verify-points")
    assert r.exit_code == 0
    assert "27*k2^3 - 22*k2^2 - 5*k2" in r.output
    assert "-5/27" in r.output


def test_natural_roots_json_rational_strings():
    r = run("--format", "json", "natural-roots", "B3", "--verify-points")
    data = json.loads(r.output)
    assert ["-1/2", True] in data["table"]["rows"]


def test_natural_roots_two_dimensional_group():
    assert run("natural-roots", "A2").exit_code == 2


def test_p1p1_contract_tsv_golden_lines():
    r = run("--format", "tsv", "gw", "p1p1", "--max-n", "12", "--contract")
    lines = r.output.splitlines()
    assert lines[0] == "n\tN_n"
    assert "12\t1456089241205248" in lines
    assert "9\t758120642" in lines
    assert len(lines) == 13
    # the computed n = 11 row differs from the tabulated one, so the comparison fails
    assert r.exit_code == 1


def test_p1p1_contract_json_reports_mismatch():
    r = run("--format", "json", "gw", "p1p1", "--max-n", "12", "--contract")
    data = json.loads(r.output)
    assert [m["n"] for m in data["table2"]["mismatches"]] == [11]
    assert data["table"]["rows"][-1] == [12, "1456089241205248"]


def test_p1p1_contract_prefix_passes():
    r = run("gw", "p1p1", "--max-n", "10", "--contract", "--cross-check")
    assert r.exit_code == 0


def test_golden_mutation_flips_exit_code(monkeypatch):
    import frobsub.gwcounts as gw

    golden = gw.table2()
    monkeypatch.setattr(gw, "table2", lambda: {**golden, 4: 15})
    r = run("gw", "p1p1", "--max-n", "5", "--contract")
    assert r.exit_code == 1


def test_contracted_recursion_report_does_not_fail():
    r = run("--format", "json", "gw", "p1p1", "--max-n", "6", "--report-contracted-recursion")
    assert r.exit_code == 0
    rep = json.loads(r.output)["contracted_recursion"]
    assert rep["stated_initial_condition"]["value"] == "2"
    assert rep["tabulated_N2"] == "1"


def test_cp2_ode_and_probe():
    r = run("--format", "json", "gw", "cp2", "--max-n", "12", "--check-ode", "--radius-probe")
    assert r.exit_code == 0
    data = json.loads(r.output)
    assert data["ode"]["ok"] and data["ode_solution_matches_recursion"]
    assert data["table"]["rows"][3] == [4, "620"]
    assert data["radius_probe"]["x0"] > 0


def test_cp2_tabulated_ode_form_exit_one():
    assert run("gw", "cp2", "--max-n", "5", "--check-ode", "--ode-form", "printed").exit_code == 1


def test_big_integers_are_strings():
    r = run("--format", "json", "gw", "cp2", "--max-n", "10")
    rows = json.loads(r.output)["table"]["rows"]
    assert rows[-1] == [10, "40739017561997799680"]


def test_nested_chain():
    r = run("nested-chain")
    assert r.exit_code == 0


def test_output_is_deterministic():
    args = ("--format", "json", "gw", "p1p1", "--max-n", "7", "--cross-check", "--contract")
    assert run(*args).output == run(*args).output


def _write(path, data):
    path.write_text(json.dumps(data))
    return str(path)


def test_submanifold_analyze(tmp_path):
    P = ("tau1", "tau2")
    tau1, tau2 = PuiseuxPolynomial.gens(*P)
    inst = coxeter.build_family("H3", (1,))
    map_file = _write(tmp_path / "map.json", inst.map.to_json())
    r = run("--format", "json", "submanifold", "analyze", "--spec", "H3", "--map", map_file)
    assert r.exit_code == 0, r.output
    data = json.loads(r.output)
    assert data["natural"] and data["euler_tangent"]
    assert data["E_N"] == ["10*tau1", "2*tau2"]
    assert data["gauss_codazzi"]["ok"]
    spec_file = _write(tmp_path / "spec.json", coxeter.get_entry("A3").spec.to_json())
    plane = SubmanifoldMap(P, (tau1, PuiseuxPolynomial.zero(P), tau2))
    map_file = _write(tmp_path / "plane.json", plane.to_json())
    r = run("submanifold", "analyze", "--spec", spec_file, "--map", map_file)
    assert r.exit_code == 0
    assert "natural: True" in r.output


def test_submanifold_analyze_non_flat_is_input_error(tmp_path):
    P = ("tau1", "tau2")
    tau1, tau2 = PuiseuxPolynomial.gens(*P)
    bad = SubmanifoldMap(P, (tau1, PuiseuxPolynomial.zero(P), tau2**2))
    map_file = _write(tmp_path / "bad.json", bad.to_json())
    assert run("submanifold", "analyze", "--spec", "A3", "--map", map_file).exit_code == 2
    assert run("submanifold", "analyze", "--spec", "A3", "--map", str(tmp_path / "missing.json")).exit_code == 2


def test_emit_conventions():
    assert jsonable(Fraction(-5, 27)) == "-5/27"
    assert emit({"verdicts": []}, "json") == '{\n  "verdicts": []\n}\n'
    with pytest.raises(UsageError):
        emit({"command": "x"}, "tsv")


def test_human_format_elides_long_polynomials():
    V = ("x",)
    p = PuiseuxPolynomial.zero(V)
    for k in range(15):
        p = p + PuiseuxPolynomial.term(1, V, {"x": k})
    out = emit({"residual": p}, "human")
    assert "5 more terms" in out
    assert "5 more terms" not in emit({"residual": p}, "json")
