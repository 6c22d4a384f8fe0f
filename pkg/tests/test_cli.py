import json
from pathlib import Path

import pytest

from jetvariant.cli import main
from jetvariant.corpus import data_dir
from jetvariant.scenario import load_scenario

DATA = Path(data_dir())
EUC = str(DATA / "euclidean-curves.json")
FLUX = str(DATA / "flux-sl3.json")
PSEUDO = str(DATA / "pseudogroup-ux0.json")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


def test_check_invariant(capsys):
    code, out, _ = run(capsys, "check", EUC, "--invariant", "K2", "--order", "2")
    assert code == 0 and "PASS" in out
    code, out, _ = run(capsys, "check", EUC, "--invariant", "y2")
    assert code == 1 and "FAIL" in out


def test_hilbert_example(capsys):
    code, out, _ = run(capsys, "hilbert", EUC, "--max-order", "5", "--seed", "1", "--trials", "8")
    assert code == 0 and "0 0 1 1 1 1" in out
    code, rep = run_json(capsys, "hilbert", EUC, "--max-order", "5", "--range=-5:5")
    assert rep["schema_version"] == 1 and rep["command"] == "hilbert" and rep["d"] == [0, 0, 1, 1, 1, 1]


def test_poincare(capsys):
    code, rep = run_json(capsys, "poincare", EUC, "--max-order", "5")
    assert code == 0 and rep["status"] == "fits" and rep["d"] == 0 and rep["R"] == [0, 0, 1]


def test_find_empty_algebra(capsys, tmp_path):
    p = tmp_path / "min.json"
    p.write_text('{"context": {"independents": ["x"], "dependents": ["u"]}}')
    code, rep = run_json(capsys, "find", str(p), "--order", "1", "--num-degree", "1", "--den", "1")
    assert code == 0 and rep["basis"] == ["1", "x", "u", "u1_1"]


def test_json_round_trip(capsys):
    scen = load_scenario(EUC)
    code, rep = run_json(capsys, "prolong", EUC, "--max-order", "3")
    assert code == 0
    from jetvariant.parse import format_expr, parse

    for f in rep["fields"]:
        for name, text in f["coefficients"].items():
            assert format_expr(parse(text, scen.ctx), scen.ctx) == text
    code, rep = run_json(capsys, "find", EUC, "--order", "2", "--num-degree", "6", "--den", "(1+y1^2)^3",
                         "--variables", "y1", "y2")
    assert rep["dimension"] == 2
    vals = [parse(b, scen.ctx) for b in rep["basis"]]
    assert scen.expressions["K2"] in vals


def test_reduce_tresse_commutators(capsys):
    code, rep = run_json(capsys, "reduce", FLUX, "w_xx/w")
    assert code == 0 and rep["results"][0]["normal_form"] == "w*w_2 + 2*w_1^2"
    code, rep = run_json(capsys, "tresse", PSEUDO, "--functions", "u", "y", "--off-equation")
    assert code == 0 and rep["derivations"][0] == ["1/u_x", "0"]
    code, rep = run_json(capsys, "commutators", PSEUDO, "--derivations", "Dx_over_ux", "Dy", "--off-equation")
    assert code == 0 and rep["commutators"][0]["decomposition"] == ["u_xy/u_x", "0"]


def test_check_modes(capsys):
    assert run(capsys, "check", FLUX, "--symmetry")[0] == 0
    assert run(capsys, "check", FLUX, "--symmetry", "--generators", "w_dw")[0] == 1
    mon = str(DATA / "quadrics-monge.json")
    assert run(capsys, "check", mon, "--first-integral", "J1")[0] == 0
    assert run(capsys, "check", PSEUDO, "--derivation", "Dy", "--probes", "u_y", "u_yy")[0] == 0
    assert run(capsys, "check", PSEUDO, "--id", "uy-invariant")[0] == 0
    code, out, _ = run(capsys, "check", FLUX, "--fast")
    assert code == 0 and "SKIP" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["check", "/nonexistent.json", "--symmetry"],
        ["check", EUC, "--invariant", "y2^"],
        ["check", EUC, "--invariant", "zz"],
        ["check", EUC, "--id", "no-such-check"],
        ["check", EUC, "--derivation", "nabla"],
        ["reduce", EUC, "y2"],
        ["commutators", PSEUDO, "--derivations", "nope"],
    ],
)
def test_input_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and "error" in err


def test_json_error_report(capsys):
    code, out, _ = run(capsys, "check", EUC, "--invariant", "zz", "--json")
    assert code == 2 and json.loads(out)["error"]["type"] == "SchemaError"


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["hilbert", EUC, "--max-order", "3", "--range", "5"])
    assert e.value.code == 2


def test_corpus_command(capsys):
    code, rep = run_json(capsys, "corpus", "--filter", "euclidean")
    assert code == 0 and rep["schema_version"] == 1 and rep["summary"]["fail"] == 0
    assert [c["name"] for c in rep["cases"]] == ["euclidean-curves"]


def test_bundled_case_by_name(capsys):
    assert main(["find", "pseudogroup-ux0", "--order", "1", "--num-degree", "1", "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["basis"] == ["1", "u_y"]
    assert main(["hilbert", "no-such-case", "--max-order", "3"]) == 2
