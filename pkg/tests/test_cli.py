import json
import subprocess
import sys
from pathlib import Path

import pytest

from panache.cli import EXIT_DOMAIN, EXIT_MALFORMED, EXIT_OK, main
from panache.serialize import Loader

DATA = Path(__file__).parent / "data"


def run(capsys, *args):
    code = main([str(a) for a in args])
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


def test_validate_valid_object(capsys):
    code, rep = run(capsys, "validate", DATA / "q1.json")
    assert code == EXIT_OK
    assert rep["status"] == "ok" and rep["result"]["kind"] == "object"


def test_ext1_signature_mismatch(capsys):
    code, rep = run(capsys, "ext1", "--of", DATA / "unit.json", "--by", DATA / "other_sig.json")
    assert code == EXIT_DOMAIN
    assert "signature mismatch" in rep["error"]["message"]


def test_malformed_scalar_exits_two(capsys):
    code, rep = run(capsys, "validate", DATA / "bad_scalar.json")
    assert code == EXIT_MALFORMED
    assert "/operators/a/0/1" in rep["error"]


def test_inhomogeneous_object_is_domain_error(capsys):
    code, _ = run(capsys, "validate", DATA / "inhomogeneous.json")
    assert code == EXIT_DOMAIN


def test_missing_file_is_malformed(capsys, tmp_path):
    code, _ = run(capsys, "validate", tmp_path / "absent.json")
    assert code == EXIT_MALFORMED


def test_unknown_command_exits_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["bogus"])
    assert exc.value.code == EXIT_MALFORMED


def test_ext1_dimension(capsys):
    code, rep = run(capsys, "ext1", "--of", DATA / "unit.json", "--by", DATA / "q1.json")
    assert code == EXIT_OK and rep["result"]["dim"] == 1


def test_baer_sum_doubles(capsys):
    code, rep = run(capsys, "baer", DATA / "kummer.json", DATA / "kummer.json")
    assert code == EXIT_OK and rep["result"]["coords"] == ["2"]


def test_nonsplit_kummer(capsys):
    code, rep = run(capsys, "nonsplit", DATA / "kummer.json")
    assert rep["result"]["totally_nonsplit"] is True


def test_genext_fiber_over_f2(capsys):
    code, rep = run(capsys, "genext", "fiber", DATA / "genext_f2.json")
    assert code == EXIT_OK and rep["result"]["group_dim"] == 1


def test_genext_truncate_level_one_is_domain_error(capsys):
    code, rep = run(capsys, "genext", "truncate", DATA / "genext_f2.json")
    assert code == EXIT_DOMAIN and rep["subcommand"] == "truncate"


def test_graded_independent_frame(capsys):
    code, rep = run(capsys, "graded-independent", DATA / "frame3.json")
    assert rep["result"]["graded_independent"] is True


def test_mt_demo_galois_dimension(capsys):
    code, rep = run(capsys, "mt-demo", "--a", 3, "--c", 5, "--label", 2)
    assert code == EXIT_OK
    assert rep["result"]["galois_dimension"] == 7


def test_mt_demo_rejects_equal_parameters(capsys):
    code, _ = run(capsys, "mt-demo", "--a", 3, "--c", 3)
    assert code == EXIT_DOMAIN


def test_oracle_negative_list_options(capsys):
    code, rep = run(capsys, "oracle", "--p", 2, "--k", 3, "--weights", "-2,-1,0", "--gens", "-1,-2",
                    "--levels", "1..2")
    assert code == EXIT_OK
    assert [lv["strict_classes"] for lv in rep["result"]["levels"]] == [4, 8]


def test_same_seed_identical_bytes(tmp_path):
    outs = []
    for name in ("a.json", "b.json"):
        out = tmp_path / name
        assert main(["genext", "equiv", str(DATA / "genext_f2.json"), "--other", str(DATA / "genext_f2.json"),
                     "--mode", "iso", "--seed", "12345", "--out", str(out)]) == EXIT_OK
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    assert json.loads(outs[0])["seed"] == 12345


def test_seed_must_fit_64_bits():
    with pytest.raises(SystemExit) as exc:
        main(["validate", str(DATA / "q1.json"), "--seed", str(1 << 64)])
    assert exc.value.code == EXIT_MALFORMED


def test_report_inputs_roundtrip(capsys):
    loader = Loader(DATA)
    _, rep = run(capsys, "ext1", "--of", DATA / "unit.json", "--by", DATA / "q1.json")
    assert loader.object(rep["result"]["inputs"]["by"]) == loader.load(DATA / "q1.json", "object")
    _, rep = run(capsys, "is-split", DATA / "kummer_twice.json")
    assert loader.extClass(rep["result"]["input"]) == loader.load(DATA / "kummer_twice.json", "extClass")
    _, rep = run(capsys, "genext", "validate", DATA / "genext_f2.json")
    assert loader.genext(rep["result"]["inputs"]["genext"]) == loader.load(DATA / "genext_f2.json", "genext")


def test_console_script_runs():
    proc = subprocess.run([sys.executable, "-m", "panache.cli", "validate", str(DATA / "unit.json")],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["status"] == "ok"


def test_blend_command(capsys):
    code, rep = run(capsys, "blend", "--L", DATA / "zeta3_q1.json", "--N", DATA / "kummer.json")
    assert code == EXIT_OK
    assert rep["result"]["aut_dim"] == 0


def test_push_doubles_class(capsys):
    code, rep = run(capsys, "push", DATA / "kummer.json", "--map", DATA / "double_q1.json")
    assert code == EXIT_OK and rep["result"]["coords"] == ["2"]


def test_blend_translation_with_wrong_endpoints(capsys):
    code, _ = run(capsys, "blend", "--L", DATA / "zeta3_q1.json", "--N", DATA / "kummer.json",
                  "--translate", DATA / "zeta3.json")
    assert code == EXIT_DOMAIN
