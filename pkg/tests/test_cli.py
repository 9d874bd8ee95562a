import json
import subprocess
import sys

import pytest

from twisted_strata import A0, AmbientSpace, kappa_class
from twisted_strata.graph import graph_to_json
from twisted_strata.strata import class_from_json
from twisted_strata.cli import main
from twisted_strata.selfcheck import expected_loop_square

from conftest import loop

M11 = ["--g", "1", "--legs", "1:1", "--a", "one"]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def loop_file(tmp_path):
    p = tmp_path / "loop.json"
    p.write_text(json.dumps(graph_to_json(loop(2))))
    return str(p)


def test_validate(capsys, loop_file, tmp_path):
    code, out, _ = run(capsys, "validate", loop_file, *M11)
    assert code == 0 and json.loads(out)["ok"]
    code, out, _ = run(capsys, "validate", loop_file, "--g", "2", "--legs", "1:1")
    assert code == 1 and json.loads(out)["violations"]


def test_product_matches_library(capsys, loop_file):
    amb = AmbientSpace(1, (("1", 1),), A0.one)
    code, out, _ = run(capsys, "product", loop_file, loop_file, *M11)
    assert code == 0
    assert class_from_json(json.loads(out), amb) == expected_loop_square(2)


def test_output_is_deterministic_and_jobs_independent(capsys, loop_file):
    args = ["product", "B + psi(1)", "B*B + kappa(1)", *M11, "--bind", f"B={loop_file}"]
    _, a, _ = run(capsys, *args)
    _, b, _ = run(capsys, *args)
    _, c, _ = run(capsys, *args, "--jobs", "2")
    assert a == b == c


def test_json_round_trip_through_canon(capsys, loop_file, tmp_path):
    _, out, _ = run(capsys, "product", loop_file, "psi(1)", *M11)
    p = tmp_path / "x.json"
    p.write_text(out)
    code, again, _ = run(capsys, "canon", str(p), *M11)
    assert code == 0 and json.loads(again) == json.loads(out)


def test_pushforget_and_pull(capsys):
    _, out, _ = run(capsys, "pushforget", "psi(p)^2", "--point", "p", "--g", "1", "--legs", "1:1,p:1")
    amb = AmbientSpace(1, (("1", 1),), A0.one)
    assert class_from_json(json.loads(out), amb) == kappa_class(amb, 1)
    code, out, _ = run(capsys, "pull", "--generator", "kappa:1", "--point", "p", *M11, "--format", "text")
    assert code == 0 and "kappa" in out and "psi" in out


def test_exit_codes(capsys, loop_file):
    assert run(capsys, "product", "psi(1", "1", *M11)[0] == 1
    assert run(capsys, "product", "1", "1")[0] == 2
    assert run(capsys, "validate", "/nonexistent.json", *M11)[0] == 2
    assert run(capsys, "pushforget", "psi(1)", "--point", "q", *M11)[0] == 1
    with pytest.raises(SystemExit) as info:
        main(["enumerate", *M11])
    assert info.value.code == 2


def test_enumerate_lines(capsys):
    code, out, _ = run(capsys, "enumerate", *M11, "--max-edges", "1", "--twist-bound", "2", "--codim", "1")
    assert code == 0 and len(out.splitlines()) == 12
    code, out, _ = run(capsys, "enumerate", *M11, "--max-edges", "1", "--twist-bound", "3")
    assert len(out.splitlines()) == 16


def test_selfcheck_echoes_seed(monkeypatch):
    env = {"TWISTED_STRATA_SEED": "77", "PATH": ""}
    proc = subprocess.run([sys.executable, "-m", "twisted_strata.cli", "selfcheck", "--quick", "--only", "1,5"],
                          capture_output=True, text=True, env=env, timeout=300)
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert "77" in proc.stdout
    assert proc.stdout.count("PASS") == 2
