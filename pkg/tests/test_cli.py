import json
import subprocess
import sys

import pytest

from treecast.cli import EXIT_BUDGET, EXIT_CAP, EXIT_FAIL, EXIT_INPUT, EXIT_OK, EXIT_STRATEGY, main
from treecast.trees import Schedule, path_tree, star_tree


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_simulate_path(capsys):
    code, out, _ = run(capsys, "simulate", "--adversary", "path", "--n", "6")
    assert code == EXIT_OK
    assert "t*=5" in out and "PASS" in out


def test_simulate_file_star(tmp_path, capsys):
    p = tmp_path / "star4.json"
    p.write_text(Schedule((star_tree(4),)).to_json())
    code, out, _ = run(capsys, "simulate", "--adversary", "file", "--input", str(p))
    assert code == EXIT_OK and "t*=1" in out


def test_simulate_greedy_n100(capsys):
    code, out, _ = run(capsys, "simulate", "--adversary", "greedy", "--n", "100", "--pool", "64", "--seed", "7")
    assert code == EXIT_OK
    assert "window=[148,241]" in out and "upper bound check: PASS" in out


def test_simulate_malformed_schedule(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"n": 3, "trees": [{"root": 0, "parent": [0, 0, 1]}, {"root": 1, "parent": [0, 0, 1]}]}))
    code, _, err = run(capsys, "simulate", "--adversary", "file", "--input", str(p))
    assert code == EXIT_INPUT and "tree 1" in err


def test_simulate_cap_reached(tmp_path, capsys):
    code, out, _ = run(capsys, "simulate", "--adversary", "path", "--n", "6", "--cap", "2")
    assert code == EXIT_CAP and "cap reached" in out


def test_simulate_exports_are_deterministic(tmp_path, capsys):
    outs = []
    for i in range(2):
        p = tmp_path / f"t{i}.json"
        run(capsys, "simulate", "--adversary", "random", "--n", "8", "--seed", "3", "--format", "json", "--output", str(p))
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]


def test_simulate_csv_stdout(capsys):
    code, out, _ = run(capsys, "simulate", "--adversary", "path", "--n", "3", "--format", "csv")
    assert code == EXIT_OK
    assert out == "round,popcount,broadcaster\n1,5,\n2,6,0\n"


def test_trace_reimport_roundtrip(tmp_path, capsys):
    p = tmp_path / "trace.json"
    run(capsys, "simulate", "--adversary", "greedy", "--n", "5", "--format", "json", "--output", str(p))
    tstar = json.loads(p.read_text())["tstar"]
    code, out, _ = run(capsys, "simulate", "--adversary", "file", "--input", str(p))
    assert code == EXIT_OK and f"t*={tstar}" in out
    code, out, _ = run(capsys, "verify", "--input", str(p))
    assert code == EXIT_OK and out.startswith("PASS")


def test_unknown_adversary_rejected():
    with pytest.raises(SystemExit) as info:
        main(["simulate", "--adversary", "oracle", "--n", "4"])
    assert info.value.code == 2


def test_search_n2(capsys):
    code, out, _ = run(capsys, "search", "--n", "2")
    assert code == EXIT_OK
    assert out.splitlines()[0] == "n=2 t*=1 window=[1,4] PASS"


def test_search_n4_output(tmp_path, capsys):
    p = tmp_path / "r.json"
    code, out, _ = run(capsys, "search", "--n", "4", "--output", str(p))
    assert code == EXIT_OK and "replay=OK" in out
    obj = json.loads(p.read_text())
    assert obj["window"] == {"lower": 4, "upper": 9}
    assert 4 <= obj["tstar"] <= 9
    code, out, _ = run(capsys, "verify", "--input", str(p))
    assert code == EXIT_OK and "witness replay: OK" in out


def test_search_modes_agree(capsys):
    _, a, _ = run(capsys, "search", "--n", "3", "--canonicalize")
    _, b, _ = run(capsys, "search", "--n", "3", "--no-canonicalize")
    assert a.splitlines()[0] == b.splitlines()[0]


def test_search_output_byte_identical(tmp_path, capsys):
    files = []
    for i in range(2):
        p = tmp_path / f"r{i}.json"
        run(capsys, "search", "--n", "4", "--output", str(p))
        files.append(p.read_bytes())
    assert files[0] == files[1]


def test_search_out_of_range(capsys):
    code, _, err = run(capsys, "search", "--n", "6")
    assert code == EXIT_INPUT and "expensive" in err


def test_search_budget_exit(capsys):
    code, _, err = run(capsys, "search", "--n", "5", "--max-entries", "50")
    assert code == EXIT_BUDGET and "budget" in err


def test_verify_detects_tampered_result(tmp_path, capsys):
    p = tmp_path / "r.json"
    run(capsys, "search", "--n", "3", "--output", str(p))
    obj = json.loads(p.read_text())
    obj["tstar"] = 20
    p.write_text(json.dumps(obj))
    code, out, _ = run(capsys, "verify", "--input", str(p))
    assert code == EXIT_FAIL and "FAIL" in out


def test_bounds_table(capsys):
    code, out, _ = run(capsys, "bounds", "--n", "2..5", "--format", "csv")
    assert code == EXIT_OK
    assert out == "n,lower,upper\n2,1,4\n3,2,7\n4,4,9\n5,5,12\n"


def test_bounds_clamp_and_n100(capsys):
    _, out, _ = run(capsys, "bounds", "--n", "1")
    assert "lower clamped" in out and out.splitlines()[1].split()[:3] == ["1", "0", "2"]
    _, out, _ = run(capsys, "bounds", "--n", "100", "--format", "csv")
    assert out.splitlines()[1] == "100,148,241"


@pytest.mark.parametrize("n,count", [(1, 1), (3, 9), (5, 625)])
def test_enumerate(capsys, n, count):
    code, out, _ = run(capsys, "enumerate", "--n", str(n))
    assert code == EXIT_OK and out.strip() == str(count)


def test_enumerate_dump(tmp_path, capsys):
    p = tmp_path / "all.json"
    run(capsys, "enumerate", "--n", "3", "--dump", str(p))
    assert len(Schedule.from_json(p.read_text())) == 9


def test_enumerate_too_large(capsys):
    code, _, _ = run(capsys, "enumerate", "--n", "8")
    assert code == EXIT_INPUT


def test_exit_code_constants_distinct():
    assert len({EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_STRATEGY, EXIT_CAP, EXIT_BUDGET}) == 6


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "treecast", "simulate", "--adversary", "path", "--n", "4"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and "t*=3" in proc.stdout
