import csv
import io
import json
import subprocess
import sys

import pytest

from ramfiltre.cli import EXIT_DOMAIN, EXIT_MISMATCH, EXIT_OK, EXIT_VERIFY, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def compute_json(capsys, *argv):
    code, out, _ = run(capsys, "compute", "--format", "json", *argv)
    assert code == EXIT_OK
    return json.loads(out), out


def test_compute_small_divisible(capsys):
    doc, _ = compute_json(capsys, "--p", "3", "--r", "2", "--s", "1", "--vclass", "div")
    assert [lv["jump"] for lv in doc["levels"]] == ["0", "1", "4"]
    assert [lv["group_order"] for lv in doc["levels"]] == ["18", "9", "3"]
    assert doc["different_valuation"] == "31"
    assert doc["herbrand"]["phi_slopes"] == ["1/2", "1/6", "1/18"]


def test_compute_tame(capsys):
    doc, _ = compute_json(capsys, "--p", "3", "--r", "2", "--s", "1", "--vclass", "div", "--tame", "5:1")
    assert [lv["jump"] for lv in doc["levels"]][1:] == ["5", "20"]
    assert doc["D"] == "5"


def test_compute_nondivisible_example_labels(capsys):
    doc, _ = compute_json(capsys, "--p", "3", "--r", "4", "--s", "1,2,3", "--vclass", "nondiv")
    levels = doc["levels"][1:]
    assert len(levels) == 7
    fourth = levels[3]["fixed_field"]
    assert (fourth["r"], fourth["s"]) == ("2", ["1", "2", "1"])


def test_json_is_canonical(capsys):
    doc, raw = compute_json(capsys, "--p", "5", "--r", "3", "--s", "1,2", "--vclass", "nondiv", "--tame", "2:1,7:1")
    assert json.dumps(doc, sort_keys=True, indent=2) + "\n" == raw

    def no_numbers(x):
        if isinstance(x, dict):
            return all(no_numbers(v) for v in x.values())
        if isinstance(x, list):
            return all(no_numbers(v) for v in x)
        return isinstance(x, (str, bool))

    assert no_numbers(doc)


def test_csv_matches_json(capsys):
    args = ["--p", "3", "--r", "3", "--s", "1,2", "--vclass", "div", "--tame", "5:1"]
    doc, _ = compute_json(capsys, *args)
    code, out, _ = run(capsys, "compute", "--format", "csv", *args)
    assert code == EXIT_OK
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["path", "value"]
    table = dict(rows[1:])
    assert table["levels/2/jump"] == doc["levels"][2]["jump"]
    assert table["herbrand/phi_breakpoints/1/1"] == doc["herbrand"]["phi_breakpoints"][1][1]
    assert table["spec/p2_asserted"] == "false"
    leaves = sum(1 for _ in rows[1:])
    assert leaves == len(table)


def test_text_output(capsys):
    code, out, _ = run(capsys, "compute", "--p", "3", "--r", "2", "--s", "1", "--vclass", "div")
    assert code == EXIT_OK
    assert "different valuation: 31" in out


@pytest.mark.parametrize(
    "argv,want",
    [
        (["--r", "2", "--s", "1", "--k", "1", "--vclass", "div"], "4"),
        (["--r", "2", "--s", "1,1", "--k", "3", "--vclass", "nondiv"], "13"),
        (["--r", "1", "--s", "1", "--k", "2", "--vclass", "nondiv"], "3"),
    ],
)
def test_jump(capsys, argv, want):
    code, out, _ = run(capsys, "jump", "--p", "3", *argv)
    assert code == EXIT_OK
    assert out.strip() == want


def test_jump_both_paths(capsys):
    code, out, _ = run(capsys, "jump", "--p", "5", "--r", "5", "--s", "2,3", "--k", "2", "--vclass", "div", "--path", "both")
    assert code == EXIT_OK
    closed, rec = out.split()[1::2]
    assert closed == rec


def test_jump_both_paths_mismatch(capsys, monkeypatch):
    import ramfiltre.cli as cli

    monkeypatch.setattr(cli, "t_closed", lambda q: 0)
    code, _, _ = run(capsys, "jump", "--p", "3", "--r", "3", "--s", "2", "--k", "2", "--vclass", "div", "--path", "both")
    assert code == EXIT_MISMATCH


@pytest.mark.parametrize(
    "argv",
    [
        ["compute", "--p", "4", "--r", "2", "--s", "1", "--vclass", "div"],
        ["compute", "--p", "2", "--r", "2", "--s", "1", "--vclass", "div"],
        ["compute", "--p", "3", "--r", "1", "--s", "2", "--vclass", "div"],
        ["compute", "--p", "3", "--r", "2", "--s", "1,x", "--vclass", "div"],
        ["compute", "--p", "3", "--r", "2", "--s", "1", "--vclass", "div", "--tame", "3:1"],
        ["jump", "--p", "3", "--r", "1", "--s", "1", "--k", "1", "--vclass", "div"],
        ["verify", "--grid", "nonsense=1"],
        ["verify", "--mutate", "nonsense"],
        ["table", "--p", "3", "--n", "1", "--rmax", "2", "--vclass", "div", "--k", "5"],
    ],
)
def test_domain_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_DOMAIN
    assert err.startswith("error:")


def test_p2_with_assertion(capsys):
    code, _, _ = run(capsys, "compute", "--p", "2", "--r", "2", "--s", "1", "--vclass", "div", "--assert-p2")
    assert code == EXIT_OK


def test_verify_quick_and_mutation(capsys):
    code, out, _ = run(capsys, "verify", "--grid", "quick", "--jobs", "1")
    assert code == EXIT_OK and out.rstrip().endswith("PASS")
    code, out, _ = run(capsys, "verify", "--grid", "quick", "--jobs", "1", "--mutate", "t12_const")
    assert code == EXIT_VERIFY
    assert out.count("FAIL ") <= 20


def test_verify_env_override(capsys, monkeypatch):
    monkeypatch.setenv("RAMFILTRE_GRID", "empty")
    code, out, err = run(capsys, "verify", "--format", "json")
    assert code == EXIT_OK
    assert json.loads(out)["checks_run"] == "0"
    assert "warning" in err


def test_verify_list_mutations(capsys):
    code, out, _ = run(capsys, "verify", "--list-mutations")
    assert code == EXIT_OK
    assert "t12_const" in out.split()


def test_table(capsys):
    code, out, _ = run(capsys, "table", "--p", "3", "--n", "1", "--rmax", "4", "--vclass", "div")
    assert code == EXIT_OK
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["r", "s1", "k", "jump"]
    assert ["4", "2", "2", "13"] in rows
    code, out, _ = run(capsys, "table", "--p", "3", "--n", "1", "--rmax", "1", "--vclass", "nondiv", "--k", "1")
    assert out.splitlines()[1:] == ["1,1,1,0"]


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "ramfiltre", "jump", "--p", "3", "--r", "4", "--s", "2", "--k", "2", "--vclass", "div"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == "13"
