import csv
import io
import json
import subprocess
import sys

import pytest

from carletlab import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_exceptional_table_csv(capsys):
    code, out, _ = run(capsys, "exceptional-table")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 32
    assert rows[0] == {"delta": "6", "r_opt": "2", "computed_bound": "4755.719",
                       "threshold": "4686.426", "verdict": "Fail"}


def test_exceptional_table_json(capsys):
    code, out, _ = run(capsys, "--format", "json", "exceptional-table")
    assert code == 0 and len(json.loads(out)) == 32


def test_verify_planes_expected_sets(capsys):
    code, out, _ = run(capsys, "verify-planes", "--delta-min", "3", "--delta-max", "10000", "--constant", "1.99")
    assert code == 0
    assert json.loads(out)["failures"] == list(range(6, 38))
    code, out, _ = run(capsys, "verify-planes", "--delta-min", "3", "--delta-max", "10000", "--constant", "2043/1000")
    assert code == 0 and json.loads(out)["failures"] == []


def test_verify_planes_unexpected_failures(capsys):
    code, _, err = run(capsys, "verify-planes", "--delta-min", "3", "--delta-max", "100",
                       "--constant", "2", "--expect-failures", "6-10")
    assert code == 2 and "differs" in err


def test_verify_planes_usage(capsys):
    code, _, err = run(capsys, "verify-planes", "--delta-min", "5", "--delta-max", "3")
    assert code == 1 and "--delta-min" in err
    with pytest.raises(SystemExit) as exc:
        cli.main(["verify-planes", "--delta-min", "3", "--delta-max", "9", "--constant", "x/y"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        cli.main(["no-such-command"])
    assert exc.value.code == 1


def test_verify_planes_checkpoint(tmp_path, capsys):
    ck = tmp_path / "ck.json"
    code, _, _ = run(capsys, "verify-planes", "--delta-min", "3", "--delta-max", "500",
                     "--checkpoint", str(ck), "--checkpoint-every", "100")
    assert code == 0 and json.loads(ck.read_text())["last_delta"] == 500
    ck.write_text("{broken")
    code, _, err = run(capsys, "verify-planes", "--delta-min", "3", "--delta-max", "500", "--checkpoint", str(ck))
    assert code == 3 and "checkpoint" in err


def test_threads_env(monkeypatch, capsys):
    monkeypatch.setenv("CARLETLAB_THREADS", "2")
    code, out, _ = run(capsys, "verify-planes", "--delta-min", "3", "--delta-max", "800")
    assert code == 0 and json.loads(out)["failures"] == list(range(6, 38))
    code, _, _ = run(capsys, "--threads", "0", "exceptional-table")
    assert code == 1


def test_max_ratio(capsys):
    code, out, _ = run(capsys, "max-ratio", "--delta-max", "300")
    assert code == 0 and json.loads(out)["delta_argmax"] == 8


def test_asymptotic(capsys):
    code, out, _ = run(capsys, "asymptotic")
    data = json.loads(out)
    assert code == 0 and data["tail"]["verdict"] == "Certified"
    lo, hi = map(float, data["leading_coefficient"])
    assert lo <= 1.98855 + 1e-4 and hi >= 1.98855 - 1e-4
    assert run(capsys, "asymptotic", "--m", "1000")[0] == 1


def test_derive_g(capsys):
    code, out, _ = run(capsys, "derive-g", "--b", "2.043", "--delta-min", "8", "--g-claimed", "2.741")
    assert code == 0 and json.loads(out)["verdict"] == "Pass"
    code, _, _ = run(capsys, "derive-g", "--b", "2.043", "--delta-min", "3", "--g-claimed", "2.9")
    assert code == 2


def test_estimate(capsys):
    code, out, _ = run(capsys, "estimate", "--delta", "4", "--n", "3", "--q", "32", "--mode", "g2924")
    assert code == 0 and "error_bound" in json.loads(out)
    assert run(capsys, "estimate", "--delta", "4", "--n", "3", "--q", "6", "--mode", "g2924")[0] == 1


def test_carlet_table(capsys):
    code, out, err = run(capsys, "carlet-table", "--k-min", "4", "--k-max", "12")
    assert code == 0 and "warning: k=4" in err
    rows = list(csv.DictReader(io.StringIO(out)))
    assert {r["k"]: r["n_min"] for r in rows}["9"] == "37"


def test_carlet_asymptotic(capsys):
    code, out, _ = run(capsys, "carlet-asymptotic")
    assert code == 0 and json.loads(out)["y0_chain_holds"] is True
    assert run(capsys, "carlet-asymptotic", "--k", "50")[0] == 1


def test_sumfree(capsys):
    code, out, _ = run(capsys, "sumfree", "--n", "6", "--all-k")
    assert code == 0
    assert {r["k"] for r in json.loads(out) if r["sum_free"]} == {1, 5}
    code, out, _ = run(capsys, "sumfree", "--n", "5", "--k", "2", "--alternate-modulus")
    assert code == 0 and json.loads(out)["sum_free"] is True
    assert run(capsys, "sumfree", "--n", "20", "--k", "10")[0] == 4
    assert run(capsys, "sumfree", "--n", "6")[0] == 1
    assert run(capsys, "sumfree", "--n", "8", "--k", "4", "--budget", "1000")[0] == 4


def test_variety_and_cross_check(capsys):
    code, out, _ = run(capsys, "variety", "--n", "5", "--k", "3")
    assert code == 0 and json.loads(out)["difference"] == 0
    code, out, _ = run(capsys, "cross-check", "--n", "6", "--k", "3")
    data = json.loads(out)
    assert code == 0 and data["implication_holds"] and not data["sum_free"]
    assert run(capsys, "variety", "--n", "9", "--k", "3")[0] == 4


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "carletlab", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "verify-planes" in proc.stdout
