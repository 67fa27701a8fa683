import json
import subprocess
import sys

import pytest

from regugame.cli import main, parse_grid
from regugame.game import game, decision, terminal
from regugame.models import baseline

BASELINE = {
    "price_organic": 12, "price_conventional": 8, "cost_organic": 7, "cost_conventional": 3,
    "utility_organic": 14, "utility_conventional": 8, "monitor_cost": 0, "penalty": 0,
    "reputation_loss": 0, "audit_prob": 0.5,
}
TABLE2 = {
    "row_player": "Supplier", "col_player": "Retailer",
    "row_actions": ["Organic", "Non-organic"], "col_actions": ["Monitor", "Not Monitor"],
    "payoffs": [[[15, -30], [15, 100]], [[-20, -75], [35, -160]]],
}


@pytest.fixture
def write_json(tmp_path):
    def write(name, doc):
        path = tmp_path / name
        path.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
        return str(path)
    return write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_demo_prints_table(capsys, write_json):
    code, out, err = run(capsys, "demo", "--params", write_json("p.json", BASELINE))
    assert code == 0 and err == ""
    assert "| 1 | -4 + 4/1 | 0 |" in out
    assert "| 0.2 | -4 + 4/0.2 | 16 |" in out


def test_demo_csv_and_json(capsys):
    code, out, _ = run(capsys, "demo", "--format", "csv")
    assert code == 0 and out.splitlines()[-1] == "1,1,0,0"
    code, out, _ = run(capsys, "demo", "--format", "json")
    doc = json.loads(out)
    assert doc["honest"] == 5 and doc["r_feasible"] is False
    assert [row["p_min_exact"] for row in doc["min_penalty"]] == ["16", "6", "8/3", "1", "0"]


def test_thresholds_consumer(capsys, write_json):
    code, out, _ = run(capsys, "thresholds", "--scenario", "consumer", "--params", write_json("p.json", BASELINE))
    assert code == 0
    assert "p_min = 4, m_max = 6" in out


def test_thresholds_third_party_json(capsys):
    code, out, _ = run(capsys, "thresholds", "--scenario", "third-party", "--format", "json")
    doc = json.loads(out)
    assert doc["p_min"] == 4 and doc["verdict"] == "FraudRisk"


def test_bimatrix_table2(capsys, write_json):
    code, out, _ = run(capsys, "bimatrix", "--params", write_json("b.json", TABLE2))
    assert code == 0
    assert "no pure NE; mixed: row 0.3953, col 0.3636" in out
    code, out, _ = run(capsys, "bimatrix", "--params", write_json("b.json", TABLE2), "--format", "json")
    doc = json.loads(out)
    assert doc["mixed"]["row_prob_exact"] == "17/43" and doc["pure_nash"] == []


def test_solve_scenario_and_raw_game(capsys, write_json):
    code, out, _ = run(capsys, "solve", "--scenario", "third-party", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["chosen"]["/"] == "organic"
    raw = game(["A", "B"], decision(0, [("L", terminal(1, 0)), ("R", terminal(0, 1))])).to_dict()
    code, out, _ = run(capsys, "solve", "--params", write_json("g.json", raw), "--format", "json")
    assert code == 0 and json.loads(out)["path"] == ["L"]


def test_solve_tie_break_flag(capsys, write_json):
    raw = game(["A"], decision(0, [("z", terminal(1)), ("a", terminal(1))])).to_dict()
    path = write_json("g.json", raw)
    _, out, _ = run(capsys, "solve", "--params", path, "--format", "json", "--tie-break", "lex")
    assert json.loads(out)["chosen"]["/"] == "a"
    _, out, _ = run(capsys, "solve", "--params", path, "--format", "json", "--tie-break", "first")
    assert json.loads(out)["chosen"]["/"] == "z"


def test_sweep(capsys):
    code, out, _ = run(capsys, "sweep", "--grid", "0.2:1.0:5", "--format", "csv")
    lines = out.splitlines()
    assert code == 0 and len(lines) == 6
    assert [line.split(",")[3] for line in lines[1:]] == ["16", "6", "8/3", "1", "0"]


def test_exit_codes(capsys, write_json):
    assert run(capsys, "demo", "--params", write_json("bad.json", "{oops"))[0] == 2
    bad = dict(BASELINE, price_organic=1)
    code, out, err = run(capsys, "thresholds", "--scenario", "consumer", "--params", write_json("bad.json", bad))
    assert code == 2 and out == "" and "error" in err
    code, out, err = run(capsys, "sweep", "--grid", "0:1:3")
    assert code == 1 and out == "" and "infeasible" in err
    assert run(capsys, "solve")[0] == 2  # no scenario, no game
    assert run(capsys, "sweep", "--grid", "1:2")[0] == 2
    invalid_game = {"players": ["A"], "root": {"type": "chance", "branches": [
        {"label": "h", "prob": 0.6, "child": {"type": "terminal", "payoff": [1]}},
        {"label": "t", "prob": 0.6, "child": {"type": "terminal", "payoff": [0]}}]}}
    assert run(capsys, "solve", "--params", write_json("g.json", invalid_game))[0] == 2


def test_out_file(capsys, tmp_path):
    target = tmp_path / "demo.md"
    code, out, _ = run(capsys, "demo", "--out", str(target))
    assert code == 0 and out == ""
    assert "honest = 5" in target.read_text()


def test_env_format_default(monkeypatch, capsys):
    monkeypatch.setenv("REGUGAME_FORMAT", "csv")
    _, out, _ = run(capsys, "demo")
    assert out.startswith("r,r_exact,p_min,p_min_exact\n")


def test_parse_grid():
    assert parse_grid("0.2:1.0:5") == tuple(x for x in (baseline(audit_prob=v).audit_prob
                                                          for v in (0.2, 0.4, 0.6, 0.8, 1.0)))
    assert parse_grid("3:9:1") == (3,)


def test_demo_subprocess_deterministic():
    cmd = [sys.executable, "-m", "regugame.cli", "demo"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and b"r_bound = 14/9" in a
