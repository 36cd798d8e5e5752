import json
import subprocess
import sys

import pytest

from lowdisc import experiments
from lowdisc.cli import run


def out(capsys, argv):
    code = run(argv)
    return code, capsys.readouterr()


def test_dedekind_exact(capsys):
    code, cap = out(capsys, ["dedekind", "--a", "1", "--b", "3", "--p", "2", "--method", "exact",
                             "--include-k0", "false"])
    assert code == 0 and cap.out.strip() == "1/162"
    code, cap = out(capsys, ["dedekind", "--a", "1", "--b", "3", "--p", "2", "--include-k0", "true"])
    assert cap.out.strip() == "11/324"


def test_cf(capsys):
    code, cap = out(capsys, ["cf", "--alpha", "7/5", "--terms", "10"])
    assert code == 0 and cap.out.strip() == "[1; 2, 2]"
    code, cap = out(capsys, ["cf", "--alpha", "sqrt2", "--terms", "5", "--convergents"])
    assert cap.out.splitlines() == ["[1; 2, 2, 2, 2]", "1 1/1", "2 3/2", "3 7/5", "4 17/12", "5 41/29"]


def test_disc_exact(capsys):
    code, cap = out(capsys, ["disc", "--alpha", "phi", "--n", "1", "--method", "exact"])
    assert code == 0 and "l2sq = 4/9" in cap.out


def test_json_lines(capsys):
    code, cap = out(capsys, ["disc", "--alpha", "phi", "--n", "8", "--json"])
    rec = json.loads(cap.out)
    assert set(rec) >= {"n", "l2sq", "main_term", "cor4_term", "c_log_n", "residual_main_term"}
    code, cap = out(capsys, ["dsum", "--alpha", "1/3", "--p", "2", "--n", "2", "--json"])
    assert json.loads(cap.out)["value"] == "45/4"
    code, cap = out(capsys, ["dedekind", "--a", "1", "--b", "2", "--p", "2", "--method", "theorem2", "--json"])
    rec = json.loads(cap.out)
    assert rec["holds"] is True and rec["bound"] == "20"


def test_dsum_blocks(capsys):
    code, cap = out(capsys, ["dsum", "--alpha", "phi", "--p", "2", "--n", "12", "--blocks", "--json"])
    lines = [json.loads(x) for x in cap.out.splitlines()]
    assert [x["ell"] for x in lines[1:]] == [1, 2, 3, 4, 5, 6]
    assert lines[-1]["members_C"] == "8"


def test_dedekind_other_methods(capsys):
    code, cap = out(capsys, ["dedekind", "--a", "1", "--b", "1000", "--p", "2", "--method", "fast"])
    assert "estimate = 50/9" in cap.out and "rel_indicator = 1/1000" in cap.out
    code, cap = out(capsys, ["dedekind", "--a", "3", "--b", "5", "--p", "1", "--method", "barkan"])
    assert "estimate = 1/6" in cap.out and "exact = 0" in cap.out


@pytest.mark.parametrize("argv", [
    ["cf", "--alpha", "pi", "--terms", "3"],
    ["cf", "--terms", "3"],
    ["nosuch"],
    ["dedekind", "--a", "1", "--b", "3", "--p", "2", "--include-k0", "maybe"],
])
def test_usage_errors(capsys, argv):
    code, cap = out(capsys, argv)
    assert code == 2


def test_grammar_echoed(capsys):
    code, cap = out(capsys, ["dsum", "--alpha", "bogus", "--p", "2", "--n", "3"])
    assert code == 2 and "surd:P,D,Q" in cap.err


@pytest.mark.parametrize("argv", [
    ["dsum", "--alpha", "1/3", "--p", "2", "--n", "3"],
    ["dedekind", "--a", "2", "--b", "4", "--p", "2"],
    ["dedekind", "--a", "1", "--b", "3", "--p", "3", "--method", "theorem2"],
    ["disc", "--alpha", "1/2", "--n", "4", "--method", "exact"],
])
def test_domain_errors(capsys, argv):
    code, cap = out(capsys, argv)
    assert code == 3


def test_precision_cap_env(capsys, monkeypatch):
    monkeypatch.setenv("LOWDISC_MAX_BITS", "16")
    code, cap = out(capsys, ["disc", "--alpha", "sqrt2", "--n", "10", "--method", "exact"])
    assert code == 3 and "PrecisionExhausted" in cap.err


@pytest.mark.parametrize("name", ["pairwise-oracle", "dedekind-fast", "cor4-consistency"])
def test_experiment_roundtrip_and_determinism(tmp_path, capsys, name):
    f1, f2 = tmp_path / "a.csv", tmp_path / "b.csv"
    code1 = run(["experiment", name, "--out", str(f1)])
    code2 = run(["experiment", name, "--out", str(f2)])
    capsys.readouterr()
    t1, t2 = f1.read_text(), f2.read_text()
    strip = lambda t: [x for x in t.splitlines() if not x.startswith("# generated")]  # noqa: E731
    assert strip(t1) == strip(t2)
    assert code1 == code2 == (0 if name != "cor4-consistency" else 4)
    parsed = experiments.parse_csv(t1)
    assert parsed.ok == (code1 == 0)
    assert parsed.summary == experiments.run_experiment(name).summary


def test_experiment_help_lists_columns(capsys):
    code, cap = out(capsys, ["experiment", "--help"])
    assert code == 0
    for name, exp in experiments.EXPERIMENTS.items():
        assert name in cap.out and ",".join(exp.columns) in cap.out


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "lowdisc", "cf", "--alpha", "e", "--terms", "8"],
                         capture_output=True, text=True, check=True)
    assert res.stdout.strip() == "[2; 1, 2, 1, 1, 4, 1, 1]"
