import json

import pytest

from autoseq.automaton import isomorphic, minimize
from autoseq.builtins import BUILTINS, builtin_automaton
from autoseq.cli import main, parse_count
from autoseq.textfmt import parse_automaton_file


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run_cli(capsys, *argv, "--json")
    assert code == 0, err
    return json.loads(out)


@pytest.fixture
def tm_file(tmp_path, capsys):
    path = tmp_path / "thue-morse.aut"
    assert main(["builtin", "thue-morse", "-o", str(path)]) == 0
    capsys.readouterr()
    return path


def test_parse_count():
    assert parse_count("2^12") == 4096
    assert parse_count("2**10") == 1024
    assert parse_count("1e5") == 100000
    assert parse_count("3*2^10+5") == 3077


@pytest.mark.parametrize("name", list(BUILTINS))
def test_builtin_round_trip(tmp_path, capsys, name):
    path = tmp_path / f"{name}.aut"
    assert main(["builtin", name, "-o", str(path)]) == 0
    assert isomorphic(minimize(parse_automaton_file(path)), minimize(builtin_automaton(name)))


def test_eval(capsys, tm_file):
    data = run_json(capsys, "eval", str(tm_file), "--n", "3", "2^10")
    assert data["result"] == {"a(3)": 1, "a(1024)": -1}
    assert data["config"]["verb"] == "eval" and data["config"]["seed"] == 0


def test_eval_missing_initial_is_domain_error(tmp_path, capsys, tm_file):
    missing = tmp_path / "missing.aut"
    missing.write_text("".join(l for l in tm_file.read_text().splitlines(True) if not l.startswith("initial")))
    code, _, err = run_cli(capsys, "eval", str(missing), "--n", "5")
    assert code == 1 and "incomplete automaton" in err
    # structural analysis still works
    code, out, _ = run_cli(capsys, "analyze", str(missing))
    assert code == 0 and "skipped" in out


def test_usage_errors_exit_2(capsys, tm_file):
    for argv in (["frobnicate"], ["eval", str(tm_file)], ["sum", str(tm_file), "--N", "12", "--bogus"]):
        with pytest.raises(SystemExit) as info:
            main(argv)
        assert info.value.code == 2
    capsys.readouterr()


def test_parse_error_exit_1(tmp_path, capsys):
    bad = tmp_path / "bad.aut"
    bad.write_text("reading: lsd-first\nbase: 2\nstates: a\ndelta: a 0 a\n")
    code, _, err = run_cli(capsys, "analyze", str(bad))
    assert code == 1 and "line 4" in err


def test_analyze_thue_morse(capsys, tm_file):
    res = run_json(capsys, "analyze", str(tm_file))["result"]
    assert res["terminal[0].cycle_gcd"] == 1
    assert res["terminal[0].strongly_aperiodic"] is True
    assert res["invertible"] is True
    assert res["balanced"] is True and res["totally_balanced"] is True and res["q_bound"] == 12


def test_sup_consistent_with_decay(capsys, tm_file):
    res = run_json(capsys, "sup", str(tm_file), "--N", "2^12", "--err", "1e-4")["result"]
    assert res["err"] <= 1e-4
    # 2^(-cL) with c near 0.2075 at L = 12 is about 0.18
    assert 0.15 < res["sup"] < 0.22


def test_sum_methods_agree(capsys, tm_file):
    values = [
        run_json(capsys, "sum", str(tm_file), "--N", "2^11", "--phase", "lin:golden", "--method", m)["result"]
        for m in ("direct", "transfer", "interval")
    ]
    for v in values[1:]:
        assert v["re"] == pytest.approx(values[0]["re"], abs=1e-11)
        assert v["im"] == pytest.approx(values[0]["im"], abs=1e-11)


def test_restrict_writes_file(tmp_path, capsys, tm_file):
    out = tmp_path / "r.aut"
    res = run_json(capsys, "restrict", str(tm_file), "--q", "3", "--r", "1", "-o", str(out))["result"]
    a = parse_automaton_file(out)
    assert res["states"] == a.n_states
    tm = builtin_automaton("thue-morse")
    assert [a.eval(n) for n in range(50)] == [tm.eval(3 * n + 1) for n in range(50)]


def test_decompose(tmp_path, capsys):
    res = run_json(capsys, "decompose", "mod3", "-o", str(tmp_path / "d"))["result"]
    assert res["q"] == 3 and res["all_strongly_aperiodic"] and len(res["files"]) == 3
    res = run_json(capsys, "decompose", "gtm6", "--kind", "invertible", "-o", str(tmp_path / "i"))["result"]
    assert res["per"] == [1, -1] and res["bal_totally_balanced"]
    code, _, err = run_cli(capsys, "decompose", "nu2-parity", "--kind", "invertible")
    assert code == 1 and "does not admit a decomposition" in err


def test_decay_verbs(capsys):
    res = run_json(capsys, "decay", "const", "--weight", "rat:1/3", "--L", "4:10")["result"]
    assert res["c"] == pytest.approx(1.0)
    code, _, err = run_cli(capsys, "decay", "nu2-parity")
    assert code == 1 and "not balanced" in err


def test_ergodic_verbs(capsys):
    res = run_json(
        capsys, "ergodic", "--system", "skew:alpha=sqrt2", "--observable", "char:1",
        "--weight", "thue-morse", "--p", "poly:0,0,1", "--points", "8", "--N", "2^10,2^12,2^14",
    )["result"]
    assert res["consistent_with_zero"] and res["totally_ergodic"]
    res = run_json(capsys, "ergodic", "--demo", "counterexample", "--n-max", "2^16")["result"]
    assert res["closed_form_ok"] and res["halving_ok"]


def test_output_is_deterministic(capsys):
    argv = ["ergodic", "--system", "rotation:alpha=golden", "--observable", "char:1", "--weight", "rudin-shapiro", "--N", "2^10,2^11", "--seed", "7"]
    first = run_cli(capsys, *argv)
    second = run_cli(capsys, *argv)
    assert first == second and first[0] == 0


def test_options_before_or_after_verb(capsys):
    a = json.loads(run_cli(capsys, "--json", "--seed", "3", "eval", "thue-morse", "--n", "5")[1])
    b = json.loads(run_cli(capsys, "eval", "thue-morse", "--n", "5", "--json", "--seed", "3")[1])
    assert a == b and a["config"]["seed"] == 3


def test_check_subset(capsys):
    res = run_json(capsys, "check", "--only", "normalization idempotence", "partial sums")["result"]
    assert res["passed"] is True and len(res) == 3
