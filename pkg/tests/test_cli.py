import io
import re

import pytest

from nestednets.cli import EXIT_CHECK, EXIT_FAULT, EXIT_LIMIT, EXIT_OK, main
from nestednets.program import Program, corpus_names, corpus_text


@pytest.fixture
def corpus(tmp_path):
    def path(name):
        p = tmp_path / f"{name}.inet"
        p.write_text(corpus_text(name))
        return str(p)
    return path


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def test_check_ok(corpus):
    code, out = run("check", corpus("gcd"))
    assert code == EXIT_OK and "ok (2 rules)" in out


def test_check_rejects_overlapping_rules(corpus):
    code, out = run("check", corpus("por"))
    assert code == EXIT_CHECK
    assert "[error 1a]" in out and "{'a': 0}" in out


def test_check_json(corpus):
    import json
    code, out = run("check", "--json", corpus("por"))
    diags = json.loads(out)
    assert code == EXIT_CHECK and diags[0]["clause"] == "1a" and diags[0]["witness"] == {"a": 0}


def test_check_rejects_case_on_bound_port(tmp_path):
    p = tmp_path / "bad.inet"
    p.write_text("symbols: f/1\nrules:\n"
                 "f(r) >< Cons(x)(xs) -> case xs of { Cons(y)(ys) -> case xs of "
                 "{ Nil -> r ~ ys } };\n")
    code, out = run("check", str(p))
    assert code == EXIT_CHECK and "not a free port" in out


def test_parse_error_exit(tmp_path, capsys):
    p = tmp_path / "bad.inet"
    p.write_text("rules: f(r) >< ;")
    code, _ = run("check", str(p))
    assert code == EXIT_CHECK
    assert re.search(r"bad.inet:1:\d+:", capsys.readouterr().err)


def test_translate_gcd(corpus, tmp_path):
    code, out = run("translate", corpus("gcd"))
    assert code == EXIT_OK
    prog = Program.parse(out)
    assert len(prog.rules) == 4
    assert {"gcd_Pair_tt", "gcd_Pair_tt_ot"} <= {s.name for s in prog.symbols}
    target = tmp_path / "flat.inet"
    assert run("translate", corpus("gcd"), "-o", str(target))[0] == EXIT_OK
    assert target.read_text() == out


@pytest.mark.parametrize("name", [n for n in corpus_names() if n != "por"])
def test_translate_output_checks_clean(name, corpus, tmp_path):
    code, out = run("translate", corpus(name))
    flat = tmp_path / "flat.inet"
    flat.write_text(out)
    assert run("check", str(flat))[0] == EXIT_OK
    # translating flat rules again changes nothing
    assert run("translate", str(flat))[1] == out


def test_translate_lastelt(corpus):
    out = run("translate", corpus("lastelt"))[1]
    assert len(Program.parse(out).rules) == 3


def test_translate_refuses_bad_program(corpus):
    assert run("translate", corpus("por"))[0] == EXIT_CHECK


def test_run_gcd(corpus):
    code, out = run("run", corpus("gcd"))
    lines = out.splitlines()
    assert code == EXIT_OK and lines[0] == "r ~ Int(7)" and lines[1] == "steps: 3"
    code, flat = run("run", corpus("gcd"), "--flat")
    assert flat.splitlines()[0] == "r ~ Int(7)"
    assert int(flat.splitlines()[1].split()[1]) >= 3


def test_run_mult(corpus):
    code, out = run("run", corpus("mult"), "--strategy", "random", "--seed", "4")
    assert out.splitlines()[0] == "r ~ S(S(S(S(S(S(Z))))))"


def test_run_trace(corpus, tmp_path):
    code, out = run("run", corpus("gcd"), "--trace")
    assert out.splitlines()[0] == "#1 gcd_Pair.2 gcd><Pair {b=14,a=21}"
    trace = tmp_path / "t.txt"
    run("run", corpus("gcd"), "--trace-file", str(trace))
    assert len(trace.read_text().splitlines()) == 3


def test_run_seed_from_environment(corpus, monkeypatch):
    monkeypatch.setenv("INET_SEED", "9")
    from nestednets.cli import build_parser
    args = build_parser().parse_args(["run", corpus("gcd")])
    assert args.seed == 9


def test_run_step_limit(corpus):
    code, out = run("run", corpus("mult"), "--max-steps", "5")
    assert code == EXIT_LIMIT and "step limit" in out


def test_run_runtime_fault(tmp_path):
    p = tmp_path / "div.inet"
    p.write_text("symbols: f/1\nrules: f(r) >< Int(a) -> r ~ Int(1 / a);\nnets: main: f(r) ~ Int(0);")
    assert run("run", str(p))[0] == EXIT_FAULT


def test_run_unknown_net(corpus):
    assert run("run", corpus("gcd"), "nope")[0] == EXIT_CHECK


def test_run_other_net(corpus):
    code, out = run("run", corpus("sumup"), "zero")
    assert out.splitlines()[0] == "r ~ Int(0)"


def test_bench_gcd(corpus):
    code, out = run("bench", corpus("gcd"), "--trials", "20")
    assert code == EXIT_OK
    assert "nested: PASS 22 orders" in out and "flat: PASS" in out
    assert "nested vs flat: PASS" in out


def test_bench_single_rule(tmp_path):
    p = tmp_path / "inc.inet"
    p.write_text("symbols: Inc/1\nrules: Inc(r) >< Int(v) -> r ~ Int(v + 1);\n"
                 "nets: main: Inc(r) ~ Int(1);")
    assert run("bench", str(p))[0] == EXIT_OK


def test_bench_unchecked_por_diverges(corpus):
    assert run("bench", corpus("por"))[0] == EXIT_CHECK
    code, out = run("bench", corpus("por"), "--unchecked")
    assert code == EXIT_CHECK
    assert "FAIL" in out and "r ~ Int(0)" in out and "r ~ Int(1)" in out


def test_module_entry_point(corpus):
    import subprocess
    import sys
    res = subprocess.run([sys.executable, "-m", "nestednets", "check", corpus("gcd")],
                         capture_output=True, text=True)
    assert res.returncode == 0
