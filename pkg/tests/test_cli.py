import pytest

from shiqcq.cli import main


def call(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def files(corpus, name):
    return ["--kb", str(corpus / f"{name}.shiq"), "--query", str(corpus / f"{name}.cq")]


@pytest.mark.parametrize("name, code, verdict", [("e1", 0, "entailed"), ("e2", 1, "not_entailed"),
                                                 ("e3", 0, "entailed"), ("chain", 0, "entailed")])
def test_entail_exit_codes(capsys, corpus, name, code, verdict):
    got, out, _ = call(capsys, "entail", *files(corpus, name))
    assert got == code
    assert out.split()[0] == f"verdict={verdict}"


def test_not_entailed_prints_witness_and_countermodel(capsys, corpus):
    _, out, _ = call(capsys, "entail", *files(corpus, "e2"))
    assert "witness:" in out and "countermodel:" in out


def test_low_blocking_depth_warns_and_exits_two_on_a_negative(capsys, corpus, tmp_path):
    kb = tmp_path / "k.shiq"
    kb.write_text("trans R.\naxiom A <= (or B C).\nassert A(a).\n")
    q = tmp_path / "q.cq"
    q.write_text("B(a)\n")
    code, out, err = call(capsys, "entail", "--kb", str(kb), "--query", str(q), "--blocking-depth", "1")
    assert code == 2
    assert err.startswith("warning:")
    assert "complete=false" in out


def test_sat(capsys, corpus):
    assert call(capsys, "sat", "--kb", str(corpus / "e1.shiq"))[:2] == (0, "satisfiable=true\n")
    assert call(capsys, "sat", "--kb", str(corpus / "unsat.shiq"))[:2] == (1, "satisfiable=false\n")


def test_countermodel(capsys, corpus):
    code, out, _ = call(capsys, "countermodel", *files(corpus, "e2"), "--oracle-domain", "1")
    assert code == 0 and out.startswith("countermodel=found domain=1")
    code, out, _ = call(capsys, "countermodel", *files(corpus, "e1"), "--oracle-domain", "2")
    assert (code, out) == (1, "countermodel=none max_domain=2\n")


def test_dump_forest_limit(capsys, corpus):
    code, out, _ = call(capsys, "dump-forest", "--kb", str(corpus / "e2.shiq"), "--limit", "2")
    assert code == 0
    assert out.count("forest ") == 2 and out.rstrip().endswith("forests=2")
    code, out, _ = call(capsys, "dump-forest", "--kb", str(corpus / "unsat.shiq"))
    assert (code, out) == (1, "forests=0\n")


def test_validate(capsys, tmp_path):
    bad = tmp_path / "bad.shiq"
    bad.write_text("trans R.\nassert (atmost 1 R B)(a).\n")
    code, out, _ = call(capsys, "validate", "--kb", str(bad))
    assert code == 1
    assert out.startswith("issue ") and out.rstrip().endswith("valid=false")
    bad.write_text("assert A(a).\n")
    assert call(capsys, "validate", "--kb", str(bad))[:2] == (0, "valid=true\n")


def test_budget_abort_reports(capsys, tmp_path):
    kb = tmp_path / "k.shiq"
    kb.write_text("axiom A <= (some R A).\naxiom A <= (or B C).\nassert A(a).\n")
    code, out, _ = call(capsys, "sat", "--kb", str(kb), "--max-forests", "1", "--blocking-depth", "3")
    assert code == 2
    assert out.startswith("reason=max_forests") and "budget_hit=true" in out


@pytest.mark.parametrize(
    "argv, fragment",
    [
        (["entail", "--kb", "{e1}"], "needs --query"),
        (["sat", "--kb", "{missing}"], "cannot read"),
        (["sat", "--kb", "{garbage}"], "expected"),
        (["entail", "--kb", "{e1}", "--query", "{unknown}"], "error:"),
    ],
)
def test_usage_errors_exit_two(capsys, corpus, tmp_path, argv, fragment):
    (tmp_path / "g.shiq").write_text("assert A(a\n")
    (tmp_path / "u.cq").write_text("B(zz)\n")
    names = {"e1": corpus / "e1.shiq", "missing": tmp_path / "nope.shiq", "garbage": tmp_path / "g.shiq",
             "unknown": tmp_path / "u.cq"}
    code, _, err = call(capsys, *[a.format(**names) for a in argv])
    assert code == 2
    assert err.startswith("error:") and fragment in err


def test_argument_errors_exit_two(capsys, corpus):
    assert call(capsys, "bogus")[0] == 2
    assert call(capsys, "sat", "--kb", str(corpus / "e1.shiq"), "--blocking-depth", "0")[0] == 2
