import json

import pytest

from mix2cls import cli
from mix2cls.corpus import read_text
from mix2cls.parser import parse_classical, parse_file


@pytest.fixture
def corpus_file(tmp_path):
    def make(name):
        path = tmp_path / name
        path.write_text(read_text(name), encoding="utf-8")
        return str(path)
    return make


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check(capsys, corpus_file):
    code, out, _ = run(capsys, "check", corpus_file("fig1.mix"))
    assert code == 0 and "main: ok" in out


def test_check_ill_typed(capsys, corpus_file):
    code, out, _ = run(capsys, "check", corpus_file("illtyped.mix"))
    assert code == 1 and "Error" in out


def test_check_classical(capsys, corpus_file):
    assert run(capsys, "check-classical", corpus_file("fig3.cls"))[0] == 0


def test_parse_error(capsys, tmp_path):
    bad = tmp_path / "bad.mix"
    bad.write_text("lin x (m!3.0 +)")
    code, _, err = run(capsys, "check", str(bad))
    assert code == 2 and "parse error" in err


def test_missing_file(capsys, tmp_path):
    assert run(capsys, "check", str(tmp_path / "nope.mix"))[0] == 2


def test_unknown_decl(capsys, corpus_file):
    assert run(capsys, "check", corpus_file("fig1.mix"), "--decl", "other")[0] == 2


def test_translate_round_trips(capsys, corpus_file, tmp_path):
    out_path = tmp_path / "out.cls"
    code, _, _ = run(capsys, "translate", corpus_file("fig1.mix"), "-o", str(out_path))
    assert code == 0
    sf = parse_file(out_path.read_text())
    assert sf.calculus == "classical"
    assert run(capsys, "check-classical", str(out_path))[0] == 0


def test_translate_sepi(capsys, corpus_file):
    code, out, _ = run(capsys, "translate", "--sepi", corpus_file("fig3.mix"))
    assert code == 0 and "u_1" in out
    body = "\n".join(l for l in out.splitlines() if not l.startswith("//"))
    assert parse_classical(body, sepi=True) is not None


def test_translate_json(capsys, corpus_file):
    code, out, _ = run(capsys, "translate", "--json", corpus_file("fig2.mix"))
    doc = json.loads(out)
    assert code == 0 and doc["schema"] == 1 and doc["name"] == "main"


def test_translate_sepi_and_json_exclusive(corpus_file):
    with pytest.raises(SystemExit):
        cli.main(["translate", "--sepi", "--json", corpus_file("fig1.mix")])


def test_run_and_dot(capsys, corpus_file, tmp_path):
    dot = tmp_path / "g.dot"
    code, out, _ = run(capsys, "run", corpus_file("fig1.cls"), "--depth", "6", "--dot", str(dot))
    assert code == 0 and "states" in out
    assert dot.read_text().startswith("digraph")


def test_verify_completeness(capsys, corpus_file):
    code, out, _ = run(capsys, "verify", corpus_file("fig1.mix"), "--claim", "completeness")
    assert code == 0 and "witness: s3t3 xy" in out


def test_verify_inconclusive(capsys, corpus_file):
    code, _, _ = run(capsys, "verify", corpus_file("fig1.mix"), "--claim", "completeness", "--depth", "2")
    assert code == 3


def test_verify_needs_file(capsys):
    assert run(capsys, "verify", "--claim", "barbs")[0] == 2


def test_verify_ndchoice_json(capsys):
    code, out, _ = run(capsys, "verify", "--claim", "ndchoice", "--n", "2", "--n", "3", "--json", "-")
    doc = json.loads(out[out.index("{"):])
    assert code == 0 and [r["subject"] for r in doc["reports"]] == ["n=2", "n=3"]


def test_verify_counterexample(capsys, corpus_file):
    code, out, _ = run(capsys, "verify", corpus_file("barb_un.mix"), "--claim", "counterexample")
    assert code == 0 and "u1v1" in out


def test_corpus(capsys):
    code, out, _ = run(capsys, "corpus")
    assert code == 0 and out.rstrip().endswith("checks passed")


def test_depth_from_environment(monkeypatch):
    monkeypatch.setenv("MIX2CLS_DEPTH", "7")
    args = cli.build_parser().parse_args(["run", "x.mix"])
    assert args.depth == 7


def test_bad_depth_environment(monkeypatch):
    monkeypatch.setenv("MIX2CLS_DEPTH", "deep")
    with pytest.raises(SystemExit):
        cli.build_parser()
