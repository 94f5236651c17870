import io
import subprocess
import sys
from pathlib import Path

import pytest

from hilbertsem.cli import main
from hilbertsem.models import eval_formula, parse_model
from hilbertsem.logic import parse_formula

DATA = Path(__file__).resolve().parent.parent / "data"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_derive_unicode_by_default(capsys):
    code, out, _ = run(capsys, "derive", "--lexicon", str(DATA / "cat.lex"), "--tree", "((a cat) sleeps)")
    assert code == 0
    assert out.splitlines() == [
        "status: ok",
        "logical form: sleeps(εx:ani. cat(x))",
        "presupposition: cat(εx:ani. cat(x))",
    ]


def test_derive_trace(capsys):
    code, out, _ = run(capsys, "derive", "--lexicon", str(DATA / "keith.lex"), "--mode", "gq",
                       "--tree", "(Keith (sang (a song)))", "--trace", "--ascii")
    lines = out.splitlines()
    assert code == 0
    assert "type: (Keith (sang (a song))) : t" in lines
    steps = [line for line in lines if line.startswith("[")]
    assert steps and steps[0].startswith("[1] beta @ ")


def test_derive_from_stdin(capsys, monkeypatch):
    monkeypatch.setattr(sys, "stdin", io.StringIO("((a cat) sleeps)\n"))
    code, out, _ = run(capsys, "derive", "--lexicon", str(DATA / "cat.lex"), "--stdin", "--ascii")
    assert code == 0 and "logical form: sleeps(eps x:ani. cat(x))" in out


def test_derive_alternatives_reported(capsys, tmp_path):
    lex = tmp_path / "two.lex"
    lex.write_text("sort T\nsort P\nconst lpl : T\nconst voted : P -> t\nword L = lpl\n"
                   "  coerce a1 : T -> P flexible\n  coerce a2 : T -> P flexible\nword voted = voted\n")
    code, out, _ = run(capsys, "derive", "--lexicon", str(lex), "--tree", "(voted L)", "--ascii")
    assert code == 0
    assert "coercion: L: a1" in out and "alternative coercion: L: a2" in out


def test_derive_rejected_exit_code(capsys):
    code, out, _ = run(capsys, "derive", "--lexicon", str(DATA / "liverpool.lex"), "--tree", "(((and voted) won) Liverpool)")
    assert code == 2
    assert out.startswith("status: rejected\nreason: rigid-exclusivity")


@pytest.mark.parametrize(
    "argv,kind",
    [
        (["derive", "--lexicon", "/nonexistent.lex", "--tree", "(a b)"], "UsageError"),
        (["derive", "--lexicon", str(DATA / "cat.lex"), "--tree", "((a cat) sleeps"], "ParseError"),
        (["derive", "--lexicon", str(DATA / "cat.lex"), "--tree", "((a dog) sleeps)"], "UnknownWord"),
        (["derive", "--lexicon", str(DATA / "cat.lex")], "UsageError"),
        (["translate", "--direction", "sideways", "--formula", "P(c)"], "UsageError"),
        (["translate", "--direction", "fo2eps", "--formula", "P(("], "ParseError"),
        (["bogus"], "UsageError"),
        (["entail", "--max-size", "3", "--premises", str(DATA / "entail_premises.txt"),
          "--conclusion", "P(eps x. P(x))", "--cap", "10"], "SearchSpaceTooLarge"),
        (["discourse", "--lexicon", str(DATA / "discourse.lex")], "UsageError"),
    ],
)
def test_errors_are_machine_readable(capsys, argv, kind):
    code, out, err = run(capsys, *argv)
    assert code == 1
    assert err.startswith(f"ERROR {kind}: ")
    assert len(err.strip().splitlines()) == 1


def test_translate_both_directions(capsys):
    code, out, _ = run(capsys, "translate", "--direction", "fo2eps", "--formula", "exists x. P(x)", "--ascii")
    assert (code, out) == (0, "P(eps x:e. P(x))\n")
    code, out, _ = run(capsys, "translate", "--direction", "eps2fo", "--formula", "P(tau x. P(x))")
    assert (code, out) == (0, "∀x:e. P(x)\n")
    code, out, _ = run(capsys, "translate", "--direction", "fo2eps", "--formula", "exists x. Q(x)", "--sort", "ani")
    assert out == "Q(εx:ani. Q(x))\n"


def test_modelcheck(capsys):
    model = str(DATA / "russell" / "president.model")
    assert run(capsys, "modelcheck", "--model", model, "--formula", "born(iota x. president_of_france(x))")[1] == "true\n"
    assert run(capsys, "modelcheck", "--model", model, "--formula", "forall x. president_of_france(x)")[1] == "false\n"


def test_entail_outputs(capsys):
    code, out, _ = run(capsys, "entail", "--max-size", "2", "--premises", str(DATA / "entail_premises.txt"),
                       "--conclusion", "P(eps x. P(x))")
    assert (code, out) == (0, "none-up-to-2\n")
    code, out, _ = run(capsys, "entail", "--max-size", "3", "--premises", str(DATA / "entail_premises.txt"),
                       "--conclusion", "Q(eps x. Q(x))")
    header, *body = out.splitlines()
    assert header == "counter-model"
    m = parse_model("\n".join(body))
    assert eval_formula(m, parse_formula("P(eps x. Q(x))"))
    assert not eval_formula(m, parse_formula("Q(eps x. Q(x))"))


def test_discourse_output(capsys):
    code, out, _ = run(capsys, "discourse", "--lexicon", str(DATA / "discourse.lex"),
                       str(DATA / "pronoun.trees"), "--ascii")
    assert code == 0
    blocks = out.strip().split("\n\n")
    assert len(blocks) == 2
    assert blocks[0].splitlines()[0] == "sentence 1: ((a man) entered)"
    assert blocks[1].splitlines() == [
        "sentence 2: (he sat)",
        "status: ok",
        "logical form: sat_by_window(eps x:e. man(x))",
        "referent: he = eps x:e. man(x)",
    ]


def test_discourse_no_antecedent(capsys, tmp_path):
    trees = tmp_path / "bad.trees"
    trees.write_text("(he sat)\n")
    code, _, err = run(capsys, "discourse", "--lexicon", str(DATA / "discourse.lex"), str(trees))
    assert code == 1 and err.startswith("ERROR NoAntecedent: ")


def test_output_is_byte_identical_across_runs(capsys):
    argv = ["derive", "--lexicon", str(DATA / "liverpool.lex"), "--tree", "(((and spread_out) voted) Liverpool)", "--trace"]
    assert run(capsys, *argv) == run(capsys, *argv)


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "hilbertsem", "translate", "--direction", "eps2fo", "--formula", "P(eps x. Q(x))"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and proc.stdout == "NO-FO-EQUIVALENT\n"
