"""Command-line driver.

Exit codes: 0 success, 2 rejected derivation, 1 error. Errors are reported
on stderr as ``ERROR <Kind>: <detail>``.
"""

from __future__ import annotations

import argparse
import sys

from .epsilon import epsilon_to_fo, fo_to_epsilon
from .errors import HilbertError
from .lexicon import load_lexicon
from .logic import Signature, parse_formula, pretty, show_term
from .models import CounterModel, entails_finite, eval_formula, format_model, parse_model
from .pipeline import Derivation, compose, parse_discourse, parse_tree, resolve_anaphora, show_tree

EXIT_OK, EXIT_ERROR, EXIT_REJECTED = 0, 1, 2


class UsageError(HilbertError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _style(args) -> str:
    return "ascii" if args.ascii else "unicode"


def _input(args, attr: str, what: str) -> str:
    value = getattr(args, attr)
    if args.stdin:
        if value is not None:
            raise UsageError(f"give the {what} either on the command line or with --stdin")
        return sys.stdin.read().strip()
    if value is None:
        raise UsageError(f"missing --{attr.replace('_', '-')}")
    return value


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def derivation_lines(d: Derivation, style: str, trace: bool = False) -> list[str]:
    lines = [f"status: {d.status}"]
    if not d.ok:
        lines.append(f"reason: {d.reason}")
        return lines
    lines.append(f"logical form: {pretty(d.logical_form, style)}")
    lines += [f"presupposition: {pretty(p, style)}" for p in d.presuppositions]
    for word, assignment in d.coercions:
        lines.append(f"coercion: {word}: {', '.join(assignment.names)}")
    for word, assignment in d.alternatives:
        lines.append(f"alternative coercion: {word}: {', '.join(assignment.names)}")
    if trace:
        lines += [f"type: {text} : {ty}" for text, ty in d.typing]
        lines += d.trace.render()
    return lines


def cmd_derive(args) -> int:
    lex = load_lexicon(_read(args.lexicon))
    tree = parse_tree(_input(args, "tree", "tree"))
    d = compose(tree, lex, args.mode, trace=args.trace)
    print("\n".join(derivation_lines(d, _style(args), args.trace)))
    return EXIT_OK if d.ok else EXIT_REJECTED


def cmd_translate(args) -> int:
    f = parse_formula(_input(args, "formula", "formula"), default_sort=args.sort)
    if args.direction == "fo2eps":
        print(pretty(fo_to_epsilon(f), _style(args)))
    else:
        result = epsilon_to_fo(f)
        print("NO-FO-EQUIVALENT" if result is None else pretty(result, _style(args)))
    return EXIT_OK


def _model_signature(model) -> Signature:
    return Signature(tuple(model.domains), dict(model.pred_sorts), dict(model.func_sorts), dict(model.const_sorts))


def cmd_modelcheck(args) -> int:
    model = parse_model(_read(args.model))
    sorts = list(model.domains)
    default = sorts[0] if len(sorts) == 1 else args.sort
    f = parse_formula(_input(args, "formula", "formula"), _model_signature(model), default)
    print("true" if eval_formula(model, f) else "false")
    return EXIT_OK


def parse_formula_file(text: str, default_sort: str) -> list:
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append(parse_formula(line, default_sort=default_sort))
    return out


def cmd_entail(args) -> int:
    premises = parse_formula_file(_read(args.premises), args.sort)
    conclusion = parse_formula(_input(args, "conclusion", "conclusion"), default_sort=args.sort)
    result = entails_finite(premises, conclusion, args.max_size, cap=args.cap)
    if isinstance(result, CounterModel):
        print("counter-model")
        sys.stdout.write(format_model(result.model))
    else:
        print(f"none-up-to-{result.max_size}")
    return EXIT_OK


def cmd_discourse(args) -> int:
    lex = load_lexicon(_read(args.lexicon))
    text = sys.stdin.read() if args.stdin else _read(args.trees)
    result = resolve_anaphora(parse_discourse(text), lex, args.mode)
    style = _style(args)
    blocks = []
    worst = EXIT_OK
    for n, (tree, d) in enumerate(zip(result.sentences, result.derivations), 1):
        lines = [f"sentence {n}: {show_tree(tree)}"] + derivation_lines(d, style)
        for key, logic in d.referents.items():
            lines.append(f"referent: {key} = {show_term(logic, style)}")
        blocks.append("\n".join(lines))
        if not d.ok:
            worst = EXIT_REJECTED
    print("\n\n".join(blocks))
    return worst


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hilbertsem", description="Typed Hilbert-operator semantics for functor-argument trees.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--ascii", action="store_true", help="ASCII formula output (default: unicode)")
        sp.add_argument("--stdin", action="store_true", help="read the main input from standard input")

    d = sub.add_parser("derive", help="compose a tree into a logical form")
    d.add_argument("--lexicon", required=True)
    d.add_argument("--mode", choices=("gq", "epsilon"), default="epsilon")
    d.add_argument("--tree")
    d.add_argument("--trace", action="store_true")
    common(d)
    d.set_defaults(run=cmd_derive)

    t = sub.add_parser("translate", help="first-order <-> epsilon translation")
    t.add_argument("--direction", choices=("fo2eps", "eps2fo"), required=True)
    t.add_argument("--formula")
    t.add_argument("--sort", default="e", help="sort of unannotated binders")
    common(t)
    t.set_defaults(run=cmd_translate)

    m = sub.add_parser("modelcheck", help="evaluate a closed formula in a model file")
    m.add_argument("--model", required=True)
    m.add_argument("--formula")
    m.add_argument("--sort", default="e")
    common(m)
    m.set_defaults(run=cmd_modelcheck)

    e = sub.add_parser("entail", help="search finite models for a counter-model")
    e.add_argument("--max-size", type=int, required=True)
    e.add_argument("--premises", required=True)
    e.add_argument("--conclusion")
    e.add_argument("--sort", default="e")
    e.add_argument("--cap", type=int, default=2_000_000, help="largest number of models to enumerate")
    common(e)
    e.set_defaults(run=cmd_entail)

    s = sub.add_parser("discourse", help="derive a sequence of sentences with anaphora")
    s.add_argument("--lexicon", required=True)
    s.add_argument("--mode", choices=("gq", "epsilon"), default="epsilon")
    s.add_argument("trees", nargs="?")
    common(s)
    s.set_defaults(run=cmd_discourse)
    return p


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "discourse" and not args.stdin and args.trees is None:
            raise UsageError("missing tree file")
        return args.run(args)
    except HilbertError as exc:
        print(f"ERROR {exc.kind}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
