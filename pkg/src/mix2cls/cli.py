"""Command line: ``mix2cls check|translate|check-classical|run|verify|corpus``."""
from __future__ import annotations

import argparse
import os
import sys

from .context import TypingError
from .parser import ParseError, read_file
from .printer import emit_sepi, show_context, show_process
from .semantics import FULL, M0, explore
from .serialize import dumps, exploration_dot, reports_document, translation_document
from .translate import TranslationError, translate
from .typing_classical import check_process_classical
from .typing_mixed import check_process
from .verify import (
    DEFAULT_DEPTH, FAIL, INCONCLUSIVE, check_barb_preservation, check_completeness,
    check_ndchoice_reduction, check_type_soundness, demo_soundness_failure,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INCONCLUSIVE = 0, 1, 2, 3


def default_depth() -> int:
    raw = os.environ.get("MIX2CLS_DEPTH")
    if raw is None:
        return DEFAULT_DEPTH
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"MIX2CLS_DEPTH must be an integer, got {raw!r}") from None


def _decls(args):
    sf = read_file(args.file)
    if args.decl:
        return sf, [sf.get(args.decl)]
    return sf, sf.decls


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _exit_code(reports) -> int:
    outcomes = {r.outcome for r in reports}
    if FAIL in outcomes:
        return EXIT_FAIL
    if INCONCLUSIVE in outcomes:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


# -- subcommands ---------------------------------------------------------------------------


def cmd_check(args) -> int:
    _, decls = _decls(args)
    status = EXIT_OK
    for d in decls:
        try:
            check_process(d.context, d.process, m0=not args.full)
            print(f"{d.name}: ok")
        except TypingError as e:
            print(f"{d.name}: {type(e).__name__}: {e}")
            status = EXIT_FAIL
    return status


def cmd_check_classical(args) -> int:
    _, decls = _decls(args)
    status = EXIT_OK
    for d in decls:
        try:
            check_process_classical(d.context, d.process)
            print(f"{d.name}: ok")
        except TypingError as e:
            print(f"{d.name}: {type(e).__name__}: {e}")
            status = EXIT_FAIL
    return status


def cmd_translate(args) -> int:
    _, decls = _decls(args)
    chunks = []
    for d in decls:
        try:
            ctx, q = translate(d.context, d.process)
        except (TypingError, TranslationError) as e:
            print(f"{d.name}: {type(e).__name__}: {e}", file=sys.stderr)
            return EXIT_FAIL
        if args.json:
            doc = translation_document(d.context, d.process, ctx, q)
            doc["name"] = d.name
            chunks.append(dumps(doc) + "\n")
        elif args.sepi:
            head = f"// {d.name}" + (f" [{show_context(ctx, sepi=True)}]" if len(ctx) else "")
            chunks.append(head + "\n" + emit_sepi(q) + "\n")
        else:
            head = f"proc {d.name}" + (f" [{show_context(ctx)}]" if len(ctx) else "") + " ="
            chunks.append(head + "\n" + show_process(q, pretty=True) + "\n")
    _write(args.output, "\n".join(chunks))
    return EXIT_OK


def cmd_run(args) -> int:
    sf, decls = _decls(args)
    d = decls[0]
    calculus = sf.calculus or "mixed"
    mode = FULL if args.mode == "full" else M0
    ex = explore(d.process, args.depth, calculus, mode)
    by_depth = {}
    for k in ex.states:
        by_depth[ex.depth[k]] = by_depth.get(ex.depth[k], 0) + 1
    print(f"{d.name}: {len(ex.states)} states, truncated={ex.truncated}")
    for depth in sorted(by_depth):
        print(f"  depth {depth}: {by_depth[depth]}")
    stuck = [k for k in ex.states if not ex.edges.get(k) and ex.depth[k] < args.depth]
    for k in sorted(stuck, key=lambda k: (ex.depth[k], k)):
        print(f"  final at depth {ex.depth[k]}: {show_process(ex.states[k])}")
    if args.dot:
        _write(args.dot, exploration_dot(ex))
    return EXIT_OK


def cmd_verify(args) -> int:
    reports = []
    if args.claim == "ndchoice":
        reports = [check_ndchoice_reduction(n) for n in (args.n or [1, 2, 3, 4])]
    else:
        if not args.file:
            print("verify: this claim needs a file", file=sys.stderr)
            return EXIT_USAGE
        _, decls = _decls(args)
        for d in decls:
            subject = f"{os.path.basename(args.file)}:{d.name}"
            match args.claim:
                case "soundness":
                    rep = check_type_soundness(d.context, d.process, subject)
                case "barbs":
                    rep = check_barb_preservation(d.context, d.process, args.depth, subject)
                case "completeness":
                    rep = check_completeness(d.context, d.process, args.depth, subject)
                case "counterexample":
                    rep = demo_soundness_failure(d.context, d.process)
                    rep.subject = subject
            reports.append(rep)
    _report(reports, args)
    return _exit_code(reports)


def _report(reports, args):
    for r in reports:
        print(r.summary())
        for w in r.witnesses:
            print("  witness: " + (" ".join(w.tags) or "(no steps)"))
        for note in r.notes:
            print(f"  note: {note}")
    if args.json:
        _write(args.json, dumps(reports_document(reports)) + "\n")


def cmd_corpus(args) -> int:
    from .corpus import run_corpus

    reports = run_corpus(args.depth)
    _report(reports, args)
    code = _exit_code(reports)
    passed = sum(r.passed for r in reports)
    print(f"{passed}/{len(reports)} checks passed")
    return code


# -- parser ---------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mix2cls", description="Translate mixed sessions into classical sessions.")
    sub = ap.add_subparsers(dest="command", required=True)
    depth = default_depth()

    def with_file(name, help_text, optional=False):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("file", nargs="?" if optional else None)
        sp.add_argument("--decl", help="only this declaration")
        return sp

    sp = with_file("check", "type check a mixed program")
    sp.add_argument("--full", action="store_true", help="allow lin/un interaction (outside M0)")
    sp.set_defaults(func=cmd_check)

    sp = with_file("translate", "translate a mixed program")
    fmt = sp.add_mutually_exclusive_group()
    fmt.add_argument("--sepi", action="store_true", help="emit SePi-style text")
    fmt.add_argument("--json", action="store_true", help="emit a JSON document")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_translate)

    sp = with_file("check-classical", "type check a classical program")
    sp.set_defaults(func=cmd_check_classical)

    sp = with_file("run", "explore reductions up to a depth")
    sp.add_argument("--depth", type=int, default=depth)
    sp.add_argument("--mode", choices=["m0", "full"], default="m0")
    sp.add_argument("--dot", help="write the state graph in DOT format")
    sp.set_defaults(func=cmd_run)

    sp = with_file("verify", "check one claim on a program", optional=True)
    sp.add_argument("--claim", required=True,
                    choices=["soundness", "barbs", "completeness", "ndchoice", "counterexample"])
    sp.add_argument("--depth", type=int, default=depth)
    sp.add_argument("--n", type=int, action="append", help="NDChoice size (repeatable)")
    sp.add_argument("--json", help="write reports as JSON ('-' for stdout)")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("corpus", help="run every claim over the bundled programs")
    sp.add_argument("--depth", type=int, default=depth)
    sp.add_argument("--json", help="write reports as JSON ('-' for stdout)")
    sp.set_defaults(func=cmd_corpus)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
