"""Command line driver for the expression language (`rt`).

``rt eval "<expr>"`` evaluates one statement against a fresh environment;
``rt run <script>`` executes a statement-per-line script, failing on the
first error or false assertion.  ``--define name=<expr>`` preloads bindings
(e.g. ``--define a=rand(1,1,4)``) and ``--json`` emits machine-readable
records instead of summaries.
"""

from __future__ import annotations

import argparse
import json
import sys

from .dsl import Environment, EngineError, evaluate, parse, run_script, summarize, to_json_record


def _apply_defines(env, defines):
    for item in defines or []:
        name, _, rhs = item.partition("=")
        if not name or not rhs:
            raise EngineError(f"malformed --define {item!r}, expected name=expr")
        kind, node = parse(rhs)
        if kind != "expr":
            raise EngineError(f"--define value must be an expression: {item!r}")
        env.tensors[name.strip()] = evaluate(node, env)


def _cmd_eval(args) -> int:
    env = Environment.with_seed(args.seed)
    _apply_defines(env, args.define)
    kind, node = parse(args.expression)
    value = evaluate(node, env)
    if kind == "assert":
        ok = bool(value) if isinstance(value, bool) else bool((value.entries != 0).all())
        print("assert ok" if ok else "assert failed")
        return 0 if ok else 1
    if args.json:
        print(json.dumps(to_json_record(value, env)))
    else:
        print(summarize(value, env))
    return 0


def _cmd_run(args) -> int:
    env = Environment.with_seed(args.seed)
    _apply_defines(env, args.define)
    report = run_script(args.script, env, json_records=args.json)
    return 0 if report.ok else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="rt", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate one expression")
    p.add_argument("expression")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--define", action="append", metavar="name=expr")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=_cmd_eval)

    p = sub.add_parser("run", help="run a script of statements")
    p.add_argument("script")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--define", action="append", metavar="name=expr")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=_cmd_run)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
