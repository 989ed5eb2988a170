"""Command-line front end.

Exit codes: 0 success, 1 diagnostics or model errors, 2 usage error,
3 state space exceeded the bound although completeness was requested.
"""

from __future__ import annotations

import argparse
import sys

from . import export
from .compose import CompositionError, compose
from .dsl import DslError, parse_file, parse_marking, print_module
from .net import NetError, all_enabled, fire
from .runs import USER_STOP, DEADLOCK, record_run
from .signature import InfiniteCarrier
from .statespace import build_reachability
from .terms import EvalError

OK, DIAGNOSTICS, USAGE, INCOMPLETE = 0, 1, 2, 3


class _Usage(Exception):
    pass


class _ArgParser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(f"{self.prog}: error: {message}")


def _load(path):
    try:
        return parse_file(path)
    except OSError as e:
        raise _Usage(f"cannot read {path}: {e.strerror}") from None


def _emit(text, dest, out):
    if dest in (None, "-"):
        out.write(text)
    else:
        with open(dest, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)


def cmd_check(args, out, err, inp):
    _load(args.file)
    return OK


def cmd_simulate(args, out, err, inp):
    mod = _load(args.file)
    res = record_run(mod.net, args.policy, args.steps, seed=args.seed)
    if args.dot:
        _emit(export.run_dot(res.run, mod.name), args.dot, out)
    if args.json:
        out.write(export.dumps(export.report_json(res)))
    elif args.dot != "-":
        out.write(export.report_text(res))
    return OK


def cmd_run(args, out, err, inp):
    mod = _load(args.file)
    res = record_run(mod.net, args.policy, args.steps, seed=args.seed)
    if args.causal:
        dot = export.run_dot(res.run, mod.name)
    else:
        dot = export.trace_dot(mod.net, res, mod.name)
    if args.dot:
        _emit(dot, args.dot, out)
    if args.json:
        _emit(export.dumps(export.report_json(res)), args.json, out)
    if not args.dot and not args.json:
        out.write(dot)
    return OK


def cmd_bindings(args, out, err, inp):
    mod = _load(args.file)
    m = mod.net.initial_marking
    if args.marking:
        try:
            with open(args.marking, encoding="utf-8") as f:
                m = parse_marking(f.read(), mod.net, args.marking)
        except OSError as e:
            raise _Usage(f"cannot read {args.marking}: {e.strerror}") from None
    occs = all_enabled(mod.net, m)
    if args.json:
        out.write(export.dumps([export.occurrence_json(o) for o in occs]))
    else:
        for i, o in enumerate(occs, 1):
            out.write(f"{i}. {o.text()}\n")
    return OK


def cmd_space(args, out, err, inp):
    mod = _load(args.file)
    g = build_reachability(mod.net, args.max_states)
    if args.dot:
        _emit(export.graph_dot(g, mod.name), args.dot, out)
    if args.json:
        _emit(export.dumps(export.graph_json(g)), args.json, out)
    if "-" not in (args.dot, args.json):
        out.write(f"states: {len(g.nodes)}\nedges: {len(g.edges)}\n"
                  f"complete: {'no' if g.truncated else 'yes'}\n")
    if g.truncated:
        err.write(f"state space exceeds {args.max_states} states\n")
        if args.strict:
            return INCOMPLETE
    return OK


def cmd_compose(args, out, err, inp):
    a, b = _load(args.file_a), _load(args.file_b)
    try:
        c = compose(a, b)
    except CompositionError as e:
        err.write(f"compose: {e}\n")
        return DIAGNOSTICS
    _emit(print_module(c), args.output, out)
    return OK


def cmd_fmt(args, out, err, inp):
    mod = _load(args.file)
    _emit(print_module(mod), args.file if args.write else "-", out)
    return OK


def _show(m, occs, out):
    out.write(f"marking: {m.text()}\n")
    if not occs:
        out.write("no enabled occurrences (deadlock)\n")
    for i, o in enumerate(occs, 1):
        out.write(f"  {i}. {o.text()}\n")


def cmd_play(args, out, err, inp):
    """Interactive token game: pick occurrences by number, `u` undoes the
    last step, `q` quits.  The transcript is printed as a run report."""
    mod = _load(args.file)
    net = mod.net
    history = [net.initial_marking]
    trace = []
    while True:
        m = history[-1]
        occs = all_enabled(net, m)
        _show(m, occs, out)
        out.write("> ")
        out.flush()
        line = inp.readline()
        if not line:
            out.write("\n")
            break
        cmd = line.strip()
        if cmd == "q":
            break
        if cmd == "u":
            if trace:
                trace.pop()
                history.pop()
            else:
                out.write("nothing to undo\n")
            continue
        if cmd.isdigit() and 1 <= int(cmd) <= len(occs):
            occ = occs[int(cmd) - 1]
            trace.append(occ)
            history.append(fire(net, m, occ))
            continue
        if cmd:
            out.write(f"unknown command {cmd!r}: give a number, u or q\n")

    choices = iter(trace)

    def replay_choice(m, occs):
        occ = next(choices, None)
        return None if occ is None else occs.index(occ)

    res = record_run(net, replay_choice, len(trace) + 1)
    res.reason = DEADLOCK if not all_enabled(net, res.final_marking) else USER_STOP
    out.write(export.report_text(res))
    return OK


def _parser():
    p = _ArgParser(prog="heraklit", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_ArgParser)

    s = sub.add_parser("check", help="parse and check a model")
    s.add_argument("file")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("simulate", help="record one run and report it")
    s.add_argument("file")
    s.add_argument("--steps", type=int, default=100)
    s.add_argument("--policy", choices=["first", "random"], default="first")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--json", action="store_true", help="print the report as JSON")
    s.add_argument("--dot", metavar="OUT", help="write the causal run as DOT")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("bindings", help="list enabled occurrences")
    s.add_argument("file")
    s.add_argument("--marking", metavar="FILE", help="marking block to use instead of the initial one")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_bindings)

    s = sub.add_parser("play", help="interactive token game")
    s.add_argument("file")
    s.set_defaults(func=cmd_play)

    s = sub.add_parser("space", help="explore the reachability graph")
    s.add_argument("file")
    s.add_argument("--max-states", type=int, default=10_000)
    s.add_argument("--dot", metavar="OUT")
    s.add_argument("--json", metavar="OUT")
    s.add_argument("--strict", action="store_true",
                   help="exit with status 3 if the bound cuts the graph short")
    s.set_defaults(func=cmd_space)

    s = sub.add_parser("run", help="record a run and export it")
    s.add_argument("file")
    s.add_argument("--steps", type=int, default=100)
    s.add_argument("--policy", choices=["first", "random"], default="first")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--causal", action="store_true", help="export the partial-order run")
    s.add_argument("--dot", metavar="OUT")
    s.add_argument("--json", metavar="OUT")
    s.set_defaults(func=cmd_run)

    s = sub.add_parser("compose", help="compose two modules")
    s.add_argument("file_a")
    s.add_argument("file_b")
    s.add_argument("-o", "--output", default="-")
    s.set_defaults(func=cmd_compose)

    s = sub.add_parser("fmt", help="print a model in canonical form")
    s.add_argument("file")
    s.add_argument("-w", "--write", action="store_true", help="rewrite the file in place")
    s.set_defaults(func=cmd_fmt)
    return p


def run_command(argv, out=None, err=None, inp=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    inp = inp or sys.stdin
    try:
        args = _parser().parse_args(argv)
        if getattr(args, "steps", 0) < 0 or getattr(args, "max_states", 1) < 1:
            raise _Usage("heraklit: error: bounds must be positive")
        return args.func(args, out, err, inp)
    except _Usage as e:
        err.write(f"{e}\n")
        return USAGE
    except SystemExit as e:   # --help
        return e.code or OK
    except DslError as e:
        for d in e.diagnostics:
            err.write(f"{d}\n")
        return DIAGNOSTICS
    except (NetError, EvalError, InfiniteCarrier) as e:
        err.write(f"error: {e}\n")
        return DIAGNOSTICS


def main(argv=None):
    sys.exit(run_command(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
