"""Command-line interface.

Exit codes: 0 success, 2 usage error, 3 domain error (inadmissible
parameters, malformed input), 4 enumeration cap exceeded.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from . import closed_form as cf
from .dynamics import Schedule, parse_initial, run_dynamics
from .equilibria import DEFAULT_CAP, CapExceeded, analyze, characterization_check, \
    enumerate_equilibria, is_equilibrium
from .game import GameInstance, Model, cost_report, format_rational, parse_rational
from .graph import (GraphFormatError, KleinbergParams, dumps_edgelist, make_complete, make_cycle,
                    make_kleinberg, make_star, read_edgelist, write_edgelist)
from .harness import ExperimentConfig, dumps_csv, dumps_json, run_experiment, write_outputs

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_CAP = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _kleinberg_arg(text: str):
    try:
        side, q, alpha = text.split(",")
        return int(side), int(q), float(alpha)
    except ValueError:
        raise argparse.ArgumentTypeError("expected SIDE,Q,ALPHA") from None


def _graph_options(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--graph", metavar="PATH", help="edge-list file")
    g.add_argument("--complete", type=int, metavar="N")
    g.add_argument("--star", type=int, metavar="N", help="star with center 0 and N-1 leaves")
    g.add_argument("--cycle", type=int, metavar="N")
    g.add_argument("--kleinberg", type=_kleinberg_arg, metavar="SIDE,Q,ALPHA")


def _game_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--C", default="1", help="inoculation cost (rational, default 1)")
    p.add_argument("--L", default="4", help="infection loss (rational, default 4)")
    p.add_argument("--F", default="0", help="friendship factor in [0,1] (default 0)")
    p.add_argument("--model", choices=[m.value for m in Model], default="absolute")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="inoculation",
                                     description="Virus inoculation game on social networks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a graph and write its edge list")
    _graph_options(p)
    _common(p)

    for name, helptext in (("cost", "cost report for a profile"),
                           ("check", "verify a profile is an equilibrium")):
        p = sub.add_parser(name, help=helptext)
        _graph_options(p)
        _game_options(p)
        _common(p)
        p.add_argument("--init", default="all-insecure",
                       help="profile: all-insecure, all-secure, random or bits:<01...>")

    p = sub.add_parser("dynamics", help="run best-response dynamics, print the trace")
    _graph_options(p)
    _game_options(p)
    _common(p)
    p.add_argument("--schedule", default="round-robin",
                   help="round-robin, random or fixed:<i,j,...>")
    p.add_argument("--init", default="all-insecure")
    p.add_argument("--max-passes", type=int)

    for name, helptext in (("enum", "enumerate all equilibria"), ("wof", "windfall of friendship"),
                           ("poa", "price of anarchy")):
        p = sub.add_parser(name, help=helptext)
        _graph_options(p)
        _game_options(p)
        _common(p)
        p.add_argument("--cap", type=int, default=DEFAULT_CAP,
                       help=f"refuse graphs with more nodes (default {DEFAULT_CAP})")
        p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("closed-form", help="closed-form equilibria of K_n or S_n")
    _graph_options(p)
    _game_options(p)
    _common(p)

    p = sub.add_parser("experiment", help="run a JSON-configured batch experiment")
    p.add_argument("--config", required=True, metavar="PATH")
    p.add_argument("--out", metavar="PATH", help="CSV output (default: config's csv, else stdout)")
    p.add_argument("--json", metavar="PATH", help="JSON output with exact values")
    p.add_argument("--seed", type=int, help="override the config's master seed")
    p.add_argument("--dry-run", action="store_true", help="validate the config and emit the header only")
    p.add_argument("-v", "--verbose", action="store_true")
    return parser


def _graph(args):
    if args.graph:
        return read_edgelist(args.graph)
    if args.complete is not None:
        return make_complete(args.complete)
    if args.star is not None:
        return make_star(args.star)
    if args.cycle is not None:
        return make_cycle(args.cycle)
    if args.kleinberg is not None:
        side, q, alpha = args.kleinberg
        return make_kleinberg(KleinbergParams(side, q, alpha, seed=args.seed))
    raise UsageError("a graph is required: --graph, --complete, --star, --cycle or --kleinberg")


def _instance(args) -> GameInstance:
    g = _graph(args)
    return GameInstance(g, parse_rational(args.C), parse_rational(args.L),
                        parse_rational(args.F), args.model)


def _num(x):
    return None if x is None else {"exact": format_rational(x), "approx": float(x)}


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        try:
            with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write {args.out}: {exc.strerror}") from exc
    else:
        sys.stdout.write(text)


def cmd_gen(args):
    g = _graph(args)
    if args.out:
        write_edgelist(g, args.out)
    else:
        sys.stdout.write(dumps_edgelist(g))


def cmd_cost(args):
    inst = _instance(args)
    a = parse_initial(args.init, inst.n, args.seed)
    rep = cost_report(inst, a)
    _emit(args, dumps_json({
        "profile": str(a),
        "actual": [format_rational(x) for x in rep.actual],
        "perceived": [format_rational(x) for x in rep.perceived],
        "social": _num(rep.social),
    }))


def cmd_check(args):
    inst = _instance(args)
    a = parse_initial(args.init, inst.n, args.seed)
    ok, witness = is_equilibrium(inst, a)
    doc = {"profile": str(a), "equilibrium": ok,
           "witness": None if witness is None else {"node": witness[0], "to": int(witness[1])},
           "characterization": characterization_check(inst.graph, a)}
    _emit(args, dumps_json(doc))


def cmd_dynamics(args):
    inst = _instance(args)
    a = parse_initial(args.init, inst.n, args.seed)
    trace = run_dynamics(inst, a, Schedule.parse(args.schedule, args.seed),
                         max_passes=args.max_passes, record_costs=False)
    _emit(args, trace.to_json())


def cmd_enum(args):
    inst = _instance(args)
    _emit(args, dumps_json(enumerate_equilibria(inst, cap=args.cap, workers=args.workers).to_dict()))


def _ratio_text(x) -> str:
    return "undefined\n" if x is None else format_rational(x) + "\n"


def cmd_wof(args):
    inst = _instance(args)
    _emit(args, _ratio_text(analyze(inst, cap=args.cap, workers=args.workers).wof))


def cmd_poa(args):
    inst = _instance(args).selfish()
    _emit(args, _ratio_text(analyze(inst, cap=args.cap, workers=args.workers).poa))


def _entries(entries):
    return [{"label": e.label, "insecure": e.insecure, "cost": _num(e.cost),
             **({} if e.center_secure is None else {"center_secure": e.center_secure})}
            for e in entries]


def cmd_closed_form(args):
    if args.complete is not None:
        res = cf.closed_form_complete(args.complete, args.C, args.L, args.F, args.model)
    elif args.star is not None:
        res = cf.closed_form_star(args.star, args.C, args.L, args.F, args.model)
    else:
        raise UsageError("closed-form needs --complete N or --star N")
    doc = {"topology": res.topology, "n": res.n, "C": format_rational(res.C),
           "L": format_rational(res.L), "F": format_rational(res.F), "model": res.model.value,
           "ne": _entries(res.ne), "fne": _entries(res.fne), "opt": _entries(res.opt),
           "worst_ne": _num(res.worst_ne), "worst_fne": _num(res.worst_fne), "wof": _num(res.wof)}
    if res.topology == "star":
        doc["unique_fne"] = res.unique_fne
        doc["min_unstable_n0"] = res.min_unstable_n0
        doc["findings"] = res.findings
    _emit(args, dumps_json(doc))


def cmd_experiment(args):
    cfg = ExperimentConfig.load(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.dry_run:
        overrides["dry_run"] = True
    if overrides:
        cfg = ExperimentConfig.from_dict({**cfg.to_dict(), **overrides})
    rows = run_experiment(cfg)
    csv_path = args.out or cfg.csv
    write_outputs(cfg, rows, csv_path, args.json)
    if not csv_path:
        sys.stdout.write(dumps_csv(rows))


COMMANDS = {"gen": cmd_gen, "cost": cmd_cost, "check": cmd_check, "dynamics": cmd_dynamics,
            "enum": cmd_enum, "wof": cmd_wof, "poa": cmd_poa, "closed-form": cmd_closed_form,
            "experiment": cmd_experiment}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ValueError, TypeError, GraphFormatError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
