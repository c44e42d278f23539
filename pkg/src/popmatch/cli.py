"""Command-line front end.

    popmatch solve -i data/ex1.txt
    popmatch cheat -i data/ex1.txt --agent a5 --json
    popmatch gen --agents 5 --posts 5 --tie-prob 0.3 --seed 1

Exit codes: 0 ok, 1 no popular matching (solve) or an oracle mismatch
(oracle-check), 2 usage / parse error, 3 instance too large for the oracle.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import oracle
from .analysis import analyse, classes_json, pairs_json, real_pairs
from .engine import prune_report
from .generate import random_instance
from .manipulation import best_strategy, is_truthful_equilibrium
from .model import (
    ContractError,
    Instance,
    ParseError,
    augment_last_resorts,
    matching_names,
    parse_instance,
    serialize_instance,
    strip_last_resorts,
)
from .switching import to_dot

EXIT_OK, EXIT_NONE, EXIT_USAGE, EXIT_SIZE = 0, 1, 2, 3
NO_POPULAR = "no popular matching"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-i", "--input", help="instance file ('-' for stdin)")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--seed", type=int, default=0)

    p = _Parser(prog="popmatch", description="Popular matchings with ties.")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    sub.add_parser("solve", parents=[common], help="find a popular matching")
    sub.add_parser("pairs", parents=[common], help="list all popular pairs")
    sub.add_parser("classify", parents=[common], help="F / S / FS class of every agent")
    sw = sub.add_parser("switching", parents=[common], help="switching graph as DOT")
    sw.add_argument("--out", help="write DOT here instead of stdout")
    ch = sub.add_parser("cheat", parents=[common], help="best falsified list for one agent")
    ch.add_argument("--agent", required=True)
    ch.add_argument("--pad", action="store_true", help="append the remaining posts to the list")
    sub.add_parser("equilibrium", parents=[common], help="are truthful lists an equilibrium?")
    sub.add_parser("count", parents=[common], help="count popular matchings by brute force")
    sub.add_parser("oracle-check", parents=[common], help="cross-check the solver with brute force")
    gen = sub.add_parser("gen", parents=[common], help="write a random instance")
    gen.add_argument("--agents", type=int, required=True)
    gen.add_argument("--posts", type=int, required=True)
    gen.add_argument("--tie-prob", type=float, default=0.0)
    gen.add_argument("--out", help="write here instead of stdout")
    return p


def _load(args) -> Instance:
    if not args.input:
        raise _UsageError("--input is required")
    if args.input == "-":
        return parse_instance(sys.stdin.read())
    with open(args.input, encoding="utf-8") as fh:
        return parse_instance(fh.read())


def _emit(args, data, text: str) -> None:
    if args.json:
        print(json.dumps(data, indent=2, sort_keys=True))
    else:
        print(text)


def _cmd_solve(args, inst: Instance) -> int:
    res = analyse(augment_last_resorts(inst))
    if res is None:
        _emit(args, {"popular": False}, NO_POPULAR)
        return EXIT_NONE
    ctx = res[0]
    names = matching_names(ctx.inst, ctx.m)
    removed1, removed2 = prune_report(ctx)
    data = {
        "popular": True,
        "matching": [{"agent": a, "post": p} for a, p in names],
        "pruned_rank1": sorted([ctx.inst.agents[a], ctx.inst.posts[p]] for a, p in removed1),
        "pruned_popular": sorted([ctx.inst.agents[a], ctx.inst.posts[p]] for a, p in removed2),
    }
    real = strip_last_resorts(ctx.m, ctx.inst)
    lines = [f"{a}\t{p}" for a, p in names]
    lines.append(f"# {len(real)} of {inst.n_agents} agents get a real post")
    _emit(args, data, "\n".join(lines))
    return EXIT_OK


def _cmd_pairs(args, inst: Instance) -> int:
    g = augment_last_resorts(inst)
    res = analyse(g)
    if res is None:
        _emit(args, {"popular": False, "pairs": []}, NO_POPULAR)
        return EXIT_OK
    pairs = pairs_json(g, res[2])
    _emit(args, {"popular": True, "pairs": pairs}, "\n".join(f"{x['agent']}\t{x['post']}" for x in pairs))
    return EXIT_OK


def _cmd_classify(args, inst: Instance) -> int:
    g = augment_last_resorts(inst)
    res = analyse(g)
    if res is None:
        _emit(args, {"popular": False}, NO_POPULAR)
        return EXIT_OK
    classes = classes_json(g, res[3])
    _emit(args, classes, "\n".join(f"{a}\t{c}" for a, c in classes.items()))
    return EXIT_OK


def _cmd_switching(args, inst: Instance) -> int:
    res = analyse(augment_last_resorts(inst))
    if res is None:
        print(NO_POPULAR, file=sys.stderr)
        return EXIT_NONE
    dot = to_dot(res[1], res[0])
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(dot)
    else:
        sys.stdout.write(dot)
    return EXIT_OK


def _cmd_cheat(args, inst: Instance) -> int:
    g = augment_last_resorts(inst)
    try:
        a1 = g.agent_index(args.agent)
    except KeyError as exc:
        raise _UsageError(str(exc)) from None
    if analyse(g) is None:
        _emit(args, {"popular": False}, NO_POPULAR)
        return EXIT_NONE
    out = best_strategy(g, a1)
    data = out.to_json(g)
    if out.falsify and args.pad:
        data["list"] += [g.posts[p] for p in g.real_posts() if p not in out.lst]
    if out.falsify:
        text = f"{data['agent']}: submit {' '.join(data['list'])}; every popular matching gives {data['guaranteed']}"
        text += f" (true rank {out.true_rank_before} -> {out.true_rank_after})"
    else:
        text = f"{data['agent']}: the true list is optimal"
    _emit(args, data, text)
    return EXIT_OK


def _cmd_equilibrium(args, inst: Instance) -> int:
    g = augment_last_resorts(inst)
    if analyse(g) is None:
        _emit(args, {"popular": False}, NO_POPULAR)
        return EXIT_NONE
    v = is_truthful_equilibrium(g)
    data = v.to_json(g)
    if v.equilibrium:
        text = "equilibrium: truthful lists"
    else:
        w = data["witness"]
        text = f"not an equilibrium: {w['agent']} submits {' '.join(w['list'])} and always gets {w['guaranteed']}"
    _emit(args, data, text)
    return EXIT_OK


def _cmd_count(args, inst: Instance) -> int:
    n = oracle.count_popular(inst)
    _emit(args, {"count": n}, str(n))
    return EXIT_OK


def _cmd_oracle_check(args, inst: Instance) -> int:
    g = augment_last_resorts(inst)
    res = analyse(g)
    popular = oracle.enumerate_popular(inst)
    checks = {"existence": (res is not None) == bool(popular)}
    if res is not None and popular:
        checks["matching_popular"] = oracle.is_popular_bruteforce(g, res[0].m)
        checks["pairs"] = set(real_pairs(g, res[2])) == oracle.popular_pairs_bruteforce(inst)
        checks["classes"] = list(res[3]) == oracle.classify_bruteforce(inst)
    ok = all(checks.values())
    data = {"ok": ok, "checks": checks, "count": len(popular)}
    text = "\n".join(f"{k}\t{'ok' if v else 'MISMATCH'}" for k, v in checks.items())
    _emit(args, data, text + f"\npopular matchings\t{len(popular)}")
    return EXIT_OK if ok else EXIT_NONE


def _cmd_gen(args) -> int:
    try:
        inst = random_instance(args.agents, args.posts, args.tie_prob, seed=args.seed)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    text = serialize_instance(inst)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


_COMMANDS = {
    "solve": _cmd_solve,
    "pairs": _cmd_pairs,
    "classify": _cmd_classify,
    "switching": _cmd_switching,
    "cheat": _cmd_cheat,
    "equilibrium": _cmd_equilibrium,
    "count": _cmd_count,
    "oracle-check": _cmd_oracle_check,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = _parser().parse_args(argv)
        if args.cmd == "gen":
            return _cmd_gen(args)
        return _COMMANDS[args.cmd](args, _load(args))
    except _UsageError as exc:
        print(f"popmatch: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"popmatch: parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"popmatch: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except oracle.OracleSizeError as exc:
        print(f"popmatch: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except ContractError as exc:
        print(f"popmatch: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
