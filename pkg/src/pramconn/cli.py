"""Command line: gen, run, verify, experiment, spectral."""

from __future__ import annotations

import argparse
import json
import sys

from .edgelist import EdgeListError, read_edge_list, write_edge_list
from .generators import KINDS, generate
from .oracle import first_mismatch, oracle_components
from .orchestrator import connectivity
from .pram import ConstantProfile, WritePolicy


def _params(pairs):
    out = {}
    for item in pairs or []:
        key, _, val = item.partition("=")
        try:
            out[key] = json.loads(val)
        except json.JSONDecodeError:
            out[key] = val
    return out


def _emit(obj, path=None):
    text = json.dumps(obj, indent=2, default=float)
    if path and path != "-":
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _run(args, G):
    prof = ConstantProfile.named(args.profile)
    pol = WritePolicy(args.policy, args.seed)
    forest, rep = connectivity(G, prof, args.seed, pol)
    stats = {"seed": args.seed, "profile": prof.name, "policy": pol.mode,
             "phases_run": rep["phases_run"], "final_b": rep["final_b"],
             "components": rep["components"], "rounds": rep["rounds"], "work": rep["work"],
             "ledger": rep["ledger"].to_dict()}
    return forest, stats


def cmd_gen(args):
    G = generate(args.kind, _params(args.param), args.seed)
    write_edge_list(G, args.output)
    return 0


def cmd_run(args):
    G = read_edge_list(args.input)
    forest, stats = _run(args, G)
    if args.stats:
        _emit(stats, args.stats)
    if args.labels:
        with open(args.labels, "w", encoding="utf-8") as fh:
            fh.write("\n".join(map(str, forest.labels().tolist())) + "\n")
    print(json.dumps({k: stats[k] for k in ("components", "rounds", "work", "phases_run")}))
    return 0


def cmd_verify(args):
    G = read_edge_list(args.input)
    forest, stats = _run(args, G)
    bad = first_mismatch(forest.find(), oracle_components(G))
    if args.stats:
        _emit(stats, args.stats)
    replay = f"seed={args.seed} profile={args.profile} policy={args.policy}"
    if bad is None:
        print(f"ok: {stats['components']} components ({replay})")
        return 0
    print(f"mismatch at vertex {bad} ({replay})", file=sys.stderr)
    return 1


def cmd_experiment(args):
    from . import experiments as ex

    seeds = list(range(args.seed, args.seed + args.seeds))
    if args.name == "work-sweep":
        exps = range(args.min_exp, args.max_exp + 1)
        rows = ex.work_sweep(exps=exps, seeds=seeds, profile=args.profile,
                             kinds=tuple(args.family or ("cycle", "expander")))
        fits = ex.summarize_work(rows)
        out = {"master_seed": args.seed, "rows": rows, "fit": fits}
    elif args.name == "round-sweep":
        exps = range(args.min_exp, args.max_exp + 1)
        rows = ex.round_sweep(exps=exps, seeds=seeds, profile=args.profile,
                              kinds=tuple(args.family or ("ltz-path", "expander", "cycle")))
        out = {"master_seed": args.seed, "rows": rows}
    elif args.name == "sampling-gap":
        rows = ex.sampling_gap_rows(trials=args.trials, seed=args.seed)
        out = {"master_seed": args.seed, "rows": rows}
    elif args.name == "diameter-blowup":
        rows = ex.diameter_blowup_rows(args.n, seeds=seeds,
                                       width_exp=ConstantProfile.named(args.profile).blowup_width_exp)
        out = {"master_seed": args.seed, "rows": rows}
    else:
        raise SystemExit(f"unknown experiment {args.name}")
    _emit(out, args.output)
    return 0


def cmd_spectral(args):
    from .spectral import spectral_gap

    G = read_edge_list(args.input)
    _emit(spectral_gap(G))
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="pramconn", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="write a generated instance as an edge list")
    g.add_argument("kind", choices=KINDS)
    g.add_argument("param", nargs="*", help="key=value generator parameters, e.g. n=1024 d=8")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output", default="-")
    g.set_defaults(func=cmd_gen)

    for name, func in (("run", cmd_run), ("verify", cmd_verify)):
        r = sub.add_parser(name, help="label components" if name == "run" else "run and diff against the oracle")
        r.add_argument("input", help="edge-list file, or - for stdin")
        r.add_argument("--profile", choices=("desk", "paper"), default="desk")
        r.add_argument("--seed", type=int, default=0)
        r.add_argument("--policy", choices=("first", "last", "random"), default="first")
        r.add_argument("--stats", help="write the cost ledger JSON here")
        if name == "run":
            r.add_argument("--labels", help="write one root label per line here")
        r.set_defaults(func=func)

    e = sub.add_parser("experiment", help="emit JSON rows for a measurement sweep")
    e.add_argument("name", choices=("sampling-gap", "diameter-blowup", "work-sweep", "round-sweep"))
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--seeds", type=int, default=1)
    e.add_argument("--profile", choices=("desk", "paper"), default="desk")
    e.add_argument("--min-exp", type=int, default=10)
    e.add_argument("--max-exp", type=int, default=15)
    e.add_argument("--family", action="append")
    e.add_argument("--trials", type=int, default=100)
    e.add_argument("--n", type=int, default=10000)
    e.add_argument("-o", "--output", default="-")
    e.set_defaults(func=cmd_experiment)

    s = sub.add_parser("spectral", help="spectral gap per component")
    s.add_argument("input")
    s.set_defaults(func=cmd_spectral)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EdgeListError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
