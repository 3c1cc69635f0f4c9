"""Command-line front end.

Exit codes: 0 ok, 1 property failure, 2 input error, 3 engine disagreement.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional, Sequence

from . import generate
from .bigraph import (GraphFormatError, InstanceTooLarge, mwm_bruteforce, mwm_exact,
                      parse_graph, format_graph, validate)
from .hier import (InstanceFormatError, classify_nodes, load_instance, secw,
                   solve_hierarchical, validate_instance)
from .ltree import TreeParseError, delta, parse_tree, serialize
from .mast import (BRUTEFORCE_DELTA_LIMIT, mam_bruteforce, mast_bruteforce, mast_fast,
                   mast_reference, solve_mam)
from .unbalanced import mwm_partition_sweep, mwm_pruned, recover_with_hubs

EXIT_OK, EXIT_PROPERTY, EXIT_INPUT, EXIT_DISAGREE = 0, 1, 2, 3

MWM_ALGOS = {"exact": mwm_exact, "sweep": mwm_partition_sweep, "pruned": mwm_pruned}
MAST_ENGINES = {"oracle": mast_bruteforce, "reference": mast_reference, "fast": mast_fast}


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("TREEMATCH_THREADS", "1")))
    except ValueError:
        return 1


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _fail(msg: str, code: int = EXIT_INPUT) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return code


# ---------------------------------------------------------------------------


def cmd_mast(args) -> int:
    try:
        t1 = parse_tree(_read(args.tree1))
        t2 = parse_tree(_read(args.tree2))
    except (OSError, TreeParseError) as exc:
        return _fail(str(exc))
    if not args.check:
        try:
            value = MAST_ENGINES[args.engine](t1, t2)
        except InstanceTooLarge as exc:
            return _fail(str(exc))
        print(f"mast={value}")
        return EXIT_OK
    names = ["reference", "fast"]
    if delta(t1, t2) <= BRUTEFORCE_DELTA_LIMIT:
        names.insert(0, "oracle")
    values = {name: MAST_ENGINES[name](t1, t2) for name in names}
    for name in names:
        print(f"{name}={values[name]}")
    if len(set(values.values())) != 1:
        print("engines disagree", file=sys.stderr)
        return EXIT_DISAGREE
    print(f"mast={values[names[0]]}")
    return EXIT_OK


def _parse_hubs(text: str) -> list[int]:
    try:
        return sorted({int(h) for h in text.split(",") if h.strip()})
    except ValueError:
        raise GraphFormatError(f"bad hub list {text!r}") from None


def cmd_mwm(args) -> int:
    try:
        g = parse_graph(_read(args.graph))
        problem = validate(g) or (None if g.edges else "graph has no edges")
        if problem:
            raise GraphFormatError(problem)
        hubs = _parse_hubs(args.hubs) if args.hubs else None
        if hubs is not None and any(h >= g.x_count for h in hubs):
            raise GraphFormatError("hub index out of range")
    except (OSError, GraphFormatError) as exc:
        return _fail(str(exc))
    algo = MWM_ALGOS[args.algo]
    if hubs is None:
        m = algo(g)
    else:
        m = recover_with_hubs(g, hubs, algo(g.without_x(hubs)))
    print(f"weight={m.weight}")
    if args.pairs:
        for x, y in m:
            print(f"{x} {y}")
    return EXIT_OK


def cmd_hmatch(args) -> int:
    try:
        inst, ids = load_instance(_read(args.instance))
        problem = validate_instance(inst)
        if problem:
            raise InstanceFormatError(problem)
    except (OSError, InstanceFormatError) as exc:
        return _fail(str(exc))
    result = solve_hierarchical(inst)
    for u in range(inst.n):
        if inst.children[u]:
            print(f"node={ids[u]} weight={result[u].weight}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# fuzzing


FAULTS = ("none", "sweep", "mam", "fast", "hier")


def _faulty(fn: Callable, fault: str, name: str) -> Callable:
    if fault != name:
        return fn

    def broken(*a, **kw):
        out = fn(*a, **kw)
        if isinstance(out, list):
            return [v + 1 for v in out]
        if isinstance(out, dict):
            return {k: type(m)(m.pairs, m.weight + 1) for k, m in out.items()}
        if hasattr(out, "weight"):
            return type(out)(out.pairs, out.weight + 1)
        return out + 1
    return broken


def _fuzz_case(seed: int, k: int, max_nodes: int, fault: str) -> Optional[str]:
    """Run one case; returns a counterexample dump or None."""
    rng = random.Random(f"{seed}:{k}")
    kind = ("graph", "hubs", "hier", "mam", "mast")[k % 5]
    sweep = _faulty(mwm_partition_sweep, fault, "sweep")
    if kind == "graph":
        g = generate.random_graph(rng, 6, 12, 20)
        want = mwm_bruteforce(g).weight
        got = {"exact": mwm_exact(g).weight, "sweep": sweep(g).weight,
               "pruned": mwm_pruned(g).weight}
        if any(v != want for v in got.values()):
            return f"kind=graph oracle={want} got={got}\n{format_graph(g)}"
    elif kind == "hubs":
        g = generate.random_graph(rng, 5, 10, 20)
        hubs = sorted(rng.sample(range(g.x_count), rng.randint(1, min(3, g.x_count))))
        got = recover_with_hubs(g, hubs, sweep(g.without_x(hubs))).weight
        want = mwm_exact(g).weight
        if got != want:
            return f"kind=hubs hubs={hubs} want={want} got={got}\n{format_graph(g)}"
    elif kind == "hier":
        inst = generate.random_hier_instance(rng, min(50, max_nodes * 3), 500)
        solved = _faulty(solve_hierarchical, fault, "hier")(inst)
        for u, (_, g) in inst.graphs.items():
            if solved[u].weight != mwm_exact(g).weight:
                return f"kind=hier node={u} instance={inst!r}"
        classes = classify_nodes(inst)
        seen = [u for group in classes.groups() for u in group]
        if sorted(seen) != inst.internal_nodes():
            return f"kind=hier classification does not partition internal nodes: {inst!r}"
        wr = inst.weight[inst.root]
        x = 1
        while x <= wr:
            if sum(1 for u in range(inst.n) if secw(inst, u) > x) * x >= wr:
                return f"kind=hier counting bound fails at x={x}: {inst!r}"
            x *= 2
    elif kind == "mam":
        g = generate.random_multigraph(rng, 12)
        queries = [(0, j) for j in range(g.q)] + [(i, 0) for i in range(1, g.p)]
        got = _faulty(solve_mam, fault, "mam")(g, queries)
        want = [mam_bruteforce(g, i, j) for i, j in queries]
        if got != want:
            return f"kind=mam want={want} got={got} graph={g!r}"
    else:
        fam = generate.FAMILIES[rng.randrange(3)]
        n = rng.randint(1, max_nodes)
        t1, t2 = generate.tree_pair(rng, fam, n, rng.randint(2, 4))
        vals = {"reference": mast_reference(t1, t2),
                "fast": _faulty(mast_fast, fault, "fast")(t1, t2)}
        if delta(t1, t2) <= BRUTEFORCE_DELTA_LIMIT:
            vals["oracle"] = mast_bruteforce(t1, t2)
        if len(set(vals.values())) != 1:
            return f"kind=mast values={vals}\nt1={serialize(t1)}\nt2={serialize(t2)}"
    return None


def cmd_fuzz(args) -> int:
    cases = range(args.count)
    run = lambda k: _fuzz_case(args.seed, k, args.max_nodes, args.inject_fault)
    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        results = list(pool.map(run, cases))
    for k, dump in zip(cases, results):
        if dump is not None:
            print(f"FAIL seed={args.seed} case={k}")
            print(dump)
            return EXIT_PROPERTY
    print(f"ok cases={args.count} seed={args.seed}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# benchmarks


def bench_rows(family: str, sizes: Sequence[int], engines: Sequence[str], seed: int,
               degree: int = 2, repeat: int = 1, timing: bool = True) -> list[list]:
    rows = []
    for n in sizes:
        rng = random.Random(f"{seed}:{family}:{n}:{degree}")
        t1, t2 = generate.tree_pair(rng, family, n, degree)
        d = max(t1.degree, t2.degree)
        dl = delta(t1, t2)
        for name in engines:
            fn = MAST_ENGINES[name]
            best = None
            for _ in range(max(1, repeat)):
                start = time.perf_counter()
                fn(t1, t2)
                took = (time.perf_counter() - start) * 1000.0
                best = took if best is None else min(best, took)
            rows.append([name, n, d, dl, f"{best:.1f}" if timing else "0"])
    return rows


def cmd_bench(args) -> int:
    try:
        sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    except ValueError:
        return _fail(f"bad size list {args.sizes!r}")
    engines = [e.strip() for e in args.engines.split(",") if e.strip()]
    unknown = [e for e in engines if e not in MAST_ENGINES]
    if unknown:
        return _fail(f"unknown engine {unknown[0]!r}")
    rows = bench_rows(args.family, sizes, engines, args.seed, args.degree, args.repeat,
                      not args.no_timing)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["engine", "n", "d", "delta", "millis"])
    writer.writerows(rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="treematch", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mast", help="maximum agreement subtree of two tree files")
    p.add_argument("tree1")
    p.add_argument("tree2")
    p.add_argument("--engine", choices=sorted(MAST_ENGINES), default="fast")
    p.add_argument("--check", action="store_true", help="run every admissible engine and compare")
    p.set_defaults(func=cmd_mast)

    helps = {"mwm": "maximum weight matching of a graph file",
             "mwm-recover": "match without the given hubs, then reinstate them"}
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("graph")
        p.add_argument("--algo", choices=sorted(MWM_ALGOS), default="exact")
        p.add_argument("--hubs", required=name == "mwm-recover",
                       help="comma-separated left nodes to reinstate after matching the rest")
        p.add_argument("--pairs", action="store_true", help="also print matched pairs")
        p.set_defaults(func=cmd_mwm)

    p = sub.add_parser("hmatch", help="per-node matchings of a hierarchical instance (JSON)")
    p.add_argument("instance")
    p.set_defaults(func=cmd_hmatch)

    p = sub.add_parser("fuzz", help="randomized cross-checks against the oracles")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--max-nodes", type=int, default=9)
    p.add_argument("--inject-fault", choices=FAULTS, default="none", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("bench", help="time engines on generated tree pairs (CSV)")
    p.add_argument("--family", choices=generate.FAMILIES, default="evolutionary")
    p.add_argument("--sizes", default="100,200")
    p.add_argument("--engines", default="reference,fast")
    p.add_argument("--degree", type=int, default=2)
    p.add_argument("--repeat", type=int, default=1)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--no-timing", action="store_true",
                   help="write 0 in the millis column so output is byte-stable")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
