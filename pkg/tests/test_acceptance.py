"""Acceptance criteria, one test and one PASS/FAIL line each.

Every test prints its line and the pytest terminal summary repeats them, so
``python3 tests/test_acceptance.py`` and a full ``pytest`` run show the same
report.
"""

import math
import random
import time

from treematch import generate
from treematch.bigraph import mwm_bruteforce, mwm_exact
from treematch.cli import bench_rows, main
from treematch.hier import classify_nodes, secw, solve_hierarchical
from treematch.ltree import LabeledTree, centroid_decompose, delta, restrict, serialize
from treematch.mast import (mam_bruteforce_all, mast_bruteforce, mast_fast, mast_reference,
                            solve_mam)
from treematch.unbalanced import mwm_partition_sweep, mwm_pruned, recover_with_hubs

RESULTS: list[str] = []


def report(label: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def test_criterion_1_matching_oracles():
    rng = random.Random(101)
    start = time.perf_counter()
    bad = 0
    count = 10_000
    for _ in range(count):
        g = generate.random_graph(rng, 6, 12, 20)
        want = mwm_bruteforce(g).weight
        if not (mwm_exact(g).weight == mwm_partition_sweep(g).weight
                == mwm_pruned(g).weight == want):
            bad += 1
    took = time.perf_counter() - start
    report("1 matching oracle equivalence", bad == 0 and took < 60,
           f"{count} graphs, {bad} mismatches, {took:.1f}s (limit 60s)")


def test_criterion_2_hub_recovery():
    rng = random.Random(202)
    bad = 0
    count = 5_000
    for _ in range(count):
        g = generate.random_graph(rng, 6, 12, 20)
        hubs = rng.sample(range(g.x_count), rng.randint(1, min(3, g.x_count)))
        got = recover_with_hubs(g, hubs, mwm_exact(g.without_x(hubs)))
        bad += got.weight != mwm_exact(g).weight
    report("2 hub recovery", bad == 0, f"{count} instances with 1-3 hubs, {bad} mismatches")


def test_criterion_3_hierarchical():
    rng = random.Random(303)
    bad_match = bad_part = bad_count = 0
    count = 1_000
    for _ in range(count):
        inst = generate.random_hier_instance(rng, 50, 500)
        got = solve_hierarchical(inst)
        for u in inst.internal_nodes():
            if got[u].weight != mwm_exact(inst.graph(u)[1]).weight:
                bad_match += 1
        groups = classify_nodes(inst).groups()
        members = [u for grp in groups for u in grp]
        if sorted(members) != inst.internal_nodes():
            bad_part += 1
        wr = inst.weight[inst.root]
        x = 1
        while x <= wr:
            if not sum(1 for u in range(inst.n) if secw(inst, u) > x) < wr / x:
                bad_count += 1
            x *= 2
    ok = bad_match == bad_part == bad_count == 0
    report("3 hierarchical solver", ok,
           f"{count} instances; matching mismatches {bad_match}, partition failures "
           f"{bad_part}, counting-bound failures {bad_count}")


def test_criterion_4_mam():
    rng = random.Random(404)
    bad = 0
    queries_checked = 0
    count = 5_000
    for _ in range(count):
        g = generate.random_multigraph(rng, 12)
        queries = [(0, j) for j in range(g.q)] + [(i, 0) for i in range(1, g.p)]
        want = mam_bruteforce_all(g)
        got = solve_mam(g, queries)
        queries_checked += len(queries)
        bad += sum(1 for qr, v in zip(queries, got) if want[qr] != v)
    report("4 agreement matching", bad == 0,
           f"{count} multigraphs (<= 12 edges), {queries_checked} queries, {bad} mismatches")


def _pair(rng, fam, n, d):
    if fam == "random-labeled":
        return generate.tree_pair(rng, fam, n, d, alphabet=rng.randint(1, 8),
                                  unlabeled=rng.random() * 0.6)
    return generate.tree_pair(rng, fam, n, d)


def test_criterion_5a_reference_vs_bruteforce():
    rng = random.Random(505)
    bad = done = 0
    while done < 2_000:
        fam = generate.FAMILIES[done % 3]
        t1, t2 = _pair(rng, fam, rng.randint(1, 12), rng.randint(1, 4))
        if delta(t1, t2) > 12:
            continue
        done += 1
        bad += mast_reference(t1, t2) != mast_bruteforce(t1, t2)
    report("5a reference vs brute force", bad == 0, f"{done} pairs with delta <= 12, {bad} mismatches")


def test_criterion_5b_fast_vs_reference():
    rng = random.Random(506)
    bad = 0
    count = 500
    per_family = dict.fromkeys(generate.FAMILIES, 0)
    for k in range(count):
        fam = generate.FAMILIES[k % 3]
        per_family[fam] += 1
        t1, t2 = _pair(rng, fam, rng.randint(2, 200), rng.randint(2, 6))
        bad += mast_fast(t1, t2) != mast_reference(t1, t2)
    report("5b fast vs reference", bad == 0,
           f"{count} pairs n <= 200 ({', '.join(f'{f} {c}' for f, c in per_family.items())}), "
           f"{bad} mismatches")


def _naive_restrict(t, labels):
    anc = []
    for v in range(t.n):
        chain = set()
        w = v
        while w >= 0:
            chain.add(w)
            w = t.parent[w]
        anc.append(chain)
    marked = [v for v in range(t.n) if t.labels[v] in labels]
    nodes = set(marked)
    for a in marked:
        for b in marked:
            common = anc[a] & anc[b]
            nodes.add(max(common, key=lambda w: len(anc[w])))
    parent = {}
    for v in nodes:
        p = t.parent[v]
        while p >= 0 and p not in nodes:
            p = t.parent[p]
        parent[v] = p
    return nodes, parent


def test_criterion_6_structure():
    rng = random.Random(606)
    bad_side = bad_level = 0
    largest = 0
    for k in range(1_000):
        n = 10_000 if k == 0 else int(math.exp(rng.uniform(math.log(2), math.log(10_000))))
        largest = max(largest, n)
        t = LabeledTree.from_parents(generate.random_shape(rng, n, rng.randint(1, 8)), [None] * n)
        dec = centroid_decompose(t)
        for pid, path in enumerate(dec.paths):
            top = t.size[path[0]]
            if any(2 * t.size[c] > top for c in dec.side_children_of_path(pid)):
                bad_side += 1
        if len(set(dec.level)) > max(1, math.ceil(math.log2(n))):
            bad_level += 1
    bad_restrict = 0
    checks = 1_000
    for _ in range(checks):
        t = generate.random_labeled_tree(rng, rng.randint(1, 60), rng.randint(1, 5), 6, 0.3)
        labels = {f"s{k}" for k in range(6) if rng.random() < 0.5}
        r = restrict(t, labels)
        nodes, parent = _naive_restrict(t, labels)
        ok = set(r.orig) == nodes and all(
            (r.orig[r.tree.parent[i]] if r.tree.parent[i] >= 0 else -1) == parent[v]
            for i, v in enumerate(r.orig))
        bad_restrict += not ok
    ok = bad_side == bad_level == bad_restrict == 0
    report("6 structural invariants", ok,
           f"1000 trees up to n={largest}: side-tree violations {bad_side}, level-bound "
           f"violations {bad_level}; {checks} restricted subtrees (n <= 60) vs definition: "
           f"{bad_restrict} mismatches")


def test_criterion_7_operational(tmp_path, capsys):
    rng = random.Random(707)
    t1, t2 = generate.evolutionary_pair(rng, 2000, 2)
    a, b = tmp_path / "t1.tre", tmp_path / "t2.tre"
    a.write_text(serialize(t1))
    b.write_text(serialize(t2))
    start = time.perf_counter()
    code = main(["mast", str(a), str(b), "--engine", "fast"])
    took = time.perf_counter() - start
    out = capsys.readouterr().out
    rows = bench_rows("evolutionary", [500, 1000, 2000], ["reference", "fast"], seed=7,
                      degree=2, repeat=3)
    millis = {(r[0], r[1]): float(r[4]) for r in rows}
    ratios = {n: millis["fast", n] / millis["reference", n] for n in (500, 1000, 2000)}
    ok = code == 0 and took < 10 and all(r <= 2.0 for r in ratios.values())
    report("7 operational bound", ok,
           f"fast n=2000 in {took:.2f}s (limit 10s, {out.strip()}); fast/reference time ratios "
           + ", ".join(f"n={n}: {r:.2f}" for n, r in ratios.items()) + " (limit 2.0)")


if __name__ == "__main__":
    import sys

    import pytest

    sys.exit(pytest.main([__file__, "-q"]))
