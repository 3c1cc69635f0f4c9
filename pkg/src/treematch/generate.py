"""Seeded random inputs: trees, bipartite graphs, hierarchical instances, multigraphs."""

from __future__ import annotations

import random
from typing import Optional

from .bigraph import BipartiteGraph
from .hier import HierInstance
from .ltree import LabeledTree
from .mast import COLORS, MamMultigraph

FAMILIES = ("evolutionary", "uniform", "random-labeled")


def _symbol(k: int) -> str:
    return f"s{k}"


def random_shape(rng: random.Random, n: int, max_degree: int) -> list[int]:
    """Parent array of a random recursive tree with bounded out-degree."""
    parents = [-1]
    open_nodes = [0]
    kids = [0]
    for v in range(1, n):
        i = rng.randrange(len(open_nodes))
        p = open_nodes[i]
        parents.append(p)
        kids[p] += 1
        if kids[p] >= max_degree:
            open_nodes[i] = open_nodes[-1]
            open_nodes.pop()
        kids.append(0)
        open_nodes.append(v)
    return parents


def evolutionary_tree(rng: random.Random, leaves: list[str], max_degree: int = 2) -> LabeledTree:
    """Random topology over ``leaves`` built by merging groups of 2..max_degree."""
    parents: list[int] = []
    labels: list[Optional[str]] = []
    pool = []
    for s in leaves:
        pool.append(len(parents))
        parents.append(-1)
        labels.append(s)
    while len(pool) > 1:
        k = rng.randint(2, max(2, min(max_degree, len(pool))))
        group = [pool.pop(rng.randrange(len(pool))) for _ in range(k)]
        v = len(parents)
        parents.append(-1)
        labels.append(None)
        for c in group:
            parents[c] = v
        pool.append(v)
    return LabeledTree.from_parents(parents, labels)


def evolutionary_pair(rng: random.Random, n: int, max_degree: int = 2):
    """Two evolutionary trees on the same leaf set, roughly ``n`` nodes each."""
    k = max(1, (n + 1) // 2)
    leaves = [_symbol(i) for i in range(k)]
    t1 = evolutionary_tree(rng, leaves, max_degree)
    shuffled = leaves[:]
    rng.shuffle(shuffled)
    t2 = evolutionary_tree(rng, shuffled, max_degree)
    return t1, t2


def uniform_tree(rng: random.Random, n: int, max_degree: int = 3) -> LabeledTree:
    parents = random_shape(rng, n, max_degree)
    return LabeledTree.from_parents(parents, ["a"] * n)


def random_labeled_tree(rng: random.Random, n: int, max_degree: int = 3, alphabet: int = 4,
                        unlabeled: float = 0.3) -> LabeledTree:
    parents = random_shape(rng, n, max_degree)
    labels = [None if rng.random() < unlabeled else _symbol(rng.randrange(alphabet))
              for _ in range(n)]
    return LabeledTree.from_parents(parents, labels)


def tree_pair(rng: random.Random, family: str, n: int, max_degree: int = 3, **kw):
    if family == "evolutionary":
        return evolutionary_pair(rng, n, max_degree)
    if family == "uniform":
        return uniform_tree(rng, n, max_degree), uniform_tree(rng, n, max_degree)
    if family == "random-labeled":
        return (random_labeled_tree(rng, n, max_degree, **kw),
                random_labeled_tree(rng, n, max_degree, **kw))
    raise ValueError(f"unknown family {family!r}")


def random_graph(rng: random.Random, max_small: int = 6, max_large: int = 12,
                 max_weight: int = 20, density: Optional[float] = None) -> BipartiteGraph:
    """Random graph without isolated nodes; either side may be the small one."""
    a = rng.randint(1, max_small)
    b = rng.randint(a, max_large)
    if rng.random() < 0.5:
        a, b = b, a
    dens = rng.uniform(0.15, 1.0) if density is None else density
    edges = {}
    for x in range(a):
        for y in range(b):
            if rng.random() < dens:
                edges[x, y] = rng.randint(1, max_weight)
    for x in range(a):
        if not any(k[0] == x for k in edges):
            edges[x, rng.randrange(b)] = rng.randint(1, max_weight)
    for y in range(b):
        if not any(k[1] == y for k in edges):
            edges[rng.randrange(a), y] = rng.randint(1, max_weight)
    return BipartiteGraph(a, b, tuple((x, y, w) for (x, y), w in sorted(edges.items())))


def random_hier_instance(rng: random.Random, max_nodes: int = 50, max_root_weight: int = 500,
                         max_degree: int = 5) -> HierInstance:
    """Valid instance: weights split top-down, graphs bounded by child weights."""
    n = rng.randint(1, max_nodes)
    parents = random_shape(rng, n, max_degree)
    kids: list[list[int]] = [[] for _ in range(n)]
    for v, p in enumerate(parents):
        if p >= 0:
            kids[p].append(v)
    weight = [0] * n
    weight[0] = rng.randint(max(1, n), max_root_weight) if n <= max_root_weight else n
    order = [0]
    for u in order:
        order.extend(kids[u])
    # subtree sizes so every descendant can still get weight >= 1
    size = [1] * n
    for u in reversed(order):
        for c in kids[u]:
            size[u] += size[c]
    for u in order:
        budget = weight[u] - 1 if rng.random() < 0.5 else weight[u]
        need = sum(size[c] for c in kids[u])
        spare = max(0, budget - need)
        for c in kids[u]:
            # skew the split so a dominant child appears regularly
            share = rng.randint(0, spare) if rng.random() < 0.3 else rng.randint(0, spare // max(1, len(kids[u])))
            spare -= share
            weight[c] = size[c] + share
    graphs = {}
    for u in range(n):
        if not kids[u]:
            continue
        ycount = rng.randint(1, max(1, len(kids[u]) + rng.randint(-1, 4)))
        edges = {}
        for c in kids[u]:
            cap = weight[c]
            if rng.random() < 0.2:
                continue
            ys = rng.sample(range(ycount), rng.randint(1, ycount))
            for y in ys:
                if cap <= 0:
                    break
                w = rng.randint(1, max(1, cap // len(ys) if rng.random() < 0.6 else cap))
                w = min(w, cap)
                cap -= w
                edges[c, y] = w
        used_y = sorted({y for _, y in edges})
        if not edges:
            continue
        yi = {y: k for k, y in enumerate(used_y)}
        x_ids = tuple(c for c in kids[u] if any(k[0] == c for k in edges))
        xi = {c: k for k, c in enumerate(x_ids)}
        graphs[u] = (x_ids, BipartiteGraph(len(x_ids), len(used_y),
                                           tuple((xi[c], yi[y], w) for (c, y), w in sorted(edges.items()))))
    return HierInstance(tuple(tuple(k) for k in kids), tuple(weight), graphs, 0)


def random_multigraph(rng: random.Random, max_edges: int = 12, max_side: int = 5,
                      max_weight: int = 9) -> MamMultigraph:
    p = rng.randint(1, max_side)
    q = rng.randint(1, max_side)
    slots = [(i, j, c) for i in range(p) for j in range(q) for c in COLORS]
    k = rng.randint(0, min(max_edges, len(slots)))
    chosen = rng.sample(slots, k)
    return MamMultigraph(p, q, tuple(sorted((i, j, c, rng.randint(0, max_weight))
                                            for i, j, c in chosen)))
