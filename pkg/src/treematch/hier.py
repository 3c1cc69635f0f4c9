"""Hierarchical bipartite matching.

An instance is a rooted tree whose node ``u`` carries a positive weight
``w(u)`` and a bipartite graph ``G_u`` whose left nodes are children of
``u``.  Weights dominate: ``w(u)`` is at least the sum of its children's
weights, and the edges at child ``v`` in ``G_u`` weigh at most ``w(v)`` in
total.  The task is a maximum weight matching of every ``G_u``.

Nodes are routed through weight classes: nodes with a heavy second child
(``secw > b^3``) strip their single dominant child and recover it afterwards,
while lighter nodes are grouped into bands that share a small critical
degree and reinstate their few heavy children the same way.  The class only
decides the route; every route yields an optimal matching.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Collection, Iterable, Mapping, Optional

from .bigraph import BipartiteGraph, Matching, mwm_exact, validate
from .unbalanced import mwm_pruned, prune_top_ns, recover_with_hubs

# left index i of the graph stands for child x_ids[i]
NodeGraph = tuple[tuple[int, ...], BipartiteGraph]

PI_BANDS = 21


class InstanceFormatError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class HierInstance:
    children: tuple[tuple[int, ...], ...]
    weight: tuple[int, ...]
    graphs: Mapping[int, NodeGraph] = field(default_factory=dict)
    root: int = 0

    @property
    def n(self) -> int:
        return len(self.weight)

    def internal_nodes(self) -> list[int]:
        return [u for u in range(self.n) if self.children[u]]

    def graph(self, u: int) -> NodeGraph:
        return self.graphs.get(u, ((), BipartiteGraph(0, 0)))

    @property
    def b(self) -> int:
        best = 0
        for x_ids, g in self.graphs.values():
            xs = {x for x, _, _ in g.edges}
            ys = {y for _, y, _ in g.edges}
            best = max(best, min(len(xs), len(ys)))
        return best

    @property
    def e(self) -> int:
        return sum(len(g.edges) for _, g in self.graphs.values())


def validate_instance(inst: HierInstance) -> Optional[str]:
    """First violated instance invariant, or None."""
    n = inst.n
    if len(inst.children) != n:
        return "children and weight lists differ in length"
    if not 0 <= inst.root < n:
        return "root out of range" if n else None
    seen = {inst.root}
    stack = [inst.root]
    while stack:
        u = stack.pop()
        for c in inst.children[u]:
            if not 0 <= c < n or c in seen:
                return f"node {u} has an invalid or repeated child {c}"
            seen.add(c)
            stack.append(c)
    if len(seen) != n:
        return "some nodes are unreachable from the root"
    for u in range(n):
        if inst.weight[u] < 1:
            return f"node {u} has nonpositive weight"
        below = sum(inst.weight[c] for c in inst.children[u])
        if below > inst.weight[u]:
            return f"node {u}: children weigh {below} > w(u) = {inst.weight[u]}"
    for u, (x_ids, g) in inst.graphs.items():
        if not 0 <= u < n:
            return f"graph attached to unknown node {u}"
        if len(x_ids) != g.x_count or len(set(x_ids)) != len(x_ids):
            return f"node {u}: malformed left index map"
        kids = set(inst.children[u])
        for c in x_ids:
            if c not in kids:
                return f"node {u}: left node {c} is not a child"
        problem = validate(g)
        if problem:
            return f"node {u}: {problem}"
        load = [0] * g.x_count
        for x, _, w in g.edges:
            load[x] += w
        for x, total in enumerate(load):
            if total > inst.weight[x_ids[x]]:
                return (f"node {u}: edges at child {x_ids[x]} weigh {total} "
                        f"> w = {inst.weight[x_ids[x]]}")
    return None


def secw(inst: HierInstance, u: int) -> int:
    """Second largest child weight (0 with fewer than two children)."""
    ws = sorted((inst.weight[c] for c in inst.children[u]), reverse=True)
    return ws[1] if len(ws) > 1 else 0


def critical_degree_holds(inst: HierInstance, nodes: Collection[int], h: int,
                          delta: Optional[int] = None) -> bool:
    """Every node has at most ``h`` children weighing at least ``delta``.

    ``delta`` defaults to the smallest weight in ``nodes``.
    """
    if not nodes:
        raise ValueError("critical degree of an empty node set")
    if delta is None:
        delta = min(inst.weight[u] for u in nodes)
    return all(sum(1 for c in inst.children[u] if inst.weight[c] >= delta) <= h
               for u in nodes)


def solve_critical_set(inst: HierInstance, nodes: Collection[int], h: int) -> dict[int, Matching]:
    """Match every graph of ``nodes`` by removing then reinstating heavy children."""
    if not critical_degree_holds(inst, nodes, h):
        raise ValueError(f"node set does not have critical degree {h}")
    delta = min(inst.weight[u] for u in nodes)
    out = {}
    for u in nodes:
        x_ids, g = inst.graph(u)
        hubs = [i for i, c in enumerate(x_ids) if inst.weight[c] >= delta]
        out[u] = recover_with_hubs(g, hubs, mwm_pruned(g.without_x(hubs)))
    return out


@dataclass
class Classes:
    phi: dict[int, set[int]] = field(default_factory=dict)
    pi_prime: set[int] = field(default_factory=set)
    pi: dict[int, set[int]] = field(default_factory=dict)
    residual: set[int] = field(default_factory=set)

    def groups(self) -> list[set[int]]:
        return ([s for _, s in sorted(self.phi.items())] + [self.pi_prime]
                + [s for _, s in sorted(self.pi.items())] + [self.residual])


def phi_band(s: int, b3: int) -> int:
    """Smallest k >= 1 with ``s <= 2^k * b3`` (caller ensures ``s > b3``)."""
    k = 1
    while s > b3 << k:
        k += 1
    return k


def pi_band(w: int, b: int) -> int:
    """The k with ``b^k < w^7 <= b^(k+1)``, in exact integers."""
    w7 = w ** 7
    k = 0
    bk = b
    while w7 > bk:
        k += 1
        bk *= b
    return k


def seventh_root_floor(b: int) -> int:
    h = 1
    while (h + 1) ** 7 <= b:
        h += 1
    return h


def classify_nodes(inst: HierInstance, b: Optional[int] = None) -> Classes:
    if b is None:
        b = inst.b
    out = Classes()
    b3 = b ** 3
    for u in inst.internal_nodes():
        w = inst.weight[u]
        if b <= 2 or w == 1 or len(inst.children[u]) < 2:
            out.residual.add(u)
            continue
        s = secw(inst, u)
        if s > b3:
            out.phi.setdefault(phi_band(s, b3), set()).add(u)
        elif w > b3:
            out.pi_prime.add(u)
        else:
            out.pi.setdefault(pi_band(w, b), set()).add(u)
    return out


def _solve_phi(inst: HierInstance, u: int) -> Matching:
    """Strip the heaviest child, match the rest on the pruned graph, reinstate it."""
    x_ids, g = inst.graph(u)
    if not g.edges:
        return Matching.empty()
    g = prune_top_ns(g)
    heaviest = max(range(len(x_ids)), key=lambda i: (inst.weight[x_ids[i]], -i))
    return recover_with_hubs(g, [heaviest], mwm_pruned(g.without_x([heaviest])))


def solve_hierarchical(inst: HierInstance, check: bool = True) -> dict[int, Matching]:
    """Maximum weight matching of the graph at every internal node."""
    if check:
        problem = validate_instance(inst)
        if problem:
            raise ValueError(f"invalid instance: {problem}")
    b = inst.b
    classes = classify_nodes(inst, b)
    out: dict[int, Matching] = {}
    for group in classes.phi.values():
        for u in group:
            out[u] = _solve_phi(inst, u)
    if classes.pi_prime:
        out.update(solve_critical_set(inst, classes.pi_prime, 1))
    h = seventh_root_floor(b)
    for group in classes.pi.values():
        out.update(solve_critical_set(inst, group, h))
    for u in classes.residual:
        out[u] = mwm_exact(inst.graph(u)[1])
    return out


def instance_from_parents(parents: Iterable[int], weights: Iterable[int],
                          edges: Mapping[int, Iterable[tuple[int, int, int]]]) -> HierInstance:
    """Convenience builder; ``edges[u]`` lists ``(child, y, w)`` triples."""
    parents = list(parents)
    kids: list[list[int]] = [[] for _ in parents]
    root = -1
    for v, p in enumerate(parents):
        if p < 0:
            root = v
        else:
            kids[p].append(v)
    graphs = {}
    for u, lst in edges.items():
        lst = list(lst)
        if not lst:
            continue
        x_ids = tuple(sorted({c for c, _, _ in lst}, key=kids[u].index))
        xi = {c: i for i, c in enumerate(x_ids)}
        y_count = max(y for _, y, _ in lst) + 1
        graphs[u] = (x_ids, BipartiteGraph(len(x_ids), y_count,
                                           tuple((xi[c], y, w) for c, y, w in lst)))
    return HierInstance(tuple(tuple(k) for k in kids), tuple(weights), graphs, root)


def load_instance(text: str) -> tuple[HierInstance, list]:
    """Parse the JSON instance format; returns the instance and the node ids by index."""
    try:
        doc = json.loads(text)
        nodes = doc["nodes"]
        ids = [nd["id"] for nd in nodes]
        index = {nid: i for i, nid in enumerate(ids)}
        if len(index) != len(ids):
            raise InstanceFormatError("duplicate node id")
        kids = [tuple(index[c] for c in nd.get("children", [])) for nd in nodes]
        weights = tuple(int(nd["weight"]) for nd in nodes)
        graphs: dict[int, NodeGraph] = {}
        for i, nd in enumerate(nodes):
            gdoc = nd.get("graph")
            if not gdoc or not gdoc.get("edges"):
                continue
            raw = [(index[c], int(y), int(w)) for c, y, w in gdoc["edges"]]
            order = {c: k for k, c in enumerate(kids[i])}
            x_ids = tuple(sorted({c for c, _, _ in raw}, key=lambda c: order.get(c, len(order) + c)))
            xi = {c: k for k, c in enumerate(x_ids)}
            graphs[i] = (x_ids, BipartiteGraph(len(x_ids), int(gdoc["y_count"]),
                                               tuple((xi[c], y, w) for c, y, w in raw)))
    except InstanceFormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise InstanceFormatError(f"malformed instance: {exc!r}") from None
    if not nodes:
        raise InstanceFormatError("instance has no nodes")
    return HierInstance(tuple(kids), weights, graphs, 0), ids
