"""Matching accelerations for node-unbalanced and weight-unbalanced graphs.

Node-unbalanced: the larger side is swept in blocks of ``n_s`` nodes,
keeping only the right nodes matched so far between rounds, and edges
outside each small-side node's ``n_s`` heaviest can be discarded up front.

Weight-unbalanced: given an optimal matching of the graph with a few hub
nodes removed, the full optimum is recovered by reinserting the hubs one at
a time along a maximum-gain alternating path.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Collection, Iterable, Optional

from .bigraph import BipartiteGraph, Edge, Matching, mwm_exact


def _compact_sides(g: BipartiteGraph) -> tuple[list[int], list[int]]:
    xs = sorted({x for x, _, _ in g.edges})
    ys = sorted({y for _, y, _ in g.edges})
    return xs, ys


def mwm_partition_sweep(g: BipartiteGraph,
                        on_round: Optional[Callable[[list[int], Matching], None]] = None) -> Matching:
    """Optimal matching computed round by round over blocks of the larger side.

    ``on_round`` (for debugging) receives the larger-side nodes seen so far
    and the matching carried out of each round, in the oriented frame.
    """
    if not g.edges:
        return Matching.empty()
    xs, ys = _compact_sides(g)
    if len(xs) > len(ys):
        return mwm_partition_sweep(g.transpose(), on_round).transpose()
    ns = len(xs)
    by_y: dict[int, list[Edge]] = {}
    for e in g.edges:
        by_y.setdefault(e[1], []).append(e)
    order = sorted(ys, key=lambda y: (len(by_y[y]), y))
    k, r = divmod(len(order), ns)
    blocks = [order[:r]] + [order[r + i * ns:r + (i + 1) * ns] for i in range(k)]

    def induced(yset: Iterable[int]) -> BipartiteGraph:
        return g.with_edges(e for y in sorted(set(yset)) for e in by_y[y])

    current = mwm_exact(induced(blocks[0])) if blocks[0] else Matching.empty()
    seen = list(blocks[0])
    for block in blocks[1:]:
        carried = [y for _, y in current.pairs]
        current = mwm_exact(induced(carried + block))
        seen += block
        if on_round is not None:
            on_round(list(seen), current)
    return current


def prune_top_ns(g: BipartiteGraph) -> BipartiteGraph:
    """Keep each small-side node's ``n_s`` heaviest edges (lower partner wins ties)."""
    xs, ys = _compact_sides(g)
    ns = min(len(xs), len(ys))
    small_is_x = len(xs) <= len(ys)
    incident: dict[int, list[Edge]] = {}
    for e in g.edges:
        incident.setdefault(e[0] if small_is_x else e[1], []).append(e)
    keep: set[Edge] = set()
    pruned = False
    for lst in incident.values():
        if len(lst) > ns:
            pruned = True
            lst = sorted(lst, key=lambda e: (-e[2], e[1] if small_is_x else e[0]))[:ns]
        keep.update(lst)
    if not pruned:
        return g
    return g.with_edges(e for e in g.edges if e in keep)


def mwm_pruned(g: BipartiteGraph) -> Matching:
    return mwm_partition_sweep(prune_top_ns(g))


def _check_hubs(g: BipartiteGraph, hubs: Collection[int]) -> None:
    for h in hubs:
        if not 0 <= h < g.x_count:
            raise ValueError(f"hub index {h} out of range for {g.x_count} left nodes")


def reduce_edges_for_hubs(g: BipartiteGraph, hubs: Collection[int],
                          keep: Iterable[tuple[int, int]] = ()) -> BipartiteGraph:
    """Edge subset that still contains a maximum weight matching of ``g``.

    Two candidate sets are built and the smaller one is returned: the
    top-``n_s`` pruning, and the hub-free edges plus, for each hub, its edges
    into right nodes reached by hub-free edges and its ``h`` heaviest other
    edges.  Pairs listed in ``keep`` are always retained, so an optimal
    matching of ``g`` minus the hubs survives the reduction.
    """
    _check_hubs(g, hubs)
    hubset = set(hubs)
    h = len(hubset)
    rest = [e for e in g.edges if e[0] not in hubset]
    reached = {y for _, y, _ in rest}
    chosen: set[Edge] = set(rest)
    for hub in hubset:
        inside = []
        outside = []
        for e in g.edges:
            if e[0] != hub:
                continue
            (inside if e[1] in reached else outside).append(e)
        chosen.update(inside)
        chosen.update(sorted(outside, key=lambda e: (-e[2], e[1]))[:h])
    pruned = set(prune_top_ns(g).edges)
    picked = pruned if len(pruned) < len(chosen) else chosen
    keep = set(keep)
    return g.with_edges(e for e in g.edges if e in picked or (e[0], e[1]) in keep)


@dataclass(frozen=True)
class AugmentingPath:
    """Alternating path ``x0, y0, x1, y1, ...`` starting at the new node.

    Edges ``(x_k, y_k)`` enter the matching and ``(x_{k+1}, y_k)`` leave it.
    The path ends on a right node (which was free) or on a left node (which
    ends up unmatched).
    """

    nodes: tuple[int, ...]
    gain: int

    def apply(self, g: BipartiteGraph, m: Matching) -> Matching:
        pairs = set(m.pairs)
        xs = self.nodes[0::2]
        ys = self.nodes[1::2]
        for k, y in enumerate(ys):
            if k + 1 < len(xs):
                pairs.discard((xs[k + 1], y))
        for k, y in enumerate(ys):
            pairs.add((xs[k], y))
        return Matching(frozenset(pairs), m.weight + self.gain)


def max_augmenting_path(g: BipartiteGraph, m: Matching, x: int) -> Optional[AugmentingPath]:
    """Maximum-gain alternating path from the unmatched left node ``x``.

    ``m`` must be optimal for ``g`` without ``x``, so the alternating graph
    has no positive-gain cycle and a label-correcting longest-path search
    from ``x`` is exact.  Returns None when leaving ``x`` unmatched is optimal.
    """
    adj = g.x_adjacency()
    mate_y = m.mate_of_y()
    wmap = g.weight_map()
    gain = {x: 0}
    pred: dict[int, tuple[int, int]] = {}
    queue = deque([x])
    queued = {x}
    best_gain = 0
    best_end: Optional[tuple[int, Optional[int]]] = None
    limit = g.x_count + 1
    relax_count: dict[int, int] = {}
    while queue:
        a = queue.popleft()
        queued.discard(a)
        ga = gain[a]
        for y, w in adj[a]:
            a2 = mate_y.get(y)
            if a2 == a:
                continue
            if a2 is None:
                if ga + w > best_gain:
                    best_gain = ga + w
                    best_end = (a, y)
                continue
            cand = ga + w - wmap[(a2, y)]
            if a2 != x and cand > gain.get(a2, -1 << 62):
                gain[a2] = cand
                pred[a2] = (a, y)
                relax_count[a2] = relax_count.get(a2, 0) + 1
                if relax_count[a2] > limit:
                    raise ValueError("positive alternating cycle: matching is not optimal without x")
                if a2 not in queued:
                    queue.append(a2)
                    queued.add(a2)
    for a, ga in gain.items():
        if a != x and ga > best_gain:
            best_gain = ga
            best_end = (a, None)
    if best_end is None:
        return None
    tail, y_end = best_end
    rev: list[int] = [] if y_end is None else [y_end]
    node = tail
    while node != x:
        rev.append(node)
        a, y = pred[node]
        rev.append(y)
        node = a
    rev.append(x)
    return AugmentingPath(tuple(reversed(rev)), best_gain)


def reinsert_node(g: BipartiteGraph, x: int, m: Matching) -> Matching:
    """Optimal matching of ``g`` from an optimal matching of ``g`` minus ``x``."""
    path = max_augmenting_path(g, m, x)
    return m if path is None else path.apply(g, m)


def recover_with_hubs(g: BipartiteGraph, hubs: Collection[int], m_without: Matching) -> Matching:
    """Optimal matching of ``g`` given an optimal matching of ``g`` minus ``hubs``."""
    _check_hubs(g, hubs)
    if not hubs:
        return m_without
    order = sorted(set(hubs))
    if any(x in order for x, _ in m_without.pairs):
        raise ValueError("matching of the hub-free graph touches a hub")
    reduced = reduce_edges_for_hubs(g, order, keep=m_without.pairs)
    current = m_without
    for i, hub in enumerate(order):
        current = reinsert_node(reduced.without_x(order[i + 1:]), hub, current)
    return current
