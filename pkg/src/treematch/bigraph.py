"""Weighted bipartite graphs and the exact maximum weight matching core.

The core matcher is a potentials-based shortest augmenting path method
(Hungarian family, O(n_s^2 * n) per call on the compacted node set).
Scaling matchers have better worst-case bounds, but every caller here only
relies on the result being optimal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

Edge = tuple[int, int, int]


class GraphFormatError(ValueError):
    """Raised when graph text cannot be parsed."""


class InstanceTooLarge(ValueError):
    """Raised by brute-force oracles when the input exceeds their guard."""


@dataclass(frozen=True)
class BipartiteGraph:
    """Left nodes ``0..x_count-1``, right nodes ``0..y_count-1``.

    Construction does not enforce the invariants; call :func:`validate`
    for that.  Internally built subgraphs routinely carry isolated nodes.
    """

    x_count: int
    y_count: int
    edges: tuple[Edge, ...] = ()

    @classmethod
    def from_edges(cls, x_count: int, y_count: int,
                   edges: Iterable[Iterable[int]]) -> "BipartiteGraph":
        return cls(x_count, y_count, tuple((int(x), int(y), int(w)) for x, y, w in edges))

    @property
    def n_small(self) -> int:
        return min(self.x_count, self.y_count)

    @property
    def total_weight(self) -> int:
        return sum(w for _, _, w in self.edges)

    def weight_map(self) -> dict[tuple[int, int], int]:
        return {(x, y): w for x, y, w in self.edges}

    def x_adjacency(self) -> list[list[tuple[int, int]]]:
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.x_count)]
        for x, y, w in self.edges:
            adj[x].append((y, w))
        return adj

    def y_adjacency(self) -> list[list[tuple[int, int]]]:
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.y_count)]
        for x, y, w in self.edges:
            adj[y].append((x, w))
        return adj

    def transpose(self) -> "BipartiteGraph":
        return BipartiteGraph(self.y_count, self.x_count,
                              tuple((y, x, w) for x, y, w in self.edges))

    def without_x(self, xs: Iterable[int]) -> "BipartiteGraph":
        """Same index space with every edge touching ``xs`` removed."""
        drop = set(xs)
        return BipartiteGraph(self.x_count, self.y_count,
                              tuple(e for e in self.edges if e[0] not in drop))

    def with_edges(self, edges: Iterable[Edge]) -> "BipartiteGraph":
        return BipartiteGraph(self.x_count, self.y_count, tuple(edges))


@dataclass(frozen=True)
class Matching:
    pairs: frozenset[tuple[int, int]]
    weight: int

    @classmethod
    def empty(cls) -> "Matching":
        return cls(frozenset(), 0)

    @classmethod
    def from_pairs(cls, g: BipartiteGraph, pairs: Iterable[tuple[int, int]]) -> "Matching":
        wmap = g.weight_map()
        ps = frozenset(pairs)
        return cls(ps, sum(wmap[p] for p in ps))

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(sorted(self.pairs))

    def mate_of_x(self) -> dict[int, int]:
        return {x: y for x, y in self.pairs}

    def mate_of_y(self) -> dict[int, int]:
        return {y: x for x, y in self.pairs}

    def transpose(self) -> "Matching":
        return Matching(frozenset((y, x) for x, y in self.pairs), self.weight)


def validate(g: BipartiteGraph) -> Optional[str]:
    """Return a description of the first violated invariant, or None."""
    if g.x_count < 0 or g.y_count < 0:
        return "negative node count"
    seen: set[tuple[int, int]] = set()
    touched_x: set[int] = set()
    touched_y: set[int] = set()
    for x, y, w in g.edges:
        if not (0 <= x < g.x_count and 0 <= y < g.y_count):
            return f"index out of range in edge ({x}, {y})"
        if w <= 0:
            return f"nonpositive weight {w} on edge ({x}, {y})"
        if (x, y) in seen:
            return f"duplicate edge ({x}, {y})"
        seen.add((x, y))
        touched_x.add(x)
        touched_y.add(y)
    for x in range(g.x_count):
        if x not in touched_x:
            return f"isolated node x{x}"
    for y in range(g.y_count):
        if y not in touched_y:
            return f"isolated node y{y}"
    return None


def check_matching(g: BipartiteGraph, m: Matching) -> Optional[str]:
    """Matching invariants against the graph it came from."""
    wmap = g.weight_map()
    xs = [x for x, _ in m.pairs]
    ys = [y for _, y in m.pairs]
    if len(set(xs)) != len(xs) or len(set(ys)) != len(ys):
        return "matching is not node-disjoint"
    missing = [p for p in m.pairs if p not in wmap]
    if missing:
        return f"pair {missing[0]} is not an edge"
    if sum(wmap[p] for p in m.pairs) != m.weight:
        return "stored weight differs from recomputed weight"
    return None


def _hungarian(rows: int, cols: int, cost: list[list[float]]) -> list[int]:
    """Min-cost assignment of every row (rows <= cols); returns column per row.

    Classic potentials + Dijkstra-like sweep.  Rows are inserted in index
    order and columns scanned in index order, which fixes tie-breaking.
    """
    inf = math.inf
    u = [0] * (rows + 1)
    v = [0] * (cols + 1)
    p = [0] * (cols + 1)
    way = [0] * (cols + 1)
    for i in range(1, rows + 1):
        p[0] = i
        j0 = 0
        minv = [inf] * (cols + 1)
        used = [False] * (cols + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            row = cost[i0 - 1]
            ui0 = u[i0]
            delta = inf
            j1 = 0
            for j in range(1, cols + 1):
                if not used[j]:
                    cur = row[j - 1] - ui0 - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(cols + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while True:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
            if j0 == 0:
                break
    assign = [-1] * rows
    for j in range(1, cols + 1):
        if p[j]:
            assign[p[j] - 1] = j - 1
    return assign


def mwm_exact(g: BipartiteGraph) -> Matching:
    """Maximum weight matching of ``g``.

    Isolated nodes are compacted away first, and stars and 2x2 graphs are
    settled by inspection.  Otherwise each left node gets a private
    zero-cost dummy column so that leaving it unmatched is always feasible,
    which turns the assignment solver into a (non-perfect) matcher.
    """
    if not g.edges:
        return Matching.empty()
    xs = sorted({x for x, _, _ in g.edges})
    ys = sorted({y for _, y, _ in g.edges})
    if len(xs) == 1 or len(ys) == 1:
        # star: the heaviest edge, lowest (x, y) on ties
        best = min(g.edges, key=lambda e: (-e[2], e[0], e[1]))
        return Matching(frozenset([(best[0], best[1])]), best[2])
    if len(xs) == 2 and len(ys) == 2:
        wmap = g.weight_map()
        (a, b), (c, d) = xs, ys
        best = max(g.edges, key=lambda e: (e[2], -e[0], -e[1]))
        if (a, c) in wmap and (b, d) in wmap and wmap[a, c] + wmap[b, d] > best[2]:
            best_pairs, best_w = {(a, c), (b, d)}, wmap[a, c] + wmap[b, d]
        else:
            best_pairs, best_w = {(best[0], best[1])}, best[2]
        if (a, d) in wmap and (b, c) in wmap and wmap[a, d] + wmap[b, c] > best_w:
            best_pairs, best_w = {(a, d), (b, c)}, wmap[a, d] + wmap[b, c]
        return Matching(frozenset(best_pairs), best_w)
    transposed = len(xs) > len(ys)
    if transposed:
        xs, ys = ys, xs
        edges = [(y, x, w) for x, y, w in g.edges]
    else:
        edges = list(g.edges)
    xi = {x: i for i, x in enumerate(xs)}
    yi = {y: j for j, y in enumerate(ys)}
    nr, ny = len(xs), len(ys)
    cols = ny + nr
    inf = math.inf
    cost = [[inf] * cols for _ in range(nr)]
    for i in range(nr):
        cost[i][ny + i] = 0
    for x, y, w in edges:
        cost[xi[x]][yi[y]] = -w
    assign = _hungarian(nr, cols, cost)
    pairs = []
    weight = 0
    for i, j in enumerate(assign):
        if j < ny:
            weight -= cost[i][j]
            a, b = xs[i], ys[j]
            pairs.append((b, a) if transposed else (a, b))
    return Matching(frozenset(pairs), int(weight))


BRUTEFORCE_LIMIT = 8


def mwm_bruteforce(g: BipartiteGraph) -> Matching:
    """Exhaustive optimum over every matching, as a subset dynamic program.

    The state is the set of already-used nodes of the smaller side while the
    larger side is scanned one node at a time, so every matching is reached.
    """
    if g.n_small > BRUTEFORCE_LIMIT:
        raise InstanceTooLarge(f"min side {g.n_small} exceeds {BRUTEFORCE_LIMIT}")
    small_is_x = g.x_count <= g.y_count
    adj: dict[int, list[tuple[int, int]]] = {}
    for x, y, w in g.edges:
        s, l = (x, y) if small_is_x else (y, x)
        adj.setdefault(l, []).append((s, w))
    # mask -> (weight, chain) where chain is a linked tuple of chosen pairs
    states: dict[int, tuple[int, object]] = {0: (0, None)}
    for l in sorted(adj):
        nxt = dict(states)
        for mask, (wt, chain) in states.items():
            for s, w in adj[l]:
                bit = 1 << s
                if mask & bit:
                    continue
                cand = wt + w
                key = mask | bit
                old = nxt.get(key)
                if old is None or cand > old[0]:
                    nxt[key] = (cand, ((s, l), chain))
        states = nxt
    best_w, chain = max(states.values(), key=lambda t: t[0])
    pairs = []
    while chain is not None:
        (s, l), chain = chain
        pairs.append((s, l) if small_is_x else (l, s))
    return Matching(frozenset(pairs), best_w)


def parse_graph(text: str) -> BipartiteGraph:
    """Parse ``bipartite <x_count> <y_count>`` followed by ``x y w`` lines."""
    header: Optional[tuple[int, int]] = None
    edges: list[Edge] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            if header is None:
                if len(parts) != 3 or parts[0] != "bipartite":
                    raise GraphFormatError(f"line {lineno}: expected 'bipartite <x> <y>'")
                header = (int(parts[1]), int(parts[2]))
                continue
            if len(parts) != 3:
                raise GraphFormatError(f"line {lineno}: expected 'x y w'")
            x, y, w = (int(p) for p in parts)
        except ValueError as exc:
            if isinstance(exc, GraphFormatError):
                raise
            raise GraphFormatError(f"line {lineno}: {exc}") from None
        edges.append((x, y, w))
    if header is None:
        raise GraphFormatError("missing 'bipartite' header")
    return BipartiteGraph(header[0], header[1], tuple(edges))


def format_graph(g: BipartiteGraph) -> str:
    lines = [f"bipartite {g.x_count} {g.y_count}"]
    lines += [f"{x} {y} {w}" for x, y, w in g.edges]
    return "\n".join(lines) + "\n"
