"""Maximum agreement subtree of two labeled trees.

Three engines share one contract:

* :func:`mast_bruteforce` enumerates label-preserving node maps directly
  (tiny inputs only);
* :func:`mast_reference` is the plain bottom-up recurrence over all node
  pairs, with one bipartite matching per pair of nodes;
* :func:`mast_fast` walks the heavy paths of the first tree bottom-up and, per
  path, fills a colored "agreement matching" multigraph against each heavy
  path of the second tree restricted to the symbols below the path.

Agreement matching conventions.  Paths are stored root-first, so index 0 is
the topmost node and *deeper* means a larger index.  An agreement matching
is a chain of pairwise noncrossing white edges followed by a single
terminal part lying strictly deeper than every white edge in both
coordinates: nothing, one gray edge, one red edge, one green edge, or a red
and a green edge where the red one sits on the shallower row and the deeper
column.  Weights default to one per matched symbol; a per-symbol weight map
``mu`` may override that.
"""

from __future__ import annotations

import bisect
import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .bigraph import BipartiteGraph, InstanceTooLarge, Matching, mwm_exact
from .hier import HierInstance, solve_hierarchical, validate_instance
from .ltree import (LabeledTree, centroid_decompose, delta, heavy_child,
                    node_label_sets, restrict)
from .unbalanced import reinsert_node

BRUTEFORCE_DELTA_LIMIT = 12

WHITE, GRAY, GREEN, RED = "white", "gray", "green", "red"
COLORS = (WHITE, GRAY, GREEN, RED)

MuMap = Optional[Mapping[str, int]]


def _mu(mu: MuMap, label: Optional[str]) -> int:
    if label is None:
        return 0
    return 1 if mu is None else mu.get(label, 1)


# ---------------------------------------------------------------------------
# brute force


def _lca_closure(t: LabeledTree, nodes: Iterable[int]) -> tuple[list[int], dict[int, tuple[int, int]]]:
    """Closure of ``nodes`` under LCA, plus a generating pair for each added node."""
    base = sorted(set(nodes), key=t.tin.__getitem__)
    witness: dict[int, tuple[int, int]] = {}
    for a, b in zip(base, base[1:]):
        c = t.lca(a, b)
        if c not in witness and c not in base:
            witness[c] = (a, b)
    return base + list(witness), witness


def agreement_value(t1: LabeledTree, t2: LabeledTree, pairs: Sequence[tuple[int, int]],
                    mu: MuMap = None) -> Optional[int]:
    """Weight of the agreement subtree spanned by ``pairs``, or None if there is none.

    The map given by ``pairs`` is extended over the LCA closure of its
    domain; it must then be injective, label-preserving, and commute with LCA
    for every pair of closure nodes.  The weight counts the labeled closure
    nodes.
    """
    f = dict(pairs)
    closure, witness = _lca_closure(t1, f)
    for c, (a, b) in witness.items():
        f[c] = t2.lca(f[a], f[b])
    if len(set(f.values())) != len(f):
        return None
    for a, b in itertools.combinations(closure, 2):
        if f[t1.lca(a, b)] != t2.lca(f[a], f[b]):
            return None
    total = 0
    for c in closure:
        if t1.labels[c] != t2.labels[f[c]]:
            return None
        total += _mu(mu, t1.labels[c])
    return total


def mast_bruteforce(t1: LabeledTree, t2: LabeledTree, mu: MuMap = None) -> int:
    """Best agreement subtree over every set of same-label node pairs.

    Any subset of a valid pair set is valid again, so the search extends
    only valid sets; it still visits every valid set.
    """
    dl = delta(t1, t2)
    if dl > BRUTEFORCE_DELTA_LIMIT:
        raise InstanceTooLarge(f"delta {dl} exceeds {BRUTEFORCE_DELTA_LIMIT}")
    cand = [(a, b) for s, xs in t1.label_nodes.items()
            for a in xs for b in t2.label_nodes.get(s, ())]
    best = 0
    stack: list[tuple[int, tuple[tuple[int, int], ...]]] = [(0, ())]
    while stack:
        start, chosen = stack.pop()
        used_a = {a for a, _ in chosen}
        used_b = {b for _, b in chosen}
        for k in range(start, len(cand)):
            a, b = cand[k]
            if a in used_a or b in used_b:
                continue
            ext = chosen + (cand[k],)
            val = agreement_value(t1, t2, ext, mu)
            if val is None:
                continue
            best = max(best, val)
            stack.append((k + 1, ext))
    return best


# ---------------------------------------------------------------------------
# per-pair graphs

MastTable = Callable[[int, int], int]


def _as_lookup(table) -> MastTable:
    if callable(table):
        return table

    def get(x: int, y: int) -> int:
        try:
            return table[x, y]
        except KeyError:
            raise ValueError(f"missing table entry for ({x}, {y})") from None
    return get


def build_Guv(t1: LabeledTree, t2: LabeledTree, u: int, v: int, table) -> BipartiteGraph:
    """Children of ``u`` against children of ``v``; edge weights are child-pair masts.

    ``table`` maps ``(x, y)`` to the mast of the two subtrees (a mapping or a
    callable); zero values become non-edges.  Left/right indices are child
    positions.
    """
    get = _as_lookup(table)
    cu, cv = t1.children[u], t2.children[v]
    edges = []
    for i, x in enumerate(cu):
        for j, y in enumerate(cv):
            w = get(x, y)
            if w > 0:
                edges.append((i, j, w))
    return BipartiteGraph(len(cu), len(cv), tuple(edges))


def _heavy_positions(t1: LabeledTree, t2: LabeledTree, u: int, v: int) -> tuple[int, int]:
    hu, hv = heavy_child(t1, u), heavy_child(t2, v)
    return (t1.children[u].index(hu) if hu >= 0 else -1,
            t2.children[v].index(hv) if hv >= 0 else -1)


def build_Huv(t1: LabeledTree, t2: LabeledTree, u: int, v: int, table) -> BipartiteGraph:
    """``G_uv`` without the rows and columns of the heavy children."""
    g = build_Guv(t1, t2, u, v, table)
    hu, hv = _heavy_positions(t1, t2, u, v)
    return g.with_edges(e for e in g.edges if e[0] != hu and e[1] != hv)


def select_hprime_edges(h_edges: Sequence[tuple[int, int, int]],
                        heavy_row: Mapping[int, int], heavy_col: Mapping[int, int],
                        hu: int, hv: int) -> list[tuple[int, int, int]]:
    """``H`` plus the chosen heavy-child edges.

    ``heavy_row[y]`` is the weight of edge ``(hu, y)`` and ``heavy_col[x]``
    that of ``(x, hv)``.  A heavy child keeps every edge into a node already
    touched by ``H`` and the heaviest of its remaining edges (lowest index on
    ties).  The edge between the two heavy children is never added.
    """
    touched_x = {x for x, _, _ in h_edges}
    touched_y = {y for _, y, _ in h_edges}
    out = list(h_edges)
    for extra, touched, make in ((heavy_row, touched_y, lambda k, w: (hu, k, w)),
                                 (heavy_col, touched_x, lambda k, w: (k, hv, w))):
        rest = None
        for k in sorted(extra):
            w = extra[k]
            if w <= 0 or (extra is heavy_row and k == hv) or (extra is heavy_col and k == hu):
                continue
            if k in touched:
                out.append(make(k, w))
            elif rest is None or w > rest[1]:
                rest = (k, w)
        if rest is not None:
            out.append(make(*rest))
    return out


def build_Hpuv(t1: LabeledTree, t2: LabeledTree, u: int, v: int, table) -> BipartiteGraph:
    g = build_Guv(t1, t2, u, v, table)
    hu, hv = _heavy_positions(t1, t2, u, v)
    h_edges = [e for e in g.edges if e[0] != hu and e[1] != hv]
    row = {y: w for x, y, w in g.edges if x == hu}
    col = {x: w for x, y, w in g.edges if y == hv}
    return g.with_edges(select_hprime_edges(h_edges, row, col, hu, hv))


def mwm_with_heavy(g: BipartiteGraph, m_h: Matching, hu: int, hv: int) -> Matching:
    """Optimum of ``g`` from an optimum ``m_h`` of ``g`` without left node ``hu``
    and right node ``hv``, reinstating one heavy child at a time."""
    m = m_h
    if hu >= 0:
        no_hv = g.with_edges(e for e in g.edges if e[1] != hv)
        m = reinsert_node(no_hv, hu, m)
    if hv >= 0:
        m = reinsert_node(g.transpose(), hv, m.transpose()).transpose()
    return m


# ---------------------------------------------------------------------------
# reference engine


def _dense_mwm(edges: list[tuple[int, int, int]], nx: int, ny: int) -> int:
    if not edges:
        return 0
    if len(edges) == 1:
        return edges[0][2]
    return mwm_exact(BipartiteGraph(nx, ny, tuple(edges))).weight


def mast_reference(t1: LabeledTree, t2: LabeledTree, mu: MuMap = None,
                   keep_table: bool = False):
    """Bottom-up recurrence over every node pair.

    ``mast(u, v)`` is the best of dropping to a child of ``v``, dropping to a
    child of ``u``, and (when the labels of ``u`` and ``v`` agree, both absent
    counting as agreement) matching children of ``u`` against children of
    ``v`` plus the symbol weight of ``u``.  With ``keep_table`` the whole
    table is returned as well, as a list of rows indexed ``[u][v]``.
    """
    if t1.root < 0 or t2.root < 0:
        return (0, []) if keep_table else 0
    n2 = t2.n
    order2 = list(reversed(t2.preorder))
    kids2 = t2.children
    labels2 = t2.labels
    rows: list[Optional[list[int]]] = [None] * t1.n
    for u in reversed(t1.preorder):
        kids = t1.children[u]
        kid_rows = [rows[c] for c in kids]
        lu = t1.labels[u]
        bonus = _mu(mu, lu)
        row = [0] * n2
        for v in order2:
            best = 0
            for r in kid_rows:
                if r[v] > best:
                    best = r[v]
            cv = kids2[v]
            for c in cv:
                if row[c] > best:
                    best = row[c]
            if labels2[v] == lu:
                edges = []
                for i, r in enumerate(kid_rows):
                    for j, c in enumerate(cv):
                        w = r[c]
                        if w:
                            edges.append((i, j, w))
                cand = _dense_mwm(edges, len(kids), len(cv)) + bonus
                if cand > best:
                    best = cand
            row[v] = best
        rows[u] = row
        if not keep_table:
            for c in kids:
                rows[c] = None
    value = rows[t1.root][t2.root]
    return (value, rows) if keep_table else value


def check_reference_table(t1: LabeledTree, t2: LabeledTree, rows, mu: MuMap = None) -> Optional[str]:
    """Recheck every table entry against the recurrence, independently computed."""
    for u in range(t1.n):
        for v in range(t2.n):
            cands = [rows[u][y] for y in t2.children[v]]
            cands += [rows[x][v] for x in t1.children[u]]
            if t1.labels[u] == t2.labels[v]:
                g = build_Guv(t1, t2, u, v, lambda x, y: rows[x][y])
                cands.append(mwm_exact(g).weight + _mu(mu, t1.labels[u]))
            if rows[u][v] != max(cands, default=0):
                return f"entry ({u}, {v}) is {rows[u][v]}, recurrence gives {max(cands, default=0)}"
    return None


# ---------------------------------------------------------------------------
# agreement matchings


@dataclass(frozen=True)
class MamMultigraph:
    """Colored multigraph between two root-first paths (0-based positions)."""

    p: int
    q: int
    edges: tuple[tuple[int, int, str, int], ...]

    def validate(self) -> Optional[str]:
        seen = set()
        for i, j, color, w in self.edges:
            if not (0 <= i < self.p and 0 <= j < self.q):
                return f"edge ({i}, {j}) out of range"
            if color not in COLORS:
                return f"unknown color {color!r}"
            if w < 0:
                return "negative weight"
            if (i, j, color) in seen:
                return f"two {color} edges between {i} and {j}"
            seen.add((i, j, color))
        return None


def is_agreement_matching(edges: Sequence[tuple[int, int, str, int]]) -> bool:
    whites = [e for e in edges if e[2] == WHITE]
    grays = [e for e in edges if e[2] == GRAY]
    reds = [e for e in edges if e[2] == RED]
    greens = [e for e in edges if e[2] == GREEN]
    for a, b in itertools.combinations(whites, 2):
        if not ((a[0] < b[0] and a[1] < b[1]) or (b[0] < a[0] and b[1] < a[1])):
            return False
    if len(grays) > 1 or len(reds) > 1 or len(greens) > 1:
        return False
    if grays and (reds or greens):
        return False
    if reds and greens and not (reds[0][0] < greens[0][0] and reds[0][1] > greens[0][1]):
        return False
    for e in grays + reds + greens:
        if any(not (w[0] < e[0] and w[1] < e[1]) for w in whites):
            return False
    return True


MAM_BRUTEFORCE_LIMIT = 16


def mam_bruteforce_all(g: MamMultigraph) -> dict[tuple[int, int], int]:
    """Exhaustive optimum for every admissible query, in one enumeration.

    Agreement matchings are closed under taking subsets, so the search only
    extends valid edge sets.  A set counts for query ``(i, j)`` when all its
    edges lie in rows ``>= i`` and columns ``>= j``.
    """
    if len(g.edges) > MAM_BRUTEFORCE_LIMIT:
        raise InstanceTooLarge(f"{len(g.edges)} edges exceed {MAM_BRUTEFORCE_LIMIT}")
    edges = list(g.edges)
    queries = [(0, j) for j in range(g.q)] + [(i, 0) for i in range(1, g.p)]
    best = {qr: 0 for qr in queries}
    stack: list[tuple[int, tuple]] = [(0, ())]
    while stack:
        start, chosen = stack.pop()
        for k in range(start, len(edges)):
            ext = chosen + (edges[k],)
            if not is_agreement_matching(ext):
                continue
            w = sum(e[3] for e in ext)
            lo_i = min(e[0] for e in ext)
            lo_j = min(e[1] for e in ext)
            for qr in queries:
                if qr[0] <= lo_i and qr[1] <= lo_j and w > best[qr]:
                    best[qr] = w
            stack.append((k + 1, ext))
    return best


def mam_bruteforce(g: MamMultigraph, i: int, j: int) -> int:
    """Exhaustive agreement matching weight of the suffix subgraph at ``(i, j)``."""
    sub = MamMultigraph(g.p, g.q, tuple(e for e in g.edges if e[0] >= i and e[1] >= j))
    if len(sub.edges) > MAM_BRUTEFORCE_LIMIT:
        raise InstanceTooLarge(f"{len(sub.edges)} edges exceed {MAM_BRUTEFORCE_LIMIT}")
    return mam_bruteforce_all(sub)[(0, 0)]


class MamTable:
    """Suffix optima of an agreement-matching multigraph on its compressed grid."""

    def __init__(self, g: MamMultigraph):
        rows = sorted({e[0] for e in g.edges})
        cols = sorted({e[1] for e in g.edges})
        self.rows, self.cols = rows, cols
        ri = {r: a for a, r in enumerate(rows)}
        ci = {c: b for b, c in enumerate(cols)}
        R, C = len(rows), len(cols)
        white: dict[tuple[int, int], int] = {}
        lone: dict[tuple[int, int], int] = {}
        red_at: dict[int, dict[int, int]] = {}
        green_at: dict[int, dict[int, int]] = {}
        for i, j, color, w in g.edges:
            key = (ri[i], ci[j])
            if color == WHITE:
                if w > white.get(key, -1):
                    white[key] = w
                continue
            if w > lone.get(key, -1):
                lone[key] = w
            if color == RED:
                d = red_at.setdefault(key[0], {})
                d[key[1]] = max(d.get(key[1], -1), w)
            elif color == GREEN:
                d = green_at.setdefault(key[1], {})
                d[key[0]] = max(d.get(key[0], -1), w)
        # red_suffix[a][b]: best red in row a strictly right of column b
        red_suffix = {a: _strict_suffix_max(d, C) for a, d in red_at.items()}
        green_suffix = {b: _strict_suffix_max(d, R) for b, d in green_at.items()}
        F = [[0] * (C + 1) for _ in range(R + 1)]
        for a in range(R - 1, -1, -1):
            Fa, Fn = F[a], F[a + 1]
            rs = red_suffix.get(a)
            for b in range(C - 1, -1, -1):
                best = Fn[b] if Fn[b] > Fa[b + 1] else Fa[b + 1]
                key = (a, b)
                w = white.get(key)
                if w is not None and w + Fn[b + 1] > best:
                    best = w + Fn[b + 1]
                w = lone.get(key)
                if w is not None and w > best:
                    best = w
                if rs is not None and rs[b] >= 0:
                    gs = green_suffix.get(b)
                    if gs is not None and gs[a] >= 0 and rs[b] + gs[a] > best:
                        best = rs[b] + gs[a]
                Fa[b] = best
        self.F = F

    def value(self, i: int, j: int) -> int:
        a = bisect.bisect_left(self.rows, i)
        b = bisect.bisect_left(self.cols, j)
        return self.F[a][b]

    def first_row(self) -> list[tuple[int, int]]:
        """(column, value) of every query with i = 0."""
        return [(c, self.F[0][b]) for b, c in enumerate(self.cols)]

    def first_col(self) -> list[tuple[int, int]]:
        return [(r, self.F[a][0]) for a, r in enumerate(self.rows)]


def _strict_suffix_max(cells: Mapping[int, int], size: int) -> list[int]:
    out = [-1] * size
    run = -1
    for k in range(size - 1, -1, -1):
        out[k] = run
        w = cells.get(k)
        if w is not None and w > run:
            run = w
    return out


def solve_mam(g: MamMultigraph, queries: Sequence[tuple[int, int]]) -> list[int]:
    """Maximum agreement matching weight of each queried suffix subgraph.

    A query ``(i, j)`` needs ``i == 0`` or ``j == 0``.
    """
    problem = g.validate()
    if problem:
        raise ValueError(problem)
    table = MamTable(g)
    out = []
    for i, j in queries:
        if not (0 <= i < g.p and 0 <= j < g.q) or (i and j):
            raise ValueError(f"invalid query ({i}, {j})")
        out.append(table.value(i, j))
    return out


def gpq_pair_edges(i: int, j: int, lu: Optional[str], lv: Optional[str], mh: int, mhp: int,
                   max_r: int, max_l: int, mu: MuMap = None) -> list[tuple[int, int, str, int]]:
    """The colored edges joining path nodes ``i`` and ``j``.

    Both unlabeled: white, gray, green and red.  Same symbol: white and gray.
    Otherwise a gray edge, plus a red edge when the first-tree node is
    unlabeled and a green edge when the second-tree node is unlabeled, so a
    crossing pair can still meet at an unlabeled node above one of them.
    """
    if lu is None and lv is None:
        return [(i, j, WHITE, mh), (i, j, GRAY, mhp), (i, j, GREEN, max_r), (i, j, RED, max_l)]
    if lu == lv:
        z = _mu(mu, lu)
        return [(i, j, WHITE, mh + z), (i, j, GRAY, max(mhp + z, max_r, max_l))]
    out = [(i, j, GRAY, max(max_r, max_l))]
    if lu is None:
        out.append((i, j, RED, max_l))
    if lv is None:
        out.append((i, j, GREEN, max_r))
    return out


# ---------------------------------------------------------------------------
# fast engine


class _RootTable:
    """mast(T1^x, T2^y) for one path root x, keyed by the restricted nodes."""

    __slots__ = ("tins", "vals")

    def __init__(self, tins: list[int], vals: list[int]):
        self.tins = tins
        self.vals = vals


class FastEngine:
    """Heavy-path engine; :meth:`run` returns the mast value.

    ``debug`` validates every hierarchical instance and cross-checks each
    hierarchical matching against a direct one.
    """

    def __init__(self, t1: LabeledTree, t2: LabeledTree, mu: MuMap = None, debug: bool = False):
        self.t1, self.t2, self.mu, self.debug = t1, t2, mu, debug
        self.tables: dict[int, _RootTable] = {}
        self.stats = Counter()

    # lookups ------------------------------------------------------------
    def lookup(self, x: int, y: int) -> int:
        """mast(T1^x, T2^y) for a finished path root ``x`` and any node ``y``."""
        tab = self.tables[x]
        t = self.t2.tin[y]
        tins = tab.tins
        k = bisect.bisect_left(tins, t)
        if k < len(tins) and tins[k] < t + self.t2.size[y]:
            return tab.vals[k]
        return 0

    # driver -------------------------------------------------------------
    def run(self) -> int:
        t1, t2 = self.t1, self.t2
        if t1.root < 0 or t2.root < 0:
            return 0
        dec1 = centroid_decompose(t1)
        self.dec1 = dec1
        for p in dec1.bottom_up:
            self._process_path(dec1.paths[p])
        return self.lookup(t1.root, t2.root)

    def _process_path(self, path: Sequence[int]) -> None:
        t1, t2, dec1 = self.t1, self.t2, self.dec1
        r = path[0]
        if len(path) == 1:
            # a lone leaf agrees with every restricted node, each of which
            # sees at least one copy of its symbol below it
            lab = t1.labels[r]
            nodes = [] if lab is None else restrict(t2, [lab]).orig
            self.tables[r] = _RootTable([t2.tin[o] for o in nodes], [_mu(self.mu, lab)] * len(nodes))
            return
        syms = t1.subtree_symbols(r)
        R = restrict(t2, syms)
        if not len(R):
            self.tables[r] = _RootTable([], [])
            return
        Rt, orig = R.tree, R.orig
        dec2 = centroid_decompose(Rt)
        side = [dec1.side_children(u) for u in path]
        own = [t1.labels[u] for u in path]
        # label sets of path nodes, as symbol -> positions on the path
        by_symbol: dict[str, list[int]] = {}
        for i, u in enumerate(path):
            s_i = set()
            if own[i] is not None:
                s_i.add(own[i])
            for x in side[i]:
                s_i |= t1.subtree_symbols(x)
            for s in s_i:
                by_symbol.setdefault(s, []).append(i)
        # intersecting pairs, grouped by path of the restricted tree
        inp: dict[int, dict[int, set[int]]] = {}
        for v, lab in node_label_sets(dec2).items():
            rows = set()
            for s in lab:
                rows.update(by_symbol.get(s, ()))
            if rows:
                inp.setdefault(dec2.path_of[v], {})[v] = rows
        # restricted-tree side children (original ids) and heavy child per node
        r_heavy = [orig[h] if h >= 0 else -1 for h in dec2.heavy]
        r_side = [[orig[c] for c in dec2.side_children(v)] for v in range(Rt.n)]
        # with a single side child every H is a star and the hierarchical
        # route would send each node to direct matching anyway
        hier = [self._hier_matchings(side[i], R, r_heavy) if len(side[i]) > 1 else {}
                for i in range(len(path))]
        col_tables: dict[int, tuple[list[int], list[int]]] = {}

        def col_value(y_local: int, i: int) -> int:
            rows_, vals = col_tables[y_local]
            k = bisect.bisect_left(rows_, i)
            return vals[k] if k < len(vals) else 0

        top_vals = [0] * Rt.n
        for qid in dec2.bottom_up:
            Q = dec2.paths[qid]
            edges: list[tuple[int, int, str, int]] = []
            for j, v in enumerate(Q):
                rows = inp.get(qid, {}).get(v)
                if not rows:
                    continue
                ov = orig[v]
                lv = t2.labels[ov]
                ys_local = dec2.side_children(v)
                ys = r_side[v]
                hv_orig = r_heavy[v]
                for i in sorted(rows):
                    S = side[i]
                    max_r = max((col_value(y, i) for y in ys_local), default=0)
                    max_l = max((self.lookup(x, ov) for x in S), default=0)
                    lu = own[i]
                    if lu is None and lv is None or lu == lv:
                        mh, mhp = self._h_weights(i, path, S, ov, ys, ys_local, hv_orig,
                                                  hier[i], col_value)
                    else:
                        mh = mhp = 0
                    edges.extend(gpq_pair_edges(i, j, lu, lv, mh, mhp, max_r, max_l, self.mu))
            self.stats["gpq_edges"] += len(edges)
            if not edges:
                col_tables[Q[0]] = ([], [])
                continue
            g = MamMultigraph(len(path), len(Q), tuple(edges))
            table = MamTable(g)
            first_col = table.first_col()
            col_tables[Q[0]] = ([a for a, _ in first_col], [w for _, w in first_col])
            cols = table.cols
            F0 = table.F[0]
            b = 0
            for j, v in enumerate(Q):
                while b < len(cols) and cols[b] < j:
                    b += 1
                top_vals[v] = F0[b]
        self.tables[r] = _RootTable([t2.tin[o] for o in orig], top_vals)

    def _h_weights(self, i, path, S, ov, ys, ys_local, hv_orig, hier_i, col_value):
        """Weights of the optimal matchings of H and H' at path node ``i`` and ``ov``."""
        lookup = self.lookup
        h_edges = []
        for a, x in enumerate(S):
            for b, y in enumerate(ys):
                w = lookup(x, y)
                if w > 0:
                    h_edges.append((a, b, w))
        hu, hv = len(S), len(ys)
        heavy_row = {}
        if i + 1 < len(path):
            for b, y in enumerate(ys_local):
                w = col_value(y, i + 1)
                if w > 0:
                    heavy_row[b] = w
        heavy_col = {}
        if hv_orig >= 0:
            for a, x in enumerate(S):
                w = lookup(x, hv_orig)
                if w > 0:
                    heavy_col[a] = w
        if not h_edges:
            m_h = Matching.empty()
        elif ov in hier_i:
            x_ids, m = hier_i[ov]
            pos = {}
            for c in x_ids:
                for b, y in enumerate(ys):
                    if self.t2.is_ancestor(y, c):
                        pos[c] = b
                        break
            m_h = Matching(frozenset((a, pos[x_ids[c]]) for c, a in m.pairs), m.weight)
            if self.debug:
                direct = mwm_exact(BipartiteGraph(hu, hv, tuple(h_edges))).weight
                if direct != m_h.weight:
                    raise AssertionError(f"hierarchical matching {m_h.weight} != direct {direct}")
        else:
            m_h = mwm_exact(BipartiteGraph(hu, hv, tuple(h_edges)))
        if not heavy_row and not heavy_col:
            return m_h.weight, m_h.weight
        hp = select_hprime_edges(h_edges, heavy_row, heavy_col, hu, hv)
        g = BipartiteGraph(hu + 1, hv + 1, tuple(hp))
        if hu + hv <= 2:
            return m_h.weight, mwm_exact(g).weight
        m_hp = mwm_with_heavy(g, m_h, hu if heavy_row else -1, hv if heavy_col else -1)
        return m_h.weight, m_hp.weight

    def _hier_matchings(self, S: Sequence[int], R, r_heavy: Sequence[int]):
        """Solve H for every node of the second tree restricted to the side-tree symbols."""
        t1, t2 = self.t1, self.t2
        counts: Counter = Counter()
        for x in S:
            for w in t1.subtree(x):
                lab = t1.labels[w]
                if lab is not None:
                    counts[lab] += 1
        Tu = restrict(t2, counts.keys())
        tree, orig = Tu.tree, Tu.orig
        n = tree.n
        weight = [0] * n
        for v in reversed(tree.preorder):
            weight[v] = counts.get(tree.labels[v], 0) + sum(weight[c] for c in tree.children[v])
        graphs = {}
        lookup = self.lookup
        for v in range(n):
            kids = tree.children[v]
            if not kids:
                continue
            hv = r_heavy[R.index[orig[v]]]
            x_ids = []
            edges = []
            for c in kids:
                oc = orig[c]
                if hv >= 0 and t2.is_ancestor(hv, oc):
                    continue
                row = [(k, lookup(x, oc)) for k, x in enumerate(S)]
                row = [(k, w) for k, w in row if w > 0]
                if row:
                    xi = len(x_ids)
                    x_ids.append(c)
                    edges.extend((xi, k, w) for k, w in row)
            if edges:
                graphs[v] = (tuple(x_ids), BipartiteGraph(len(x_ids), len(S), tuple(edges)))
        inst = HierInstance(tree.children, tuple(weight), graphs, tree.root)
        if self.debug:
            problem = validate_instance(_compacted(inst))
            if problem:
                raise AssertionError(f"invalid hierarchical instance: {problem}")
        self.stats["hier_instances"] += 1
        solved = solve_hierarchical(inst, check=False)
        return {orig[v]: (tuple(orig[c] for c in graphs[v][0]), m) for v, m in solved.items()
                if v in graphs}


def _compacted(inst: HierInstance) -> HierInstance:
    """Same instance with unused right nodes dropped from every graph."""
    graphs = {}
    for u, (x_ids, g) in inst.graphs.items():
        ys = sorted({y for _, y, _ in g.edges})
        yi = {y: k for k, y in enumerate(ys)}
        graphs[u] = (x_ids, BipartiteGraph(g.x_count, len(ys),
                                           tuple((x, yi[y], w) for x, y, w in g.edges)))
    return HierInstance(inst.children, inst.weight, graphs, inst.root)


def mast_fast(t1: LabeledTree, t2: LabeledTree, mu: MuMap = None, debug: bool = False) -> int:
    return FastEngine(t1, t2, mu, debug).run()


ENGINES = {
    "oracle": mast_bruteforce,
    "reference": mast_reference,
    "fast": mast_fast,
}
