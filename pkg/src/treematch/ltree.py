"""Labeled rooted trees and the structures derived from them.

Trees are immutable, nodes are integers ``0..n-1`` and every traversal is
iterative, so degenerate (path-like) trees of any depth are fine.

Text form::

    tree  := node ';'
    node  := '(' node (',' node)* ')' label? | label
    label := [A-Za-z0-9_]+ | '*'

``*`` (or a missing label after ``)``) means unlabeled.
"""

from __future__ import annotations

import bisect
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence

Label = Optional[str]


class TreeParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


@dataclass(frozen=True, eq=False)
class LabeledTree:
    labels: tuple[Label, ...]
    children: tuple[tuple[int, ...], ...]
    parent: tuple[int, ...]
    root: int

    @classmethod
    def from_parents(cls, parents: Sequence[int], labels: Sequence[Label]) -> "LabeledTree":
        """Build from a parent array (``-1`` marks the root); child order follows node order."""
        n = len(parents)
        kids: list[list[int]] = [[] for _ in range(n)]
        root = -1
        for v, p in enumerate(parents):
            if p < 0:
                if root >= 0:
                    raise ValueError("more than one root")
                root = v
            else:
                kids[p].append(v)
        if n and root < 0:
            raise ValueError("no root")
        t = cls(tuple(labels), tuple(tuple(k) for k in kids), tuple(parents), root)
        if n and len(t.preorder) != n:
            raise ValueError("parent array contains a cycle")
        return t

    @classmethod
    def empty(cls) -> "LabeledTree":
        return cls((), (), (), -1)

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def degree(self) -> int:
        return max((len(c) for c in self.children), default=0)

    def is_leaf(self, v: int) -> bool:
        return not self.children[v]

    @cached_property
    def preorder(self) -> tuple[int, ...]:
        if self.root < 0:
            return ()
        out = []
        stack = [self.root]
        while stack:
            v = stack.pop()
            out.append(v)
            stack.extend(reversed(self.children[v]))
        return tuple(out)

    @cached_property
    def tin(self) -> tuple[int, ...]:
        t = [0] * self.n
        for i, v in enumerate(self.preorder):
            t[v] = i
        return tuple(t)

    @cached_property
    def size(self) -> tuple[int, ...]:
        s = [1] * self.n
        for v in reversed(self.preorder):
            p = self.parent[v]
            if p >= 0:
                s[p] += s[v]
        return tuple(s)

    @cached_property
    def depth(self) -> tuple[int, ...]:
        d = [0] * self.n
        for v in self.preorder:
            p = self.parent[v]
            if p >= 0:
                d[v] = d[p] + 1
        return tuple(d)

    def is_ancestor(self, a: int, b: int) -> bool:
        """True when ``a`` is ``b`` or an ancestor of it."""
        ta = self.tin[a]
        return ta <= self.tin[b] < ta + self.size[a]

    def subtree(self, v: int) -> Sequence[int]:
        """Nodes of the subtree rooted at ``v`` in preorder."""
        i = self.tin[v]
        return self.preorder[i:i + self.size[v]]

    @cached_property
    def labeled_count(self) -> int:
        return sum(1 for lab in self.labels if lab is not None)

    @cached_property
    def label_nodes(self) -> dict[str, list[int]]:
        """Symbol -> nodes carrying it, in preorder."""
        out: dict[str, list[int]] = {}
        for v in self.preorder:
            lab = self.labels[v]
            if lab is not None:
                out.setdefault(lab, []).append(v)
        return out

    def symbols(self) -> set[str]:
        return set(self.label_nodes)

    def subtree_symbols(self, v: int) -> set[str]:
        labs = self.labels
        return {labs[w] for w in self.subtree(v) if labs[w] is not None}

    @cached_property
    def lca_index(self) -> "LCAIndex":
        return LCAIndex(self)

    def lca(self, a: int, b: int) -> int:
        return self.lca_index(a, b)


class LCAIndex:
    """Constant-time LCA queries: Euler tour plus a sparse table of depth minima."""

    def __init__(self, t: LabeledTree):
        self.first = [0] * t.n
        tour: list[int] = []
        if t.root >= 0:
            stack = [(t.root, 0)]
            while stack:
                v, i = stack.pop()
                if i == 0:
                    self.first[v] = len(tour)
                tour.append(v)
                kids = t.children[v]
                if i < len(kids):
                    stack.append((v, i + 1))
                    stack.append((kids[i], 0))
        depth = t.depth
        keys = [(depth[v], v) for v in tour]
        self.table = [keys]
        j = 1
        while (1 << j) <= len(keys):
            prev = self.table[-1]
            half = 1 << (j - 1)
            self.table.append([min(prev[i], prev[i + half])
                               for i in range(len(keys) - (1 << j) + 1)])
            j += 1

    def __call__(self, a: int, b: int) -> int:
        i, j = self.first[a], self.first[b]
        if i > j:
            i, j = j, i
        k = (j - i + 1).bit_length() - 1
        row = self.table[k]
        return min(row[i], row[j - (1 << k) + 1])[1]


_TOKEN = re.compile(r"\s*(?:(?P<punct>[(),;])|(?P<label>[A-Za-z0-9_]+|\*))")


def _tokens(text: str):
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise TreeParseError(f"unexpected character {text[pos]!r}", pos)
        start = m.start("punct") if m.group("punct") else m.start("label")
        yield start, m.group("punct") or m.group("label")
        pos = m.end()
    yield n, None


def parse_tree(text: str) -> LabeledTree:
    """Parse the tree grammar above into a :class:`LabeledTree`."""
    parents: list[int] = []
    labels: list[Label] = []
    stack: list[int] = []  # open internal nodes
    root = -1
    expect_node = True  # a child / the root must come next
    last_closed = -1  # node that may still take a trailing label
    toks = _tokens(text)
    done = False
    for pos, tok in toks:
        if done:
            if tok is not None:
                raise TreeParseError("text after ';'", pos)
            break
        if tok is None:
            raise TreeParseError("unexpected end of input", pos)
        if expect_node:
            if tok == "(":
                v = len(parents)
                parents.append(stack[-1] if stack else -1)
                labels.append(None)
                if not stack:
                    if root >= 0:
                        raise TreeParseError("second root", pos)
                    root = v
                stack.append(v)
                continue
            if tok in "),;":
                raise TreeParseError(f"expected node, found {tok!r}", pos)
            v = len(parents)
            parents.append(stack[-1] if stack else -1)
            labels.append(None if tok == "*" else tok)
            if not stack:
                if root >= 0:
                    raise TreeParseError("second root", pos)
                root = v
            expect_node = False
            last_closed = -1
            continue
        # after a complete node
        if tok == ",":
            if not stack:
                raise TreeParseError("',' outside parentheses", pos)
            expect_node = True
            last_closed = -1
        elif tok == ")":
            if not stack:
                raise TreeParseError("unbalanced ')'", pos)
            last_closed = stack.pop()
        elif tok == ";":
            if stack:
                raise TreeParseError("unclosed '('", pos)
            done = True
        elif tok == "(":
            raise TreeParseError("unexpected '('", pos)
        else:
            if last_closed < 0:
                raise TreeParseError(f"unexpected label {tok!r}", pos)
            labels[last_closed] = None if tok == "*" else tok
            last_closed = -1
    if not done:
        raise TreeParseError("missing ';'", len(text))
    return LabeledTree.from_parents(parents, labels)


def serialize(t: LabeledTree) -> str:
    """Canonical text: children in stored order, ``*`` for unlabeled leaves."""
    if t.root < 0:
        raise ValueError("cannot serialize an empty tree")
    out: list[str] = []
    stack: list[tuple[int, int]] = [(t.root, 0)]
    while stack:
        v, i = stack.pop()
        kids = t.children[v]
        if not kids:
            out.append(t.labels[v] or "*")
            continue
        if i == 0:
            out.append("(")
        elif i < len(kids):
            out.append(",")
        if i < len(kids):
            stack.append((v, i + 1))
            stack.append((kids[i], 0))
        else:
            out.append(")")
            if t.labels[v] is not None:
                out.append(t.labels[v])
    return "".join(out) + ";"


def delta(t1: LabeledTree, t2: LabeledTree) -> int:
    """Number of same-symbol node pairs across the two trees."""
    c1 = Counter(lab for lab in t1.labels if lab is not None)
    c2 = Counter(lab for lab in t2.labels if lab is not None)
    if len(c1) > len(c2):
        c1, c2 = c2, c1
    return sum(k * c2[s] for s, k in c1.items() if s in c2)


@dataclass(frozen=True, eq=False)
class RestrictedTree:
    """``tree`` node ``i`` stands for original node ``orig[i]``."""

    tree: LabeledTree
    orig: tuple[int, ...]
    index: Mapping[int, int]

    def __len__(self) -> int:
        return len(self.orig)


def restricted_nodes(t: LabeledTree, labels: Iterable[str]) -> list[int]:
    """Original nodes of ``t || labels`` in preorder."""
    tin = t.tin
    marked: set[int] = set()
    for s in labels:
        marked.update(t.label_nodes.get(s, ()))
    if not marked:
        return []
    base = sorted(marked, key=tin.__getitem__)
    nodes = set(base)
    for a, b in zip(base, base[1:]):
        nodes.add(t.lca(a, b))
    return sorted(nodes, key=tin.__getitem__)


def restrict(t: LabeledTree, labels: Iterable[str]) -> RestrictedTree:
    """Subtree induced by the nodes labeled from ``labels`` and their pairwise LCAs.

    The LCAs of preorder-consecutive marked nodes already give every pairwise
    LCA; parents are found with a stack over the preorder.
    """
    nodes = restricted_nodes(t, labels)
    if not nodes:
        return RestrictedTree(LabeledTree.empty(), (), {})
    index = {v: i for i, v in enumerate(nodes)}
    parents = [-1] * len(nodes)
    stack: list[int] = []
    for v in nodes:
        while stack and not t.is_ancestor(stack[-1], v):
            stack.pop()
        if stack:
            parents[index[v]] = index[stack[-1]]
        stack.append(v)
    tree = LabeledTree.from_parents(parents, [t.labels[v] for v in nodes])
    return RestrictedTree(tree, tuple(nodes), index)


@dataclass(frozen=True, eq=False)
class CentroidDecomposition:
    """Heavy-path partition of a tree.

    ``paths[p]`` is root-first; ``path_of[v]``/``pos[v]`` locate a node;
    ``parent_path[p]`` is the path holding the parent of the path root
    (``-1`` for the root path) and ``level[p]`` counts such hops.
    """

    tree: LabeledTree
    heavy: tuple[int, ...]
    paths: tuple[tuple[int, ...], ...]
    path_of: tuple[int, ...]
    pos: tuple[int, ...]
    parent_path: tuple[int, ...]
    level: tuple[int, ...]

    def path_root(self, p: int) -> int:
        return self.paths[p][0]

    def side_children(self, v: int) -> tuple[int, ...]:
        h = self.heavy[v]
        return tuple(c for c in self.tree.children[v] if c != h)

    def side_children_of_path(self, p: int) -> list[int]:
        return [c for v in self.paths[p] for c in self.side_children(v)]

    def side_trees(self, p: int) -> list[Sequence[int]]:
        return [self.tree.subtree(c) for c in self.side_children_of_path(p)]

    @cached_property
    def bottom_up(self) -> tuple[int, ...]:
        """Path ids such that a path comes after every path below its root."""
        t = self.tree
        return tuple(sorted(range(len(self.paths)),
                            key=lambda p: -t.tin[self.paths[p][0]]))


def heavy_child(t: LabeledTree, v: int) -> int:
    """Child with the largest subtree (first one on ties), or -1 for a leaf."""
    best = -1
    best_size = -1
    size = t.size
    for c in t.children[v]:
        if size[c] > best_size:
            best, best_size = c, size[c]
    return best


def centroid_decompose(t: LabeledTree) -> CentroidDecomposition:
    if t.root < 0:
        raise ValueError("cannot decompose an empty tree")
    n = t.n
    heavy = [heavy_child(t, v) for v in range(n)]
    path_of = [-1] * n
    pos = [0] * n
    paths: list[tuple[int, ...]] = []
    parent_path: list[int] = []
    level: list[int] = []
    for v in t.preorder:
        if path_of[v] >= 0:
            continue
        pid = len(paths)
        chain = []
        w = v
        while w >= 0:
            path_of[w] = pid
            pos[w] = len(chain)
            chain.append(w)
            w = heavy[w]
        paths.append(tuple(chain))
        p = t.parent[v]
        parent_path.append(path_of[p] if p >= 0 else -1)
        level.append(level[path_of[p]] + 1 if p >= 0 else 0)
    return CentroidDecomposition(t, tuple(heavy), tuple(paths), tuple(path_of),
                                 tuple(pos), tuple(parent_path), tuple(level))


def label_set(dec: CentroidDecomposition, x: int) -> set[str]:
    """Symbols on ``x`` itself and in the side trees hanging off ``x``."""
    t = dec.tree
    out = set()
    if t.labels[x] is not None:
        out.add(t.labels[x])
    for c in dec.side_children(x):
        out |= t.subtree_symbols(c)
    return out


def path_label_sets(dec: CentroidDecomposition, p: int) -> list[set[str]]:
    return [label_set(dec, x) for x in dec.paths[p]]


def inp(dec1: CentroidDecomposition, p: int,
        dec2: CentroidDecomposition) -> dict[int, set[tuple[int, int]]]:
    """Intersecting node pairs between path ``p`` of the first tree and every
    path of the second, keyed by second-tree path id.

    Built from a symbol -> path-node inverted list, never an all-pairs scan.
    """
    by_symbol: dict[str, list[int]] = {}
    for u in dec1.paths[p]:
        for s in label_set(dec1, u):
            by_symbol.setdefault(s, []).append(u)
    out: dict[int, set[tuple[int, int]]] = {}
    for v, sym in node_label_sets(dec2).items():
        hits = [u for s in sym if s in by_symbol for u in by_symbol[s]]
        if hits:
            out.setdefault(dec2.path_of[v], set()).update((u, v) for u in hits)
    return out


def node_label_sets(dec: CentroidDecomposition) -> dict[int, set[str]]:
    """Label set of every node, built by walking each labeled node up its
    chain of path roots (each node lies in O(log n) side trees)."""
    t = dec.tree
    sets: dict[int, set[str]] = {}
    for w in range(t.n):
        lab = t.labels[w]
        if lab is None:
            continue
        sets.setdefault(w, set()).add(lab)
        r = dec.paths[dec.path_of[w]][0]
        while t.parent[r] >= 0:
            p = t.parent[r]
            sets.setdefault(p, set()).add(lab)
            r = dec.paths[dec.path_of[p]][0]
    return sets


def top_in_subtree(t: LabeledTree, sorted_tins: Sequence[int], nodes_by_tin: Sequence[int],
                   v: int) -> int:
    """First node (in preorder) of an LCA-closed node set lying in the subtree of ``v``.

    For an LCA-closed set this is the unique topmost member inside ``T^v``;
    returns -1 when the subtree holds no member.
    """
    lo = t.tin[v]
    i = bisect.bisect_left(sorted_tins, lo)
    if i < len(sorted_tins) and sorted_tins[i] < lo + t.size[v]:
        return nodes_by_tin[i]
    return -1
