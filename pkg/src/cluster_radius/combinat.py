"""Enumeration of connected graphs, labelled trees and tree-compatible vertex orders.

Vertices are labelled ``0 .. n-1``; vertex 0 is the root of every
increasing sequence (``X_1 = {0}``). Stage indices are 0-based as well:
stage ``s`` refers to the prefix set ``X_{s+1}`` of size ``s + 1``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

from .errors import EnumerationRangeError

MAX_GRAPH_N = 6
MAX_TREE_N = 7

Edge = tuple[int, int]


def pairs(n: int) -> list[Edge]:
    """All unordered pairs ``(i, j)``, ``i < j``, in lexicographic order."""
    return list(itertools.combinations(range(n), 2))


class UnionFind:
    __slots__ = ("parent",)

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


def is_connected(n: int, edges) -> bool:
    uf = UnionFind(n)
    components = n
    for i, j in edges:
        if uf.union(i, j):
            components -= 1
    return components == 1


@dataclass(frozen=True)
class ConnectedGraph:
    n: int
    mask: int
    edges: tuple[Edge, ...]


@dataclass(frozen=True)
class LabeledTree:
    n: int
    edges: tuple[Edge, ...]
    pruefer: tuple[int, ...]

    def neighbours(self) -> list[list[int]]:
        adj = [[] for _ in range(self.n)]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        return adj


@dataclass(frozen=True)
class CompatibleSequence:
    """A vertex order whose every prefix spans a subtree of ``tree``.

    ``cross_counts[s]`` is the number of tree edges with exactly one end in
    the prefix of size ``s + 1``.
    """

    tree: LabeledTree
    order: tuple[int, ...]
    cross_counts: tuple[int, ...]

    @property
    def n(self) -> int:
        return self.tree.n

    def prefix(self, s: int) -> frozenset[int]:
        return frozenset(self.order[: s + 1])


def enumerate_connected_graphs(n: int) -> Iterator[ConnectedGraph]:
    """Every connected graph on ``n`` labelled vertices, ascending edge bitmask.

    Bit ``k`` of the mask selects ``pairs(n)[k]``.
    """
    if not 2 <= n <= MAX_GRAPH_N:
        raise EnumerationRangeError(f"graph enumeration supports 2 <= n <= {MAX_GRAPH_N}, got {n}")
    ps = pairs(n)
    m = len(ps)
    for mask in range(1, 1 << m):
        if bin(mask).count("1") < n - 1:
            continue
        edges = tuple(ps[k] for k in range(m) if mask >> k & 1)
        if is_connected(n, edges):
            yield ConnectedGraph(n, mask, edges)


@lru_cache(maxsize=None)
def connected_graph_masks(n: int) -> np.ndarray:
    """Boolean matrix ``(num_graphs, num_pairs)`` of edge membership, cached per n."""
    ps = len(pairs(n))
    graphs = list(enumerate_connected_graphs(n))
    out = np.zeros((len(graphs), ps), dtype=bool)
    for row, g in enumerate(graphs):
        for k in range(ps):
            out[row, k] = bool(g.mask >> k & 1)
    out.setflags(write=False)
    return out


def pruefer_decode(seq, n: int) -> tuple[Edge, ...]:
    """Edges of the labelled tree with Pruefer sequence ``seq`` (length ``n - 2``)."""
    if len(seq) != n - 2:
        raise ValueError("Pruefer sequence must have length n - 2")
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    edges = []
    for x in seq:
        leaf = next(v for v in range(n) if degree[v] == 1)
        edges.append((min(leaf, x), max(leaf, x)))
        degree[leaf] -= 1
        degree[x] -= 1
    u, v = (i for i in range(n) if degree[i] == 1)
    edges.append((u, v))
    return tuple(sorted(edges))


def pruefer_encode(n: int, edges) -> tuple[int, ...]:
    adj = [set() for _ in range(n)]
    for i, j in edges:
        adj[i].add(j)
        adj[j].add(i)
    seq = []
    for _ in range(n - 2):
        leaf = min(v for v in range(n) if len(adj[v]) == 1)
        (nb,) = adj[leaf]
        seq.append(nb)
        adj[nb].discard(leaf)
        adj[leaf].clear()
    return tuple(seq)


def enumerate_trees(n: int) -> Iterator[LabeledTree]:
    """All ``n**(n-2)`` labelled trees, in lexicographic Pruefer order."""
    if n < 2:
        raise EnumerationRangeError("trees need n >= 2")
    for seq in itertools.product(range(n), repeat=n - 2):
        yield LabeledTree(n, pruefer_decode(seq, n), tuple(seq))


def cross_counts(n: int, edges, order) -> tuple[int, ...]:
    """``b_s`` for each stage: edges with exactly one end in ``order[:s+1]``."""
    pos = {v: k for k, v in enumerate(order)}
    counts = [0] * (n - 1)
    for i, j in edges:
        lo, hi = sorted((pos[i], pos[j]))
        for s in range(lo, hi):
            counts[s] += 1
    return tuple(counts)


def enumerate_compatible_sequences(tree: LabeledTree) -> Iterator[CompatibleSequence]:
    """Vertex orders starting at 0 in which each new vertex touches the current prefix."""
    n = tree.n
    adj = tree.neighbours()

    def grow(order, inside):
        if len(order) == n:
            yield tuple(order)
            return
        frontier = sorted({v for u in order for v in adj[u] if v not in inside})
        for v in frontier:
            order.append(v)
            inside.add(v)
            yield from grow(order, inside)
            order.pop()
            inside.discard(v)

    for order in grow([0], {0}):
        yield CompatibleSequence(tree, order, cross_counts(n, tree.edges, order))


def stage_set(order, pair: Edge) -> frozenset[int]:
    """Stages ``s`` at which exactly one vertex of ``pair`` lies in ``order[:s+1]``.

    The interpolation factor of the pair is the product of ``t_s`` over this set.
    """
    i, j = pair
    if i == j:
        raise ValueError("pair needs two distinct vertices")
    order = list(order)
    lo, hi = sorted((order.index(i), order.index(j)))
    return frozenset(range(lo, hi))


def interpolation_exponent_factor(seq: CompatibleSequence, pair: Edge) -> frozenset[int]:
    return stage_set(seq.order, pair)


def root_orders(n: int) -> Iterator[tuple[int, ...]]:
    """All vertex orders of ``0..n-1`` that start at 0."""
    for rest in itertools.permutations(range(1, n)):
        yield (0,) + rest


def increasing_trees(order) -> Iterator[tuple[Edge, ...]]:
    """Trees compatible with ``order``: each later vertex hangs on one earlier vertex."""
    n = len(order)
    for parents in itertools.product(*(range(k) for k in range(1, n))):
        yield tuple(sorted(tuple(sorted((order[k + 1], order[p]))) for k, p in enumerate(parents)))
