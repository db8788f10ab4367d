"""Numerical checks of the Brydges-Federbush tree-graph identity and its consequences.

The left side is the connected-graph sum of Mayer factors. The right side
is a sum over trees weighted by the interpolation measure over
tree-compatible vertex orders, integrated on a tensor Gauss-Legendre grid.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .combinat import (
    CompatibleSequence,
    LabeledTree,
    connected_graph_masks,
    enumerate_compatible_sequences,
    enumerate_trees,
    pairs,
)
from .errors import DomainError, EnumerationRangeError
from .potential import InteractionMatrix
from .quad import gauss_legendre

MAX_QUADRATURE_N = 5
DEFAULT_H_SCHEDULE = tuple(float(2**k) for k in range(3, 11))


@dataclass(frozen=True)
class TgiMeasureTerm:
    """One ``(tree, compatible order)`` summand of the tree measure."""

    seq: CompatibleSequence
    tree_edges: tuple[tuple[int, int], ...]

    @property
    def dimension(self) -> int:
        return self.seq.n - 1


@dataclass(frozen=True)
class Regularization:
    schedule: tuple[float, ...] = DEFAULT_H_SCHEDULE

    def __post_init__(self):
        s = tuple(float(h) for h in self.schedule)
        if not s or any(not math.isfinite(h) or h <= 0 for h in s):
            raise DomainError("H schedule must be positive and finite")
        if any(b <= a for a, b in zip(s, s[1:])):
            raise DomainError("H schedule must be strictly increasing")
        object.__setattr__(self, "schedule", s)


def measure_terms(n: int):
    """Every ``(tree, compatible sequence)`` pair on ``n`` vertices."""
    for tree in enumerate_trees(n):
        for seq in enumerate_compatible_sequences(tree):
            yield TgiMeasureTerm(seq, tree.edges)


def mayer_factors(V: InteractionMatrix) -> np.ndarray:
    """``exp(-V_ij) - 1`` per pair; an infinite entry gives exactly -1."""
    return np.expm1(-V.pair_vector())


def lhs_connected_graph_sum(V: InteractionMatrix) -> float:
    """Sum over connected graphs of the product of Mayer factors on their edges."""
    if V.n > 6:
        raise EnumerationRangeError("connected-graph sum supports n <= 6")
    f = mayer_factors(V)
    masks = connected_graph_masks(V.n)
    return math.fsum(np.prod(np.where(masks, f, 1.0), axis=1))


@lru_cache(maxsize=None)
def _order_table(n: int):
    """Per root order: pair stage sets and tree terms grouped by cross counts.

    Returns a tuple of ``(order, stage_sets, {b: [tree_edges...]})``; built
    from the tree and compatible-sequence streams.
    """
    grouped: dict[tuple, dict[tuple, list]] = defaultdict(lambda: defaultdict(list))
    for term in measure_terms(n):
        grouped[term.seq.order][term.seq.cross_counts].append(term.tree_edges)
    table = []
    for order in sorted(grouped):
        pos = {v: k for k, v in enumerate(order)}
        stages = []
        for i, j in pairs(n):
            lo, hi = sorted((pos[i], pos[j]))
            stages.append(tuple(range(lo, hi)))
        trees = {b: tuple(edges) for b, edges in sorted(grouped[order].items())}
        table.append((order, tuple(stages), trees))
    return tuple(table)


def _axis_grids(q: int, dims: int):
    x, w = gauss_legendre(q)
    if dims == 0:
        return [], np.ones(1)
    mesh = np.meshgrid(*([x] * dims), indexing="ij")
    wmesh = np.meshgrid(*([w] * dims), indexing="ij")
    t = [m.ravel() for m in mesh]
    weight = np.prod([m.ravel() for m in wmesh], axis=0)
    return t, weight


def _measure_integral(n: int, exponent_pairs, tree_prefactor, q: int) -> float:
    """``sum_X int dt prod t_s^(b_s-1) * prefactor(tree) * exp(-sum t_n(pair) V_pair)``.

    ``exponent_pairs``: list of ``(pair_index, value)`` in the exponent.
    ``tree_prefactor(edges)`` gives the product factor of each tree (0 to skip).
    The first axis is looped over to bound memory.
    """
    dims = n - 1
    x, w = gauss_legendre(q)
    inner_t, inner_w = _axis_grids(q, dims - 1)
    parts = []
    for order, stages, trees in _order_table(n):
        coef_by_b = []
        for b, edge_lists in trees.items():
            c = math.fsum(tree_prefactor(edges) for edges in edge_lists)
            if c != 0.0:
                coef_by_b.append((b, c))
        if not coef_by_b:
            continue
        chunk = []
        for k0 in range(q):
            t = [np.full(inner_w.shape, x[k0])] + inner_t
            expo = np.zeros(inner_w.shape)
            for idx, value in exponent_pairs:
                factor = np.ones(inner_w.shape)
                for s in stages[idx]:
                    factor = factor * t[s]
                expo = expo + value * factor
            poly = np.zeros(inner_w.shape)
            for b, c in coef_by_b:
                mono = np.full(inner_w.shape, c)
                for s, bs in enumerate(b):
                    if bs > 1:
                        mono = mono * t[s] ** (bs - 1)
                poly = poly + mono
            chunk.append(w[k0] * float(np.dot(inner_w, poly * np.exp(-expo))))
        parts.append(math.fsum(chunk))
    return math.fsum(parts)


def _check_quadrature_size(V: InteractionMatrix):
    if V.n > MAX_QUADRATURE_N:
        raise EnumerationRangeError(
            f"tensor quadrature supports n <= {MAX_QUADRATURE_N}; use rhs_tree_sum_mc for larger n")


def _edge_index(n: int):
    return {p: k for k, p in enumerate(pairs(n))}


def rhs_tree_sum(V: InteractionMatrix, order: int = 24, return_error: bool = False):
    """Tree side of the identity for a bounded interaction.

    With ``return_error`` also returns ``|I(order) - I(order // 2)|``.
    """
    if not V.is_bounded():
        raise DomainError("unbounded interaction; use rhs_tree_sum_regularized")
    _check_quadrature_size(V)
    n = V.n
    vals = V.pair_vector()
    index = _edge_index(n)
    expo = [(k, float(v)) for k, v in enumerate(vals) if v != 0.0]

    def prefactor(edges):
        return math.prod(-vals[index[e]] for e in edges)

    value = _measure_integral(n, expo, prefactor, order)
    if not return_error:
        return value
    coarse = _measure_integral(n, expo, prefactor, max(2, order // 2))
    return value, abs(value - coarse)


def rhs_tree_sum_mc(V: InteractionMatrix, samples: int = 100_000, seed: int = 0):
    """Seeded Monte Carlo estimate of the tree side; returns ``(value, standard_error)``."""
    if not V.is_bounded():
        raise DomainError("unbounded interaction")
    if samples < 2:
        raise DomainError("need at least two samples")
    n = V.n
    vals = V.pair_vector()
    index = _edge_index(n)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, n])))
    t = rng.random((n - 1, samples))
    total = np.zeros(samples)
    for order, stages, trees in _order_table(n):
        expo = np.zeros(samples)
        for k, v in enumerate(vals):
            if v != 0.0:
                factor = np.ones(samples)
                for s in stages[k]:
                    factor = factor * t[s]
                expo = expo + v * factor
        poly = np.zeros(samples)
        for b, edge_lists in trees.items():
            c = math.fsum(math.prod(-vals[index[e]] for e in edges) for edges in edge_lists)
            mono = np.full(samples, c)
            for s, bs in enumerate(b):
                if bs > 1:
                    mono = mono * t[s] ** (bs - 1)
            poly = poly + mono
        total = total + poly * np.exp(-expo)
    return float(total.mean()), float(total.std(ddof=1) / math.sqrt(samples))


def rhs_tree_sum_regularized(V: InteractionMatrix, reg: Regularization = Regularization(),
                             order: int = 24) -> list[float]:
    """Tree side for ``V^H`` (infinite entries replaced by ``H``) along the schedule."""
    if V.is_bounded():
        value = rhs_tree_sum(V, order)
        return [value] * len(reg.schedule)
    return [rhs_tree_sum(V.regularized(H), order) for H in reg.schedule]


def lemma_posit_check(tree: LabeledTree, V: InteractionMatrix, order: int = 24) -> tuple[float, float]:
    """Both sides of the tree-positivity identity; the exponent runs over tree edges only."""
    n = tree.n
    if V.n != n:
        raise DomainError("tree and interaction sizes differ")
    if n > MAX_QUADRATURE_N:
        raise EnumerationRangeError(f"n <= {MAX_QUADRATURE_N} required")
    index = _edge_index(n)
    tv = [V[e] for e in tree.edges]
    if not all(math.isfinite(v) for v in tv):
        raise DomainError("tree-edge entries must be finite")
    lhs = math.prod(abs(math.expm1(-v)) for v in tv)
    absprod = math.prod(abs(v) for v in tv)
    if absprod == 0.0:
        return lhs, 0.0
    target = tree.edges
    expo = [(index[e], V[e]) for e in target]

    def prefactor(edges):
        return 1.0 if edges == target else 0.0

    return lhs, absprod * _measure_integral(n, expo, prefactor, order)


def interpolated_energy(V: InteractionMatrix, order, t) -> float:
    """``sum_{i<j} t_n({i,j}) V_ij`` for a root order and stage parameters ``t``."""
    pos = {v: k for k, v in enumerate(order)}
    total = []
    for i, j in pairs(V.n):
        lo, hi = sorted((pos[i], pos[j]))
        total.append(math.prod(t[lo:hi]) * V[i, j] if V[i, j] != 0.0 else 0.0)
    return math.fsum(total)


def lemma_convex_check(V: InteractionMatrix, B: float, samples: int = 1000, seed: int = 0) -> float:
    """Minimum over random ``(t, X)`` of ``sum t_n V + n B``; nonnegative when the lemma holds."""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, V.n])))
    worst = math.inf
    n = V.n
    for _ in range(samples):
        order = (0,) + tuple(int(v) + 1 for v in rng.permutation(n - 1))
        t = rng.random(n - 1)
        worst = min(worst, interpolated_energy(V, order, t) + n * B)
    return worst


def tree_weight_sum(weights: np.ndarray) -> float:
    """``sum over trees of prod over edges of weights[i, j]``, by enumeration."""
    n = weights.shape[0]
    if n > 7:
        raise EnumerationRangeError("tree enumeration supports n <= 7")
    return math.fsum(math.prod(weights[i, j] for i, j in t.edges) for t in enumerate_trees(n))


def tree_inequality_penrose(V: InteractionMatrix, B: float | None = None) -> tuple[float, float]:
    """``(|graph sum|, e^{nB} sum_trees prod F_ij)``, F = 1 on incompatible pairs, |V| otherwise."""
    if V.n > 6:
        raise EnumerationRangeError("n <= 6 required")
    if B is None:
        from .stability import finite_algebraic_b
        B = finite_algebraic_b(V)
    F = np.where(np.isinf(V.values), 1.0, np.abs(V.values))
    return abs(lhs_connected_graph_sum(V)), math.exp(V.n * B) * tree_weight_sum(F)


def tree_inequality_ruelle(phi1: InteractionMatrix, phi2: InteractionMatrix,
                           B0: float | None = None) -> tuple[float, float]:
    """``(|graph sum of phi1+phi2|, e^{n B0} sum_trees prod [|e^{-phi1}-1| + |phi2|])``."""
    if phi1.n != phi2.n:
        raise DomainError("phi1 and phi2 sizes differ")
    if (phi1.values < 0).any():
        raise DomainError("phi1 must be nonnegative")
    if not phi2.is_bounded():
        raise DomainError("phi2 must be bounded")
    if phi1.n > 6:
        raise EnumerationRangeError("n <= 6 required")
    if B0 is None:
        from .stability import finite_algebraic_b
        B0 = finite_algebraic_b(phi2)
    V = phi1 + phi2
    weights = np.abs(np.expm1(-phi1.values)) + np.abs(phi2.values)
    return abs(lhs_connected_graph_sum(V)), math.exp(phi1.n * B0) * tree_weight_sum(weights)
