"""Brute-force Mayer coefficients and the exactly solvable hard-rod oracle.

Both estimators pin the first particle at the box centre and integrate the
remaining ``n - 1`` positions over the box, which equals the
infinite-volume coefficient once the box is much larger than the
interaction range.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .combinat import connected_graph_masks, pairs
from .errors import DomainError, EnumerationRangeError
from .potential import RadialPotential
from .quad import gauss_legendre

MAX_ORDER = 5
SHARD_SIZE = 1 << 16


@dataclass(frozen=True)
class Box:
    d: int
    side: float

    def __post_init__(self):
        if not self.side > 0:
            raise DomainError("box side must be positive")
        if self.d < 1:
            raise DomainError("dimension must be positive")

    @property
    def volume(self) -> float:
        return self.side**self.d


@dataclass(frozen=True)
class MayerEstimate:
    n: int
    value: float
    standard_error: float
    samples: int
    method: str
    box_side: float
    boundary_flag: bool = False

    def to_row(self) -> dict:
        return {"n": self.n, "value": self.value, "std_error": self.standard_error,
                "method": self.method, "box_side": self.box_side, "samples": self.samples}


def tonks_oracle(a: float, n: int) -> float:
    """Infinite-volume Mayer coefficient of hard rods of length ``a``: ``(-n a)^(n-1) / n!``."""
    if not a > 0 or n < 1:
        raise DomainError("need a > 0 and n >= 1")
    return (-n * a) ** (n - 1) / math.factorial(n)


def connected_sum(f_pairs: np.ndarray, n: int) -> np.ndarray:
    """Connected-graph sum for many configurations at once.

    ``f_pairs`` has shape ``(num_pairs, m)``: Mayer factors per pair and sample.
    """
    masks = connected_graph_masks(n)
    total = np.zeros(f_pairs.shape[1])
    for row in masks:
        total = total + np.prod(f_pairs[row], axis=0)
    return total


def mayer_factor(p: RadialPotential, beta: float, r) -> np.ndarray:
    """``exp(-beta V(r)) - 1``; exactly -1 inside a hard core."""
    with np.errstate(over="ignore", invalid="ignore"):
        return np.expm1(-beta * p(r))


def interaction_range(p: RadialPotential, beta: float, tol: float = 1e-15) -> float:
    """Radius beyond which ``|exp(-beta V) - 1|`` is below ``tol`` (exact for compact support)."""
    support = p.support_radius()
    if support is not None:
        return support
    R = max(p.breakpoints() + [1.0])
    while R < 1e6:
        m = p.tail_majorant(R)
        if m is not None and beta * float(m(R)) * math.exp(beta * float(m(R))) < tol:
            return R
        R *= 1.25
    raise DomainError("could not determine a finite interaction range")


def _kink_offsets(p: RadialPotential, depth: int) -> list[float]:
    radii = [r for r in p.breakpoints() if r > 0]
    offsets = {0.0}
    frontier = {0.0}
    for _ in range(depth):
        frontier = {x + s * r for x in frontier for r in radii for s in (-1.0, 1.0)}
        offsets |= frontier
    return sorted(offsets)


STEP_KINDS = ("hard_core", "square_well")


def _exact_1d(p: RadialPotential, beta: float, box: Box, n: int, order: int,
              panels_per_scale: int = 8) -> float:
    L = box.side
    c = 0.5 * L
    reach = interaction_range(p, beta)
    lo, hi = max(0.0, c - (n - 1) * reach), min(L, c + (n - 1) * reach)
    offsets = _kink_offsets(p, n - 1)
    # Step potentials give piecewise-polynomial integrands: kinks as panel ends suffice.
    scale = min([r for r in p.breakpoints() if r > 0] + [reach])
    h_max = math.inf if p.kind in STEP_KINDS else scale / panels_per_scale
    x_nodes, w_nodes = gauss_legendre(order)
    ps = pairs(n)
    masks = connected_graph_masks(n)

    def panels(fixed):
        pts = {lo, hi}
        for x in fixed:
            for off in offsets:
                if lo < x + off < hi:
                    pts.add(x + off)
        pts = sorted(pts)
        out_x, out_w = [], []
        for a, b in zip(pts[:-1], pts[1:]):
            k = 1 if math.isinf(h_max) else max(1, math.ceil((b - a) / h_max))
            edges = np.linspace(a, b, k + 1)
            for u, v in zip(edges[:-1], edges[1:]):
                out_x.append(u + (v - u) * x_nodes)
                out_w.append((v - u) * w_nodes)
        return np.concatenate(out_x), np.concatenate(out_w)

    def level(fixed):
        xs, ws = panels(fixed)
        if len(fixed) == n - 1:
            m = len(xs)
            f = np.empty((len(ps), m))
            for k, (i, j) in enumerate(ps):
                if j == n - 1:
                    f[k] = mayer_factor(p, beta, np.abs(xs - fixed[i]))
                else:
                    f[k] = float(mayer_factor(p, beta, abs(fixed[i] - fixed[j])))
            total = np.zeros(m)
            for row in masks:
                total = total + np.prod(f[row], axis=0)
            return math.fsum(ws * total)
        return math.fsum(w * level(fixed + [x]) for x, w in zip(xs, ws))

    return level([c]) / math.factorial(n)


def _mc_shard(args):
    p, beta, box, n, seed, shard, size = args
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, n, shard])))
    d, L = box.d, box.side
    dims = (n - 1) * d
    # Latin-hypercube stratification within the shard.
    u = (np.argsort(rng.random((dims, size)), axis=1) + rng.random((dims, size))) / size
    pts = np.concatenate([np.full((1, d, size), 0.5 * L), (L * u).reshape(n - 1, d, size)])
    f = np.empty((len(pairs(n)), size))
    for k, (i, j) in enumerate(pairs(n)):
        r = np.sqrt(((pts[i] - pts[j]) ** 2).sum(0))
        f[k] = mayer_factor(p, beta, r)
    g = connected_sum(f, n)
    return math.fsum(g), math.fsum(g * g)


def _worker_count(workers: int | None) -> int:
    env = os.environ.get("CLUSTER_RADIUS_WORKERS")
    if env:
        return max(1, int(env))
    if workers is None:
        return os.cpu_count() or 1
    return max(1, workers)


def _monte_carlo(p, beta, box, n, samples, seed, workers):
    sizes = [SHARD_SIZE] * (samples // SHARD_SIZE)
    if samples % SHARD_SIZE:
        sizes.append(samples % SHARD_SIZE)
    jobs = [(p, beta, box, n, seed, k, s) for k, s in enumerate(sizes)]
    nw = _worker_count(workers)
    if nw > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(nw, len(jobs))) as pool:
            results = list(pool.map(_mc_shard, jobs))
    else:
        results = [_mc_shard(j) for j in jobs]
    s1 = math.fsum(r[0] for r in results)
    s2 = math.fsum(r[1] for r in results)
    mean = s1 / samples
    var = max(s2 / samples - mean * mean, 0.0) * samples / (samples - 1)
    scale = box.volume ** (n - 1) / math.factorial(n)
    return scale * mean, scale * math.sqrt(var / samples)


def mayer_coefficient(p: RadialPotential, beta: float, box: Box, n: int, method: str = "exact1d",
                      seed: int = 0, samples: int = 1_000_000, order: int | None = None,
                      workers: int | None = 1) -> MayerEstimate:
    """Pinned estimate of ``C_n``: exact nested quadrature in d = 1, or seeded Monte Carlo.

    ``order`` is the Gauss-Legendre order per panel for Exact1D; by default 8
    for step potentials (exact between kinks) and 12 otherwise.
    """
    if not 2 <= n <= MAX_ORDER:
        raise EnumerationRangeError(f"orders 2..{MAX_ORDER} supported")
    if not beta > 0:
        raise DomainError("beta must be positive")
    if box.d != p.dimension:
        raise DomainError("box and potential dimensions differ")
    reach = interaction_range(p, beta)
    # Connected configurations stay within (n - 1) * reach of the pinned particle.
    flag = box.side < 2.0 * (n - 1) * reach
    method = method.lower()
    if method == "exact1d":
        if box.d != 1:
            raise DomainError("exact1d needs d = 1")
        if n > 4:
            raise EnumerationRangeError("exact1d supports n <= 4; use montecarlo for n = 5")
        if order is None:
            order = 8 if p.kind in STEP_KINDS else 12
        value = _exact_1d(p, beta, box, n, order)
        return MayerEstimate(n, value, 0.0, 0, "Exact1D", box.side, flag)
    if method == "montecarlo":
        if samples < 2:
            raise DomainError("Monte Carlo needs at least two samples")
        value, se = _monte_carlo(p, beta, box, n, samples, seed, workers)
        return MayerEstimate(n, value, se, samples, "MonteCarlo", box.side, flag)
    raise DomainError(f"unknown method {method!r}")


def default_box_side(p: RadialPotential, beta: float, n: int, method: str) -> float:
    """Box side used when none is given: generous for Exact1D, tight for Monte Carlo."""
    reach = interaction_range(p, beta)
    if method.lower() == "exact1d":
        return 64.0 * reach
    return 2.0 * (n - 1) * reach


def radius_lower_bound_empirical(estimates) -> float:
    """``1 / max_n |C_n|^(1/n)``: a root-test diagnostic, not a rigorous bound."""
    roots = [abs(e.value) ** (1.0 / e.n) for e in estimates]
    if not roots or max(roots) == 0.0:
        raise DomainError("all estimates are zero")
    return 1.0 / max(roots)
