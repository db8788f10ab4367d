"""Stability constants: exact finite-n values, configuration-search lower bounds
and the positive-definiteness upper bound."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, EnumerationRangeError
from .potential import InteractionMatrix, RadialPotential

MAX_SUBSET_N = 20


@dataclass(frozen=True)
class StabilityEstimate:
    lower_bound: float
    upper_bound: float | None = None
    witness: tuple[tuple[float, ...], ...] = ()
    notes: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.upper_bound is not None and self.lower_bound > self.upper_bound + 1e-12:
            raise DomainError("lower bound exceeds upper bound")

    def to_dict(self) -> dict:
        return {"lower_bound": self.lower_bound, "upper_bound": self.upper_bound,
                "witness": [list(x) for x in self.witness], **self.notes}


def subset_energies(V: InteractionMatrix) -> np.ndarray:
    """Energy ``sum_{i<j in X} V_ij`` of every subset ``X`` (indexed by bitmask).

    Built by doubling: the masks with top bit ``k`` reuse the table for the
    lower bits plus the row sums of vertex ``k`` restricted to those bits.
    Incompatible subsets come out as ``+inf``.
    """
    n = V.n
    if n > MAX_SUBSET_N:
        raise EnumerationRangeError(f"subset scan supports n <= {MAX_SUBSET_N}")
    v = V.values
    energy = np.zeros(1)
    for k in range(n):
        # link[m] = sum_{j in m} V_kj for masks m over vertices 0..k-1
        link = np.zeros(1)
        for j in range(k):
            link = np.concatenate([link, link + v[k, j]])
        energy = np.concatenate([energy, energy + link])
    return energy


def popcounts(n: int) -> np.ndarray:
    counts = np.zeros(1, dtype=np.int64)
    for _ in range(n):
        counts = np.concatenate([counts, counts + 1])
    return counts


def finite_algebraic_b(V: InteractionMatrix) -> float:
    """Smallest ``B >= 0`` with ``sum_{E_X} V >= -B |X|`` for every compatible ``X``, ``|X| >= 2``."""
    energy = subset_energies(V)
    size = popcounts(V.n)
    ok = (size >= 2) & np.isfinite(energy)
    if not ok.any():
        return 0.0
    return max(0.0, float(np.max(-energy[ok] / size[ok])))


def worst_subset(V: InteractionMatrix) -> tuple[int, ...]:
    """Vertices of a subset attaining :func:`finite_algebraic_b` (empty if B = 0)."""
    energy = subset_energies(V)
    size = popcounts(V.n)
    ratio = np.where((size >= 2) & np.isfinite(energy), -energy / np.maximum(size, 1), -np.inf)
    m = int(np.argmax(ratio))
    if ratio[m] <= 0:
        return ()
    return tuple(i for i in range(V.n) if m >> i & 1)


# -- configuration search -----------------------------------------------

def configuration_energy(p: RadialPotential, x: np.ndarray) -> float:
    n = len(x)
    if n < 2:
        return 0.0
    diff = x[:, None, :] - x[None, :, :]
    dist = np.sqrt((diff**2).sum(-1))
    iu = np.triu_indices(n, 1)
    return float(np.sum(p(dist[iu])))


def _particle_energy(p, x, k):
    dist = np.sqrt(((x - x[k]) ** 2).sum(-1))
    dist = np.delete(dist, k)
    return float(np.sum(p(dist)))


def _natural_length(p: RadialPotential) -> float:
    pts = p.breakpoints()
    return max(pts) if pts else 1.0


def _descend(p: RadialPotential, N: int, rng: np.random.Generator, sweeps: int) -> tuple[float, np.ndarray]:
    """Multi-particle coordinate descent with annealed random trial moves.

    Trial displacements shrink geometrically; a move is kept only when it
    lowers the particle's energy, so hard cores are never entered.
    """
    d = p.dimension
    ell = _natural_length(p)
    side = ell * max(1.0, N ** (1.0 / d)) * 1.2
    x = rng.random((N, d)) * side
    # Random packings may overlap hard cores; push points onto a lattice first.
    if not math.isfinite(configuration_energy(p, x)):
        per = math.ceil(N ** (1.0 / d))
        idx = np.array(np.unravel_index(np.arange(N), (per,) * d)).T
        x = idx * ell * 1.05 + rng.random((N, d)) * 0.01 * ell
    step = 0.5 * ell
    for sweep in range(sweeps):
        for k in range(N):
            old = _particle_energy(p, x, k)
            trial = x.copy()
            trial[k] = x[k] + rng.normal(size=d) * step
            new = _particle_energy(p, trial, k)
            if new < old:
                x = trial
        step *= 0.97
    return configuration_energy(p, x), x


def configuration_lower_bound(p: RadialPotential, n_max: int = 16, restarts: int = 4, seed: int = 0,
                              sweeps: int = 150, n_values=None) -> StabilityEstimate:
    """``max_N (-U_min(N) / N, 0)`` over seeded local searches; a lower bound on B.

    Every ``(N, restart)`` pair draws from its own seeded stream, so more
    restarts or a larger ``n_max`` can only raise the result.
    """
    if n_values is None:
        n_values = range(2, n_max + 1)
    best = 0.0
    witness = np.zeros((1, p.dimension))
    for N in n_values:
        for r in range(restarts):
            rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, N, r])))
            energy, x = _descend(p, N, rng, sweeps)
            if math.isfinite(energy) and -energy / N > best:
                best, witness = -energy / N, x
    notes = {"n_max": max(n_values, default=0), "restarts": restarts, "seed": seed}
    return StabilityEstimate(best, None, tuple(tuple(map(float, row)) for row in witness), notes)


def ruelle_criterion_upper_bound(phi2_at_zero: float, transform_values, tol: float = 1e-9) -> float | None:
    """``phi2(0) / 2`` when the sampled transform is nonnegative (within ``tol`` of its max); else None."""
    values = np.asarray(transform_values, dtype=float)
    if values.size == 0:
        raise DomainError("transform grid is empty")
    if not math.isfinite(phi2_at_zero):
        raise DomainError("phi2 must be finite at 0")
    scale = max(float(np.max(np.abs(values))), 1e-300)
    if values.min() < -tol * scale:
        return None
    return max(phi2_at_zero / 2.0, 0.0)
