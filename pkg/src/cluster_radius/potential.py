"""Radial pair potentials, their classification and algebraic pair interactions.

Potential values are extended reals: ordinary floats plus ``math.inf``.
``-inf`` and ``nan`` are rejected wherever a value enters the library, so
IEEE arithmetic already gives the required rules (``x + inf == inf``,
``exp(-inf) == 0``).
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np
from scipy.special import gamma, gammaincc

from .errors import ClassificationError, DomainError

KINDS = (
    "hard_core",
    "square_well",
    "morse",
    "lennard_jones_126",
    "lj_type",
    "gaussian",
    "tabulated",
    "truncated",
    "sum",
)


def check_extended(x) -> float:
    """Validate a scalar extended real and return it as a float."""
    x = float(x)
    if math.isnan(x) or x == -math.inf:
        raise DomainError(f"{x!r} is not an extended real (only +inf is allowed)")
    return x


def _check_extended_array(values: np.ndarray) -> np.ndarray:
    if np.isnan(values).any() or np.isneginf(values).any():
        raise DomainError("array contains nan or -inf; only +inf is allowed")
    return values


class Label(str, enum.Enum):
    REPULSIVE = "Repulsive"
    BOUNDED = "Bounded"
    HARD_CORE = "HardCore"
    LJ_TYPE = "LJType"
    ABSOLUTELY_SUMMABLE_CANDIDATE = "AbsolutelySummableCandidate"


@dataclass(frozen=True)
class PowerExpSum:
    """A finite sum of ``c * r**-p`` and ``c * exp(-k r)`` terms.

    Used for envelope functions and for closed-form tail majorants.
    Each term is ``(kind, coef, exponent)`` with kind ``"power"`` or ``"exp"``.
    """

    terms: tuple[tuple[str, float, float], ...] = ()

    def __post_init__(self):
        clean = []
        for kind, coef, k in self.terms:
            if kind not in ("power", "exp"):
                raise DomainError(f"unknown envelope term kind {kind!r}")
            clean.append((kind, float(coef), float(k)))
        object.__setattr__(self, "terms", tuple(clean))

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            for kind, coef, k in self.terms:
                if kind == "power":
                    out = out + coef * r**-k
                else:
                    out = out + coef * np.exp(-k * r)
        return out if out.ndim else float(out)

    def __add__(self, other: PowerExpSum) -> PowerExpSum:
        return PowerExpSum(self.terms + other.terms)

    def scaled(self, factor: float) -> PowerExpSum:
        return PowerExpSum(tuple((kind, factor * c, k) for kind, c, k in self.terms))

    def tail_integral(self, R: float, d: int) -> float:
        """Closed form of the radial tail integral of r**(d-1) f(r) over [R, inf).

        Returns ``inf`` when a power term decays too slowly to be integrable.
        """
        total = 0.0
        for kind, coef, k in self.terms:
            if coef == 0.0:
                continue
            if kind == "power":
                if k <= d:
                    return math.inf
                total += coef * R ** (d - k) / (k - d)
            else:
                if k <= 0:
                    return math.inf
                total += coef * float(gammaincc(d, k * R)) * float(gamma(d)) / k**d
        return total

    def blows_up_at_zero(self, d: int) -> bool:
        """True when ``f(r) r**d`` diverges as r -> 0 (leading power term wins)."""
        powers = [(k, c) for kind, c, k in self.terms if kind == "power" and c != 0.0]
        if not powers:
            return False
        k, c = max(powers)
        return c > 0 and k > d

    def to_dict(self) -> dict:
        return {"terms": [{"type": kind, "coef": c, "exponent": k} for kind, c, k in self.terms]}

    @classmethod
    def from_dict(cls, data: Mapping) -> PowerExpSum:
        terms = []
        for term in data.get("terms", []):
            kind = term["type"]
            k = term.get("exponent", term.get("rate"))
            terms.append((kind, term["coef"], k))
        return cls(tuple(terms))


@dataclass(frozen=True)
class Envelope:
    """Lower envelope of a Lennard-Jones type potential.

    ``V >= xi`` on ``[0, r1]``, ``V >= -w`` on ``[r1, r2]`` and ``V >= -eta``
    beyond ``r2``; ``xi`` and ``eta`` are nonnegative and decreasing.
    """

    r1: float
    r2: float
    w: float
    xi: PowerExpSum
    eta: PowerExpSum

    def __post_init__(self):
        if not 0 < self.r1 <= self.r2:
            raise DomainError(f"envelope needs 0 < r1 <= r2, got r1={self.r1}, r2={self.r2}")
        if self.w < 0:
            raise DomainError("envelope depth w must be nonnegative")
        r_in = np.geomspace(self.r1 * 1e-3, self.r1, 400)
        r_out = np.geomspace(self.r2, self.r2 * 1e3, 400)
        for name, fn, grid in (("xi", self.xi, r_in), ("eta", self.eta, r_out)):
            vals = np.asarray(fn(grid))
            if (vals < -1e-12 * max(1.0, np.abs(vals).max())).any():
                raise DomainError(f"envelope {name} must be nonnegative on its domain")
            if (np.diff(vals) > 1e-12 * max(1.0, np.abs(vals).max())).any():
                raise DomainError(f"envelope {name} must be monotone decreasing on its domain")

    def eta1(self, r):
        """``w`` up to ``r2`` and ``eta`` beyond."""
        r = np.asarray(r, dtype=float)
        return np.where(r <= self.r2, self.w, self.eta(np.maximum(r, self.r2)))

    def to_dict(self) -> dict:
        return {"r1": self.r1, "r2": self.r2, "w": self.w,
                "xi": self.xi.to_dict(), "eta": self.eta.to_dict()}

    @classmethod
    def from_dict(cls, data: Mapping) -> Envelope:
        return cls(float(data["r1"]), float(data["r2"]), float(data["w"]),
                   PowerExpSum.from_dict(data["xi"]), PowerExpSum.from_dict(data["eta"]))


@dataclass(frozen=True)
class RadialPotential:
    """A radial pair potential ``V(r)`` in dimension ``dimension``.

    Build instances through the module-level constructors (:func:`morse`,
    :func:`square_well`, ...) or :func:`potential_from_dict`.
    """

    kind: str
    params: Mapping[str, Any] = field(default_factory=dict)
    dimension: int = 3
    hard_core_radius: float | None = None
    envelope: Envelope | None = None
    components: tuple[RadialPotential, ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown potential kind {self.kind!r}")
        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise DomainError("dimension must be a positive integer")
        if self.hard_core_radius is not None and self.hard_core_radius < 0:
            raise DomainError("hard_core_radius must be nonnegative")
        if self.kind == "tabulated":
            grid = np.asarray(self.params["grid"], dtype=float)
            values = np.asarray(self.params["values"], dtype=float)
            if grid.ndim != 1 or grid.shape != values.shape or len(grid) < 2:
                raise DomainError("tabulated potential needs matching 1-D grid and values")
            if (np.diff(grid) <= 0).any() or grid[0] < 0:
                raise DomainError("tabulated grid must be nonnegative and strictly increasing")
            if not np.isfinite(values).all():
                raise DomainError("tabulated values must be finite; use hard_core_radius for cores")
            object.__setattr__(self, "_grid", grid)
            object.__setattr__(self, "_values", values)
        for c in self.components:
            if c.dimension != self.dimension:
                raise DomainError("components must share the potential's dimension")

    # -- evaluation -----------------------------------------------------

    def __call__(self, r):
        """Vectorised evaluation; returns floats with ``+inf`` inside cores."""
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            out = self._raw(r)
        out = np.asarray(out, dtype=float)
        if self.hard_core_radius is not None:
            out = np.where(r <= self.hard_core_radius, np.inf, out)
        return out if out.ndim else float(out)

    def _raw(self, r: np.ndarray) -> np.ndarray:
        p = self.params
        k = self.kind
        if k == "hard_core":
            return np.zeros_like(r)
        if k == "square_well":
            return np.where(r <= p["R"], -p["w"], 0.0)
        if k == "morse":
            x = np.exp(p["rho"] * (1.0 - r / p.get("r_eq", 1.0)))
            return p.get("depth", 1.0) * (x * x - 2.0 * x)
        if k == "lennard_jones_126":
            s6 = (p["sigma"] / r) ** 6
            return 4.0 * p["epsilon"] * s6 * (s6 - 1.0)
        if k == "lj_type":
            m, n = p["m"], p["n"]
            c = (m / (m - n)) * (m / n) ** (n / (m - n))
            x = p["sigma"] / r
            return c * p["epsilon"] * x**n * (x ** (m - n) - 1.0)
        if k == "gaussian":
            return p["amplitude"] * np.exp(-0.5 * (r / p.get("width", 1.0)) ** 2)
        if k == "tabulated":
            return np.interp(r, self._grid, self._values, left=self._values[0], right=0.0)
        if k == "truncated":
            base = self.components[0]
            a = p["a"]
            va = float(base(a))
            vr = base(np.maximum(r, a))
            if p.get("part", "plateau") == "plateau":
                return np.where(r < a, va, vr)
            return np.where(r < a, base(r) - va, 0.0)
        if k == "sum":
            out = np.zeros_like(r)
            for c in self.components:
                out = out + c(r)
            return out
        raise AssertionError(k)

    # -- structural metadata --------------------------------------------

    @property
    def core(self) -> float:
        return self.hard_core_radius or 0.0

    def breakpoints(self) -> list[float]:
        """Radii where the potential or ``|V|`` has kinks; used as panel boundaries."""
        p, k = self.params, self.kind
        pts: list[float] = []
        if k == "square_well":
            pts += [p["R"]]
        elif k == "morse":
            r_eq = p.get("r_eq", 1.0)
            pts += [r_eq * (1.0 - math.log(2.0) / p["rho"]), r_eq]
        elif k == "lennard_jones_126":
            pts += [p["sigma"], 2.0 ** (1 / 6) * p["sigma"]]
        elif k == "lj_type":
            m, n = p["m"], p["n"]
            pts += [p["sigma"], (m / n) ** (1 / (m - n)) * p["sigma"]]
        elif k == "tabulated":
            grid = self._grid
            if len(grid) > 64:
                grid = grid[np.linspace(0, len(grid) - 1, 64).astype(int)]
            pts += list(grid)
        elif k == "truncated":
            pts += [p["a"]]
        for c in self.components:
            pts += c.breakpoints()
        if self.hard_core_radius:
            pts.append(self.hard_core_radius)
        return sorted({float(x) for x in pts if x > 0})

    def support_radius(self) -> float | None:
        """Radius beyond which V vanishes identically, or None for infinite range."""
        p, k = self.params, self.kind
        if k == "hard_core":
            return self.core
        if k == "square_well":
            return max(p["R"], self.core)
        if k == "tabulated":
            return float(self._grid[-1])
        if k == "truncated" and p.get("part") == "core":
            return p["a"]
        if k == "truncated":
            return self.components[0].support_radius()
        if k == "sum":
            radii = [c.support_radius() for c in self.components]
            if any(x is None for x in radii):
                return None
            return max(radii, default=0.0)
        return None

    def tail_majorant(self, R: float) -> PowerExpSum | None:
        """A closed-form function bounding ``|V(r)|`` for every ``r >= R``.

        None when no such bound is known from the structure of the kind.
        """
        p, k = self.params, self.kind
        support = self.support_radius()
        if support is not None and R >= support:
            return PowerExpSum()
        if k == "morse":
            r_eq = p.get("r_eq", 1.0)
            if R < r_eq * (1.0 - math.log(2.0) / p["rho"]):
                return None
            coef = 2.0 * abs(p.get("depth", 1.0)) * math.exp(p["rho"])
            return PowerExpSum((("exp", coef, p["rho"] / r_eq),))
        if k == "lennard_jones_126":
            if R < p["sigma"]:
                return None
            return PowerExpSum((("power", 4.0 * abs(p["epsilon"]) * p["sigma"] ** 6, 6.0),))
        if k == "lj_type":
            m, n = p["m"], p["n"]
            if R < p["sigma"]:
                return None
            c = (m / (m - n)) * (m / n) ** (n / (m - n))
            return PowerExpSum((("power", c * abs(p["epsilon"]) * p["sigma"] ** n, n),))
        if k == "gaussian":
            if R <= 0:
                return None
            s2 = p.get("width", 1.0) ** 2
            coef = abs(p["amplitude"]) * math.exp(R * R / (2 * s2))
            return PowerExpSum((("exp", coef, R / s2),))
        if k == "truncated":
            if R < p["a"]:
                return None
            return self.components[0].tail_majorant(R)
        if k == "sum":
            total = PowerExpSum()
            for c in self.components:
                m = c.tail_majorant(R)
                if m is None:
                    return None
                total = total + m
            return total
        return None

    def is_finite_everywhere(self) -> bool:
        if self.core > 0:
            return False
        k = self.kind
        if k in ("morse", "gaussian", "tabulated", "hard_core", "square_well"):
            return True
        if k == "truncated":
            return self.params.get("part", "plateau") == "plateau" or self.components[0].is_finite_everywhere()
        if k == "sum":
            return all(c.is_finite_everywhere() for c in self.components)
        return False

    def is_penrose(self) -> bool:
        """Hard core ``a > 0`` followed by a finite, nonpositive tail.

        The strict ``V < 0`` beyond the core is relaxed to ``V <= 0`` so that
        square wells (zero beyond their range) qualify.
        """
        if self.core <= 0:
            return False
        a = self.core
        span = max(self.breakpoints() + [a]) * 4.0
        grid = a + np.geomspace(1e-9 * a, span, 2000)
        vals = self(grid)
        return bool(np.isfinite(vals).all() and (vals <= 0).all())

    def with_dimension(self, d: int) -> RadialPotential:
        return RadialPotential(self.kind, dict(self.params), d, self.hard_core_radius,
                               self.envelope, tuple(c.with_dimension(d) for c in self.components))

    # -- serialisation --------------------------------------------------

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"kind": self.kind, "params": {}, "dimension": self.dimension}
        for key, value in self.params.items():
            out["params"][key] = list(value) if isinstance(value, (tuple, np.ndarray)) else value
        if self.hard_core_radius is not None:
            out["hard_core_radius"] = self.hard_core_radius
        if self.envelope is not None:
            out["envelope"] = self.envelope.to_dict()
        if self.components:
            out["components"] = [c.to_dict() for c in self.components]
        return out


def evaluate(p: RadialPotential, r: float) -> float:
    """Evaluate ``p`` at a single radius ``r >= 0``."""
    r = float(r)
    if not r >= 0:
        raise DomainError(f"radius must be nonnegative, got {r}")
    return check_extended(p(r))


# -- constructors -------------------------------------------------------

def hard_core(a: float, dimension: int = 3) -> RadialPotential:
    return RadialPotential("hard_core", {"a": float(a)}, dimension, hard_core_radius=float(a))


def square_well(a: float, w: float, R: float, dimension: int = 3) -> RadialPotential:
    """``+inf`` for ``r <= a``, ``-w`` on ``(a, R]``, zero beyond."""
    if not 0 <= a <= R:
        raise DomainError("square well needs 0 <= a <= R")
    return RadialPotential("square_well", {"a": float(a), "w": float(w), "R": float(R)}, dimension,
                           hard_core_radius=float(a) if a > 0 else None)


def morse(rho: float, dimension: int = 3, depth: float = 1.0, r_eq: float = 1.0) -> RadialPotential:
    return RadialPotential("morse", {"rho": float(rho), "depth": float(depth), "r_eq": float(r_eq)},
                           dimension)


def lennard_jones(epsilon: float = 1.0, sigma: float = 1.0, dimension: int = 3,
                  envelope: Envelope | None = None) -> RadialPotential:
    return RadialPotential("lennard_jones_126", {"epsilon": float(epsilon), "sigma": float(sigma)},
                           dimension, envelope=envelope)


def mie(m: float, n: float, epsilon: float = 1.0, sigma: float = 1.0, dimension: int = 3,
        envelope: Envelope | None = None) -> RadialPotential:
    if not m > n > 0:
        raise DomainError("Mie exponents need m > n > 0")
    return RadialPotential("lj_type", {"m": float(m), "n": float(n), "epsilon": float(epsilon),
                                       "sigma": float(sigma)}, dimension, envelope=envelope)


def gaussian(amplitude: float = 1.0, width: float = 1.0, dimension: int = 3) -> RadialPotential:
    return RadialPotential("gaussian", {"amplitude": float(amplitude), "width": float(width)}, dimension)


def tabulated(grid: Sequence[float], values: Sequence[float], dimension: int = 3,
              hard_core_radius: float | None = None) -> RadialPotential:
    return RadialPotential("tabulated", {"grid": tuple(map(float, grid)),
                                         "values": tuple(map(float, values))},
                           dimension, hard_core_radius=hard_core_radius)


def tabulate(p: RadialPotential, r_min: float, r_max: float, n: int = 512) -> RadialPotential:
    """Sample ``p`` on a log-uniform grid; the core is kept as ``hard_core_radius``."""
    grid = np.geomspace(max(r_min, p.core * (1 + 1e-12)) if p.core else r_min, r_max, n)
    return tabulated(grid, p(grid), p.dimension, p.hard_core_radius)


def sum_of(*components: RadialPotential, dimension: int | None = None) -> RadialPotential:
    """Pointwise sum; the empty sum is the zero potential."""
    if dimension is None:
        dimension = components[0].dimension if components else 3
    cores = [c.hard_core_radius for c in components if c.hard_core_radius]
    return RadialPotential("sum", {}, dimension, hard_core_radius=max(cores) if cores else None,
                           components=tuple(components))


def zero_potential(dimension: int = 3) -> RadialPotential:
    return sum_of(dimension=dimension)


def truncated(p: RadialPotential, a: float, part: str = "plateau") -> RadialPotential:
    """``part="plateau"``: ``V_a`` (V beyond a, V(a) below). ``part="core"``: ``V - V_a``."""
    if part not in ("plateau", "core"):
        raise DomainError("part must be 'plateau' or 'core'")
    if a <= p.core:
        raise DomainError("truncation radius must lie outside the hard core")
    return RadialPotential("truncated", {"a": float(a), "part": part}, p.dimension, components=(p,))


def lennard_jones_envelope(p: RadialPotential) -> Envelope:
    """Envelope of a Mie/LJ potential: ``r1`` at the sign change, ``r2`` at the well bottom.

    ``xi = V`` on ``(0, r1]``, ``w`` is the well depth and ``eta = -V`` beyond ``r2``.
    """
    if p.kind == "lennard_jones_126":
        m, n, c = 12.0, 6.0, 4.0
    elif p.kind == "lj_type":
        m, n = p.params["m"], p.params["n"]
        c = (m / (m - n)) * (m / n) ** (n / (m - n))
    else:
        raise ClassificationError("lennard_jones_envelope needs an LJ or Mie potential")
    eps, sigma = p.params["epsilon"], p.params["sigma"]
    r1 = sigma
    r2 = (m / n) ** (1 / (m - n)) * sigma
    w = -float(p(r2))
    xi = PowerExpSum((("power", c * eps * sigma**m, m), ("power", -c * eps * sigma**n, n)))
    eta = PowerExpSum((("power", c * eps * sigma**n, n), ("power", -c * eps * sigma**m, m)))
    return Envelope(r1, r2, w, xi, eta)


# -- classification -----------------------------------------------------

def _repulsive(p: RadialPotential) -> bool:
    k = p.kind
    if k == "hard_core":
        return True
    if k == "square_well":
        return p.params["w"] <= 0
    if k == "gaussian":
        return p.params["amplitude"] >= 0
    if k == "tabulated":
        return bool((p._values >= 0).all())
    if k == "sum":
        return all(_repulsive(c) for c in p.components)
    return False


def classify(p: RadialPotential) -> frozenset[Label]:
    """Structural labels of ``p``; stability is never inferred here."""
    labels = set()
    if _repulsive(p):
        labels.add(Label.REPULSIVE)
    finite = p.is_finite_everywhere()
    if finite:
        labels.add(Label.BOUNDED)
    if p.core > 0:
        labels.add(Label.HARD_CORE)
    if p.kind in ("lennard_jones_126", "lj_type") or (
            p.envelope is not None and p.envelope.xi.blows_up_at_zero(p.dimension)):
        labels.add(Label.LJ_TYPE)
    if finite:
        R = max(p.breakpoints(), default=1.0) * 2.0
        m = p.tail_majorant(R)
        if m is not None and math.isfinite(m.tail_integral(R, p.dimension)):
            labels.add(Label.ABSOLUTELY_SUMMABLE_CANDIDATE)
    return frozenset(labels)


# -- algebraic pair interactions ----------------------------------------

class InteractionMatrix:
    """Symmetric ``n x n`` matrix of extended reals ``V_ij`` (diagonal unused, kept 0).

    Vertices are labelled ``0 .. n-1``.
    """

    __slots__ = ("_v",)

    def __init__(self, values):
        v = np.array(values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1] or v.shape[0] < 2:
            raise DomainError("interaction matrix must be square with n >= 2")
        np.fill_diagonal(v, 0.0)
        _check_extended_array(v)
        if not np.array_equal(v, v.T):
            raise DomainError("interaction matrix must be symmetric")
        v.setflags(write=False)
        self._v = v

    @classmethod
    def from_pairs(cls, n: int, pairs: Mapping[tuple[int, int], float], default: float = 0.0):
        v = np.full((n, n), float(default))
        for (i, j), x in pairs.items():
            v[i, j] = v[j, i] = x
        return cls(v)

    @property
    def n(self) -> int:
        return self._v.shape[0]

    @property
    def values(self) -> np.ndarray:
        return self._v

    def __getitem__(self, ij):
        return float(self._v[ij])

    def pair_vector(self) -> np.ndarray:
        """Entries ``V_ij`` for ``i < j`` in ``itertools.combinations`` order."""
        iu = np.triu_indices(self.n, 1)
        return self._v[iu]

    def compatible(self, i: int, j: int) -> bool:
        return bool(self._v[i, j] < math.inf)

    def is_bounded(self) -> bool:
        return bool(np.isfinite(self._v).all())

    def is_repulsive(self) -> bool:
        return bool((self._v >= 0).all())

    def regularized(self, H: float) -> InteractionMatrix:
        """Replace every ``+inf`` entry by the finite cap ``H``."""
        if not math.isfinite(H):
            raise DomainError("regularization cap must be finite")
        return InteractionMatrix(np.where(np.isinf(self._v), H, self._v))

    def scaled(self, c: float) -> InteractionMatrix:
        return InteractionMatrix(np.where(np.isinf(self._v), np.inf, c * self._v))

    def __add__(self, other: InteractionMatrix) -> InteractionMatrix:
        return InteractionMatrix(self._v + other._v)

    def __repr__(self):
        return f"InteractionMatrix(n={self.n})"


def interaction_matrix(p: RadialPotential, beta: float, points) -> InteractionMatrix:
    """``beta * V(|x_i - x_j|)`` for the given positions."""
    if not beta > 0:
        raise DomainError("beta must be positive")
    x = np.asarray(points, dtype=float)
    if x.ndim == 1 and p.dimension == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[1] != p.dimension:
        raise DomainError(f"points must be an (n, {p.dimension}) array")
    if len(x) < 2:
        raise DomainError("need at least two points")
    dist = np.sqrt(((x[:, None, :] - x[None, :, :]) ** 2).sum(-1))
    v = beta * p(dist)
    v = np.where(np.isinf(v), np.inf, v)
    return InteractionMatrix(v)


# -- Ruelle splits ------------------------------------------------------

@dataclass(frozen=True)
class RuelleSplit:
    """``V = phi1 + phi2`` with ``phi1 >= 0`` and ``phi2`` finite and stable."""

    phi1: RadialPotential
    phi2: RadialPotential
    stability_constant_phi2: float

    def __post_init__(self):
        if self.stability_constant_phi2 < 0:
            raise DomainError("stability constant must be nonnegative")
        top = max(self.phi1.breakpoints() + self.phi2.breakpoints() + [1.0]) * 8.0
        grid = np.concatenate([[0.0], np.geomspace(1e-6, top, 4000)])
        v1 = self.phi1(grid)
        if (v1 < 0).any():
            raise ClassificationError("phi1 must be nonnegative")
        if not np.isfinite(self.phi2(grid)).all() or not self.phi2.is_finite_everywhere():
            raise ClassificationError("phi2 must be finite everywhere")

    def to_dict(self) -> dict:
        return {"phi1": self.phi1.to_dict(), "phi2": self.phi2.to_dict(),
                "stability_constant_phi2": self.stability_constant_phi2}


# -- JSON ---------------------------------------------------------------

def potential_from_dict(data: Mapping) -> RadialPotential:
    """Build a potential from the JSON schema.

    ``{"kind", "params", "dimension", "hard_core_radius"?, "envelope"?, "components"?}``
    """
    try:
        kind = data["kind"]
        params = dict(data.get("params", {}))
        d = int(data.get("dimension", 3))
    except (KeyError, TypeError) as exc:
        raise DomainError(f"malformed potential document: {exc}") from exc
    env = data.get("envelope")
    envelope = Envelope.from_dict(env) if isinstance(env, Mapping) else None
    components = tuple(potential_from_dict(c) for c in data.get("components", []))
    hc = data.get("hard_core_radius")
    if kind == "hard_core":
        hc = params.get("a", hc)
        params.setdefault("a", hc)
    elif kind == "square_well":
        a = params.get("a", 0.0)
        hc = a if a > 0 else None
    elif kind == "tabulated":
        params["grid"] = tuple(params["grid"])
        params["values"] = tuple(params["values"])
    elif kind == "sum" and hc is None:
        cores = [c.hard_core_radius for c in components if c.hard_core_radius]
        hc = max(cores) if cores else None
    if env == "auto":
        envelope = lennard_jones_envelope(RadialPotential(kind, params, d))
    return RadialPotential(kind, params, d, None if hc is None else float(hc), envelope, components)


def ruelle_split_from_dict(data: Mapping) -> RuelleSplit:
    return RuelleSplit(potential_from_dict(data["phi1"]), potential_from_dict(data["phi2"]),
                       float(data["stability_constant_phi2"]))


def load_potential(path) -> tuple[RadialPotential, RuelleSplit | None]:
    """Read a potential document; returns the potential and its optional Ruelle split."""
    data = json.loads(Path(path).read_text())
    p = potential_from_dict(data)
    split = ruelle_split_from_dict(data["ruelle_split"]) if data.get("ruelle_split") else None
    return p, split
