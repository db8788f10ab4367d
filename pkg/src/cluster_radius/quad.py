"""Radial quadrature for the integral constants entering the radius bounds.

Every integral is reduced to a one-dimensional radial integral
``surface(d) * int_0^inf r**(d-1) h(r) dr``. The finite part is integrated
with adaptively refined Gauss-Legendre panels whose boundaries include every
kink of the potential; infinite tails are integrated on geometric panels
until a closed-form majorant certifies the remainder, which is then added.
"""

from __future__ import annotations

import heapq
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.special import gammaln

from .errors import ClassificationError, DomainError, SummabilityError, TemperednessError
from .potential import Label, RadialPotential, RuelleSplit, classify


class UnverifiedTailWarning(UserWarning):
    """The integral was truncated without a certified tail bound."""


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    tail_cut: float | None = None
    panel_order: int = 16
    max_panels: int = 20000

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("tolerances must be positive")
        if self.panel_order < 2:
            raise DomainError("panel_order must be at least 2")
        if self.tail_cut is not None and not self.tail_cut > 0:
            raise DomainError("tail_cut must be positive")

    def refined(self, factor: float = 0.5) -> QuadratureSpec:
        return QuadratureSpec(self.rel_tol * factor, self.abs_tol * factor, self.tail_cut,
                              self.panel_order, self.max_panels * 2)


DEFAULT_SPEC = QuadratureSpec()


@dataclass(frozen=True)
class RadialIntegral:
    value: float
    error: float
    tail_bound: float
    tail_verified: bool
    cut: float


@dataclass(frozen=True)
class IntegralConstants:
    c_beta: float
    c_star_beta: float | None
    c_tilde_beta: float | None
    v_l1: float | None
    sphere_volume: float
    tail_verified: bool = True

    def to_dict(self) -> dict:
        return {"c_beta": self.c_beta, "c_star_beta": self.c_star_beta,
                "c_tilde_beta": self.c_tilde_beta, "v_l1": self.v_l1,
                "sphere_volume": self.sphere_volume, "tail_verified": self.tail_verified}


@lru_cache(maxsize=None)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    return (x + 1.0) / 2.0, w / 2.0


def sphere_volume(d: int, a: float) -> float:
    """Volume of the d-ball of radius ``a``."""
    if d < 1:
        raise DomainError("dimension must be >= 1")
    if a == 0:
        return 0.0
    return math.exp(d / 2 * math.log(math.pi) + d * math.log(a) - gammaln(d / 2 + 1))


def surface_area(d: int) -> float:
    """Area of the unit sphere in R^d (2 for d = 1)."""
    return math.exp(math.log(2.0) + d / 2 * math.log(math.pi) - gammaln(d / 2))


def _panel(f, a, b, order):
    x, w = gauss_legendre(order)
    h = b - a
    return h * float(np.dot(w, f(a + h * x)))


def integrate(f: Callable[[np.ndarray], np.ndarray], breaks, spec: QuadratureSpec = DEFAULT_SPEC):
    """Adaptive composite Gauss-Legendre integral over consecutive ``breaks``.

    Panels are bisected in order of decreasing error estimate (the
    difference between a panel and its two halves) until the total
    estimate drops below ``max(abs_tol, rel_tol * |value|)``. Returns
    ``(value, error_estimate)``; the final sum runs in panel order.
    """
    breaks = sorted(set(float(b) for b in breaks))
    q = spec.panel_order
    heap = []
    done = {}
    state = {"total": 0.0, "err": 0.0}

    def push(a, b):
        whole = _panel(f, a, b, q)
        m = 0.5 * (a + b)
        left, right = _panel(f, a, m, q), _panel(f, m, b, q)
        err = abs(left + right - whole)
        state["total"] += left + right
        state["err"] += err
        heapq.heappush(heap, (-err, a, b, left + right))

    for a, b in zip(breaks[:-1], breaks[1:]):
        if b > a:
            push(a, b)
    count = len(heap)
    while heap:
        if state["err"] <= max(spec.abs_tol, spec.rel_tol * abs(state["total"])) or count >= spec.max_panels:
            break
        neg_err, a, b, val = heapq.heappop(heap)
        state["total"] -= val
        state["err"] += neg_err
        m = 0.5 * (a + b)
        if not a < m < b:
            done[a] = (val, -neg_err)
            continue
        push(a, m)
        push(m, b)
        count += 2
    for neg_err, a, b, val in heap:
        done[a] = (val, -neg_err)
    keys = sorted(done)
    value = math.fsum(done[k][0] for k in keys)
    error = math.fsum(done[k][1] for k in keys)
    return value, error


def radial_integral(h: Callable[[np.ndarray], np.ndarray], d: int, breaks, *,
                    spec: QuadratureSpec = DEFAULT_SPEC, start: float = 0.0,
                    support: float | None = None,
                    tail_bound: Callable[[float], float] | None = None) -> RadialIntegral:
    """``surface(d) * int_start^inf r**(d-1) h(r) dr``.

    ``support``: h vanishes beyond it. ``tail_bound(R)``: a certified upper
    bound on ``int_R^inf r**(d-1) |h(r)| dr`` (may be ``inf`` where not yet
    valid). Without either, the integral stops at the cut and the result is
    flagged unverified.
    """
    def g(r):
        return r ** (d - 1) * h(r)

    pts = [x for x in breaks if x > start]
    base = max(pts + [start, 1.0])
    cut = spec.tail_cut if spec.tail_cut is not None else 2.0 * base
    if support is not None:
        cut = support
    grid = [start] + [x for x in pts if x < cut] + [cut]
    value, error = integrate(g, grid, spec)
    surf = surface_area(d)
    if support is not None:
        return RadialIntegral(surf * value, surf * error, 0.0, True, cut)
    if tail_bound is None:
        return RadialIntegral(surf * value, surf * error, math.inf, False, cut)
    R = cut
    bound = tail_bound(R)
    # Geometric panels until the certified remainder is negligible.
    while bound > 0.1 * max(spec.abs_tol, spec.rel_tol * abs(value)) and R < 1e12:
        v, e = integrate(g, [R, 2.0 * R], spec)
        value += v
        error += e
        R *= 2.0
        bound = tail_bound(R)
    if not math.isfinite(bound):
        raise TemperednessError("tail majorant is not integrable")
    return RadialIntegral(surf * (value + bound), surf * (error + bound), surf * bound, True, R)


# -- the integral constants ---------------------------------------------

def _majorant_tail(p: RadialPotential, scale: float = 1.0, exp_weight: float = 0.0):
    """Tail bound ``R -> scale * e^{exp_weight * m(R)} * int_R r^(d-1) m``, m majorising |V|."""
    d = p.dimension
    probe = max(p.breakpoints() + [1.0]) * 2.0
    m = p.tail_majorant(probe)
    if m is None:
        return None
    if not math.isfinite(m.tail_integral(probe, d)):
        raise TemperednessError(f"{p.kind} tail is not integrable in d={d}")

    def bound(R):
        mR = p.tail_majorant(R)
        if mR is None:
            return math.inf
        tail = mR.tail_integral(R, d)
        top = float(mR(R)) if mR.terms else 0.0
        return scale * math.exp(exp_weight * top) * tail

    return bound


def _check_beta(beta):
    if not beta > 0:
        raise DomainError("beta must be positive")


def _warn_unverified(res: RadialIntegral, what: str):
    if not res.tail_verified:
        warnings.warn(f"{what}: tail truncated at r={res.cut} without a certified bound",
                      UnverifiedTailWarning, stacklevel=3)


def c_beta_integral(p: RadialPotential, beta: float, spec: QuadratureSpec = DEFAULT_SPEC) -> RadialIntegral:
    _check_beta(beta)

    def h(r):
        with np.errstate(over="ignore", invalid="ignore"):
            return np.abs(np.expm1(-beta * p(r)))

    return radial_integral(h, p.dimension, p.breakpoints(), spec=spec, support=p.support_radius(),
                           tail_bound=_majorant_tail(p, beta, beta))


def c_beta(p: RadialPotential, beta: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """``int |exp(-beta V(|x|)) - 1| dx`` over R^d."""
    res = c_beta_integral(p, beta, spec)
    _warn_unverified(res, "c_beta")
    return res.value


def c_star_beta(p: RadialPotential, beta: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Core volume plus ``beta * int_{|x| >= a} |V|`` for a Penrose potential."""
    _check_beta(beta)
    if not p.is_penrose():
        raise ClassificationError("c_star_beta needs a Penrose potential (hard core, finite nonpositive tail)")
    a = p.core
    res = radial_integral(lambda r: np.abs(p(r)), p.dimension, p.breakpoints(), spec=spec, start=a,
                          support=p.support_radius(), tail_bound=_majorant_tail(p))
    _warn_unverified(res, "c_star_beta")
    return sphere_volume(p.dimension, a) + beta * res.value


def c_tilde_beta(split: RuelleSplit, beta: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """``int [|exp(-beta phi1) - 1| + beta |phi2|] dx``."""
    _check_beta(beta)
    phi1, phi2 = split.phi1, split.phi2
    d = phi1.dimension
    if Label.BOUNDED not in classify(phi2):
        raise SummabilityError("phi2 must be finite everywhere")
    t1 = _majorant_tail(phi1, beta)
    t2 = _majorant_tail(phi2, beta)
    s1, s2 = phi1.support_radius(), phi2.support_radius()

    def tail(R):
        b1 = 0.0 if (s1 is not None and R >= s1) else (t1(R) if t1 else math.inf)
        b2 = 0.0 if (s2 is not None and R >= s2) else (t2(R) if t2 else math.inf)
        return b1 + b2

    support = max(s1, s2) if s1 is not None and s2 is not None else None

    def h(r):
        with np.errstate(over="ignore", invalid="ignore"):
            return np.abs(np.expm1(-beta * phi1(r))) + beta * np.abs(phi2(r))

    res = radial_integral(h, d, phi1.breakpoints() + phi2.breakpoints(), spec=spec,
                          support=support, tail_bound=tail)
    if not math.isfinite(res.value):
        raise SummabilityError("phi2 is not absolutely integrable")
    _warn_unverified(res, "c_tilde_beta")
    return res.value


def v_l1(p: RadialPotential, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """``int |V(|x|)| dx`` for a potential that is finite everywhere."""
    if p.core > 0 or not p.is_finite_everywhere():
        raise SummabilityError("V must be finite everywhere to be absolutely summable")
    res = radial_integral(lambda r: np.abs(p(r)), p.dimension, p.breakpoints(), spec=spec,
                          support=p.support_radius(), tail_bound=_majorant_tail(p))
    _warn_unverified(res, "v_l1")
    return res.value


def integral_constants(p: RadialPotential, beta: float, spec: QuadratureSpec = DEFAULT_SPEC,
                       split: RuelleSplit | None = None) -> IntegralConstants:
    """All constants applicable to ``p`` (absent ones are None)."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", UnverifiedTailWarning)
        cb = c_beta(p, beta, spec)
        cs = c_star_beta(p, beta, spec) if p.is_penrose() else None
        ct = c_tilde_beta(split, beta, spec) if split is not None else None
        vl = v_l1(p, spec) if Label.ABSOLUTELY_SUMMABLE_CANDIDATE in classify(p) else None
    verified = not any(issubclass(w.category, UnverifiedTailWarning) for w in caught)
    for w in caught:
        if not issubclass(w.category, UnverifiedTailWarning):
            warnings.warn_explicit(w.message, w.category, w.filename, w.lineno)
    return IntegralConstants(cb, cs, ct, vl, sphere_volume(p.dimension, p.core), verified)
