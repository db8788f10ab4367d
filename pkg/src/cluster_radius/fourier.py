"""Radial Fourier transforms and radial convolutions in d = 1 and d = 3.

Convention: ``f^(p) = int f(|x|) exp(i p.x) dx``. For radial functions this is
``2 int_0^inf cos(p r) f(r) dr`` in d = 1 and
``4 pi int_0^inf r^2 sinc(p r) f(r) dr`` in d = 3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import DomainError

SUPPORTED_DIMENSIONS = (1, 3)
_PI_LD = np.longdouble("3.14159265358979323846264338327950288")


def _check_dimension(d: int) -> None:
    if d not in SUPPORTED_DIMENSIONS:
        raise DomainError(f"radial transforms are implemented for d in {SUPPORTED_DIMENSIONS}, got d={d}")


@dataclass(frozen=True)
class RadialGridFunction:
    """Samples of a radial function, linearly interpolated between grid points.

    Beyond the last radius the function is zero unless ``tail`` is given, in
    which case ``tail(r)`` is used there.
    """

    grid: np.ndarray
    values: np.ndarray
    dimension: int = 3
    tail: Callable | None = field(default=None, compare=False)

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if g.ndim != 1 or g.shape != v.shape or g.size < 2:
            raise DomainError("grid and values must be 1-d arrays of equal length >= 2")
        if (np.diff(g) <= 0).any():
            raise DomainError("grid must be strictly increasing")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)

    @classmethod
    def sample(cls, f: Callable, grid, dimension: int = 3, tail=None) -> RadialGridFunction:
        grid = np.asarray(grid, dtype=float)
        return cls(grid, np.asarray(f(grid), dtype=float), dimension, tail)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = np.interp(r, self.grid, self.values, right=0.0)
        if self.tail is not None:
            beyond = r > self.grid[-1]
            if np.any(beyond):
                out = np.where(beyond, self.tail(np.where(beyond, r, self.grid[-1])), out)
        return out if out.ndim else float(out)

    def min(self) -> float:
        return float(self.values.min())

    def max(self) -> float:
        return float(self.values.max())


@lru_cache(maxsize=None)
def gauss_legendre_extended(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre rule on [0, 1] in ``np.longdouble``, refined by Newton steps."""
    x = np.polynomial.legendre.leggauss(order)[0].astype(np.longdouble)

    def legendre(x):
        p0, p1 = np.ones_like(x), x.copy()
        for k in range(2, order + 1):
            p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
        return p1, order * (x * p1 - p0) / (x * x - 1)

    for _ in range(3):
        p, dp = legendre(x)
        x = x - p / dp
    _, dp = legendre(x)
    w = 2 / ((1 - x * x) * dp * dp)
    x, w = (x + 1) / 2, w / 2
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@lru_cache(maxsize=None)
def _gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    return (x + 1) / 2, w / 2


def _nodes(edges, order: int, extended: bool):
    edges = np.asarray(edges, dtype=np.longdouble if extended else float)
    x, w = gauss_legendre_extended(order) if extended else _gauss_legendre(order)
    a = edges[:-1, None]
    h = (edges[1:] - edges[:-1])[:, None]
    return (a + h * x).ravel(), (h * w).ravel()


def panel_edges(breaks, r_max: float, width: float) -> np.ndarray:
    """Panel ends covering ``[0, r_max]``: every break plus uniform subdivision to ``width``."""
    pts = sorted({0.0, float(r_max), *(float(b) for b in breaks if 0.0 < b < r_max)})
    edges = [pts[0]]
    for a, b in zip(pts[:-1], pts[1:]):
        k = max(1, math.ceil((b - a) / width))
        edges.extend(np.linspace(a, b, k + 1)[1:].tolist())
    return np.array(edges)


def kernel(p, r, d: int):
    """Radial transform kernel including the angular integration."""
    _check_dimension(d)
    if d == 1:
        return 2 * np.cos(p * r)
    pi = _PI_LD if np.asarray(r).dtype == np.longdouble else math.pi
    if p == 0:
        return 4 * pi * r * r
    return 4 * pi * r * np.sin(p * r) / p


@dataclass(frozen=True)
class FourierSamples:
    p: np.ndarray
    values: np.ndarray
    tail_bound: np.ndarray
    dimension: int

    def as_grid_function(self) -> RadialGridFunction:
        return RadialGridFunction(self.p, self.values, self.dimension)


def radial_fourier(f, p_grid, d: int | None = None, *, breaks=(), r_max: float | None = None,
                   order: int = 20, width: float | None = None, extended: bool = False,
                   tail: Callable[[float, float], float] | None = None) -> FourierSamples:
    """Transform of a radial function sampled at every ``p`` in ``p_grid``.

    ``f`` is a callable or a :class:`RadialGridFunction`. The radial integral
    runs over ``[0, r_max]`` on Gauss-Legendre panels no wider than a quarter
    period of the kernel. ``tail(p, r_max)`` may bound the neglected part;
    it is reported, not added. With ``extended=True`` nodes, kernel and sum
    are carried in ``np.longdouble``; the callable must accept such arrays
    for the extra precision to matter.
    """
    if isinstance(f, RadialGridFunction):
        d = f.dimension if d is None else d
        breaks = tuple(breaks) + tuple(f.grid)
        if r_max is None:
            r_max = float(f.grid[-1]) if f.tail is None else None
    if d is None:
        raise DomainError("dimension required")
    _check_dimension(d)
    if r_max is None or not r_max > 0:
        raise DomainError("r_max required for functions without a finite grid")
    p_grid = np.asarray(p_grid, dtype=float)
    p_top = float(p_grid.max()) if p_grid.size else 0.0
    h = width if width is not None else r_max / 16.0
    if p_top > 0:
        h = min(h, 0.5 * math.pi / p_top)
    r, w = _nodes(panel_edges(breaks, r_max, h), order, extended)
    wf = w * np.asarray(f(r))
    values = np.empty(p_grid.shape)
    tails = np.zeros(p_grid.shape)
    for k, p in enumerate(p_grid):
        pp = np.longdouble(p) if extended else p
        values[k] = float(np.sum(wf * kernel(pp, r, d)))
        if tail is not None:
            tails[k] = tail(p, r_max)
    return FourierSamples(p_grid, values, tails, d)


def radial_fourier_grid(f: RadialGridFunction, p_grid, **kw) -> RadialGridFunction:
    """Transform returned as a grid function in ``p``."""
    return radial_fourier(f, p_grid, **kw).as_grid_function()


# -- convolution with a compactly supported radial kernel ------------------

def _cumulative(k: Callable, rho: float, order: int, panels: int = 16):
    """``F(u) = int_0^min(u, rho) t k(t) dt`` on composite panels, vectorised over ``u``."""
    x, w = _gauss_legendre(order)
    edges = np.linspace(0.0, rho, panels + 1)
    h = edges[1] - edges[0]
    t = edges[:-1, None] + h * x
    full = np.concatenate([[0.0], np.cumsum(h * np.sum(w * t * k(t), axis=1))])

    def F(u):
        u = np.clip(np.asarray(u, dtype=float), 0.0, rho)
        j = np.minimum((u / h).astype(int), panels - 1)
        lo = edges[j]
        part = u - lo
        tt = lo[..., None] + part[..., None] * x
        return full[j] + part * np.sum(w * tt * k(tt), axis=-1)

    return F


def _edges(lo: float, hi: float, breaks, width: float) -> np.ndarray:
    pts = sorted({lo, hi, *(b for b in breaks if lo < b < hi)})
    out = [pts[0]]
    for a, b in zip(pts[:-1], pts[1:]):
        if b - a <= 1e-14 * max(1.0, abs(b)):
            continue
        m = max(1, math.ceil((b - a) / width))
        out.extend(np.linspace(a, b, m + 1)[1:].tolist())
    return np.array(out)


def convolve_compact(g: Callable, k: Callable, rho: float, r, d: int, *,
                     g_breaks=(), order: int = 24) -> np.ndarray:
    """``(k * g)(r)`` for radial ``k`` supported in the ball of radius ``rho``.

    d = 3 uses ``(2 pi / r) int s g(s) [F(r+s) - F(|r-s|)] ds`` with
    ``F(u) = int_0^u t k(t) dt`` (``k`` frozen beyond ``rho``); the
    ``s``-range is ``[max(0, r - rho), r + rho]``. d = 1 integrates
    ``k(t) [g(|r-t|) + g(r+t)]`` over ``[0, rho]``. Panels are at most
    ``rho / 8`` wide and split at every kink of the integrand.
    """
    _check_dimension(d)
    r = np.atleast_1d(np.asarray(r, dtype=float))
    x, w = _gauss_legendre(order)
    width = rho / 8.0
    out = np.empty(r.shape)
    if d == 1:
        for i, ri in enumerate(r):
            kinks = [ri, *(ri - b for b in g_breaks), *(b - ri for b in g_breaks)]
            edges = _edges(0.0, rho, kinks, width)
            h = np.diff(edges)[:, None]
            t = (edges[:-1, None] + h * x).ravel()
            wt = (h * w).ravel()
            out[i] = math.fsum(wt * k(t) * (g(np.abs(ri - t)) + g(ri + t)))
        return out
    F = _cumulative(k, rho, order)
    for i, ri in enumerate(r):
        if ri < 1e-7 * rho:
            edges = _edges(0.0, rho, g_breaks, width)
            h = np.diff(edges)[:, None]
            s = (edges[:-1, None] + h * x).ravel()
            out[i] = 4 * math.pi * math.fsum((h * w).ravel() * s * s * k(s) * g(s))
            continue
        lo, hi = max(0.0, ri - rho), ri + rho
        edges = _edges(lo, hi, (ri, rho - ri, ri - rho, *g_breaks), width)
        h = np.diff(edges)[:, None]
        s = (edges[:-1, None] + h * x).ravel()
        ws = (h * w).ravel()
        inner = F(ri + s) - F(np.abs(ri - s))
        out[i] = 2 * math.pi / ri * math.fsum(ws * s * g(s) * inner)
    return out


def ball_mass(k: Callable, rho: float, d: int, order: int = 64) -> float:
    """``int_{|x| <= rho} k(|x|) dx``."""
    _check_dimension(d)
    x, w = _gauss_legendre(order)
    t = rho * x
    if d == 1:
        return 2 * rho * math.fsum(w * k(t))
    return 4 * math.pi * rho * math.fsum(w * t * t * k(t))
