"""Constructive split of a Lennard-Jones type potential into a positive part
plus a stable, absolutely integrable part.

Outline, for a truncation radius ``a`` below the envelope radius ``r1``:

* ``V_a`` freezes ``V`` at ``V(a)`` inside ``a``.
* ``eta3 = psi_a * eta2`` is a smoothed, widened copy of the attractive
  envelope, so ``V_a >= -eta3``.
* ``xi1 = xi(a) chi3(r / a)`` is a compact bump below ``V_a`` whose transform
  is bounded below by ``C* a^d xi(a) / ((a p)^2 + 1)^d``.
* ``V_a = psi1 + psi2`` with ``psi1 = V_a + eta3 - xi1 >= 0`` and
  ``psi2 = xi1 - eta3`` positive definite once ``xi(a) a^d >= C``.

The returned split is ``phi1 = V - V_a`` (nonnegative, compact support) and
``phi2 = V_a``, whose stability constant is at most ``psi2(0) / 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ClassificationError, ConstructionError, DomainError
from .fourier import (RadialGridFunction, ball_mass, convolve_compact, radial_fourier)
from .potential import (Envelope, Label, PowerExpSum, RadialPotential, RuelleSplit, classify,
                        lennard_jones_envelope, truncated, zero_potential)
from .quad import sphere_volume, surface_area
from .stability import ruelle_criterion_upper_bound

BUMP = "exp(-1/(1-t^2)) for t<1, else 0"


def bump(t):
    """Smooth bump on the unit interval; exactly 0 for ``t >= 1``."""
    t = np.asarray(t, dtype=float)
    inside = np.abs(t) < 1.0
    safe = np.where(inside, t, 0.0)
    with np.errstate(over="ignore", divide="ignore"):
        out = np.where(inside, np.exp(-1.0 / (1.0 - safe * safe)), 0.0)
    return out


@dataclass(frozen=True)
class DecomposeOptions:
    n_candidates: int = 64
    a_min_fraction: float = 1e-3
    q_max: float = 200.0
    q_step: float = 0.5
    report_q_max: float = 60.0
    psi_cut: float = 2000.0
    eta_r_max: float = 60.0
    n_grid: int = 600
    fourier_tol: float = 1e-6
    grid_tol: float = 0.0
    dual_route_points: int = 6

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class BumpChain:
    """``chi -> chi1 = chi * chi -> chi2 = chi1 Psi -> chi3 = chi2 / K``, plus ``psi``.

    None of this depends on the potential; only the dimension matters.
    """

    d: int
    psi_cut: float
    q: np.ndarray = field(repr=False)
    psi_norm: float = 0.0
    K: float = 0.0
    psi_hat: np.ndarray = field(default=None, repr=False)
    chi3_hat: np.ndarray = field(default=None, repr=False)
    c_prime: float = 0.0
    c_star: float = 0.0
    c_prime_at: float = 0.0
    c_star_at: float = 0.0

    def chi(self, r):
        return bump(2.0 * np.asarray(r, dtype=float))

    def psi(self, r):
        return bump(r) / self.psi_norm

    def chi1(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros(r.shape)
        inside = r < 1.0
        if inside.any():
            out[inside] = convolve_compact(self.chi, self.chi, 0.5, r[inside], self.d)
        return out

    def Psi(self, r):
        """Transform of ``(q^2 + 1)^-d`` restricted to ``|q| <= psi_cut``.

        The cut keeps the weight nonnegative, so ``chi1 * Psi`` stays positive
        definite; it only changes the decay of its transform beyond the cut.
        """
        r = np.atleast_1d(np.asarray(r, dtype=float))
        return radial_fourier(lambda q: (q * q + 1.0) ** (-self.d), r, self.d,
                              r_max=self.psi_cut, width=1.0, order=24).values

    def chi2(self, r):
        r = np.atleast_1d(np.asarray(r, dtype=float))
        out = np.zeros(r.shape)
        inside = r < 1.0
        if inside.any():
            out[inside] = self.chi1(r[inside]) * self.Psi(r[inside])
        return out

    def chi3(self, r):
        return self.chi2(r) / self.K

    def parameters(self) -> dict:
        return {"chi": "bump(2r)", "bump": BUMP, "psi": "bump(r) / normalisation",
                "psi_normalisation": self.psi_norm, "Psi_cut": self.psi_cut,
                "K": self.K, "q_max": float(self.q[-1]), "n_q": int(self.q.size),
                "Cprime_attained_at_q": self.c_prime_at, "Cstar_attained_at_q": self.c_star_at}


def build_bump_chain(d: int, options: DecomposeOptions = DecomposeOptions()) -> BumpChain:
    if d not in (1, 3):
        raise DomainError("the construction is implemented for d in (1, 3)")
    q = np.arange(0.0, options.q_max + 0.5 * options.q_step, options.q_step)
    chain = BumpChain(d, options.psi_cut, q)
    chain.psi_norm = ball_mass(bump, 1.0, d)
    r = np.linspace(0.0, 1.0, 401)
    chain.K = float(np.max(chain.chi2(r)))
    weight = (1.0 + q * q) ** d
    chain.psi_hat = radial_fourier(chain.psi, q, d, r_max=1.0).values
    chain.chi3_hat = radial_fourier(chain.chi3, q, d, r_max=1.0, order=16).values
    psi_w = np.abs(chain.psi_hat) * weight
    chain.c_prime = float(np.max(psi_w))
    chain.c_prime_at = float(q[int(np.argmax(psi_w))])
    chain.c_star = float(np.min(chain.chi3_hat * weight))
    chain.c_star_at = float(q[int(np.argmin(chain.chi3_hat * weight))])
    if not chain.c_star > 0:
        raise ConstructionError("chi3 transform is not positive on the q-grid",
                                {"min_chi3_hat_weighted": chain.c_star})
    return chain


def truncate(p: RadialPotential, a: float) -> RadialPotential:
    """``V_a``: ``V`` beyond ``a`` and the constant ``V(a)`` inside."""
    if Label.LJ_TYPE not in classify(p):
        raise ClassificationError("truncate needs a Lennard-Jones type potential")
    r1 = _envelope(p).r1
    if not 0.0 < a < r1:
        raise DomainError(f"truncation radius must lie in (0, r1={r1})")
    return truncated(p, a, "plateau")


def _envelope(p: RadialPotential) -> Envelope:
    """The attached envelope, or the standard one for LJ and Mie potentials."""
    if p.envelope is not None:
        return p.envelope
    if p.kind in ("lennard_jones_126", "lj_type"):
        return lennard_jones_envelope(p)
    raise ClassificationError("potential has no envelope")


def eta2_function(env: Envelope, a: float):
    def eta2(r):
        r = np.asarray(r, dtype=float)
        return np.where(r <= a, env.w, env.eta1(np.maximum(r - a, 0.0)))
    return eta2


def build_eta3(p: RadialPotential, a: float, chain: BumpChain):
    """``(eta2, eta3)`` callables; ``eta3 = psi_a * eta2``."""
    env = _envelope(p)
    d = p.dimension

    def psi_a(t):
        return chain.psi(np.asarray(t) / a) / a**d

    eta2 = eta2_function(env, a)

    def deficit(r):
        return env.w - eta2(r)

    def eta3(r):
        # Near the plateau use w - psi_a * (w - eta2): exact wherever the
        # mollifier ball sees only the plateau, with no mass round-off.
        r = np.atleast_1d(np.asarray(r, dtype=float))
        out = np.empty(r.shape)
        near = r < env.r2 + 2 * a
        breaks = (a, env.r2 + a)
        if near.any():
            out[near] = env.w - convolve_compact(deficit, psi_a, a, r[near], d, g_breaks=breaks)
        if (~near).any():
            out[~near] = convolve_compact(eta2, psi_a, a, r[~near], d, g_breaks=breaks)
        return out

    return eta2, eta3, psi_a


def build_xi1(p: RadialPotential, a: float, chain: BumpChain):
    env = _envelope(p)
    xi_a, v_a = float(env.xi(a)), float(p(a))
    if xi_a > v_a + 1e-12 * abs(v_a):
        raise DomainError(f"envelope xi({a}) = {xi_a} exceeds V({a}) = {v_a}")
    # xi and V may be the same function written differently; drop round-off.
    xi_a = min(xi_a, v_a)

    def xi1(r):
        r = np.atleast_1d(np.asarray(r, dtype=float))
        return xi_a * chain.chi3(r / a)

    return xi1, xi_a


@dataclass
class DecompositionResult:
    a: float | None
    degenerate: bool
    grid: np.ndarray
    functions: dict[str, RadialGridFunction]
    constants: dict
    fourier_report: dict
    checks: dict
    split: RuelleSplit | None
    chi_parameters: dict
    options: dict

    @property
    def Va(self):
        return self.functions.get("Va")

    @property
    def phi1(self):
        return self.functions["phi1"]

    @property
    def phi2(self):
        return self.functions["phi2"]

    @property
    def stability_constant(self) -> float | None:
        return None if self.split is None else self.split.stability_constant_phi2

    def to_dict(self) -> dict:
        return {"a": self.a, "degenerate": self.degenerate, "constants": self.constants,
                "checks": self.checks, "fourier_report": {k: v for k, v in self.fourier_report.items()
                                                          if k not in ("p", "values", "tail_bound")},
                "stability_constant_phi2": self.stability_constant,
                "split": None if self.split is None else self.split.to_dict(),
                "chi_parameters": self.chi_parameters, "options": self.options}

    def r_table(self) -> tuple[list[str], list[list[float]]]:
        names = list(self.functions)
        rows = [[float(r)] + [float(self.functions[n].values[i]) for n in names]
                for i, r in enumerate(self.grid)]
        return ["r"] + names, rows

    def p_table(self) -> tuple[list[str], list[list[float]]]:
        rep = self.fourier_report
        if "p" not in rep:
            return ["p", "phi2_hat", "tail_bound"], []
        rows = [[float(a), float(b), float(c)] for a, b, c in zip(rep["p"], rep["values"], rep["tail_bound"])]
        return ["p", "phi2_hat", "tail_bound"], rows


def _grid(p: RadialPotential, a: float, env: Envelope, n: int) -> np.ndarray:
    top = max(8.0 * env.r2, 4.0)
    pts = np.concatenate([[0.0], np.geomspace(1e-4 * a, top, n),
                          [a, env.r1, env.r2, env.r2 + a, env.r2 + 2 * a, 0.5 * a]])
    return np.unique(pts)


def _degenerate(p: RadialPotential, options: DecomposeOptions, stability_constant) -> DecompositionResult:
    top = max(p.breakpoints() + [1.0]) * 8.0
    grid = np.unique(np.concatenate([[0.0], np.geomspace(1e-4, top, options.n_grid)]))
    zero = zero_potential(p.dimension)
    funcs = {"phi1": RadialGridFunction(grid, np.zeros(grid.size), p.dimension),
             "phi2": RadialGridFunction.sample(p, grid, p.dimension)}
    split = None
    if stability_constant is not None:
        split = RuelleSplit(zero, p, float(stability_constant))
    checks = {"phi1_nonnegative": True, "phi2_finite": bool(np.isfinite(funcs["phi2"].values).all())}
    note = ("potential is already finite: phi1 = 0, phi2 = V; its stability constant must be "
            "supplied, it is not certified here")
    return DecompositionResult(None, True, grid, funcs, {}, {"note": note}, checks, split, {},
                               options.to_dict())


def decompose(p: RadialPotential, options: DecomposeOptions = DecomposeOptions(), *,
              chain: BumpChain | None = None, stability_constant: float | None = None
              ) -> DecompositionResult:
    """Split ``p`` into ``phi1 >= 0`` plus a stable, integrable ``phi2``.

    Finite potentials are returned unchanged as ``phi2`` (``stability_constant``
    is then passed through). Lennard-Jones type potentials go through the
    bump construction; if no candidate ``a`` meets ``xi(a) a^d >= C`` a
    :class:`ConstructionError` carries the violated inequality.
    """
    labels = classify(p)
    if Label.BOUNDED in labels:
        return _degenerate(p, options, stability_constant)
    if Label.LJ_TYPE not in labels:
        raise ClassificationError("decompose needs a finite or Lennard-Jones type potential")
    env = _envelope(p)
    d = p.dimension
    if d not in (1, 3):
        raise DomainError("decompose is implemented for d in (1, 3)")
    chain = chain if chain is not None and chain.d == d else build_bump_chain(d, options)

    H = surface_area(d) * env.eta.tail_integral(env.r2, d)
    eta2_norm_bound = sphere_volume(d, env.r1 + env.r2) * env.w + H
    C = chain.c_prime / chain.c_star * eta2_norm_bound
    candidates = env.r1 * np.geomspace(options.a_min_fraction, 1.0, options.n_candidates, endpoint=False)
    lhs = np.array([float(env.xi(a)) * a**d for a in candidates])
    admissible = np.nonzero(lhs >= C)[0]
    constants = {"C": C, "Cprime": chain.c_prime, "Cstar": chain.c_star,
                 "Cdoubleprime": chain.c_star * chain.K, "K": chain.K, "H_tail": H,
                 "eta2_norm_bound": eta2_norm_bound, "w": env.w, "r1": env.r1, "r2": env.r2}
    if admissible.size == 0:
        best = int(np.argmax(lhs))
        raise ConstructionError(
            "no admissible truncation radius: xi(a) * a**d >= C fails on every candidate",
            {"violated": "xi(a) * a**d >= C", "C": C, "max_lhs": float(lhs[best]),
             "a_at_max": float(candidates[best]), "candidates": [float(candidates[0]), float(candidates[-1])],
             "constants": constants, "chi_parameters": chain.parameters()})
    # All candidates up to the largest admissible one work; prefer the mildest plateau.
    a = float(candidates[admissible[-1]])

    Va = truncate(p, a)
    eta2, eta3, psi_a = build_eta3(p, a, chain)
    xi1, xi_a = build_xi1(p, a, chain)
    grid = _grid(p, a, env, options.n_grid)
    with np.errstate(over="ignore", invalid="ignore"):
        V = np.asarray(p(grid), dtype=float)
    va, e1, e3, x1 = Va(grid), env.eta1(grid), eta3(grid), xi1(grid)
    psi1, psi2 = va + e3 - x1, x1 - e3
    phi1 = np.where(np.isinf(V), np.inf, V - va)
    scale = options.grid_tol * np.maximum.reduce([np.abs(va), np.abs(e3), np.abs(x1), np.ones_like(va)])
    mass = ball_mass(psi_a, a, d)

    # Transform of psi2: xi1^(p) = a^d xi(a) chi3^(a p), eta3^(p) = eta2^(p) psi^(a p).
    sel = chain.q <= options.report_q_max
    pgrid = chain.q[sel] / a
    psi_hat, chi3_hat = chain.psi_hat[sel], chain.chi3_hat[sel]
    eta_major = PowerExpSum(tuple(t for t in env.eta.terms if t[1] > 0))

    def tail(pp, R):
        # int_R r^(d-1) eta(r - a) dr <= (R / (R - a))^(d-1) int_{R-a} u^(d-1) eta(u) du
        return surface_area(d) * eta_major.tail_integral(R - a, d) * (R / (R - a)) ** (d - 1)

    eta2_hat = radial_fourier(eta2, pgrid, d, breaks=(a, env.r2 + a), r_max=options.eta_r_max,
                              tail=tail)
    eta3_hat = eta2_hat.values * psi_hat
    xi1_hat = a**d * xi_a * chi3_hat
    phi2_hat = xi1_hat - eta3_hat
    tail_b = eta2_hat.tail_bound * np.abs(psi_hat)
    lower = phi2_hat - tail_b
    top = float(np.max(np.abs(phi2_hat)))
    fourier_ok = bool(lower.min() >= -options.fourier_tol * top)

    # Second route for eta3^: transform the convolved function itself.
    ps = np.linspace(0.0, 5.0 / a, options.dual_route_points)
    direct = radial_fourier(eta3, ps, d, breaks=(a, 2 * a, env.r2, env.r2 + 2 * a),
                            r_max=options.eta_r_max, order=12).values
    via_product = (radial_fourier(eta2, ps, d, breaks=(a, env.r2 + a), r_max=options.eta_r_max).values
                   * radial_fourier(chain.psi, a * ps, d, r_max=1.0).values)
    dual_gap = float(np.max(np.abs(direct - via_product)) / max(np.max(np.abs(via_product)), 1e-300))

    psi2_zero = float(xi1(0.0)[0] - eta3(0.0)[0])
    btilde = ruelle_criterion_upper_bound(psi2_zero, lower, tol=options.fourier_tol)
    split = None
    if btilde is not None:
        split = RuelleSplit(truncated(p, a, "core"), Va, btilde)

    lo = grid <= env.r1
    checks = {
        "Va_ge_minus_eta3": bool((va + e3 >= -scale).all()),
        "eta3_ge_eta1": bool((e3 - e1 >= -scale).all()),
        "xi1_le_Va_inside_r1": bool((x1[lo] <= va[lo] + scale[lo]).all()),
        "xi1_zero_beyond_a": bool((x1[grid >= a] == 0.0).all()),
        "psi1_nonnegative": bool((psi1 >= -scale).all()),
        "phi1_nonnegative": bool((phi1 >= 0.0).all()),
        "phi2_finite": bool(np.isfinite(va).all()),
        "mollifier_mass": mass,
        "mollifier_mass_ok": abs(mass - 1.0) <= 1e-10,
        "fourier_nonnegative_sampled": fourier_ok,
        "eta3_dual_route_gap": dual_gap,
        "psi1_min": float(psi1.min()),
        "phi1_min": float(phi1.min()),
    }
    constants.update({"a": a, "xi_a": xi_a, "C1": chain.c_prime * (sphere_volume(d, env.r2 + a) * env.w + H),
                      "C2": chain.c_star * a**d * xi_a, "psi2_at_zero": psi2_zero,
                      "Btilde": btilde})
    report = {"kind": "sampled check on a finite p-grid, not a proof",
              "min": float(phi2_hat.min()), "min_lower": float(lower.min()), "max": top,
              "tolerance": options.fourier_tol, "passed": fourier_ok, "n_points": int(pgrid.size),
              "p_max": float(pgrid[-1]), "p": pgrid, "values": phi2_hat, "tail_bound": tail_b}
    funcs = {
        "Va": RadialGridFunction(grid, va, d),
        "eta1": RadialGridFunction(grid, e1, d),
        "eta3": RadialGridFunction(grid, e3, d),
        "xi1": RadialGridFunction(grid, x1, d),
        "psi1": RadialGridFunction(grid, psi1, d),
        "psi2": RadialGridFunction(grid, psi2, d),
        "phi1": RadialGridFunction(grid, phi1, d),
        "phi2": RadialGridFunction(grid, va, d),
    }
    return DecompositionResult(a, False, grid, funcs, constants, report, checks, split,
                               chain.parameters(), options.to_dict())
