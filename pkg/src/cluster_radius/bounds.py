"""Lower bounds on the convergence radius of the Mayer series, and the matching
bounds on |C_n|.

Every radius has the shape ``1 / (exp(k beta B + 1) * I)`` for an exponent
multiplier ``k`` and an integral constant ``I``. They are evaluated in log
space and returned as :class:`Radius` pairs, so stability constants of a few
dozen (or a few billion) do not overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

from .errors import ClassificationError, DomainError
from .potential import Label, RadialPotential, RuelleSplit, classify
from .quad import DEFAULT_SPEC, QuadratureSpec, c_beta, c_star_beta, c_tilde_beta, v_l1

THEOREMS = ("penrose_ruelle", "brydges_federbush", "penrose", "ruelle")
MAX_BOUND_ORDER = 8


@dataclass(frozen=True)
class Radius:
    log: float
    value: float

    @classmethod
    def from_log(cls, log: float) -> Radius:
        return cls(log, math.exp(log) if log > -745.0 else 0.0)

    def to_dict(self) -> dict:
        return {"log": self.log, "value": self.value}


def _check(name: str, x: float, *, positive: bool = False) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x}")
    if positive and not x > 0:
        raise DomainError(f"{name} must be positive, got {x}")
    if not positive and x < 0:
        raise DomainError(f"{name} must be nonnegative, got {x}")
    return x


def _radius(k: float, B: float, integral: float, beta: float, name: str) -> Radius:
    B = _check("stability constant", B)
    beta = _check("beta", beta, positive=True)
    integral = _check(name, integral, positive=True)
    return Radius.from_log(-(k * beta * B + 1.0) - math.log(integral))


def penrose_ruelle_radius(B: float, c_beta_value: float, beta: float) -> Radius:
    """``1 / (e^{2 beta B + 1} C(beta))``."""
    return _radius(2.0, B, c_beta_value, beta, "C(beta)")


def brydges_federbush_radius(B: float, v_l1_value: float, beta: float) -> Radius:
    """``1 / (e^{beta B + 1} beta ||V||)``."""
    beta = _check("beta", beta, positive=True)
    return _radius(1.0, B, beta * _check("||V||", v_l1_value, positive=True), beta, "beta ||V||")


def penrose_potential_radius(B: float, c_star_value: float, beta: float) -> Radius:
    """``1 / (e^{beta B + 1} C*(beta))``."""
    return _radius(1.0, B, c_star_value, beta, "C*(beta)")


def ruelle_potential_radius(Btilde: float, c_tilde_value: float, beta: float) -> Radius:
    """``1 / (e^{beta B~ + 1} C~(beta))``."""
    return _radius(1.0, Btilde, c_tilde_value, beta, "C~(beta)")


# (exponent multiplier, exponent uses n-1 or n, stability key, integral key, integral scales with beta)
_COEFF = {
    "penrose_ruelle": (2.0, -1, "B", "c_beta", False),
    "brydges_federbush": (1.0, -1, "B", "v_l1", True),
    "penrose": (1.0, 0, "B", "c_star", False),
    "ruelle": (1.0, 0, "Btilde", "c_tilde", False),
}


def _log_factorial(n: int) -> float:
    # exact integer factorial keeps e.g. the n = 2 bound free of lgamma rounding
    return math.log(math.factorial(n)) if n <= 170 else math.lgamma(n + 1)


def log_coefficient_bound(theorem: str, n: int, inputs: dict) -> float:
    if theorem not in _COEFF:
        raise DomainError(f"unknown theorem {theorem!r}; choose from {THEOREMS}")
    if n < 1:
        raise DomainError("order n must be >= 1")
    k, shift, bkey, ikey, times_beta = _COEFF[theorem]
    missing = [key for key in ("beta", bkey, ikey) if inputs.get(key) is None]
    if missing:
        raise ClassificationError(f"theorem {theorem} needs inputs {missing}")
    beta = _check("beta", inputs["beta"], positive=True)
    B = _check(bkey, inputs[bkey])
    integral = _check(ikey, inputs[ikey], positive=True) * (beta if times_beta else 1.0)
    return (k * beta * B * (n + shift) + (n - 2) * math.log(n) + (n - 1) * math.log(integral)
            - _log_factorial(n))


def coefficient_bound(theorem: str, n: int, inputs: dict) -> float:
    """Upper bound on ``|C_n|`` from one of the four theorems.

    ``inputs`` holds ``beta`` and, by theorem: ``B`` and ``c_beta``
    (penrose_ruelle), ``B`` and ``v_l1`` (brydges_federbush), ``B`` and
    ``c_star`` (penrose), ``Btilde`` and ``c_tilde`` (ruelle).
    """
    log = log_coefficient_bound(theorem, n, inputs)
    return math.exp(log) if log < 709.0 else math.inf


_RADIUS_FN = {
    "penrose_ruelle": (penrose_ruelle_radius, "B", "c_beta"),
    "brydges_federbush": (brydges_federbush_radius, "B", "v_l1"),
    "penrose": (penrose_potential_radius, "B", "c_star"),
    "ruelle": (ruelle_potential_radius, "Btilde", "c_tilde"),
}


@dataclass
class BoundReport:
    potential_id: str
    beta: float
    inputs: dict
    radii: dict[str, Radius]
    coefficient_bounds: dict[str, list[float]] = field(default_factory=dict)
    log_coefficient_bounds: dict[str, list[float]] = field(default_factory=dict)
    log_ratios: dict[str, float] = field(default_factory=dict)
    best: str | None = None
    notes: list[str] = field(default_factory=list)

    def recompute(self) -> dict[str, Radius]:
        """Radii rebuilt from the stored inputs alone."""
        out = {}
        for name in self.radii:
            fn, bkey, ikey = _RADIUS_FN[name]
            out[name] = fn(self.inputs[bkey], self.inputs[ikey], self.beta)
        return out

    def consistent(self) -> bool:
        again = self.recompute()
        return all(again[k] == v for k, v in self.radii.items())

    def to_dict(self) -> dict:
        return {"potential_id": self.potential_id, "beta": self.beta, "inputs": self.inputs,
                "radii": {k: v.to_dict() for k, v in self.radii.items()},
                "coefficient_bounds": self.coefficient_bounds,
                "log_coefficient_bounds": self.log_coefficient_bounds, "log_ratios": self.log_ratios,
                "best": self.best, "notes": self.notes}


def report_from_inputs(potential_id: str, beta: float, inputs: dict, notes=(), *,
                       allow_empty: bool = False) -> BoundReport:
    """Every radius whose inputs are present, plus coefficient bounds and pairwise ratios."""
    inputs = {"beta": beta, **inputs}
    radii = {}
    for name, (fn, bkey, ikey) in _RADIUS_FN.items():
        if inputs.get(bkey) is not None and inputs.get(ikey) is not None:
            radii[name] = fn(inputs[bkey], inputs[ikey], beta)
    if not radii and not allow_empty:
        raise DomainError("no radius is computable from the given inputs")
    orders = range(1, MAX_BOUND_ORDER + 1)
    logs = {name: [log_coefficient_bound(name, n, inputs) for n in orders] for name in radii}
    coeffs = {name: [math.exp(x) if x < 709.0 else math.inf for x in v] for name, v in logs.items()}
    ratios = {f"{a}/{b}": radii[a].log - radii[b].log for a, b in combinations(radii, 2)}
    best = max(radii, key=lambda k: radii[k].log) if radii else None
    return BoundReport(potential_id, beta, inputs, radii, coeffs, logs, ratios, best, list(notes))


def compare_report(p: RadialPotential, beta: float, *, split: RuelleSplit | None = None,
                   B: float | None = None, potential_id: str | None = None,
                   spec: QuadratureSpec = DEFAULT_SPEC) -> BoundReport:
    """Integral constants for ``p`` at ``beta`` and every applicable radius.

    ``B`` is the stability constant of ``p``; purely repulsive potentials
    default to ``B = 0``. For Lennard-Jones type inputs no single bound is
    declared universally best; ``best`` only names the largest radius here.
    """
    labels = classify(p)
    notes = []
    if B is None and Label.REPULSIVE in labels:
        B = 0.0
        notes.append("B = 0 for a purely repulsive potential")
    inputs: dict = {"B": B}
    inputs["c_beta"] = c_beta(p, beta, spec)
    if p.is_penrose() or (p.kind == "hard_core"):
        inputs["c_star"] = c_star_beta(p, beta, spec)
    if Label.BOUNDED in labels and Label.ABSOLUTELY_SUMMABLE_CANDIDATE in labels:
        inputs["v_l1"] = v_l1(p, spec)
    if split is not None:
        inputs["Btilde"] = split.stability_constant_phi2
        inputs["c_tilde"] = c_tilde_beta(split, beta, spec)
    if B is None:
        notes.append("no stability constant supplied: B-dependent radii omitted")
    if Label.LJ_TYPE in labels:
        notes.append("comparison for Lennard-Jones type potentials is model dependent")
    return report_from_inputs(potential_id or p.kind, beta, inputs, notes, allow_empty=True)
