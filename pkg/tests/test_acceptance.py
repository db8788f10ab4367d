"""Acceptance criteria 1 to 11, each at its stated tolerance.

Every test records a PASS or FAIL line; the lines are repeated in the
terminal summary under "acceptance criteria".
"""

import math
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

import fixtures as fx
from acceptance_log import criterion
from cluster_radius.bounds import (
    brydges_federbush_radius,
    coefficient_bound,
    compare_report,
    penrose_potential_radius,
    penrose_ruelle_radius,
    ruelle_potential_radius,
)
from cluster_radius.cli import run
from cluster_radius.combinat import LabeledTree, enumerate_compatible_sequences, enumerate_trees, pruefer_decode
from cluster_radius.fourier import radial_fourier
from cluster_radius.mayer import Box, mayer_coefficient, tonks_oracle
from cluster_radius.potential import InteractionMatrix, hard_core, morse, square_well
from cluster_radius.quad import QuadratureSpec, c_beta, c_star_beta, c_tilde_beta, v_l1
from cluster_radius.stability import configuration_lower_bound
from cluster_radius.tgi import (
    lemma_posit_check,
    lhs_connected_graph_sum,
    rhs_tree_sum,
    tree_inequality_penrose,
    tree_inequality_ruelle,
)

POTENTIALS = Path(__file__).resolve().parents[1] / "potentials"


def rng_for(*key):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(list(key))))


def sym(n, rng, lo, hi, p_inf=0.0):
    m = np.zeros((n, n))
    iu = np.triu_indices(n, 1)
    m[iu] = rng.uniform(lo, hi, size=len(iu[0]))
    if p_inf:
        m[iu] = np.where(rng.random(len(iu[0])) < p_inf, math.inf, m[iu])
    return InteractionMatrix(m + m.T)


def test_criterion_01_tree_graph_identity():
    with criterion(1, "tree-graph identity, 200 matrices per n in {2,3,4}") as c:
        start = time.perf_counter()
        worst = 0.0
        for n in (2, 3, 4):
            for trial in range(200):
                V = sym(n, rng_for(1, n, trial), -1.0, 2.0)
                lhs, rhs = lhs_connected_graph_sum(V), rhs_tree_sum(V)
                err = abs(lhs - rhs)
                worst = max(worst, err / max(1e-8, 1e-6 * abs(lhs)))
                assert err <= max(1e-8, 1e-6 * abs(lhs)), (n, trial, lhs, rhs)
        elapsed = time.perf_counter() - start
        c["detail"] = f"worst err/tol={worst:.2e} time={elapsed:.1f}s"
        assert elapsed < 60.0


def test_criterion_02_measure_normalisation():
    with criterion(2, "compatible-sequence measure sums to 1 exactly, n <= 6") as c:
        count = 0
        for n in range(2, 7):
            for t in enumerate_trees(n):
                total = sum((Fraction(1, math.prod(s.cross_counts)) for s in enumerate_compatible_sequences(t)),
                            Fraction(0))
                assert total == 1, (n, t.edges, total)
                count += 1
        c["detail"] = f"{count} trees checked"


def test_criterion_03_tree_positivity_lemma():
    with criterion(3, "tree positivity lemma, 100 seeded trees, n <= 5") as c:
        worst = 0.0
        for trial in range(100):
            n = 2 + trial % 4
            rng = rng_for(3, trial)
            seq = tuple(int(x) for x in rng.integers(0, n, size=n - 2))
            edges = pruefer_decode(seq, n)
            tree = LabeledTree(n, edges, seq)
            V = sym(n, rng, -1.0, 2.0)
            lhs, rhs = lemma_posit_check(tree, V)
            worst = max(worst, abs(lhs - rhs))
            assert abs(lhs - rhs) <= 1e-8, (trial, lhs, rhs)
        c["detail"] = f"max |lhs-rhs|={worst:.2e}"


def test_criterion_04_tree_inequalities():
    with criterion(4, "tree inequalities, 500 instances each, n <= 5") as c:
        margin_pen, margin_ru = math.inf, math.inf
        for trial in range(500):
            n = 2 + trial % 4
            rng = rng_for(4, 0, trial)
            V = sym(n, rng, -1.0, 2.0, p_inf=0.25)
            lhs, rhs = tree_inequality_penrose(V)
            assert lhs <= rhs, ("penrose", trial, lhs, rhs)
            margin_pen = min(margin_pen, (rhs - lhs) / rhs)
        for trial in range(500):
            n = 2 + trial % 4
            rng = rng_for(4, 1, trial)
            phi1 = sym(n, rng, 0.0, 3.0, p_inf=0.2)
            phi2 = sym(n, rng, -1.0, 1.0)
            lhs, rhs = tree_inequality_ruelle(phi1, phi2)
            assert lhs <= rhs, ("ruelle", trial, lhs, rhs)
            margin_ru = min(margin_ru, (rhs - lhs) / rhs)
        c["detail"] = f"violations=0, min relative margin penrose={margin_pen:.3g} ruelle={margin_ru:.3g}"


def test_criterion_05_tonks_exact1d():
    with criterion(5, "hard rods a=1, L=64, Exact1D vs (-n)^(n-1)/n!") as c:
        start = time.perf_counter()
        parts = []
        for n in (2, 3, 4):
            want = (-n) ** (n - 1) / math.factorial(n)
            assert want == float(fx.TONKS_COEFFICIENTS[n]) == tonks_oracle(1.0, n)
            got = mayer_coefficient(hard_core(1.0, 1), 1.0, Box(1, 64.0), n, method="exact1d").value
            parts.append(f"n={n}:{got:.12g}")
            assert abs(got - want) <= 1e-4 * abs(want), (n, got, want)
        elapsed = time.perf_counter() - start
        c["detail"] = " ".join(parts) + f" time={elapsed:.1f}s"
        assert elapsed < 120.0


def _tonks_bound_rows():
    # with B = 0 the Penrose coefficient bound is the rational n^(n-2) C*^(n-1) / n!
    assert c_star_beta(hard_core(1.0, 1), 1.0) == pytest.approx(2.0, rel=1e-14)
    inputs = {"beta": 1.0, "B": 0.0, "c_star": 2.0}
    rows = []
    for n in (2, 3, 4):
        exact = Fraction(n ** (n - 2) * 2 ** (n - 1), math.factorial(n))
        library = coefficient_bound("penrose", n, inputs)
        assert library == pytest.approx(float(exact), rel=1e-14)
        truth = abs(fx.TONKS_COEFFICIENTS[n])
        assert float(truth) == pytest.approx(abs(tonks_oracle(1.0, n)), rel=1e-15)
        rows.append((n, truth, exact))
    return rows


@pytest.mark.xfail(strict=True, reason="at n = 2 the bound equals |C_2| = 1 exactly, so the strict "
                                       "inequality cannot hold; see the decisions ledger")
def test_criterion_06_bounds_dominate_tonks():
    with criterion(6, "Penrose coefficient bound (B=0, C*=2) strictly above Tonks |C_n|") as c:
        rows = _tonks_bound_rows()
        c["detail"] = " ".join(f"n={n}:|C|={t} bound={b}" for n, t, b in rows) + " (exact rationals)"
        for n, truth, bound in rows:
            assert truth < bound, f"n={n}: {truth} is not < {bound}"


def test_criterion_06_companion_non_strict():
    # The weak inequality holds for every n and the strict one for n = 3, 4.
    for n, truth, bound in _tonks_bound_rows():
        assert truth <= bound
        assert (truth < bound) == (n > 2)


def _morse_numbers():
    spec = QuadratureSpec(rel_tol=1e-8)
    p = morse(6.0, 3)
    B = fx.MORSE_LITERATURE["stability_constant"]["value"]
    C = c_beta(p, 1.0, spec)
    norm = v_l1(p, spec)
    pr = penrose_ruelle_radius(B, C, 1.0)
    bf = brydges_federbush_radius(B, norm, 1.0)
    return B, C, norm, pr, bf


@pytest.mark.xfail(strict=True, reason="computed C(1) for Morse rho=6 is far below the literature lower "
                                       "bound 4*pi*182; see the decisions ledger")
def test_criterion_07_morse_worked_example():
    with criterion(7, "Morse rho=6 worked comparison") as c:
        B, C, norm, pr, bf = _morse_numbers()
        log_ratio = pr.log - bf.log
        claim = math.log(fx.MORSE_LITERATURE["ratio_prefactor"]["value"]) - B
        c["detail"] = (f"C(1)/4pi={C / (4 * math.pi):.5g} (need >=182), ||V||/4pi={norm / (4 * math.pi):.5g} "
                       f"(need <=204), log(PR/BF)+B={log_ratio + B:.4g} (need <={math.log(1.13):.4g})")
        assert all(math.isfinite(x) for x in (pr.log, bf.log, log_ratio))
        assert norm <= fx.MORSE_LITERATURE["v_l1_upper"]["value"]
        assert C >= fx.MORSE_LITERATURE["c_beta_lower"]["value"]
        assert log_ratio <= claim


def test_criterion_07_companion_literature_inputs_arithmetic():
    # Only the arithmetic with the published inputs; it does not make criterion 7 pass.
    lit = fx.MORSE_LITERATURE
    B = lit["stability_constant"]["value"]
    pr = penrose_ruelle_radius(B, lit["c_beta_lower"]["value"], 1.0)
    bf = brydges_federbush_radius(B, lit["v_l1_upper"]["value"], 1.0)
    assert pr.log - bf.log == pytest.approx(math.log(204 / 182) - B, rel=1e-14)
    assert pr.log - bf.log <= math.log(lit["ratio_prefactor"]["value"]) - B
    assert bf.log - pr.log >= lit["improvement_log"]["value"]
    # the computed inputs still give no overflow in log space
    _, C, norm, pr_c, bf_c = _morse_numbers()
    assert math.isfinite(pr_c.log) and math.isfinite(bf_c.log) and bf_c.value > 0


def test_criterion_08_penrose_improvement():
    with criterion(8, "square well: C* < C and Penrose radius > PR at beta 0.1, 0.5, 1") as c:
        p = square_well(1.0, 1.0, 2.0, 3)
        B = configuration_lower_bound(p, n_max=8, restarts=2, seed=0).lower_bound
        assert B > 0
        parts = [f"B={B:.4g}"]
        for beta in (0.1, 0.5, 1.0):
            C, Cs = c_beta(p, beta), c_star_beta(p, beta)
            pen, pr = penrose_potential_radius(B, Cs, beta), penrose_ruelle_radius(B, C, beta)
            assert Cs < C and pen.log > pr.log and pen.value > pr.value
            assert compare_report(p, beta, B=B).best == "penrose"
            parts.append(f"beta={beta}:log(pen/PR)={pen.log - pr.log:.4g}")
        c["detail"] = " ".join(parts)


def test_criterion_09_lj_decomposition(lj_decomposition):
    with criterion(9, "LJ 12-6 decomposition properties") as c:
        res = lj_decomposition
        f = res.functions
        assert res.a is not None and not res.degenerate
        assert (f["phi1"].values >= 0.0).all()
        assert (f["psi1"].values >= 0.0).all()
        mass = res.checks["mollifier_mass"]
        assert abs(mass - 1.0) <= 1e-10
        rep = res.fourier_report
        assert rep["min"] >= -1e-6 * rep["max"] and rep["min_lower"] >= -1e-6 * rep["max"]
        split = res.split
        assert split is not None
        rad = ruelle_potential_radius(split.stability_constant_phi2, c_tilde_beta(split, 1.0), 1.0)
        assert math.isfinite(rad.log) and rad.value >= 0.0
        c["detail"] = (f"a={res.a:.4g} |mass-1|={abs(mass - 1):.1e} min/max transform={rep['min'] / rep['max']:.2e} "
                       f"log radius={rad.log:.4g}")


def test_criterion_10_radial_fourier():
    with criterion(10, "Gaussian self-transform d=3 and indicator d=1") as c:
        p = np.linspace(0.0, 8.0, 161)
        g = radial_fourier(lambda r: np.exp(-r * r / 2), p, 3, r_max=14.0, order=24, extended=True).values
        rel = float(np.max(np.abs(g / ((2 * math.pi) ** 1.5 * np.exp(-p * p / 2)) - 1)))
        assert rel <= 1e-6
        q = np.linspace(0.0, 40.0, 401)
        h = radial_fourier(lambda r: np.where(r <= 1.0, 1.0, 0.0), q, 1, r_max=1.0, order=20).values
        err = float(np.max(np.abs(h - 2 * np.sinc(q / math.pi))))
        assert err <= 1e-8
        c["detail"] = f"gaussian rel={rel:.2e} indicator abs={err:.2e}"


CLI_RUNS = {
    "bounds": ["bounds", "--potential", str(POTENTIALS / "morse6.json"), "--beta-sweep", "0.5:2:4",
               "--format", "csv"],
    "verify-tgi": ["verify-tgi", "--n", "4", "--trials", "30", "--seed", "7"],
    "mayer": ["mayer", "--potential", str(POTENTIALS / "hardsphere.json"), "--n", "3",
              "--method", "montecarlo", "--trials", "300000", "--seed", "5"],
    "stability": ["stability", "--potential", str(POTENTIALS / "square_well.json"), "--n", "6",
                  "--trials", "3", "--seed", "2"],
    "decompose": ["decompose", "--potential", str(POTENTIALS / "lj126.json"), "--format", "json"],
    "integrals": ["integrals", "--potential", str(POTENTIALS / "square_well.json"), "--beta-sweep",
                  "0.1:1:3"],
}


def _cli_bytes(directory, monkeypatch, argv):
    directory.mkdir(parents=True)
    monkeypatch.chdir(directory)
    assert run(argv + ["--out", "result.out"]) == 0
    return b"".join(p.read_bytes() for p in sorted(directory.iterdir()))


def test_criterion_11_cli_determinism(tmp_path, monkeypatch):
    with criterion(11, "byte-identical CLI output across worker counts") as c:
        for name, argv in CLI_RUNS.items():
            monkeypatch.delenv("CLUSTER_RADIUS_WORKERS", raising=False)
            one = _cli_bytes(tmp_path / name / "w1", monkeypatch, argv + ["--workers", "1"])
            four = _cli_bytes(tmp_path / name / "w4", monkeypatch, argv + ["--workers", "4"])
            monkeypatch.setenv("CLUSTER_RADIUS_WORKERS", "2")
            env = _cli_bytes(tmp_path / name / "env", monkeypatch, argv + ["--workers", "1"])
            assert one == four == env, name
        c["detail"] = f"{len(CLI_RUNS)} subcommands x workers 1, 4 and env=2"
