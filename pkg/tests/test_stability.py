import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cluster_radius.errors import DomainError, EnumerationRangeError
from cluster_radius.potential import InteractionMatrix, gaussian, hard_core, interaction_matrix, morse, square_well
from cluster_radius.stability import (
    configuration_energy,
    configuration_lower_bound,
    finite_algebraic_b,
    ruelle_criterion_upper_bound,
    subset_energies,
    worst_subset,
)


def brute_b(V):
    n = V.n
    best = 0.0
    for k in range(2, n + 1):
        for X in itertools.combinations(range(n), k):
            e = sum(V[i, j] for i, j in itertools.combinations(X, 2))
            if math.isfinite(e):
                best = max(best, -e / k)
    return best


def sym(n, rng, lo=-1.0, hi=2.0, p_inf=0.0):
    m = np.triu(rng.uniform(lo, hi, (n, n)), 1)
    m[np.triu(rng.random((n, n)) < p_inf, 1)] = math.inf
    return InteractionMatrix(m + m.T)


class TestFiniteB:
    def test_repulsive(self):
        assert finite_algebraic_b(InteractionMatrix(np.ones((4, 4)))) == 0.0

    def test_all_minus_one(self):
        assert finite_algebraic_b(InteractionMatrix(-np.ones((3, 3)))) == pytest.approx(1.0)
        assert worst_subset(InteractionMatrix(-np.ones((3, 3)))) == (0, 1, 2)

    def test_pair(self):
        assert finite_algebraic_b(InteractionMatrix.from_pairs(2, {(0, 1): -2 * 0.7})) == pytest.approx(0.7)

    def test_incompatible_subsets_skipped(self):
        V = InteractionMatrix.from_pairs(3, {(0, 1): math.inf, (0, 2): -1.0, (1, 2): -1.0})
        assert finite_algebraic_b(V) == pytest.approx(0.5)

    def test_subset_energy_table(self):
        V = InteractionMatrix.from_pairs(3, {(0, 1): 1.0, (0, 2): 2.0, (1, 2): 4.0})
        assert subset_energies(V).tolist() == [0, 0, 0, 1, 0, 2, 4, 7]

    def test_range(self):
        with pytest.raises(EnumerationRangeError):
            finite_algebraic_b(InteractionMatrix(np.zeros((21, 21))))

    @given(st.integers(2, 8), st.integers(0, 10_000), st.floats(0, 0.4))
    def test_matches_brute_force(self, n, seed, p_inf):
        V = sym(n, np.random.default_rng(seed), p_inf=p_inf)
        assert finite_algebraic_b(V) == pytest.approx(brute_b(V), abs=1e-12)

    @given(st.integers(2, 7), st.integers(0, 10_000), st.floats(0.1, 10.0))
    def test_scaling(self, n, seed, c):
        V = sym(n, np.random.default_rng(seed))
        assert finite_algebraic_b(V.scaled(c)) == pytest.approx(c * finite_algebraic_b(V), rel=1e-12, abs=1e-12)

    @given(st.lists(st.tuples(*[st.floats(-4, 4)] * 3), min_size=2, max_size=9))
    def test_hard_core_configurations_give_zero(self, pts):
        V = interaction_matrix(hard_core(1.0), 1.0, pts)
        assert finite_algebraic_b(V) <= 1e-9


class TestConfigurationSearch:
    def test_hard_core_zero(self):
        est = configuration_lower_bound(hard_core(1.0), n_max=5, restarts=2)
        assert est.lower_bound == 0.0

    def test_square_well_pair(self):
        est = configuration_lower_bound(square_well(1.0, 1.0, 1.5), n_max=2, restarts=3)
        assert est.lower_bound >= 0.5

    def test_witness_energy(self):
        p = square_well(1.0, 1.0, 1.5)
        est = configuration_lower_bound(p, n_max=5, restarts=2)
        x = np.array(est.witness)
        assert -configuration_energy(p, x) / len(x) == pytest.approx(est.lower_bound, abs=1e-9)

    def test_monotone_in_search_effort(self):
        p = square_well(1.0, 1.0, 1.5)
        small = configuration_lower_bound(p, n_max=4, restarts=2, sweeps=60).lower_bound
        more_n = configuration_lower_bound(p, n_max=6, restarts=2, sweeps=60).lower_bound
        more_r = configuration_lower_bound(p, n_max=4, restarts=4, sweeps=60).lower_bound
        assert more_n >= small and more_r >= small

    def test_morse_below_literature_constant(self):
        est = configuration_lower_bound(morse(6.0), n_max=10, restarts=2, sweeps=100)
        assert 0 < est.lower_bound <= 38.65

    def test_seeded(self):
        a = configuration_lower_bound(morse(6.0), n_max=4, restarts=1, seed=3)
        b = configuration_lower_bound(morse(6.0), n_max=4, restarts=1, seed=3)
        assert a == b


class TestRuelleCriterion:
    def test_gaussian(self):
        from cluster_radius.fourier import radial_fourier

        g = gaussian(1.0, 1.0)
        ft = radial_fourier(g, np.linspace(0, 10, 81), 3, r_max=12.0)
        assert ruelle_criterion_upper_bound(float(g(0.0)), ft.values) == pytest.approx(0.5)

    def test_sign_change_refused(self):
        assert ruelle_criterion_upper_bound(1.0, [1.0, 0.5, -0.1]) is None

    def test_empty_grid(self):
        with pytest.raises(DomainError):
            ruelle_criterion_upper_bound(1.0, [])
