"""Frozen reference values.

DERIVED entries were produced by the routines in ``oracles.py`` (run once,
pasted here) and are re-derived by ``test_oracles.py`` so drift is caught.
LITERATURE entries are the published Morse comparison inputs; they are kept
here and nowhere in the library.
"""

from fractions import Fraction
import math

# DERIVED: brute-force subset scan with DFS connectivity.
CONNECTED_GRAPH_COUNTS = {2: 1, 3: 4, 4: 38, 5: 728, 6: 26704}

# DERIVED: sympy series reversion of lambda = x exp(a x), coefficient / a^(n-1).
TONKS_COEFFICIENTS = {1: Fraction(1), 2: Fraction(-1), 3: Fraction(3, 2),
                      4: Fraction(-8, 3), 5: Fraction(125, 24)}

# DERIVED: B3 = 5/8 B2^2 for hard spheres, b3 = (4 B2^2 - B3) / 2.
HARD_SPHERE_B3 = 7.402203300817018

# DERIVED: closed forms for the square well a=1, w=1, R=2 in d=3 at beta=1.
SQUARE_WELL_C_BETA = 4 * math.pi / 3 + (math.e - 1) * (4 * math.pi / 3) * 7
SQUARE_WELL_C_STAR = 4 * math.pi / 3 + (4 * math.pi / 3) * 7

# LITERATURE: Morse comparison at beta = 1, rho = 6, d = 3.
MORSE_LITERATURE = {
    "stability_constant": {"value": 38.65, "role": "upper bound on B for rho = 6, quoted from prior work"},
    "c_beta_lower": {"value": 4 * math.pi * 182, "role": "claimed lower bound on C(1)"},
    "v_l1_upper": {"value": 4 * math.pi * 204, "role": "claimed upper bound on ||V||_1"},
    "ratio_prefactor": {"value": 1.13, "role": "claimed PR/BF ratio is below this times exp(-B)"},
    "improvement_log": {"value": 38.0, "role": "claimed BF/PR ratio is at least exp(38)"},
}
