"""Coefficient tables of the series solutions for a one-harmonic potential.

Builds both sign tables for q(x) = exp(ix), prints the first columns and the
recurrence residuals, then shows the convergence diagnostic on a potential
that is too large.
"""

import warnings

import numpy as np

from qpencil import build_vtable, recurrence_residuals, validate_potential
from qpencil.errors import DivergenceSuspected

pot = validate_potential(1.0, [], [1.0])
for sign in "+-":
    vt = build_vtable(pot, 16, sign)
    print(f"sign {sign}: v_a = {np.round(vt.single[1:4].real, 6)}")
    for a in range(1, 4):
        print(f"  column {a}: {np.round(vt.double[1:a + 1, a].real, 6)}")
    print(f"  largest recurrence residual {max(recurrence_residuals(vt, pot)):.2e}")

# a p-term makes the two tables differ
pot = validate_potential(1.3, [0.2], [0.1, 0.05j])
vp, vm = build_vtable(pot, 32, "+"), build_vtable(pot, 32, "-")
print("v_11 for + and -:", vp.double[1, 1], vm.double[1, 1])
print("last column magnitude:", vp.tail)

with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always", DivergenceSuspected)
    big = build_vtable(validate_potential(1.0, [5.0], [5.0]), 32, "+")
print("large potential flagged:", big.diverging, "-", caught[0].message if caught else "")
