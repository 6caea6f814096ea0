"""Connection coefficients and the eigenvalues of a PT-like potential.

q(x) = 3i exp(ix) with beta = 1.5 has one eigenvalue in the first quadrant.
It is located with the argument principle and then used to read off beta.
"""

import numpy as np

from qpencil import validate_potential
from qpencil.solutions import FundamentalSystem
from qpencil.spectral import connection_coefficients, find_eigenvalues, spectral_singularities

pot = validate_potential(1.5, [], [3j])
sy = FundamentalSystem.build(pot, 32)

cc = connection_coefficients(sy, 1 + 1j)
print(f"C11 = {cc.c11:.6f}, C12 = {cc.c12:.6f}, C22 = {cc.c22:.6f}")

for k in range(4):
    zs = find_eigenvalues(sy, 6.0, k)
    print(f"sector {k}: {len(zs)} eigenvalue(s)", np.round(zs[:4], 6))

lam = find_eigenvalues(sy, 6.0, 0)[0]
c_plus = connection_coefficients(sy, lam).c11
c_minus = connection_coefficients(sy, -lam).c11
print("i C11(lam) C11(-lam) =", 1j * c_plus * c_minus, "(beta = 1.5)")

strong = [s for s in spectral_singularities(sy, 3) if not s.removable]
for s in strong:
    print(f"singularity at {s.location:.4f} ({s.family}): strength {s.strength:.4f}")
