"""Series solutions checked against direct integration of the equation."""

import numpy as np

from qpencil import oracle, random_potential
from qpencil.solutions import FundamentalSystem, SolutionKind, wronskian

rng = np.random.default_rng(2)
pot = random_potential(rng, 3, 0.2)
print(f"beta = {pot.beta:.4f}, N = {pot.N}")
sy = FundamentalSystem.build(pot, 32)

lam = 0.7 + 0.3j
for kind in SolutionKind:
    rep = oracle.verify_solution(pot, kind, lam, system=sy)
    print(f"{kind.value:9s} ode {rep.ode_residual:.1e}  integration {rep.propagation_mismatch:.1e}  "
          f"period {rep.quasi_periodicity_defect:.1e}")

s = {k: sy.evaluate(k, lam, 1.0) for k in SolutionKind}
print("W[f1+, f1-] / (2 i lam) =", wronskian(s[SolutionKind.f1_plus], s[SolutionKind.f1_minus]) / (2j * lam))
print("W[f2+, f2-] / (2 lam beta) =",
      wronskian(s[SolutionKind.f2_plus], s[SolutionKind.f2_minus]) / (2 * lam * pot.beta))

rep = oracle.verify_connection(pot, lam, system=sy)
print(f"extension across x = 0: {rep.positive_defect:.1e} (x > 0), {rep.negative_defect:.1e} (x < 0)")
