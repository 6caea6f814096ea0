"""From a potential to spectral data and back."""

import numpy as np

from qpencil import assemble_spectral_data, invert, random_potential
from qpencil.inverse import extract_diagonals

rng = np.random.default_rng(7)
pot = random_potential(rng, 4, 0.2)
sd = assemble_spectral_data(pot, M=32, R=6.0, N=4)
print(f"{len(sd.eigenvalues)} eigenvalues, {len(sd.circles)} circles, {sd.axis_probes.shape[1]} axis probes")

diag = extract_diagonals(sd, 4)
print("v_nn^+ from the contours:", np.round(diag.vnn_plus[1:], 8))

rec, report = invert(sd)
print(f"beta: true {pot.beta:.8f}, recovered {rec.beta:.8f} ({report.beta_method})")
print("p error:", np.abs(rec.p[:4] - pot.p).max())
print("q error:", np.abs(rec.q[:4] - pot.q).max())
print("residuals:", report.residuals)
