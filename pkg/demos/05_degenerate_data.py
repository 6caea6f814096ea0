"""Why the zero potential cannot be recovered: every diagonal vanishes."""

from qpencil import assemble_spectral_data, invert, validate_potential
from qpencil.errors import GenericityFailure
from qpencil.inverse import extract_diagonals

sd = assemble_spectral_data(validate_potential(1.0, [], []), M=16, R=4.0, N=2)
diag = extract_diagonals(sd, 2)
print("largest |v_nn|:", max(abs(diag.vnn_plus).max(), abs(diag.vnn_minus).max()))
try:
    invert(sd)
except GenericityFailure as exc:
    print(f"inversion stopped in step '{exc.step}': {exc}")
