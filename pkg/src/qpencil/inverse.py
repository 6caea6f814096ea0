"""Recovery of ``(p, q, beta)`` from spectral data.

The procedure only reads the stored samples of :class:`SpectralData`; it never
touches forward tables.

1. Diagonals.  ``C11/C12`` has a simple pole at ``n/2`` and ``C12/C11`` one at
   ``-n/2``; with residues taken by the trapezoid rule on the stored circles,

       v_nn^- = 2 Res_{n/2} C11/C12,     v_nn^+ = -2 Res_{-n/2} C12/C11.

2. Tables.  The residue function of one sign is proportional to the solution of
   the other sign at the pole, which reads coefficientwise

       v_{m a}^+- = v_mm^+- (v_{a-m}^-+ + sum_{n=1}^{a-m} v_{n,a-m}^-+ / (n + m)),

   for ``m < a``.  Column ``a`` of both tables therefore follows from columns
   below ``a``; the single-index entries and the coefficients of order ``a`` are
   then fixed by the recurrences (see :func:`qpencil.recurrence.solve_column`).
3. Coefficients come from :func:`qpencil.recurrence.invert_recurrences`.
4. ``beta = i C11(lam) C11(-lam)`` at an eigenvalue in the first quadrant when
   that product is real and positive.  Otherwise the poles of ``C11`` on the
   negative imaginary axis, which sit at ``-i n/(2 beta)``, are fitted from the
   axis probes and ``beta`` follows from their spacing.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import (
    GenericityFailure,
    IllConditionedRatio,
    MissingCircle,
    NoBetaSource,
    NonPhysicalBeta,
    PencilError,
)
from .potential import validate_potential
from .recurrence import VTable, invert_recurrences, recurrence_residuals, solve_column

GENERICITY_TOL = 1e-10
RATIO_TOL = 1e-10
BETA_REALNESS = 1e-6
SCAN_WINDOW = 6
SCAN_AXIS_TOL = 1e-4
SCAN_SIGNIFICANCE = 0.05
SCAN_LATTICE_TOL = 0.05


@dataclass(frozen=True)
class DiagonalSet:
    """``v_nn^+`` and ``v_nn^-`` for ``n = 1..n_max`` (stored 1-based)."""

    n_max: int
    vnn_plus: np.ndarray
    vnn_minus: np.ndarray

    def genericity_warnings(self, tol=GENERICITY_TOL):
        out = []
        for sign, d in (("+", self.vnn_plus), ("-", self.vnn_minus)):
            for n in range(1, self.n_max + 1):
                if abs(d[n]) <= tol:
                    out.append({"index": n, "sign": sign, "value": float(abs(d[n]))})
        return out


def _residue(circle, numerator, denominator, what):
    if np.abs(denominator).min() < RATIO_TOL:
        raise IllConditionedRatio(
            f"{what} nearly vanishes on the circle around {circle.center:.6g}"
        )
    g = numerator / denominator
    return complex(np.mean(g * (circle.lam - circle.center)))


def extract_diagonal(sd, n):
    """``(v_nn^+, v_nn^-)`` from the circles around ``-n/2`` and ``+n/2``."""
    right = sd.circle_at(complex(n / 2))
    left = sd.circle_at(complex(-n / 2))
    if right is None or left is None:
        raise MissingCircle(f"spectral data lack the circles around +-{n}/2")
    vnn_minus = 2.0 * _residue(right, right.c11, right.c12, "C12")
    vnn_plus = -2.0 * _residue(left, left.c12, left.c11, "C11")
    return vnn_plus, vnn_minus


def extract_diagonals(sd, N):
    plus = np.zeros(N + 1, dtype=complex)
    minus = np.zeros(N + 1, dtype=complex)
    for n in range(1, N + 1):
        plus[n], minus[n] = extract_diagonal(sd, n)
    return DiagonalSet(N, plus, minus)


def reconstruct_tables(diag, N, tol=GENERICITY_TOL):
    """Both tables through column ``N`` from the diagonals alone.

    Returns ``(vplus, vminus)`` including single-index entries.

    Raises
    ------
    GenericityFailure
        If some ``|v_nn^+-| <= tol`` for ``n <= N``.
    """
    if N > diag.n_max:
        raise MissingCircle(f"diagonals known through {diag.n_max}, {N} requested")
    for n in range(1, N + 1):
        for sign, d in (("+", diag.vnn_plus), ("-", diag.vnn_minus)):
            if abs(d[n]) <= tol:
                raise GenericityFailure(n, d[n], sign)
    V = {"+": np.zeros((N + 1, N + 1), dtype=complex), "-": np.zeros((N + 1, N + 1), dtype=complex)}
    v = {"+": np.zeros(N + 1, dtype=complex), "-": np.zeros(N + 1, dtype=complex)}
    dd = {"+": diag.vnn_plus, "-": diag.vnn_minus}
    P = np.zeros(N + 1, dtype=complex)
    Q = np.zeros(N + 1, dtype=complex)
    for a in range(1, N + 1):
        for sign, other in (("+", "-"), ("-", "+")):
            for m in range(1, a):
                b = a - m
                n = np.arange(1, b + 1)
                V[sign][m, a] = dd[sign][m] * (v[other][b] + np.sum(V[other][1:b + 1, b] / (n + m)))
            V[sign][a, a] = dd[sign][a]
        P[a], Q[a], v["+"][a], v["-"][a] = solve_column(a, v["+"], v["-"], V["+"], V["-"], P, Q)
    return VTable("+", N, v["+"], V["+"]), VTable("-", N, v["-"], V["-"])


def recover_potential(vplus, vminus, N):
    """``(p, q)`` of orders ``1..N`` from reconstructed tables."""
    return invert_recurrences(vplus, vminus, N)


@dataclass(frozen=True)
class BetaEstimate:
    beta: float
    method: str
    detail: dict = field(default_factory=dict)


def _beta_from_eigenvalues(sd):
    tried = []
    cands = sorted((e for e in sd.eigenvalues if e[0] == 0), key=lambda e: abs(e[1]))
    for _, lam, c_plus, c_minus in cands:
        prod = 1j * c_plus * c_minus
        tried.append(prod)
        if abs(prod.imag) <= BETA_REALNESS * abs(prod) and prod.real > 0:
            return BetaEstimate(float(prod.real), "eigenvalue", {"lambda": lam, "product": prod}), tried
    return None, tried


def _fit_pole(lam, c):
    """Fit ``c = (C + B lam + D lam^2) / (lam - pole)`` on a probe window.

    The model is linear in ``(pole, C, B, D)`` after multiplying through.
    Returns the pole, its residue and the relative fit residual.
    """
    X = np.column_stack([c, np.ones_like(lam), lam, lam * lam])
    coef, *_ = np.linalg.lstsq(X, c * lam, rcond=None)
    pole = complex(coef[0])
    residue = complex(coef[1] + coef[2] * pole + coef[3] * pole * pole)
    resid = float(np.abs(X @ coef - c * lam).max() / np.abs(c * lam).max())
    return pole, residue, resid


def axis_poles(probes, window=SCAN_WINDOW):
    """Poles of ``C11`` on the negative imaginary axis seen by the probes.

    Every local maximum of ``|C11|`` is fitted with a simple-pole model; a fit
    is kept when the pole lies on the axis inside the window and its residue
    stands out against the background.  Returns ``(t, residue, fit_residual)``
    rows with the pole at ``-i t``, sorted by ``t``.
    """
    lam = np.asarray(probes[0], dtype=complex)
    c11 = np.asarray(probes[1], dtype=complex)
    order = np.argsort(-lam.imag)
    lam, c11 = lam[order], c11[order]
    t = -lam.imag
    mag = np.abs(c11)
    K = len(t)
    h = window // 2
    found = []
    for j in range(1, K - 1):
        if not (mag[j] >= mag[j - 1] and mag[j] >= mag[j + 1]):
            continue
        lo, hi = max(0, j - h), min(K, j + h)
        if hi - lo < 5:
            continue
        pole, residue, resid = _fit_pole(lam[lo:hi], c11[lo:hi])
        tstar = -pole.imag
        if not (t[lo] <= tstar <= t[hi - 1]) or abs(pole.real) > SCAN_AXIS_TOL * tstar:
            continue
        background = np.median(mag[max(0, j - 3 * h):min(K, j + 3 * h + 1)])
        if abs(residue) < SCAN_SIGNIFICANCE * background * np.abs(lam[lo:hi] - pole).min():
            continue
        if found and abs(found[-1][0] - tstar) <= 1e-9 * tstar:
            continue
        found.append((tstar, residue, resid))
    return found


def lattice_spacing(ts, max_harmonic=8, tol=SCAN_LATTICE_TOL):
    """Largest ``d`` with every ``t / d`` within ``tol`` of an integer.

    Candidates are ``min(ts) / k`` for ``k = 1..max_harmonic``.  Returns the
    spacing and the integer multiple assigned to each (sorted) ``t``.
    """
    ts = np.sort(np.asarray(ts, dtype=float))
    for k in range(1, max_harmonic + 1):
        d = ts[0] / k
        n = np.rint(ts / d)
        if np.all(np.abs(ts / d - n) <= tol):
            return float(d), n.astype(int)
    return None, None


def _beta_from_probes(probes):
    poles = axis_poles(probes)
    if not poles:
        return None, {}
    ts = [row[0] for row in poles]
    d, n = lattice_spacing(ts)
    if d is None:
        return None, {"axis_poles": ts}
    # the best-resolved pole fixes the scale, the lattice only its harmonic
    best = int(np.argmin([row[2] for row in poles]))
    beta = n[best] / (2.0 * ts[best])
    return float(beta), {"axis_poles": ts, "harmonics": [int(k) for k in n], "used": best}


def recover_beta(sd):
    """Real positive ``beta`` and the method used.

    Raises
    ------
    NoBetaSource
        No eigenvalue / axis data at all.
    NonPhysicalBeta
        Every available source gave a complex or nonpositive value.
    """
    has_eig = any(e[0] == 0 for e in sd.eigenvalues)
    has_probes = sd.axis_probes is not None and sd.axis_probes.shape[1] > 0
    if not has_eig and not has_probes:
        raise NoBetaSource("no first-quadrant eigenvalue and no axis probes in the spectral data")
    est, tried = _beta_from_eigenvalues(sd)
    if est is not None:
        return est
    if has_probes:
        beta, detail = _beta_from_probes(sd.axis_probes)
        if beta is not None and beta > 0 and math.isfinite(beta):
            detail["eigenvalue_products"] = tried
            return BetaEstimate(beta, "pole_scan", detail)
    raise NonPhysicalBeta(
        "no source gave a real positive beta"
        + (f" (eigenvalue products {tried})" if tried else "")
    )


@dataclass
class RecoveryReport:
    residuals: dict
    beta_method: str
    genericity_warnings: list
    beta_detail: dict = field(default_factory=dict)

    def to_dict(self):
        def clean(v):
            if isinstance(v, complex):
                return [v.real, v.imag]
            if isinstance(v, (list, tuple)):
                return [clean(x) for x in v]
            if isinstance(v, np.generic):
                return v.item()
            return v

        return {
            "residuals": {k: clean(v) for k, v in self.residuals.items()},
            "beta_method": self.beta_method,
            "beta_detail": {k: clean(v) for k, v in self.beta_detail.items()},
            "genericity_warnings": self.genericity_warnings,
        }


def _step(name, fn, *args):
    try:
        return fn(*args)
    except PencilError as exc:
        exc.step = name
        raise


def invert(sd, N=None):
    """Spectral data -> ``(FourierPotential, RecoveryReport)``.

    Errors raised by any step carry a ``step`` attribute naming it.
    """
    N = sd.order if N is None else N
    if N < 1:
        raise ValueError("inverse order must be at least 1")
    diag = _step("diagonals", extract_diagonals, sd, N)
    warnings_ = diag.genericity_warnings()
    vplus, vminus = _step("tables", reconstruct_tables, diag, N)
    p, q = _step("potential", recover_potential, vplus, vminus, N)
    beta = _step("beta", recover_beta, sd)
    pot = validate_potential(beta.beta, p, q)
    res = {}
    for vt in (vplus, vminus):
        r = recurrence_residuals(vt, pot)
        res[f"recurrence_{vt.sign}"] = max(r)
    res["min_diagonal"] = float(min(np.abs(diag.vnn_plus[1:]).min(), np.abs(diag.vnn_minus[1:]).min()))
    report = RecoveryReport(res, beta.method, warnings_, beta.detail)
    return pot, report


__all__ = [
    "BetaEstimate",
    "DiagonalSet",
    "RecoveryReport",
    "extract_diagonal",
    "extract_diagonals",
    "invert",
    "recover_beta",
    "recover_potential",
    "reconstruct_tables",
]
