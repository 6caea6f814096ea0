"""Coefficient tables of the series solutions and their inversion.

For a sign ``s = +1`` (``'+'``) or ``s = -1`` (``'-'``) the tables hold the
single-index numbers ``v_a`` and the triangular double-index numbers
``v_{n a}`` (``1 <= n <= a``) defined column by column through

    (I)   a v_a + s * sum_{t<a} v_t p_{a-t} + s * p_a = 0
    (II)  a (a - n) v_{n a} + sum_{t=n}^{a-1} (q_{a-t} - s n p_{a-t}) v_{n t} = 0
    (III) a^2 v_a + a sum_{n<=a} v_{n a}
              + sum_{t<a} (q_{a-t} v_t + s p_{a-t} sum_{n<=t} v_{n t}) + q_a = 0

(I) gives ``v_a``, (II) the off-diagonal entries and (III) the diagonal.
With these, ``exp(s*i*lam*x) * (1 + sum_a c_a exp(i a x))`` and
``c_a = v_a + sum_n v_{n a} / (n + 2 s lam)`` solves the pencil on ``x >= 0``.
Note the ``+ s`` in front of the p-sum of (III).
"""

from dataclasses import dataclass
import warnings

import numpy as np

from ._jsonio import cpair, parse_complex
from .errors import ConsistencyMismatch, DivergenceSuspected, IncompleteTable

DIVERGENCE_FACTOR = 1e6
TAIL_TOLERANCE = 1e-6
DIVERGENCE_WINDOW = 5


def _sign_value(sign):
    if sign in ("+", "plus", 1, +1):
        return "+", 1
    if sign in ("-", "minus", -1):
        return "-", -1
    raise ValueError(f"sign must be '+' or '-', got {sign!r}")


@dataclass(frozen=True)
class VTable:
    """Coefficient table for one sign, stored 1-based.

    ``single[a]`` is ``v_a`` and ``double[n, a]`` is ``v_{n a}``; row and
    column 0 are unused and entries with ``n > a`` are zero.  ``single`` may
    be ``None`` for tables that only carry the double-index entries.
    """

    sign: str
    M: int
    single: np.ndarray | None
    double: np.ndarray
    growth: float = 0.0
    tail: float = 0.0
    diverging: bool = False

    @property
    def s(self):
        return 1 if self.sign == "+" else -1

    def diagonal(self):
        return np.diagonal(self.double)[1:].copy()

    def column_magnitudes(self):
        """``max_n |v_{n a}|`` for ``a = 1..M`` (index 0 unused)."""
        return np.abs(self.double).max(axis=0)

    def truncated(self, M):
        """Leading ``M`` columns of this table."""
        if M > self.M:
            raise IncompleteTable(f"table has {self.M} columns, {M} requested")
        single = None if self.single is None else self.single[:M + 1].copy()
        return VTable(self.sign, M, single, self.double[:M + 1, :M + 1].copy())

    def to_dict(self):
        single = None
        if self.single is not None:
            single = [cpair(v) for v in self.single[1:]]
        double = [
            [cpair(self.double[n, a]) for n in range(1, a + 1)]
            for a in range(1, self.M + 1)
        ]
        return {"sign": self.sign, "M": int(self.M), "single": single, "double": double}

    @classmethod
    def from_dict(cls, data):
        sign, _ = _sign_value(data["sign"])
        M = int(data["M"])
        single = None
        if data.get("single") is not None:
            vals = data["single"]
            if len(vals) != M:
                raise IncompleteTable(f"single has {len(vals)} entries, expected {M}")
            single = np.zeros(M + 1, dtype=complex)
            single[1:] = [parse_complex(v) for v in vals]
        rows = data["double"]
        if len(rows) != M:
            raise IncompleteTable(f"double has {len(rows)} columns, expected {M}")
        double = np.zeros((M + 1, M + 1), dtype=complex)
        for a, row in enumerate(rows, start=1):
            if len(row) != a:
                raise IncompleteTable(f"column {a} has {len(row)} entries, expected {a}")
            double[1:a + 1, a] = [parse_complex(v) for v in row]
        return cls(sign, M, single, double)


def _divergence_diagnostics(double, M, factor, tail_tolerance):
    colmax = np.abs(double).max(axis=0)
    tail = float(colmax[M])
    if M <= DIVERGENCE_WINDOW:
        return 0.0, tail, False
    ref = colmax[M - DIVERGENCE_WINDOW]
    growth = float(colmax[M] / ref) if ref > 0 else (np.inf if colmax[M] > 0 else 0.0)
    return growth, tail, bool(growth > factor or tail > tail_tolerance)


def build_vtable(pot, M, sign, divergence_factor=DIVERGENCE_FACTOR,
                 tail_tolerance=TAIL_TOLERANCE):
    """Forward recurrences for one sign through column ``M``.

    Coefficients beyond ``pot.N`` are zero and coefficients beyond ``M`` are
    ignored.  If the tables appear not to settle by column ``M`` (growth over
    the last five columns beyond ``divergence_factor`` or a last column larger
    than ``tail_tolerance``) a :class:`DivergenceSuspected` warning is issued
    and ``diverging`` is set; the table is returned regardless.
    """
    if M < 1:
        raise ValueError("truncation order M must be >= 1")
    sign, s = _sign_value(sign)
    P, Q = pot.padded(M)
    v = np.zeros(M + 1, dtype=complex)
    V = np.zeros((M + 1, M + 1), dtype=complex)
    colsum = np.zeros(M + 1, dtype=complex)
    for a in range(1, M + 1):
        t = np.arange(1, a)
        Pr = P[a - t]
        Qr = Q[a - t]
        v[a] = -s * (np.dot(v[1:a], Pr) + P[a]) / a
        if a > 1:
            n = np.arange(1, a)
            block = V[1:a, 1:a]
            V[1:a, a] = -(block @ Qr - s * n * (block @ Pr)) / (a * (a - n))
        lower = np.dot(Qr, v[1:a]) + s * np.dot(Pr, colsum[1:a])
        V[a, a] = -(a * a * v[a] + a * V[1:a, a].sum() + lower + Q[a]) / a
        colsum[a] = V[1:a + 1, a].sum()

    growth, tail, flagged = _divergence_diagnostics(V, M, divergence_factor, tail_tolerance)
    if flagged:
        warnings.warn(
            f"{sign} table: growth {growth:.3g} over the last {DIVERGENCE_WINDOW} "
            f"columns, last column magnitude {tail:.3g} at M={M}",
            DivergenceSuspected,
            stacklevel=2,
        )
    return VTable(sign, M, v, V, growth=growth, tail=tail, diverging=flagged)


def recurrence_residuals(vt, pot):
    """Largest relative residual of relations (I), (II), (III) over the table."""
    s = vt.s
    M = vt.M
    P, Q = pot.padded(M)
    v, V = vt.single, vt.double
    res = np.zeros(3)
    for a in range(1, M + 1):
        t = np.arange(1, a)
        terms1 = np.concatenate([[a * v[a]], s * v[1:a] * P[a - t], [s * P[a]]])
        res[0] = max(res[0], abs(terms1.sum()) / (1 + np.abs(terms1).max()))
        for n in range(1, a):
            tt = np.arange(n, a)
            terms2 = np.concatenate(
                [[a * (a - n) * V[n, a]], (Q[a - tt] - s * n * P[a - tt]) * V[n, tt]]
            )
            res[1] = max(res[1], abs(terms2.sum()) / (1 + np.abs(terms2).max()))
        colsums = V[1:a, 1:a].sum(axis=0)
        terms3 = np.concatenate(
            [
                [a * a * v[a], a * V[1:a + 1, a].sum(), Q[a]],
                Q[a - t] * v[1:a],
                s * P[a - t] * colsums,
            ]
        )
        res[2] = max(res[2], abs(terms3.sum()) / (1 + np.abs(terms3).max()))
    return tuple(float(r) for r in res)


def solve_column(a, vplus, vminus, Vplus, Vminus, P, Q):
    """Recover ``(p_a, q_a, v_a^+, v_a^-)`` from column ``a`` of both tables.

    ``vplus``/``vminus`` must hold the single-index entries below ``a``,
    ``Vplus``/``Vminus`` the double-index entries through column ``a`` and
    ``P``/``Q`` the coefficients below ``a``.  The sum of the two (I)
    relations fixes ``v_a^+ + v_a^-``, the difference of the two (III)
    relations fixes ``v_a^+ - v_a^-``; then (I) and (III) for ``+`` give
    ``p_a`` and ``q_a``.
    """
    t = np.arange(1, a)
    Pr = P[a - t]
    Qr = Q[a - t]
    cs_plus = Vplus[1:a, 1:a].sum(axis=0)
    cs_minus = Vminus[1:a, 1:a].sum(axis=0)
    col_plus = Vplus[1:a + 1, a].sum()
    col_minus = Vminus[1:a + 1, a].sum()

    total = -np.dot(vplus[1:a] - vminus[1:a], Pr) / a
    diff = -(
        a * (col_plus - col_minus)
        + np.dot(Qr, vplus[1:a] - vminus[1:a])
        + np.dot(Pr, cs_plus + cs_minus)
    ) / (a * a)
    vp = 0.5 * (total + diff)
    vm = 0.5 * (total - diff)
    p_a = -(a * vp + np.dot(vplus[1:a], Pr))
    q_a = -(a * a * vp + a * col_plus + np.dot(Qr, vplus[1:a]) + np.dot(Pr, cs_plus))
    return p_a, q_a, vp, vm


def invert_recurrences(vplus, vminus, Nout, tol=1e-9):
    """Recover ``p_1..p_Nout`` and ``q_1..q_Nout`` from tables of both signs.

    Only the double-index entries through column ``Nout`` are required.  When a
    table carries single-index entries they must agree with the re-derived
    ones to ``tol`` (relative to ``max(1, |v|)``).

    Returns
    -------
    p, q : ndarray
        Complex arrays of length ``Nout`` (``p[0]`` is ``p_1``).
    """
    if vplus.sign != "+" or vminus.sign != "-":
        raise ValueError("expected a '+' table and a '-' table")
    for vt in (vplus, vminus):
        if vt.M < Nout:
            raise IncompleteTable(
                f"{vt.sign} table has {vt.M} columns, {Nout} required"
            )
        if not np.all(np.isfinite(vt.double[1:Nout + 1, 1:Nout + 1])):
            raise IncompleteTable(f"{vt.sign} table has missing double-index entries")
    Vp = vplus.double[:Nout + 1, :Nout + 1]
    Vm = vminus.double[:Nout + 1, :Nout + 1]
    P = np.zeros(Nout + 1, dtype=complex)
    Q = np.zeros(Nout + 1, dtype=complex)
    vp = np.zeros(Nout + 1, dtype=complex)
    vm = np.zeros(Nout + 1, dtype=complex)
    for a in range(1, Nout + 1):
        P[a], Q[a], vp[a], vm[a] = solve_column(a, vp, vm, Vp, Vm, P, Q)
        for given, derived, sign in ((vplus.single, vp[a], "+"), (vminus.single, vm[a], "-")):
            if given is None or not np.isfinite(given[a]):
                continue
            if abs(given[a] - derived) > tol * max(1.0, abs(derived)):
                raise ConsistencyMismatch(
                    f"v_{a}^{sign}: table has {given[a]:.12g}, recurrences give {derived:.12g}"
                )
    return P[1:], Q[1:]
