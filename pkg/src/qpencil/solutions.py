"""Series solutions built from coefficient tables.

Each kind is a series ``exp(kappa*x) * (1 + sum_a c_a exp(i a x))`` with
``c_a = v_a + sum_{n<=a} v_{n a} / d_n``:

=========  ==========  ==============  =============
kind        table sign  kappa           d_n
=========  ==========  ==============  =============
f1_plus     +           i lam           n + 2 lam
f1_minus    -           -i lam          n - 2 lam
f2_plus     +           lam beta        n - 2 i lam beta
f2_minus    -           -lam beta       n + 2 i lam beta
=========  ==========  ==============  =============

The ``f2`` series are the ``f1`` series at ``mu = -i lam beta``.  They solve
the ``x < 0`` equation only when the tables are built from the potential
with ``p`` replaced by ``(i/beta) p``; :class:`FundamentalSystem` does that.
"""

from dataclasses import dataclass, field
import enum
import math

import numpy as np

from .errors import NearPole, OutOfRange
from .recurrence import build_vtable

EPS_POLE = 1e-8


class SolutionKind(enum.Enum):
    f1_plus = "f1_plus"
    f1_minus = "f1_minus"
    f2_plus = "f2_plus"
    f2_minus = "f2_minus"

    @property
    def sign(self):
        return "+" if self.name.endswith("plus") else "-"

    @property
    def family(self):
        return 1 if self.name.startswith("f1") else 2


@dataclass(frozen=True)
class SolutionSample:
    value: complex
    derivative: complex
    second: complex | None = None


def _parameters(kind, lam, beta):
    """Return ``(kappa, a)`` with ``d_n = a * (lam - z_n)`` and ``z_n = -n / a``.

    ``lam`` may be an array.
    """
    s = 1 if kind.sign == "+" else -1
    if kind.family == 1:
        return s * 1j * lam, 2.0 * s
    return s * lam * beta, -2j * s * beta


def denominators(kind, lam, beta, M):
    """``d_n`` for ``n = 1..M``, shape ``lam.shape + (M,)``.

    Written as ``a * (lam - z_n)`` with the pole ``z_n`` rounded once, so the
    subtraction is exact close to a pole and the computed function stays
    smooth there.
    """
    _, a = _parameters(kind, 0.0, beta)
    z = -np.arange(1, M + 1) / a
    return a * (np.asarray(lam, dtype=complex)[..., None] - z)


def _fsum_complex(terms):
    terms = np.asarray(terms)
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


def series_coefficients(vt, d, eps_pole=EPS_POLE, kind=None):
    """``c_0..c_M`` of the series with denominators ``d`` (``d[n-1] = d_n``)."""
    M = vt.M
    n = np.arange(1, M + 1)
    bad = np.flatnonzero(np.abs(d) <= eps_pole)
    if bad.size:
        raise NearPole(int(n[bad[0]]), complex(d[bad[0]]), kind)
    single = vt.single if vt.single is not None else np.zeros(M + 1)
    c = np.empty(M + 1, dtype=complex)
    c[0] = 1.0
    for a in range(1, M + 1):
        c[a] = _fsum_complex(np.concatenate([[single[a]], vt.double[1:a + 1, a] / d[:a]]))
    return c


def eval_solution(vt, beta, kind, lam, x, eps_pole=EPS_POLE, second=False):
    """Value and x-derivative of one truncated series solution at real ``x``.

    ``vt`` must be a table of the sign matching ``kind``.  The series is summed
    as written for every real ``x``; which half-line it represents is up to the
    caller.  With ``second=True`` the termwise second derivative is included.

    Raises
    ------
    NearPole
        If some ``|d_n| <= eps_pole``.
    """
    kind = SolutionKind(kind)
    if vt.sign != kind.sign:
        raise ValueError(f"{kind.value} needs a '{kind.sign}' table, got '{vt.sign}'")
    lam = complex(lam)
    kappa, _ = _parameters(kind, lam, beta)
    d = denominators(kind, lam, beta, vt.M)
    c = series_coefficients(vt, d, eps_pole, kind.value)
    a = np.arange(vt.M + 1)
    rate = kappa + 1j * a
    phase = np.exp(1j * a * x)
    env = np.exp(kappa * x)
    terms = c * phase
    value = env * _fsum_complex(terms)
    deriv = env * _fsum_complex(terms * rate)
    d2 = env * _fsum_complex(terms * rate * rate) if second else None
    return SolutionSample(complex(value), complex(deriv), None if d2 is None else complex(d2))


def residue_function(vt, n, x):
    """``f_n(x) = sum_{a=n}^{M} v_{n a} exp(i a x) exp(-i n x / 2)``.

    This is the limit of ``(n + 2 s lam) f1(x, lam)`` at ``lam = -s n / 2``.
    ``x`` may be an array.
    """
    if not 1 <= n <= vt.M:
        raise OutOfRange(f"n={n} outside 1..{vt.M}")
    a = np.arange(n, vt.M + 1)
    xa = np.asarray(x, dtype=float)
    out = np.exp(1j * np.multiply.outer(xa, a - 0.5 * n)) @ vt.double[n, n:]
    return complex(out) if xa.ndim == 0 else out


@dataclass(frozen=True)
class _OriginSums:
    """Column sums giving a series and its derivative at ``x = 0``."""

    S: complex
    A: complex
    R: np.ndarray
    B: np.ndarray

    @classmethod
    def of(cls, vt):
        a = np.arange(vt.M + 1)
        single = vt.single if vt.single is not None else np.zeros(vt.M + 1)
        return cls(
            S=complex(single.sum()),
            A=complex((a * single).sum()),
            R=vt.double[1:, :].sum(axis=1),
            B=(vt.double[1:, :] * a).sum(axis=1),
        )


@dataclass(frozen=True)
class FundamentalSystem:
    """The four fundamental solutions of one pencil, truncated at order ``M``.

    ``f1`` tables come from ``pot``; ``f2`` tables from ``pot`` with ``p``
    scaled by ``i / beta``.
    """

    pot: object
    M: int
    f1_plus: object = field(repr=False)
    f1_minus: object = field(repr=False)
    f2_plus: object = field(repr=False)
    f2_minus: object = field(repr=False)

    @classmethod
    def build(cls, pot, M=32):
        tilde = pot.with_p_scaled(1j / pot.beta)
        return cls(
            pot=pot,
            M=M,
            f1_plus=build_vtable(pot, M, "+"),
            f1_minus=build_vtable(pot, M, "-"),
            f2_plus=build_vtable(tilde, M, "+"),
            f2_minus=build_vtable(tilde, M, "-"),
        )

    @property
    def beta(self):
        return self.pot.beta

    @property
    def diverging(self):
        return any(t.diverging for t in self.tables().values())

    def tables(self):
        return {k: getattr(self, k.value) for k in SolutionKind}

    def table(self, kind):
        return getattr(self, SolutionKind(kind).value)

    def mirrored(self):
        """System of the pencil with ``p -> -p``, whose solutions at ``-lam``
        are this system's solutions at ``lam`` with the signs swapped."""
        return FundamentalSystem.build(self.pot.mirrored(), self.M)

    def evaluate(self, kind, lam, x, eps_pole=EPS_POLE, second=False):
        kind = SolutionKind(kind)
        return eval_solution(self.table(kind), self.beta, kind, lam, x, eps_pole, second)

    def pole_check(self, lam, eps_pole=EPS_POLE):
        """Raise :class:`NearPole` if ``lam`` is near any of the four pole sets."""
        lam = complex(lam)
        n = np.arange(1, self.M + 1)
        for kind in SolutionKind:
            d = denominators(kind, lam, self.beta, self.M)
            k = int(np.argmin(np.abs(d)))
            if abs(d[k]) <= eps_pole:
                raise NearPole(int(n[k]), complex(d[k]), kind.value)

    def origin_values(self, kind, lam):
        """Vectorised ``(f(0), f'(0))`` for an array of ``lam``.

        No pole checking is done here; callers screen ``lam`` first.
        """
        kind = SolutionKind(kind)
        sums = self._sums()[kind]
        lam = np.asarray(lam, dtype=complex)
        kappa, _ = _parameters(kind, lam, self.beta)
        d = denominators(kind, lam, self.beta, self.M)
        value = 1 + sums.S + (sums.R / d).sum(axis=-1)
        deriv = kappa * value + 1j * (sums.A + (sums.B / d).sum(axis=-1))
        return value, deriv

    def _sums(self):
        cache = self.__dict__.get("_origin_cache")
        if cache is None:
            cache = {k: _OriginSums.of(self.table(k)) for k in SolutionKind}
            object.__setattr__(self, "_origin_cache", cache)
        return cache

    def pole_set(self):
        """All candidate poles ``+-n/2`` and ``+-i n/(2 beta)``, ``n <= M``."""
        n = np.arange(1, self.M + 1)
        return np.concatenate([n / 2, -n / 2, 1j * n / (2 * self.beta), -1j * n / (2 * self.beta)])


def wronskian(u, v):
    """``W[u, v] = u' v - u v'`` for two :class:`SolutionSample` objects."""
    return u.derivative * v.value - u.value * v.derivative
