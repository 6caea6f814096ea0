"""Potentials with positive Fourier harmonics and the step weight.

The pencil acts as ``-y'' + 2*lam*p(x)*y + q(x)*y = lam**2 * rho(x) * y`` with

    p(x) = sum_{n>=1} p_n exp(i n x),   q(x) = sum_{n>=1} q_n exp(i n x),
    rho(x) = 1 for x >= 0,  -beta**2 for x < 0.

Only finitely many harmonics are stored.  Coefficient arrays are 0-based in
memory (``p[0]`` is ``p_1``).
"""

from dataclasses import dataclass
import json
import math

import numpy as np

from ._jsonio import complex_list, parse_complex_list
from .errors import NonFiniteCoefficient, NonPositiveBeta


@dataclass(frozen=True)
class FourierPotential:
    """Validated potential pair ``(p, q)`` with weight parameter ``beta``.

    Build instances through :func:`validate_potential`; the constructor does
    no checking of its own.
    """

    beta: float
    p: np.ndarray
    q: np.ndarray
    p_norm: float = 0.0
    q_norm: float = 0.0

    @property
    def N(self):
        return len(self.p)

    def padded(self, M):
        """Return 1-based coefficient arrays of length ``M + 1``.

        Index 0 holds zero, index ``n`` holds ``p_n`` (``q_n``); harmonics
        beyond ``M`` are dropped and missing ones are zero.
        """
        P = np.zeros(M + 1, dtype=complex)
        Q = np.zeros(M + 1, dtype=complex)
        k = min(M, self.N)
        P[1:k + 1] = self.p[:k]
        Q[1:k + 1] = self.q[:k]
        return P, Q

    def with_p_scaled(self, factor):
        """Same potential with ``p`` multiplied by ``factor`` (beta kept)."""
        return validate_potential(self.beta, self.p * factor, self.q)

    def mirrored(self):
        """The pencil obtained by ``p -> -p``; it maps ``lam -> -lam``."""
        return self.with_p_scaled(-1.0)

    def to_dict(self):
        return {
            "beta": float(self.beta),
            "p": complex_list(self.p),
            "q": complex_list(self.q),
        }

    @classmethod
    def from_dict(cls, data):
        try:
            beta = data["beta"]
            p = parse_complex_list(data.get("p", []))
            q = parse_complex_list(data.get("q", []))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed potential record: {exc}") from exc
        return validate_potential(beta, p, q)

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _as_coefficients(values, name):
    arr = np.asarray(values if values is not None else [], dtype=complex).ravel()
    if not np.all(np.isfinite(arr)):
        raise NonFiniteCoefficient(f"{name} contains NaN or infinite entries")
    return arr


def validate_potential(beta, p, q):
    """Check raw input and return a canonical :class:`FourierPotential`.

    Both coefficient sequences are padded to a common length ``N``, the
    largest index carrying a nonzero entry in either sequence.

    Raises
    ------
    NonPositiveBeta
        If ``beta <= 0``.
    NonFiniteCoefficient
        If ``beta`` or any coefficient is NaN or infinite.
    """
    try:
        beta = float(beta)
    except (TypeError, ValueError) as exc:
        raise NonFiniteCoefficient(f"beta is not a real number: {beta!r}") from exc
    if not math.isfinite(beta):
        raise NonFiniteCoefficient("beta must be finite")
    if beta <= 0:
        raise NonPositiveBeta(f"beta must be positive, got {beta}")

    parr = _as_coefficients(p, "p")
    qarr = _as_coefficients(q, "q")
    nz = [i + 1 for i, c in enumerate(parr) if c != 0]
    nz += [i + 1 for i, c in enumerate(qarr) if c != 0]
    N = max(nz, default=0)
    P = np.zeros(N, dtype=complex)
    Q = np.zeros(N, dtype=complex)
    P[:min(N, len(parr))] = parr[:N]
    Q[:min(N, len(qarr))] = qarr[:N]
    P.setflags(write=False)
    Q.setflags(write=False)

    n = np.arange(1, N + 1)
    return FourierPotential(
        beta=beta,
        p=P,
        q=Q,
        p_norm=float(np.sum(n * np.abs(P))),
        q_norm=float(np.sum(np.abs(Q))),
    )


def evaluate_potential(pot, x):
    """Return ``(p(x), q(x), rho(x))``; ``x`` may be a scalar or an array.

    ``x = 0`` takes the ``rho = 1`` branch.
    """
    xa = np.asarray(x, dtype=float)
    n = np.arange(1, pot.N + 1)
    phase = np.exp(1j * np.multiply.outer(xa, n))
    px = phase @ pot.p if pot.N else np.zeros(xa.shape, dtype=complex)
    qx = phase @ pot.q if pot.N else np.zeros(xa.shape, dtype=complex)
    rho = np.where(xa >= 0, 1.0, -pot.beta ** 2)
    if xa.ndim == 0:
        return complex(px), complex(qx), float(rho)
    return px, qx, rho


def random_potential(rng, N, amplitude, beta=None, beta_range=(0.5, 2.0), with_p=True):
    """Draw a potential with ``N`` harmonics and ``|coefficient| <= amplitude``.

    Moduli are uniform on ``(0, amplitude]`` and phases uniform on the circle.
    ``rng`` is a :class:`numpy.random.Generator`.
    """
    def draw():
        mod = amplitude * (1.0 - rng.random(N))
        return mod * np.exp(2j * np.pi * rng.random(N))

    q = draw()
    p = draw() if with_p else np.zeros(N)
    if beta is None:
        beta = rng.uniform(*beta_range)
    return validate_potential(beta, p, q)
