"""Connection coefficients, eigenvalues, singularities and spectral data.

With ``W[u, v] = u' v - u v'`` evaluated at ``x = 0``:

    C11(lam) = W[f2+, f1-] / (2 i lam)      C12(lam) = W[f1+, f2+] / (2 i lam)
    C21(lam) = -(i / beta) C12(lam)          C22(lam) = W[f1+, f2-] / (2 lam beta)

so that ``f2+ = C11 f1+ + C12 f1-`` on ``x >= 0`` and ``f1+ = C22 f2+ + C21 f2-``
on ``x < 0``.  ``C22(lam)`` equals ``(i/beta) C11(-lam)`` of the pencil with
``p -> -p``; for ``p = 0`` that is the same pencil.

Eigenvalues in ``S_k = {k pi/2 < arg lam < (k+1) pi/2}`` are the zeros of
C12(lam), C11(-lam), C12(-lam), C11(lam) for k = 0, 1, 2, 3.
"""

from dataclasses import dataclass, field
import json
import math

import numpy as np

from . import rootfind
from ._jsonio import cpair, dumps, parse_complex
from .errors import (
    LambdaZero,
    NearPole,
    RadiusConflict,
    SpectralDataError,
)
from .solutions import EPS_POLE, FundamentalSystem, SolutionKind

DEFAULT_RADIUS = 6.0
CIRCLE_POINTS = 64
MAX_CIRCLE_RADIUS = 0.125
AXIS_PROBES = 128
AXIS_OFFSET = 1e-5
ZERO_TOL = 1e-10
REMOVABLE = 1e-12


@dataclass(frozen=True)
class ConnectionCoefficients:
    lam: complex
    c11: complex
    c12: complex
    c21: complex
    c22: complex
    c11_mirror: complex
    beta: float

    @property
    def cross_lambda_defect(self):
        """``|C22(lam) - (i/beta) C11_mirror(-lam)|``; zero up to rounding."""
        return abs(self.c22 - 1j / self.beta * self.c11_mirror)


def _origin(system, kind, lam):
    v, d = system.origin_values(kind, np.array([lam]))
    return complex(v[0]), complex(d[0])


def _w(u, v):
    return u[1] * v[0] - u[0] * v[1]


def _mirror(system):
    m = system.__dict__.get("_mirror_cache")
    if m is None:
        m = system.mirrored()
        object.__setattr__(system, "_mirror_cache", m)
    return m


def connection_coefficients(system, lam, eps_pole=EPS_POLE):
    """All four connection coefficients of ``system`` at one ``lam``.

    The mirrored pencil is evaluated at ``-lam`` as an independent check of
    ``C22``; a mismatch beyond ``1e-10`` raises ``AssertionError``.
    """
    lam = complex(lam)
    if lam == 0:
        raise LambdaZero("connection coefficients are undefined at lam = 0")
    system.pole_check(lam, eps_pole)
    beta = system.beta
    f1p = _origin(system, "f1_plus", lam)
    f1m = _origin(system, "f1_minus", lam)
    f2p = _origin(system, "f2_plus", lam)
    f2m = _origin(system, "f2_minus", lam)
    c11 = _w(f2p, f1m) / (2j * lam)
    c12 = _w(f1p, f2p) / (2j * lam)
    c22 = _w(f1p, f2m) / (2 * lam * beta)
    mir = _mirror(system)
    g2p = _origin(mir, "f2_plus", -lam)
    g1m = _origin(mir, "f1_minus", -lam)
    c11_mirror = _w(g2p, g1m) / (-2j * lam)
    out = ConnectionCoefficients(lam, c11, c12, -1j / beta * c12, c22, c11_mirror, beta)
    scale = 1.0 + abs(c22)
    assert out.cross_lambda_defect <= 1e-10 * scale, out.cross_lambda_defect
    return out


def c11_c12(system, lam):
    """Vectorised ``(C11, C12)`` over an array of ``lam`` (no pole screening)."""
    lam = np.asarray(lam, dtype=complex)
    f1p = system.origin_values("f1_plus", lam)
    f1m = system.origin_values("f1_minus", lam)
    f2p = system.origin_values("f2_plus", lam)
    return _w(f2p, f1m) / (2j * lam), _w(f1p, f2p) / (2j * lam)


def sector_function(system, k):
    """The function whose zeros in ``S_k`` are eigenvalues."""
    if k not in (0, 1, 2, 3):
        raise ValueError("sector must be 0, 1, 2 or 3")
    sign = -1 if k in (1, 2) else 1
    pick = 1 if k in (0, 2) else 0

    def g(lam):
        return c11_c12(system, sign * np.asarray(lam, dtype=complex))[pick]

    return g


def in_sector(lam, k):
    lam = complex(lam)
    if lam.real == 0 or lam.imag == 0:
        return False
    ang = math.atan2(lam.imag, lam.real) % (2 * math.pi)
    return k * math.pi / 2 < ang < (k + 1) * math.pi / 2


def find_eigenvalues(system, R=DEFAULT_RADIUS, k=0, ftol=ZERO_TOL, offset=AXIS_OFFSET):
    """Zeros of the sector-``k`` function in ``S_k`` with ``|lam| <= R``.

    The search runs in the rotated square ``{offset <= re, im <= 1.02 R}``;
    the poles of the connection coefficients all lie on the axes and so stay
    outside it.  Zeros closer than ``offset`` to an axis are not resolved.
    """
    if R <= 0:
        raise ValueError("search radius must be positive")
    g = sector_function(system, k)
    rot = 1j ** k

    def f(z):
        return g(rot * np.asarray(z, dtype=complex))

    poles = system.pole_set() / rot
    side = 1.02 * R
    zs = rootfind.find_zeros(f, (offset, side, offset, side), poles, ftol=ftol)
    lams = [rot * z for z in zs if abs(z) <= R]
    lams = [lam for lam in lams if in_sector(lam, k)]
    return sorted(lams, key=lambda z: (z.real, z.imag))


@dataclass(frozen=True)
class Singularity:
    location: complex
    strength: float
    axis: str
    family: str
    removable: bool


def spectral_singularities(system, M=None):
    """Candidate spectral singularities on the real and imaginary axes.

    ``n/2`` and ``-n/2`` carry ``|v_nn^-|`` and ``|v_nn^+|`` of the ``f1``
    tables; ``i n/(2 beta)`` and ``-i n/(2 beta)`` carry the diagonals of the
    ``f2`` tables (identical to the ``f1`` ones when ``p = 0``).
    """
    M = system.M if M is None else min(M, system.M)
    beta = system.beta
    out = []
    d1p = system.f1_plus.diagonal()
    d1m = system.f1_minus.diagonal()
    d2p = system.f2_plus.diagonal()
    d2m = system.f2_minus.diagonal()
    for n in range(1, M + 1):
        rows = [
            (n / 2, abs(d1m[n - 1]), "real", "f1_minus"),
            (-n / 2, abs(d1p[n - 1]), "real", "f1_plus"),
            (1j * n / (2 * beta), abs(d2m[n - 1]), "imaginary", "f2_minus"),
            (-1j * n / (2 * beta), abs(d2p[n - 1]), "imaginary", "f2_plus"),
        ]
        for loc, strength, axis, fam in rows:
            out.append(Singularity(complex(loc), float(strength), axis, fam, strength <= REMOVABLE))
    return out


@dataclass
class Circle:
    center: complex
    radius: float
    lam: np.ndarray
    c11: np.ndarray
    c12: np.ndarray


@dataclass
class SpectralData:
    """Finite representation of ``{lam_n, C11, C12}``.

    ``eigenvalues`` holds ``(sector, lam, C11(lam), C11(-lam))`` tuples,
    ``circles`` the sampled coefficients around ``+-n/2`` for ``n <= order``
    and ``axis_probes`` an array of shape ``(3, K)`` with rows ``lam, C11, C12``
    on the negative imaginary axis.
    """

    order: int
    eigenvalues: list = field(default_factory=list)
    circles: list = field(default_factory=list)
    axis_probes: np.ndarray | None = None
    beta_hint: float | None = None

    def circle_at(self, center, tol=1e-12):
        for c in self.circles:
            if abs(c.center - center) <= tol:
                return c
        return None

    def to_dict(self):
        d = {"order": int(self.order)}
        if self.beta_hint is not None:
            d["beta_hint"] = float(self.beta_hint)
        d["eigenvalues"] = [
            {"sector": int(k), "lambda": cpair(lam), "c11_plus": cpair(a), "c11_minus": cpair(b)}
            for k, lam, a, b in self.eigenvalues
        ]
        d["circles"] = [
            {
                "center": cpair(c.center),
                "radius": float(c.radius),
                "samples": [
                    {"lambda": cpair(z), "c11": cpair(a), "c12": cpair(b)}
                    for z, a, b in zip(c.lam, c.c11, c.c12)
                ],
            }
            for c in self.circles
        ]
        probes = []
        if self.axis_probes is not None:
            probes = [
                {"lambda": cpair(z), "c11": cpair(a), "c12": cpair(b)}
                for z, a, b in self.axis_probes.T
            ]
        d["axis_probes"] = probes
        return d

    @classmethod
    def from_dict(cls, data):
        try:
            order = int(data["order"])
            eig = [
                (
                    int(e["sector"]),
                    parse_complex(e["lambda"]),
                    parse_complex(e["c11_plus"]),
                    parse_complex(e["c11_minus"]),
                )
                for e in data.get("eigenvalues", [])
            ]
            circles = []
            for c in data.get("circles", []):
                s = c["samples"]
                circles.append(
                    Circle(
                        center=parse_complex(c["center"]),
                        radius=float(c["radius"]),
                        lam=np.array([parse_complex(x["lambda"]) for x in s]),
                        c11=np.array([parse_complex(x["c11"]) for x in s]),
                        c12=np.array([parse_complex(x["c12"]) for x in s]),
                    )
                )
            probes = data.get("axis_probes") or []
            axis = None
            if probes:
                axis = np.array(
                    [[parse_complex(x[key]) for x in probes] for key in ("lambda", "c11", "c12")]
                )
            beta_hint = data.get("beta_hint")
        except (KeyError, TypeError, ValueError) as exc:
            raise SpectralDataError(f"malformed spectral data: {exc}") from exc
        return cls(order, eig, circles, axis, None if beta_hint is None else float(beta_hint))

    def dumps(self):
        return dumps(self.to_dict())

    @classmethod
    def loads(cls, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpectralDataError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(data)

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.dumps())

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.loads(fh.read())


def _winding_on_circle(values):
    ph = np.angle(np.roll(values, -1) / values)
    return ph.sum() / (2 * math.pi)


def choose_radius(system, center, n, eigenvalues, r0=MAX_CIRCLE_RADIUS, rmin=1e-4):
    """Largest admissible circle radius around ``center`` (``+-n/2``).

    Samples must stay ``r/2`` away from every other pole and every eigenvalue,
    and the denominator of the residue ratio must not vanish inside.
    """
    poles = system.pole_set()
    poles = poles[np.abs(poles - center) > 1e-12]
    eig = np.asarray(eigenvalues, dtype=complex)
    theta = 2 * math.pi * np.arange(512) / 512
    r = r0
    while r >= rmin:
        pts = center + r * np.exp(1j * theta)
        far = np.abs(pts[:, None] - poles[None, :]).min() >= r / 2
        if far and eig.size:
            far = np.abs(pts[:, None] - eig[None, :]).min() >= r / 2
        if far:
            c11, c12 = c11_c12(system, pts)
            den = c12 if center.real > 0 else c11
            if np.abs(den).min() > 1e-10 and abs(_winding_on_circle(den)) < 0.5:
                return r
        r *= 0.75
    raise RadiusConflict(n, center)


def sample_circle(system, center, radius, points=CIRCLE_POINTS):
    lam = center + radius * np.exp(2j * math.pi * np.arange(points) / points)
    c11, c12 = c11_c12(system, lam)
    return Circle(complex(center), float(radius), lam, c11, c12)


def axis_probes(system, R=DEFAULT_RADIUS, count=AXIS_PROBES, eps_pole=EPS_POLE):
    """``(lam, C11, C12)`` at log-spaced points ``-i t``, ``t in [0.05, R]``."""
    t = np.logspace(math.log10(0.05), math.log10(R), count)
    keep = []
    for tt in t:
        try:
            system.pole_check(-1j * tt, eps_pole)
        except NearPole:
            continue
        keep.append(-1j * tt)
    lam = np.array(keep)
    c11, c12 = c11_c12(system, lam)
    return np.vstack([lam, c11, c12])


def assemble_spectral_data(pot, M=32, R=DEFAULT_RADIUS, N=8, include_beta=False, system=None):
    """Forward map: potential -> :class:`SpectralData` of order ``N``."""
    if N > M:
        raise ValueError("order N must not exceed the truncation order M")
    if R <= 0:
        raise ValueError("search radius must be positive")
    system = system or FundamentalSystem.build(pot, M)
    eig = []
    for k in range(4):
        for lam in find_eigenvalues(system, R, k):
            c_plus, _ = c11_c12(system, np.array([lam]))
            c_minus, _ = c11_c12(system, np.array([-lam]))
            eig.append((k, lam, complex(c_plus[0]), complex(c_minus[0])))
    lams = [e[1] for e in eig]
    circles = []
    for n in range(1, N + 1):
        for center in (n / 2, -n / 2):
            r = choose_radius(system, complex(center), n, lams)
            circles.append(sample_circle(system, complex(center), r))
    return SpectralData(
        order=N,
        eigenvalues=eig,
        circles=circles,
        axis_probes=axis_probes(system, R),
        beta_hint=pot.beta if include_beta else None,
    )


__all__ = [
    "Circle",
    "ConnectionCoefficients",
    "Singularity",
    "SolutionKind",
    "SpectralData",
    "assemble_spectral_data",
    "axis_probes",
    "c11_c12",
    "connection_coefficients",
    "find_eigenvalues",
    "in_sector",
    "sector_function",
    "spectral_singularities",
]
