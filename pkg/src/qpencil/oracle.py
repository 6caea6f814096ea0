"""Independent ODE integration of the pencil, used only for verification.

The equation is integrated as the first-order system ``(y, y')`` with an
embedded Runge-Kutta pair (scipy's DOP853).  A path crossing ``x = 0`` is split
there so each piece sees a constant weight; ``y`` and ``y'`` carry over
unchanged at the split, which is the conjunction condition.

Nothing in the forward or inverse code imports this module.
"""

from dataclasses import asdict, dataclass
import math

import numpy as np
from scipy.integrate import solve_ivp

from .errors import LambdaZero, StepSizeUnderflow
from .potential import evaluate_potential
from .solutions import FundamentalSystem, SolutionKind, wronskian

DEFAULT_TOL = 1e-11
TWO_PI = 2.0 * math.pi
# test points off both axes and away from the pole sets for beta in [0.5, 2]
STANDARD_LAMBDAS = (1 + 1j, 0.7 + 0.3j, -0.6 + 0.8j, 1.3 - 0.4j, -0.9 - 0.7j)


@dataclass(frozen=True)
class IVPState:
    x: float
    y: complex
    yprime: complex


def _rhs(pot, lam, rho):
    n = np.arange(1, pot.N + 1)
    lam2rho = lam * lam * rho

    def f(x, u):
        e = np.exp(1j * n * x)
        px = e @ pot.p if pot.N else 0.0
        qx = e @ pot.q if pot.N else 0.0
        return np.array([u[1], (2 * lam * px + qx - lam2rho) * u[0]])

    return f


def _branch_rho(pot, side):
    return 1.0 if side > 0 else -pot.beta ** 2


def _run(pot, lam, x0, u0, x1, tol, rho, t_eval=None):
    sol = solve_ivp(
        _rhs(pot, lam, rho),
        (x0, x1),
        u0,
        method="DOP853",
        rtol=tol,
        atol=tol * max(1e-300, np.abs(u0).max()),
        t_eval=t_eval,
    )
    if sol.status != 0:
        raise StepSizeUnderflow(f"integration stopped at x={sol.t[-1]:.6g}: {sol.message}")
    return sol


def integrate(pot, lam, state, x_target, tol=DEFAULT_TOL, branch=None):
    """Propagate ``state`` to ``x_target``.

    ``branch=None`` uses the true weight (splitting at 0 when needed);
    ``branch='right'`` or ``'left'`` forces ``rho = 1`` or ``-beta**2`` along
    the whole path.
    """
    if not 1e-13 <= tol <= 1e-6:
        raise ValueError("tol must lie in [1e-13, 1e-6]")
    lam = complex(lam)
    x0, x1 = float(state.x), float(x_target)
    u = np.array([state.y, state.yprime], dtype=complex)
    if x0 == x1:
        return state
    pieces = _pieces(x0, x1, branch)
    for a, b, side in pieces:
        u = _run(pot, lam, a, u, b, tol, _branch_rho(pot, side)).y[:, -1]
    return IVPState(x1, complex(u[0]), complex(u[1]))


def _pieces(x0, x1, branch):
    if branch == "right":
        return [(x0, x1, 1)]
    if branch == "left":
        return [(x0, x1, -1)]
    if branch is not None:
        raise ValueError("branch must be None, 'right' or 'left'")
    if x0 * x1 < 0:
        return [(x0, 0.0, x0), (0.0, x1, x1)]
    side = x1 if x1 != 0 else x0
    return [(x0, x1, 1 if side >= 0 else -1)]


def integrate_grid(pot, lam, state, xs, tol=DEFAULT_TOL, branch=None):
    """States at every grid point (grid monotone, starting at ``state.x``)."""
    xs = np.asarray(xs, dtype=float)
    out = [state]
    cur = state
    for x in xs[1:]:
        cur = integrate(pot, lam, cur, x, tol, branch)
        out.append(cur)
    return out


def _default_grid(kind):
    if SolutionKind(kind).family == 1:
        return np.linspace(0.0, TWO_PI, 25)
    return np.linspace(-TWO_PI, 0.0, 25)


def _multiplier(kind, lam, beta):
    kind = SolutionKind(kind)
    s = 1 if kind.sign == "+" else -1
    if kind.family == 1:
        return complex(np.exp(s * 2j * math.pi * lam))
    return complex(np.exp(s * 2 * math.pi * lam * beta))


@dataclass
class SolutionReport:
    kind: str
    lam: complex
    ode_residual: float
    propagation_mismatch: float
    quasi_periodicity_defect: float

    def worst(self):
        return max(self.ode_residual, self.propagation_mismatch, self.quasi_periodicity_defect)

    def to_dict(self):
        d = asdict(self)
        d["lam"] = [self.lam.real, self.lam.imag]
        return d


def verify_solution(pot, kind, lam, x_grid=None, M=32, system=None, tol=DEFAULT_TOL):
    """Check one series solution against the ODE.

    The ``f1`` series solve the ``rho = 1`` equation and the ``f2`` series the
    ``rho = -beta**2`` equation on the whole line, so the oracle integrates that
    equation regardless of where ``x_grid`` lies.  The default grid is one
    period on the kind's own half-line.

    Returns a :class:`SolutionReport` with

    * the largest relative ODE residual of the series (termwise ``f''``),
    * the largest mismatch between the series and the integrated solution,
      relative to ``max |f|``; the integration starts from the series data at
      the grid end where ``|f|`` is smaller,
    * the relative defect of ``y(x0 + 2 pi) = sigma f(x0)`` with ``y``
      integrated over one period (backwards when ``|sigma| < 1``).
    """
    kind = SolutionKind(kind)
    lam = complex(lam)
    system = system or FundamentalSystem.build(pot, M)
    xs = _default_grid(kind) if x_grid is None else np.asarray(x_grid, dtype=float)
    branch = "right" if kind.family == 1 else "left"
    rho = _branch_rho(pot, 1 if branch == "right" else -1)
    samples = [system.evaluate(kind, lam, x, second=True) for x in xs]
    pvals, qvals, _ = evaluate_potential(pot, xs)

    ode = 0.0
    for s, px, qx in zip(samples, pvals, qvals):
        terms = np.array([-s.second, 2 * lam * px * s.value, qx * s.value, -lam * lam * rho * s.value])
        ode = max(ode, abs(terms.sum()) / np.abs(terms).sum())

    # integrate towards growth so the other solution cannot swamp this one
    fwd = abs(samples[-1].value) >= abs(samples[0].value)
    order = slice(None) if fwd else slice(None, None, -1)
    xg, sg = xs[order], samples[order]
    start = IVPState(xg[0], sg[0].value, sg[0].derivative)
    states = integrate_grid(pot, lam, start, xg, tol, branch)
    fmax = max(abs(s.value) for s in samples)
    prop = max(abs(st.y - s.value) for st, s in zip(states, sg)) / fmax

    sigma = _multiplier(kind, lam, pot.beta)
    first = samples[0]
    if abs(sigma) < 1:
        x_end = xs[0] + TWO_PI
        first = system.evaluate(kind, lam, x_end)
        sigma, x0, x1 = 1 / sigma, x_end, xs[0]
    else:
        x0, x1 = xs[0], xs[0] + TWO_PI
    end = integrate(pot, lam, IVPState(x0, first.value, first.derivative), x1, tol, branch)
    # derivatives are weighted by 1/|rate| so both components count alike
    w = 1.0 / max(1.0, abs(lam) * (1.0 if kind.family == 1 else pot.beta))
    got = np.array([end.y, w * end.yprime])
    want = sigma * np.array([first.value, w * first.derivative])
    quasi = np.abs(got - want).max() / np.abs(want).max()
    return SolutionReport(kind.value, lam, float(ode), float(prop), float(quasi))


@dataclass
class ConnectionReport:
    lam: complex
    c11: complex
    c12: complex
    c21: complex
    c22: complex
    positive_defect: float
    negative_defect: float

    def worst(self):
        return max(self.positive_defect, self.negative_defect)

    def to_dict(self):
        d = {}
        for k, v in asdict(self).items():
            d[k] = [v.real, v.imag] if isinstance(v, complex) else v
        return d


def _wronskian_coefficients(system, lam):
    """Extension coefficients from the series data at ``x = 0``.

    Recomputed here so the oracle does not depend on the spectral module.
    """
    f1p, f1m, f2p, f2m = (system.evaluate(k, lam, 0.0) for k in SolutionKind)
    beta = system.beta
    c11 = wronskian(f2p, f1m) / (2j * lam)
    c12 = wronskian(f1p, f2p) / (2j * lam)
    c21 = -1j / beta * c12
    c22 = wronskian(f1p, f2m) / (2 * lam * beta)
    return c11, c12, c21, c22, f1p, f2p


def verify_connection(pot, lam, x_pos=None, x_neg=None, M=32, system=None, tol=DEFAULT_TOL):
    """Extend ``f2+`` into ``x > 0`` and ``f1+`` into ``x < 0`` with the oracle.

    Each extension is compared with its expansion in the other half-line's
    basis; defects are relative to the largest extension value on the grid.
    """
    lam = complex(lam)
    if lam == 0:
        raise LambdaZero("connection coefficients are undefined at lam = 0")
    system = system or FundamentalSystem.build(pot, M)
    system.pole_check(lam)
    xp = np.linspace(0.0, 3.0, 31) if x_pos is None else np.asarray(x_pos, dtype=float)
    xn = np.linspace(0.0, -3.0, 31) if x_neg is None else np.sort(np.asarray(x_neg, dtype=float))[::-1]
    c11, c12, c21, c22, f1p0, f2p0 = _wronskian_coefficients(system, lam)

    def defect(start, xs, combo):
        if xs[0] != 0.0:
            xs = np.concatenate([[0.0], xs])
        states = integrate_grid(pot, lam, start, xs, tol)
        ext = np.array([st.y for st in states])
        ref = np.array([combo(x) for x in xs])
        return float(np.abs(ext - ref).max() / np.abs(ext).max())

    pos = defect(
        IVPState(0.0, f2p0.value, f2p0.derivative),
        xp,
        lambda x: c11 * system.evaluate("f1_plus", lam, x).value
        + c12 * system.evaluate("f1_minus", lam, x).value,
    )
    neg = defect(
        IVPState(0.0, f1p0.value, f1p0.derivative),
        xn,
        lambda x: c22 * system.evaluate("f2_plus", lam, x).value
        + c21 * system.evaluate("f2_minus", lam, x).value,
    )
    return ConnectionReport(lam, complex(c11), complex(c12), complex(c21), complex(c22), pos, neg)


def wronskian_drift(pot, lam, u0, v0, xs, tol=DEFAULT_TOL, branch=None):
    """Largest relative change of ``W[u, v]`` along ``xs`` under integration."""
    us = integrate_grid(pot, lam, u0, xs, tol, branch)
    vs = integrate_grid(pot, lam, v0, xs, tol, branch)
    w = np.array([a.yprime * b.y - a.y * b.yprime for a, b in zip(us, vs)])
    return float(np.abs(w - w[0]).max() / abs(w[0]))


__all__ = [
    "STANDARD_LAMBDAS",
    "ConnectionReport",
    "IVPState",
    "SolutionReport",
    "integrate",
    "integrate_grid",
    "verify_connection",
    "verify_solution",
    "wronskian_drift",
]
