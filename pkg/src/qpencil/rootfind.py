"""Zeros of an analytic function in a rectangle by the argument principle.

Winding numbers are accumulated from phase increments of ``f`` sampled along
the rectangle edges.  Sampling is refined until each increment is below
``max_phase``, neighbouring moduli differ by less than a factor ``e`` and each
segment is shorter than half its distance to the nearest known pole.  Known
poles must lie outside every rectangle handed to :func:`find_zeros`.
"""

import cmath
import math
import warnings

import numpy as np
from scipy import optimize

from .errors import ContourThroughPole, NonConvergence

MAX_PHASE = math.pi / 4
_SPLITS = (0.5, 0.4631, 0.5417, 0.4127, 0.5813, 0.3559)


class EdgeHitsZero(Exception):
    """A sample on the contour is numerically a zero of ``f``."""


def _pole_distance(z, poles):
    if poles is None or len(poles) == 0:
        return np.full(z.shape, np.inf)
    return np.abs(z[:, None] - poles[None, :]).min(axis=1)


def _seed_parameters(a, b, poles):
    """Extra samples clustered geometrically around poles close to the edge."""
    L = abs(b - a)
    u = (b - a) / L
    seeds = []
    for p in poles if poles is not None else ():
        t = ((p - a) * u.conjugate()).real / L
        dist = abs(p - (a + min(max(t, 0.0), 1.0) * (b - a)))
        if dist > 0.5 * L:
            continue
        h = dist / L
        while h < 1.0:
            seeds.extend((t - h, t + h))
            h *= 2.0
        seeds.append(t)
    seeds = np.asarray(seeds, dtype=float)
    return seeds[(seeds > 0) & (seeds < 1)]


def edge_phase(f, a, b, poles=None, max_phase=MAX_PHASE, n0=17, tiny=1e-13):
    """Total change of ``arg f`` along the segment from ``a`` to ``b``."""
    a, b = complex(a), complex(b)
    L = abs(b - a)
    t = np.union1d(np.linspace(0.0, 1.0, n0), _seed_parameters(a, b, poles))
    g = np.asarray(f(a + t * (b - a)), dtype=complex)
    for _ in range(200):
        if not np.all(np.isfinite(g)):
            raise ContourThroughPole(a + t[np.flatnonzero(~np.isfinite(g))[0]] * (b - a))
        mag = np.abs(g)
        scale = mag.max()
        if mag.min() <= tiny * max(scale, 1.0):
            raise EdgeHitsZero(a + t[int(np.argmin(mag))] * (b - a))
        ratio = g[1:] / g[:-1]
        seg = np.diff(t) * L
        mid = a + 0.5 * (t[1:] + t[:-1]) * (b - a)
        bad = (
            (np.abs(np.angle(ratio)) > max_phase)
            | (np.abs(np.log(np.abs(ratio))) > 1.0)
            | (seg > 0.5 * _pole_distance(mid, poles))
        )
        if not bad.any():
            return float(np.angle(ratio).sum())
        if seg[bad].min() < 1e-14 * max(L, 1.0):
            k = np.flatnonzero(bad)[np.argmin(seg[bad])]
            raise ContourThroughPole(mid[k])
        tn = 0.5 * (t[1:] + t[:-1])[bad]
        gn = np.asarray(f(a + tn * (b - a)), dtype=complex)
        order = np.argsort(np.concatenate([t, tn]), kind="stable")
        t = np.concatenate([t, tn])[order]
        g = np.concatenate([g, gn])[order]
    raise ContourThroughPole(a, "edge refinement did not terminate")


def rectangle_corners(rect):
    x0, x1, y0, y1 = rect
    return [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)]


def winding_number(f, rect, poles=None, max_phase=MAX_PHASE):
    """Winding number of ``f`` around the boundary of ``rect = (x0, x1, y0, y1)``."""
    c = rectangle_corners(rect)
    total = sum(edge_phase(f, c[i], c[(i + 1) % 4], poles, max_phase) for i in range(4))
    w = total / (2 * math.pi)
    k = round(w)
    if abs(w - k) > 0.05:
        raise ContourThroughPole(complex(0.5 * (rect[0] + rect[1]), 0.5 * (rect[2] + rect[3])),
                                 f"winding number {w:.3f} is not close to an integer")
    return int(k)


def _split(rect, r):
    x0, x1, y0, y1 = rect
    xm = x0 + r * (x1 - x0)
    ym = y0 + r * (y1 - y0)
    return [(x0, xm, y0, ym), (xm, x1, y0, ym), (x0, xm, ym, y1), (xm, x1, ym, y1)]


def _inside(z, rect, margin=0.0):
    x0, x1, y0, y1 = rect
    return (x0 - margin <= z.real <= x1 + margin) and (y0 - margin <= z.imag <= y1 + margin)


def polish(f, z0, h, ftol, reach=math.inf):
    """Secant iteration from ``z0``; returns the root or ``None``.

    Iterates that end farther than ``reach`` from ``z0`` count as failures.
    """
    def scalar(z):
        return complex(np.asarray(f(np.array([z])))[0])

    with warnings.catch_warnings(), np.errstate(all="ignore"):
        warnings.simplefilter("ignore", RuntimeWarning)
        try:
            z = optimize.newton(scalar, complex(z0), x1=complex(z0) + h, tol=1e-15, maxiter=100)
        except (RuntimeError, OverflowError, ZeroDivisionError, FloatingPointError):
            return None
        z = complex(z)
        if not cmath.isfinite(z) or abs(z - z0) > reach or abs(scalar(z)) > ftol:
            return None
    return z


def find_zeros(f, rect, poles=None, ftol=1e-10, min_size=1e-9, max_phase=MAX_PHASE):
    """All zeros of ``f`` inside ``rect``, each polished to ``|f| <= ftol``.

    ``f`` maps an array of complex points to an array of values.  Zeros of
    multiplicity ``m`` are repeated ``m`` times.  The result is sorted by
    ``(re, im)``.
    """
    poles = None if poles is None else np.asarray(poles, dtype=complex)
    try:
        w0 = winding_number(f, rect, poles, max_phase)
    except EdgeHitsZero as exc:
        raise NonConvergence(rect, f"zero on the outer contour near {exc.args[0]}") from exc
    if w0 < 0:
        raise ContourThroughPole(complex(rect[0], rect[2]), "negative winding: a pole is inside")
    found = []
    stack = [(rect, w0)]
    while stack:
        r, w = stack.pop()
        if w == 0:
            continue
        size = max(r[1] - r[0], r[3] - r[2])
        center = complex(0.5 * (r[0] + r[1]), 0.5 * (r[2] + r[3]))
        if w == 1 or size < min_size:
            z = polish(f, center, 1e-3 * size, ftol, reach=2 * size)
            if z is not None and _inside(z, r, 1e-12 * max(1.0, abs(z))):
                found.extend([z] * w)
                continue
            if size < min_size:
                raise NonConvergence(r)
        for ratio in _SPLITS:
            children = _split(r, ratio)
            try:
                ws = [winding_number(f, c, poles, max_phase) for c in children]
            except EdgeHitsZero:
                continue
            if sum(ws) == w and min(ws) >= 0:
                stack.extend(zip(children, ws))
                break
        else:
            # a multiple zero keeps landing on the cut lines
            z = polish(f, center, 1e-3 * size, ftol, reach=2 * size)
            if z is not None and _inside(z, r, 1e-12 * max(1.0, abs(z))):
                found.extend([z] * w)
                continue
            raise NonConvergence(r, "subdivision could not separate the zeros consistently")
    return sorted(found, key=lambda z: (z.real, z.imag))
