"""Seeded potentials shared by the test modules."""

import functools
import warnings

import numpy as np

from qpencil import FundamentalSystem, random_potential, validate_potential
from qpencil.errors import DivergenceSuspected
from qpencil.spectral import assemble_spectral_data

M = 32
R = 6.0
SMALL_SEED = 2024
ROUNDTRIP_SEED = 7


@functools.lru_cache(maxsize=None)
def small_corpus(count=10):
    """``count`` potentials with N=3, |coef| <= 0.1, beta in [0.5, 2]."""
    rng = np.random.default_rng(SMALL_SEED)
    return tuple(random_potential(rng, 3, 0.1) for _ in range(count))


_CACHE = {}


def _cached(key, pot, make):
    # potentials hold arrays and are not hashable; key on identity and keep
    # the potential alive next to the value
    key = (id(pot),) + key
    if key not in _CACHE:
        _CACHE[key] = (pot, make())
    return _CACHE[key][1]


def system(pot, order=M):
    def make():
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DivergenceSuspected)
            return FundamentalSystem.build(pot, order)

    return _cached(("system", order), pot, make)


def spectral_data(pot, N=6, order=M, radius=R):
    return _cached(
        ("spectral", N, order, radius),
        pot,
        lambda: assemble_spectral_data(pot, order, radius, N, system=system(pot, order)),
    )


def generic(pot, N, tol=1e-6):
    sy = system(pot)
    d = np.concatenate([sy.f1_plus.diagonal()[:N], sy.f1_minus.diagonal()[:N]])
    return bool(np.all(np.abs(d) > tol))


@functools.lru_cache(maxsize=None)
def roundtrip_corpus(count=10):
    """``count`` potentials with N=4, |coef| <= 0.2 and nonvanishing diagonals."""
    rng = np.random.default_rng(ROUNDTRIP_SEED)
    out = []
    while len(out) < count:
        pot = random_potential(rng, 4, 0.2)
        if generic(pot, 4):
            out.append(pot)
    return tuple(out)


def q1():
    return validate_potential(1.0, [], [1.0])


def zero(beta=1.0):
    return validate_potential(beta, [], [])


def first_quadrant_case():
    """p = 0 potential with a first-quadrant eigenvalue (found by a scan of q=[i t])."""
    return validate_potential(1.5, [], [3j])
