import math
import warnings

import numpy as np
from hypothesis import given, settings, strategies as st

from qpencil import FourierPotential, build_vtable, evaluate_potential, invert_recurrences, validate_potential
from qpencil.errors import DivergenceSuspected
from qpencil.solutions import FundamentalSystem, SolutionKind, wronskian

small = st.floats(-0.3, 0.3, allow_nan=False)
coef = st.builds(complex, small, small)
betas = st.floats(0.5, 2.0)


def potentials(max_n=3, with_p=True):
    n = st.integers(1, max_n)
    return n.flatmap(
        lambda N: st.builds(
            validate_potential,
            betas,
            st.lists(coef, min_size=N, max_size=N) if with_p else st.just([]),
            st.lists(coef, min_size=N, max_size=N),
        )
    )


def quiet_table(pot, M, sign):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DivergenceSuspected)
        return build_vtable(pot, M, sign)


@settings(max_examples=40, deadline=None)
@given(potentials(), st.floats(-20, 20))
def test_potential_is_periodic(pot, x):
    a = evaluate_potential(pot, x)
    b = evaluate_potential(pot, x + 2 * math.pi)
    assert abs(a[0] - b[0]) <= 1e-12 and abs(a[1] - b[1]) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(potentials())
def test_json_roundtrip(pot):
    back = FourierPotential.from_dict(pot.to_dict())
    assert back.beta == pot.beta
    np.testing.assert_array_equal(back.p, pot.p)
    np.testing.assert_array_equal(back.q, pot.q)


@settings(max_examples=30, deadline=None)
@given(potentials())
def test_recurrence_inversion_roundtrip(pot):
    N = max(pot.N, 1)
    vp, vm = quiet_table(pot, 12, "+"), quiet_table(pot, 12, "-")
    p, q = invert_recurrences(vp, vm, N)
    want_p = np.zeros(N, complex)
    want_q = np.zeros(N, complex)
    want_p[:pot.N], want_q[:pot.N] = pot.p, pot.q
    assert np.abs(p - want_p).max() <= 1e-9
    assert np.abs(q - want_q).max() <= 1e-9


@settings(max_examples=30, deadline=None)
@given(potentials(with_p=False))
def test_tables_independent_of_sign_without_p(pot):
    vp, vm = quiet_table(pot, 10, "+"), quiet_table(pot, 10, "-")
    np.testing.assert_array_equal(vp.double, vm.double)


@settings(max_examples=20, deadline=None)
@given(potentials(), st.floats(0.2, 1.5), st.floats(0.2, 1.0), st.floats(-2, 2))
def test_wronskians(pot, re, im, x):
    lam = complex(re, im)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DivergenceSuspected)
        sy = FundamentalSystem.build(pot, 32)
    s = {k: sy.evaluate(k, lam, x) for k in SolutionKind}
    w1 = wronskian(s[SolutionKind.f1_plus], s[SolutionKind.f1_minus])
    w2 = wronskian(s[SolutionKind.f2_plus], s[SolutionKind.f2_minus])
    assert abs(w1 - 2j * lam) <= 1e-8 * max(1.0, abs(w1))
    assert abs(w2 - 2 * lam * pot.beta) <= 1e-8 * max(1.0, abs(w2))
