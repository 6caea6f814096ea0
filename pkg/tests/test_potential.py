import math

import numpy as np
import pytest

from qpencil import FourierPotential, evaluate_potential, random_potential, validate_potential
from qpencil.errors import InvalidPotential, NonFiniteCoefficient, NonPositiveBeta


def test_zero_potential_is_valid():
    pot = validate_potential(1, [], [])
    assert pot.N == 0
    assert (pot.p_norm, pot.q_norm) == (0.0, 0.0)


@pytest.mark.parametrize("beta", [0, -1.0])
def test_nonpositive_beta(beta):
    with pytest.raises(NonPositiveBeta):
        validate_potential(beta, [], [])


@pytest.mark.parametrize("beta", [math.nan, math.inf, 1j, "x"])
def test_nonfinite_or_complex_beta(beta):
    with pytest.raises(NonFiniteCoefficient):
        validate_potential(beta, [], [])


@pytest.mark.parametrize("p,q", [([math.nan], []), ([], [1, math.inf]), ([complex(0, math.nan)], [])])
def test_nonfinite_coefficients(p, q):
    with pytest.raises(NonFiniteCoefficient):
        validate_potential(1.0, p, q)


def test_errors_are_value_errors():
    assert issubclass(NonPositiveBeta, InvalidPotential)
    assert issubclass(NonPositiveBeta, ValueError)


def test_norms():
    pot = validate_potential(1, [0.1], [0.2 + 0.1j])
    assert pot.p_norm == pytest.approx(0.1)
    assert pot.q_norm == pytest.approx(abs(0.2 + 0.1j))
    assert pot.q_norm == pytest.approx(0.2236, abs=1e-4)


def test_p_norm_is_weighted_by_index():
    pot = validate_potential(1, [0, 0.5], [])
    assert pot.p_norm == pytest.approx(1.0)


def test_trailing_zeros_are_trimmed_and_lengths_matched():
    pot = validate_potential(2.0, [1, 0, 0], [0, 0.5, 0, 0])
    assert pot.N == 2
    np.testing.assert_array_equal(pot.p, [1, 0])
    np.testing.assert_array_equal(pot.q, [0, 0.5])


def test_coefficients_are_read_only():
    pot = validate_potential(1, [1], [1])
    with pytest.raises(ValueError):
        pot.p[0] = 2


def test_evaluate_examples():
    assert evaluate_potential(validate_potential(1, [], []), 0.0) == (0, 0, 1.0)
    _, q, _ = evaluate_potential(validate_potential(1, [], [1]), math.pi)
    assert q == pytest.approx(-1.0, abs=1e-15)
    assert evaluate_potential(validate_potential(2, [0.3], [0.1j]), -1.0)[2] == -4.0


def test_rho_branches():
    pot = validate_potential(1.7, [], [])
    _, _, rho = evaluate_potential(pot, np.array([-1e-300, 0.0, 1e-300]))
    np.testing.assert_array_equal(rho, [-1.7 ** 2, 1.0, 1.0])


def test_evaluate_matches_direct_sum():
    pot = validate_potential(1, [0.1, 0.2j], [0.3, -0.1, 0.05])
    x = 0.37
    p, q, _ = evaluate_potential(pot, x)
    n = np.arange(1, 4)
    assert p == pytest.approx(np.sum(pot.p * np.exp(1j * n * x)))
    assert q == pytest.approx(np.sum(pot.q * np.exp(1j * n * x)))


def test_periodicity():
    rng = np.random.default_rng(1)
    pot = random_potential(rng, 5, 0.3)
    x = rng.uniform(-10, 10, 50)
    p0, q0, _ = evaluate_potential(pot, x)
    p1, q1, _ = evaluate_potential(pot, x + 2 * math.pi)
    assert np.abs(p1 - p0).max() <= 1e-12
    assert np.abs(q1 - q0).max() <= 1e-12


def test_json_roundtrip(tmp_path):
    pot = validate_potential(1.25, [0.1 + 0.2j], [0.3, 1e-17 - 2j])
    path = tmp_path / "pot.json"
    pot.save(path)
    back = FourierPotential.load(path)
    assert back.beta == pot.beta
    np.testing.assert_array_equal(back.p, pot.p)
    np.testing.assert_array_equal(back.q, pot.q)


@pytest.mark.parametrize("data", [{}, {"beta": 1, "q": [[1]]}, {"beta": 1, "p": "x"}])
def test_malformed_records(data):
    with pytest.raises(ValueError):
        FourierPotential.from_dict(data)


def test_random_potential_bounds():
    rng = np.random.default_rng(3)
    for _ in range(20):
        pot = random_potential(rng, 4, 0.2)
        assert pot.N == 4
        assert np.all(np.abs(pot.p) <= 0.2) and np.all(np.abs(pot.q) <= 0.2)
        assert 0.5 <= pot.beta <= 2.0
    assert not np.any(random_potential(rng, 3, 0.1, with_p=False).p)
