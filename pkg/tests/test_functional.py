import numpy as np
import pytest

from qlan.errors import DegenerateFunctional, DimensionMismatch
from qlan.functional import (
    functional_minimax_check,
    functional_problem,
    functional_value,
    least_favorable_family,
    lower_bound_identity,
    sample_mean_estimator,
    sample_mean_mse_mc,
)
from qlan.gaussian import bayes_risk_1d
from qlan.local import CenterState, local_state
from qlan.states import random_hermitian, random_unitary, variance


def random_problem(rng, d_max=4):
    d = int(rng.integers(2, d_max + 1))
    r = int(rng.integers(1, d + 1))
    base = np.arange(r, 0, -1, dtype=float) + rng.uniform(0, 0.5, r)
    mu = np.sort(base / base.sum())[::-1]
    center = CenterState.create(mu, d, basis=random_unitary(d, rng))
    return functional_problem(center, random_hermitian(d, rng))


CENTER3 = CenterState.create([0.5, 0.3, 0.2], 3)


def test_identity_is_degenerate():
    p = functional_problem(CENTER3, np.eye(3))
    assert p.x == pytest.approx(1.0)
    assert p.y == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(DegenerateFunctional):
        least_favorable_family(p)
    with pytest.raises(DegenerateFunctional):
        lower_bound_identity(p)


def test_diagonal_hand_value():
    p = functional_problem(CENTER3, np.diag([1.0, 2.0, 3.0]))
    assert p.x == pytest.approx(1.7)
    assert p.y == pytest.approx(0.61)


def test_eigenprojector():
    proj = np.zeros((3, 3))
    proj[0, 0] = 1
    p = functional_problem(CENTER3, proj)
    assert p.x == pytest.approx(0.5)
    assert p.y == pytest.approx(0.25)


def test_pure_off_diagonal():
    center = CenterState.create([1.0], 2)
    p = functional_problem(center, [[0, 1], [1, 0]])
    assert p.x == 0.0
    assert p.y == pytest.approx(1.0)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        functional_problem(CENTER3, np.eye(2))


def test_variance_matches_direct(rng):
    for _ in range(100):
        p = random_problem(rng)
        assert p.y == pytest.approx(variance(p.center.state(), p.a), abs=1e-12)
        assert p.x == pytest.approx(functional_value(p.center.state(), p.a), abs=1e-12)


def test_least_favorable_identities(rng):
    for _ in range(100):
        p = random_problem(rng)
        hhat, theta = least_favorable_family(p)
        assert abs(np.trace(hhat.entries)) <= 1e-12
        assert abs(np.trace(p.a.entries @ hhat.entries) - 1) <= 1e-12
        _, _, qform = lower_bound_identity(p)
        assert qform * p.y == pytest.approx(1.0, abs=1e-10)


def test_family_moves_functional_at_unit_rate(rng):
    for _ in range(20):
        p = random_problem(rng, d_max=3)
        _, theta = least_favorable_family(p)
        h = 1e-6
        moved = functional_value(local_state(p.center, theta, h), p.a)
        assert (moved - p.x) / h == pytest.approx(1.0, abs=1e-4)


@pytest.mark.parametrize("a", [np.diag([1.0, -1.0, 0.5]), np.array([[0, 1, 1j], [1, 0, 0], [-1j, 0, 0]])])
def test_block_restricted_qform(a):
    p = functional_problem(CENTER3, a)
    tau, sigma, qform = lower_bound_identity(p)
    assert qform * p.y == pytest.approx(1.0)
    if np.allclose(np.diag(np.diag(a)), a):
        assert np.allclose(tau[2:], 0)
    else:
        assert np.allclose(tau[:2], 0)


def test_bayes_one_dimensional(rng):
    for _ in range(20):
        p = random_problem(rng)
        tau, sigma, _ = lower_bound_identity(p)
        for b in (0.1, 1.0, 10.0):
            assert bayes_risk_1d(tau, sigma, b) * (1 + p.y / b) == pytest.approx(p.y)
        assert bayes_risk_1d(tau, sigma, np.inf) == pytest.approx(p.y)


def test_conditioning_stays_bounded(rng):
    for _ in range(50):
        p = random_problem(rng)
        tau, sigma, _ = lower_bound_identity(p)
        assert np.linalg.cond(sigma) < 1e6


def test_sample_mean_mse(rng):
    p = random_problem(rng, d_max=3)
    rho = p.center.state()
    mean, se = sample_mean_mse_mc(rho, p.a, 1000, 50_000, seed=5)
    assert abs(mean - p.y) <= 3 * se


def test_sample_mean_estimator_reproducible():
    a = np.diag([1.0, 2.0, 3.0])
    first = sample_mean_estimator(CENTER3.state(), a, 500, seed=3)
    assert first == sample_mean_estimator(CENTER3.state(), a, 500, seed=3)
    assert 1.0 <= first <= 3.0


def test_minimax_report():
    p = functional_problem(CENTER3, np.diag([1.0, 2.0, 3.0]))
    report = functional_minimax_check(p, n=1000, reps=20_000, seed=9, b=1.0)
    assert report.theory == pytest.approx(0.61)
    assert abs(report.mc_estimate - 0.61) <= 3 * report.mc_stderr
    assert report.extras["qform_times_variance"] == pytest.approx(1.0)
    assert report.extras["bayes_risk_1d"] == pytest.approx(0.61 / 1.61)
