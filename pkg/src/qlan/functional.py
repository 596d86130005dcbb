"""Estimating a linear functional Tr(A rho) and certifying its minimax constant."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFunctional, DimensionMismatch
from .gaussian import bayes_risk_1d, multinomial_covariance, sigma2_beta
from .local import CenterState, LocalParams, mode_index
from .montecarlo import CHUNK, chunk_rng, chunks, mean_se
from .reports import RiskReport
from .states import Observable, as_state, born_probabilities, eigh_desc, make_observable, projective_povm

DEGENERACY_FLOOR = 1e-12


@dataclass(frozen=True)
class FunctionalProblem:
    center: CenterState
    a: Observable
    x: float  # <A> at the center
    y: float  # variance of A at the center

    @property
    def a_local(self) -> np.ndarray:
        """A expressed in the center eigenbasis."""
        b = self.center.basis
        return b.conj().T @ self.a.entries @ b


def _as_observable(a) -> Observable:
    return a if isinstance(a, Observable) else make_observable(a)


def functional_value(rho, a) -> float:
    state = as_state(rho)
    return float(np.trace(state.entries @ _as_observable(a).entries).real)


def variance_sum_formula(center: CenterState, a_local: np.ndarray) -> tuple[float, float]:
    """Mean and variance of A at the center from the eigenbasis entries."""
    full = center.full_spectrum
    diag = np.diag(a_local).real
    x = float(np.sum(full * diag))
    y = float(np.sum(full * (diag - x) ** 2))
    for i, j in mode_index(center.dim, center.rank):
        y += abs(a_local[j, i]) ** 2 * (full[i] + full[j])
    return x, y


def functional_problem(center: CenterState, a) -> FunctionalProblem:
    obs = _as_observable(a)
    if obs.dim != center.dim:
        raise DimensionMismatch("observable and center dimensions differ")
    a_local = center.basis.conj().T @ obs.entries @ center.basis
    x, y = variance_sum_formula(center, a_local)
    return FunctionalProblem(center=center, a=obs, x=x, y=y)


def _outcome_law(rho, a) -> tuple[np.ndarray, np.ndarray]:
    obs = _as_observable(a)
    vals, vecs = eigh_desc(obs.entries)
    return vals, born_probabilities(as_state(rho), projective_povm(vecs))


def sample_mean_estimator(rho_true, a, n: int, seed) -> float:
    """Average of n outcomes of measuring A's eigenbasis."""
    vals, probs = _outcome_law(rho_true, a)
    counts = np.random.default_rng(seed).multinomial(n, probs)
    return float(counts @ vals / n)


def sample_mean_mse_mc(rho_true, a, n: int, reps: int, seed: int, chunk: int = CHUNK) -> tuple[float, float]:
    """MC mean and standard error of n * (mean estimate - Tr(A rho))^2."""
    vals, probs = _outcome_law(rho_true, a)
    target = functional_value(rho_true, a)
    total = total_sq = 0.0
    for index, size in chunks(reps, chunk):
        rng = chunk_rng(seed, index)
        counts = rng.multinomial(n, probs, size=size)
        scaled = n * (counts @ vals / n - target) ** 2
        total += float(scaled.sum())
        total_sq += float((scaled**2).sum())
    return mean_se(total, total_sq, reps)


def _require_nondegenerate(problem: FunctionalProblem) -> None:
    if problem.y <= DEGENERACY_FLOOR:
        raise DegenerateFunctional(f"variance {problem.y:.3e} at the center is numerically zero")


def _direction(problem: FunctionalProblem) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalue shifts for all r levels and the complex off-diagonal coordinates of the
    least favourable direction, before the sqrt-gap rescaling."""
    c = problem.center
    a = problem.a_local
    full = c.full_spectrum
    shifts = (np.diag(a).real[: c.rank] - problem.x) * c.mu / problem.y
    offdiag = np.array(
        [a[j, i] * (full[i] + full[j]) / (2 * problem.y) for i, j in mode_index(c.dim, c.rank)],
        dtype=complex,
    )
    return shifts, offdiag


def least_favorable_family(problem: FunctionalProblem) -> tuple[Observable, LocalParams]:
    """Direction H = (A~ rho0 + rho0 A~) / (2y) with A~ = A - x, and its local parameters.

    Tr(H) = 0 and Tr(A H) = 1, so moving along H changes the functional at unit rate.
    """
    _require_nondegenerate(problem)
    c = problem.center
    rho0 = c.state().entries
    centered = problem.a.entries - problem.x * np.eye(c.dim)
    hhat = (centered @ rho0 + rho0 @ centered) / (2 * problem.y)
    shifts, offdiag = _direction(problem)
    theta = LocalParams.create(shifts[:-1], offdiag / np.sqrt(c.kappa), c.dim, c.rank)
    return make_observable(hhat, label="least_favorable"), theta


def lower_bound_identity(problem: FunctionalProblem) -> tuple[np.ndarray, np.ndarray, float]:
    """tau, the block covariance Sigma and the quadratic form tau^T Sigma^-1 tau (equal to 1/y)."""
    _require_nondegenerate(problem)
    c = problem.center
    shifts, offdiag = _direction(problem)
    kappa = c.kappa
    mode_tau = np.sqrt(2 / kappa)[:, None] * np.stack([offdiag.real, offdiag.imag], axis=-1)
    tau = np.concatenate([shifts[:-1], mode_tau.reshape(-1)])
    full = c.full_spectrum
    with np.errstate(divide="ignore"):
        temps = np.array([np.log(full[i] / full[j]) if j < c.rank else np.inf
                          for i, j in mode_index(c.dim, c.rank)])
    mode_var = np.repeat(np.atleast_1d(sigma2_beta(temps)), 2) if kappa.size else np.zeros(0)
    k1 = c.rank - 1
    sigma = np.zeros((tau.size, tau.size))
    sigma[:k1, :k1] = multinomial_covariance(c.mu)
    sigma[k1:, k1:] = np.diag(mode_var)
    qform = float(tau @ np.linalg.solve(sigma, tau))
    return tau, sigma, qform


def functional_minimax_check(
    problem: FunctionalProblem, n: int, reps: int, seed: int, b: float = float("inf")
) -> RiskReport:
    """Compare the sample-mean estimator's scaled MSE with the variance target at the center."""
    rho0 = problem.center.state()
    mean, se = sample_mean_mse_mc(rho0, problem.a, n, reps, seed)
    tau, sigma, qform = lower_bound_identity(problem)
    return RiskReport(
        experiment="functional",
        config={"n": n, "reps": reps, "seed": seed, "b": b},
        mc_estimate=mean,
        mc_stderr=se,
        theory=problem.y,
        reps=reps,
        seed=seed,
        extras={
            "bayes_risk_1d": bayes_risk_1d(tau, sigma, b),
            "qform_times_variance": qform * problem.y,
            "functional_at_center": problem.x,
        },
    )
