"""Limiting Gaussian experiment: a classical multinomial-covariance block plus one
thermal or pure quantum mode per off-diagonal coordinate.

Mode outcomes are represented in xi-coordinates, ``xi = sqrt(2) * (Re z, Im z)``.
The heterodyne outcome of a mode with quadrature variance ``s2`` is
``N(xi, (2*s2 + 1)/2 * I_2)``, sampled directly from that law.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotSPD
from .local import CenterState, LocalParams, loss_from_differences, mode_index
from .montecarlo import CHUNK, chunk_rng, chunks, mean_se


def sigma2_beta(beta) -> np.ndarray | float:
    """Quadrature variance coth(beta/2)/2, equal to 1/2 for beta = inf."""
    beta = np.asarray(beta, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.where(np.isinf(beta), 0.5, 0.5 / np.tanh(np.where(np.isinf(beta), 1.0, beta) / 2))
    return float(out) if out.ndim == 0 else out


def heterodyne_variance(sigma2) -> np.ndarray | float:
    """Per-coordinate variance (2*s2 + 1)/2 of the heterodyne outcome."""
    return (2 * np.asarray(sigma2) + 1) / 2


def z_to_xi(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    return np.sqrt(2.0) * np.stack([z.real, z.imag], axis=-1)


def xi_to_z(xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    return (xi[..., 0] + 1j * xi[..., 1]) / np.sqrt(2.0)


def multinomial_covariance(mu) -> np.ndarray:
    """diag(mu_1..mu_{r-1}) - mu mu^T on the first r-1 coordinates."""
    head = np.asarray(mu, dtype=float)[:-1]
    return np.diag(head) - np.outer(head, head)


@dataclass(frozen=True)
class GaussianLimitModel:
    dim: int
    rank: int
    mu: np.ndarray
    classical_cov: np.ndarray
    mode_index: tuple[tuple[int, int], ...]
    temperatures: np.ndarray
    variances: np.ndarray
    kappa: np.ndarray

    @property
    def n_modes(self) -> int:
        return len(self.mode_index)

    @property
    def outcome_variances(self) -> np.ndarray:
        return heterodyne_variance(self.variances)


def build_model(center: CenterState) -> GaussianLimitModel:
    full = center.full_spectrum
    modes = mode_index(center.dim, center.rank)
    with np.errstate(divide="ignore"):
        temps = np.array([np.log(full[i] / full[j]) if j < center.rank else np.inf for i, j in modes])
    return GaussianLimitModel(
        dim=center.dim,
        rank=center.rank,
        mu=np.array(center.mu),
        classical_cov=multinomial_covariance(center.mu),
        mode_index=modes,
        temperatures=temps,
        variances=np.atleast_1d(sigma2_beta(temps)) if modes else np.zeros(0),
        kappa=center.kappa,
    )


@dataclass(frozen=True)
class GaussianSample:
    """Outcome of one (or a batch of) Gaussian-limit measurements.

    ``classical`` has shape (..., r-1); ``modes`` has shape (..., k, 2) in xi-coordinates.
    """

    classical: np.ndarray
    modes: np.ndarray
    dim: int
    rank: int


def _draw(model: GaussianLimitModel, theta: LocalParams, rng: np.random.Generator, size: int | None):
    shape = () if size is None else (size,)
    r1 = model.rank - 1
    if r1:
        chol = np.linalg.cholesky(model.classical_cov)
        noise = rng.standard_normal(shape + (r1,))
        classical = theta.u + noise @ chol.T
    else:
        classical = np.zeros(shape + (0,))
    spread = np.sqrt(model.outcome_variances)[:, None]
    modes = z_to_xi(theta.z) + spread * rng.standard_normal(shape + (model.n_modes, 2))
    return classical, modes


def _check(model: GaussianLimitModel, theta: LocalParams) -> None:
    if theta.dim != model.dim or theta.rank != model.rank:
        raise DimensionMismatch("parameters do not match the model dimensions")


def sample_covariant(
    model: GaussianLimitModel, theta: LocalParams, seed, size: int | None = None
) -> GaussianSample:
    """Classical Gaussian draw plus heterodyne outcomes; ``size`` adds a batch axis."""
    _check(model, theta)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    classical, modes = _draw(model, theta, rng, size)
    return GaussianSample(classical=classical, modes=modes, dim=model.dim, rank=model.rank)


def covariant_estimate(sample: GaussianSample) -> LocalParams:
    """u_hat = classical outcome, z_hat decoded from the heterodyne outcome (single sample)."""
    return LocalParams.create(sample.classical, xi_to_z(sample.modes), sample.dim, sample.rank)


def minimax_constant(model: GaussianLimitModel) -> float:
    """sum_{i<=r} mu_i(1 - mu_i) + sum over modes of 2 mu_i."""
    classical = float(np.sum(model.mu * (1 - model.mu)))
    quantum = float(sum(2 * model.mu[i] for i, _ in model.mode_index))
    return classical + quantum


def covariant_risk_mc(
    model: GaussianLimitModel, theta: LocalParams, reps: int, seed: int, chunk: int = CHUNK
) -> tuple[float, float]:
    """Monte Carlo mean and standard error of the local loss of the covariant estimator.

    Draws are generated in fixed-size chunks seeded by ``(seed, chunk_index)``, so the
    result does not depend on how chunks are scheduled.
    """
    _check(model, theta)
    total = total_sq = 0.0
    for index, size in chunks(reps, chunk):
        rng = chunk_rng(seed, index)
        classical, modes = _draw(model, theta, rng, size)
        du = classical - theta.u
        dz = xi_to_z(modes) - theta.z
        losses = loss_from_differences(model.mu, model.kappa, du, dz)
        total += float(losses.sum())
        total_sq += float((losses**2).sum())
    return mean_se(total, total_sq, reps)


def shrink_factor(sigma2: float, sigma0_2: float) -> float:
    """c = 2 s0^2 / (2 s0^2 + 2 s^2 + 1); tends to 1 as the prior variance grows."""
    if np.isinf(sigma0_2):
        return 1.0
    return 2 * sigma0_2 / (2 * sigma0_2 + 2 * sigma2 + 1)


def bayes_shrinkage(sample_mode, sigma2: float, sigma0_2: float) -> np.ndarray:
    return shrink_factor(sigma2, sigma0_2) * np.asarray(sample_mode, dtype=float)


def bayes_risk_mode(sigma2_beta: float, sigma0_2: float) -> float:
    """Bayes risk 2 s0^2 (2 s^2 + 1) / (2 (s0^2 + s^2) + 1) for one mode in xi-coordinates."""
    return 2 * sigma0_2 * (2 * sigma2_beta + 1) / (2 * (sigma0_2 + sigma2_beta) + 1)


def classical_mode_bayes_risk(sigma2: float, sigma0_2: float) -> float:
    """Bayes risk when both coordinates are observed with variance s^2 and no extra noise."""
    return 2 * sigma0_2 * sigma2 / (sigma0_2 + sigma2)


def bayes_risk_mode_mc(
    sigma2: float, sigma0_2: float, reps: int, seed: int, chunk: int = CHUNK
) -> dict:
    """MC risk of the shrinkage rule under the prior xi ~ N(0, s0^2 I_2).

    Returns the shrunk risk with its standard error and the unshrunk risk for comparison.
    """
    c = shrink_factor(sigma2, sigma0_2)
    spread = np.sqrt(heterodyne_variance(sigma2))
    acc = np.zeros(4)
    for index, size in chunks(reps, chunk):
        rng = chunk_rng(seed, index)
        xi = np.sqrt(sigma0_2) * rng.standard_normal((size, 2))
        x = xi + spread * rng.standard_normal((size, 2))
        shrunk = np.sum((c * x - xi) ** 2, axis=1)
        raw = np.sum((x - xi) ** 2, axis=1)
        acc += [shrunk.sum(), (shrunk**2).sum(), raw.sum(), (raw**2).sum()]
    mean, se = mean_se(acc[0], acc[1], reps)
    raw_mean, raw_se = mean_se(acc[2], acc[3], reps)
    return {"risk": mean, "stderr": se, "unshrunk_risk": raw_mean, "unshrunk_stderr": raw_se}


def prior_tail_mc(
    sigma2: float, sigma0_2: float, radius: float, reps: int, seed: int, chunk: int = CHUNK
) -> tuple[float, float]:
    """MC estimate of E[loss * 1{|xi| > radius}] for the shrinkage rule: the prior mass
    lying outside a truncation ball, as used when a bounded prior replaces the Gaussian one."""
    c = shrink_factor(sigma2, sigma0_2)
    spread = np.sqrt(heterodyne_variance(sigma2))
    total = total_sq = 0.0
    for index, size in chunks(reps, chunk):
        rng = chunk_rng(seed, index)
        xi = np.sqrt(sigma0_2) * rng.standard_normal((size, 2))
        x = xi + spread * rng.standard_normal((size, 2))
        term = np.sum((c * x - xi) ** 2, axis=1) * (np.linalg.norm(xi, axis=1) > radius)
        total += float(term.sum())
        total_sq += float((term**2).sum())
    return mean_se(total, total_sq, reps)


def _require_spd(mat: np.ndarray, name: str) -> np.ndarray:
    mat = np.atleast_2d(np.asarray(mat, dtype=float))
    if mat.shape[0] != mat.shape[1] or np.max(np.abs(mat - mat.T), initial=0.0) > 1e-12:
        raise NotSPD(f"{name} is not symmetric")
    try:
        np.linalg.cholesky(mat)
    except np.linalg.LinAlgError as exc:
        raise NotSPD(f"{name} is not positive definite") from exc
    return mat


def classical_bayes_risk(cov1, cov2=None) -> float:
    """Tr((S1^-1 + S2^-1)^-1) for a Gaussian shift with noise S1 and prior S2.

    ``cov2=None`` is the flat-prior limit and returns Tr(S1).
    """
    s1 = _require_spd(cov1, "cov1")
    if cov2 is None:
        return float(np.trace(s1))
    s2 = _require_spd(cov2, "cov2")
    if s1.shape != s2.shape:
        raise DimensionMismatch("covariances differ in shape")
    precision = np.linalg.inv(s1) + np.linalg.inv(s2)
    return float(np.trace(np.linalg.inv(precision)))


def classical_bayes_mc(cov1, prior_var: float, reps: int, seed: int, chunk: int = CHUNK) -> tuple[float, float]:
    """MC risk of the posterior mean for Y ~ N(u, S1), u ~ N(0, prior_var I), squared error."""
    s1 = _require_spd(cov1, "cov1")
    k = s1.shape[0]
    s2 = prior_var * np.eye(k)
    gain = s2 @ np.linalg.inv(s1 + s2)
    chol = np.linalg.cholesky(s1)
    total = total_sq = 0.0
    for index, size in chunks(reps, chunk):
        rng = chunk_rng(seed, index)
        u = np.sqrt(prior_var) * rng.standard_normal((size, k))
        y = u + rng.standard_normal((size, k)) @ chol.T
        loss = np.sum((y @ gain.T - u) ** 2, axis=1)
        total += float(loss.sum())
        total_sq += float((loss**2).sum())
    return mean_se(total, total_sq, reps)


def bayes_risk_1d(tau, sigma, b: float) -> float:
    """Risk a0 * b / (a0 + b) of estimating tau^T theta under a N(0, b) prior along tau,
    with a0 = 1 / (tau^T S^-1 tau); ``b = inf`` returns a0."""
    tau = np.asarray(tau, dtype=float)
    s = _require_spd(sigma, "sigma")
    if s.shape[0] != tau.size:
        raise DimensionMismatch("tau and sigma sizes differ")
    a0 = 1.0 / float(tau @ np.linalg.solve(s, tau))
    if np.isinf(b):
        return a0
    return a0 * b / (a0 + b)
