"""Experiment drivers: configuration, Monte Carlo campaigns and report assembly."""

from __future__ import annotations

import math
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from . import functional as fn
from .errors import NotLocal, QlanError
from .gaussian import (
    bayes_risk_mode,
    bayes_risk_mode_mc,
    build_model,
    classical_bayes_mc,
    classical_bayes_risk,
    classical_mode_bayes_risk,
    covariant_estimate,
    covariant_risk_mc,
    minimax_constant,
    prior_tail_mc,
    sample_covariant,
)
from .local import CenterState, extract_local_params, local_state, random_local_params
from .montecarlo import seed_sequence, summarize
from .reports import RiskReport, VerificationReport
from .schurweyl import verify_suite
from .states import random_hermitian, validate_state
from .tolerance import Tolerance
from .tomography import concentration_bound, make_two_design, preliminary_estimate

EXPERIMENTS = (
    "two-stage",
    "gaussian-risk",
    "bayes-risk",
    "functional",
    "tomo-concentration",
    "schurweyl-verify",
)

ExperimentName = Literal[
    "two-stage", "gaussian-risk", "bayes-risk", "functional", "tomo-concentration", "schurweyl-verify"
]

REFINE_STEPS = 50
GRID_BUCKETS = 4
UNBOUNDED_RADIUS = Tolerance(loc_radius=math.inf)


class ExperimentConfig(BaseModel):
    """Validated experiment configuration. Unknown keys are rejected."""

    model_config = ConfigDict(extra="forbid")

    experiment: ExperimentName
    d: int = Field(2, ge=1)
    r: int = Field(1, ge=1)
    mu: Optional[list[float]] = None
    n: int = Field(1000, ge=1)
    n_grid: Optional[list[int]] = None
    reps: int = Field(1000, ge=1)
    eps: float = Field(0.02, gt=0, lt=0.5)
    delta: float = Field(0.6, gt=0, lt=1)
    prior_vars: Optional[tuple[float, float]] = None
    seed: int = Field(0, ge=0)
    out: Optional[str] = None
    theta_radius: float = Field(1.0, ge=0)
    grid: bool = False
    workers: int = Field(1, ge=1)
    observable: Optional[list[list[float]]] = None
    n_max: int = Field(6, ge=1, le=8)

    @field_validator("mu")
    @classmethod
    def _spectrum(cls, mu):
        if mu is None:
            return mu
        arr = np.asarray(mu, dtype=float)
        if np.any(arr <= 0) or np.any(np.diff(arr) >= 0):
            raise ValueError("mu must be strictly decreasing and positive")
        if abs(arr.sum() - 1.0) > 1e-9:
            raise ValueError(f"mu must sum to 1, got {arr.sum()!r}")
        return mu

    @field_validator("prior_vars")
    @classmethod
    def _priors(cls, pv):
        if pv is not None and min(pv) <= 0:
            raise ValueError("prior variances must be positive")
        return pv

    @model_validator(mode="after")
    def _dims(self):
        if self.r > self.d:
            raise ValueError(f"rank r={self.r} exceeds dimension d={self.d}")
        if self.mu is not None and len(self.mu) != self.r:
            raise ValueError(f"mu has {len(self.mu)} entries but r={self.r}")
        if self.observable is not None:
            a = np.asarray(self.observable, dtype=float)
            if a.shape != (self.d, self.d) or not np.allclose(a, a.T):
                raise ValueError("observable must be a real symmetric d x d matrix")
        return self

    def spectrum(self) -> np.ndarray:
        if self.mu is None:
            raise ValueError(f"experiment {self.experiment!r} needs mu")
        return np.asarray(self.mu, dtype=float)

    def echo(self) -> dict:
        return self.model_dump(mode="json")


def _center(cfg: ExperimentConfig) -> CenterState:
    return CenterState.create(cfg.spectrum(), cfg.d)


def _parallel_map(func: Callable[[int], dict], count: int, workers: int) -> list[dict]:
    """Ordered map over replicate indices; every replicate owns its generator."""
    if workers <= 1:
        return [func(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, range(count)))


def _finish(report: RiskReport, start: float) -> RiskReport:
    report.elapsed_ms = (time.perf_counter() - start) * 1e3
    return report


# ---------------------------------------------------------------- two-stage


def _two_stage_replicate(cfg: ExperimentConfig, sigma: CenterState, n: int, design, index: int) -> dict:
    rng = np.random.default_rng(seed_sequence(cfg.seed, n, index))
    theta = random_local_params(cfg.d, cfg.r, rng, cfg.theta_radius)
    rho = local_state(sigma, theta, 1 / math.sqrt(n)).entries
    n1 = int(math.floor(n**cfg.delta))
    n2 = n - n1
    pre = preliminary_estimate(rho, n1, cfg.eps, rng, design)
    rank = pre.detected_rank
    status = "ok"
    try:
        center = CenterState.from_state(pre.estimate, rank=rank)
        scale = 1 / math.sqrt(n2)
        refine = REFINE_STEPS if rank == cfg.r else 0
        try:
            theta_true = extract_local_params(rho, center, scale, refine=refine)
        except NotLocal:
            # the refined read stays exact outside the first-order trust radius; keep going but flag it
            status = "beyond_radius"
            theta_true = extract_local_params(rho, center, scale, refine=refine, tol=UNBOUNDED_RADIUS)
        sample = sample_covariant(build_model(center), theta_true, rng)
        rho_hat = local_state(center, covariant_estimate(sample), scale).entries
    except QlanError as exc:
        status = type(exc).__name__
        rho_hat = pre.estimate.entries
    loss = n * float(np.linalg.norm(rho - rho_hat) ** 2)
    return {"loss": loss, "rank_ok": rank == cfg.r, "status": status, "theta_norm": theta.norm()}


def _two_stage_batch(cfg: ExperimentConfig, sigma: CenterState, n: int) -> list[dict]:
    design = make_two_design(cfg.d)
    return _parallel_map(lambda i: _two_stage_replicate(cfg, sigma, n, design, i), cfg.reps, cfg.workers)


def _grid_buckets(rows: list[dict]) -> list[dict]:
    norms = np.array([r["theta_norm"] for r in rows])
    losses = np.array([r["loss"] for r in rows])
    edges = np.quantile(norms, np.linspace(0, 1, GRID_BUCKETS + 1))
    out = []
    for k in range(GRID_BUCKETS):
        upper = norms <= edges[k + 1] if k == GRID_BUCKETS - 1 else norms < edges[k + 1]
        mask = (norms >= edges[k]) & upper
        if mask.sum() == 0:
            continue
        mean, se = summarize(losses[mask])
        out.append({"theta_norm_low": edges[k], "theta_norm_high": edges[k + 1],
                    "count": int(mask.sum()), "mean": mean, "stderr": se})
    return out


def run_two_stage(cfg: ExperimentConfig) -> RiskReport:
    """Split-sample estimator: thresholded tomography, then the covariant measurement of the
    limiting Gaussian experiment at the localized parameter (standing in for the i.i.d. copies)."""
    start = time.perf_counter()
    sigma = _center(cfg)
    theory = minimax_constant(build_model(sigma))
    rows = _two_stage_batch(cfg, sigma, cfg.n)
    losses = np.array([r["loss"] for r in rows])
    rank_ok = np.array([r["rank_ok"] for r in rows])
    mean, se = summarize(losses)
    n1 = int(math.floor(cfg.n**cfg.delta))
    fail_rate = float(1 - rank_ok.mean())
    extras = {
        "substitution": "second-stage copies replaced by the limiting Gaussian experiment",
        "n1": n1,
        "n2": cfg.n - n1,
        "split_inflation": cfg.n / (cfg.n - n1),
        "rank_failure_rate": fail_rate,
        "rank_failure_bound": concentration_bound(cfg.d, n1, cfg.eps),
        "rank_failure_penalty": 4 * fail_rate,
        "mean_loss_rank_ok": summarize(losses[rank_ok])[0] if rank_ok.any() else None,
        "status_counts": dict(Counter(r["status"] for r in rows)),
    }
    if cfg.n_grid:
        table = []
        for n in cfg.n_grid:
            grid_rows = _two_stage_batch(cfg, sigma, n)
            g_mean, g_se = summarize([r["loss"] for r in grid_rows])
            table.append({"n": n, "mean": g_mean, "stderr": g_se, "bias": g_mean - theory})
        extras["n_grid"] = table
    if cfg.grid:
        buckets = _grid_buckets(rows)
        extras["theta_buckets"] = buckets
        extras["worst_bucket_mean"] = max(b["mean"] for b in buckets)
    report = RiskReport("two-stage", cfg.echo(), mean, se, theory, cfg.reps, cfg.seed, extras=extras)
    return _finish(report, start)


# ---------------------------------------------------------------- Gaussian model


def run_gaussian_risk(cfg: ExperimentConfig) -> RiskReport:
    start = time.perf_counter()
    model = build_model(_center(cfg))
    rng = np.random.default_rng(seed_sequence(cfg.seed, 0))
    theta = random_local_params(cfg.d, cfg.r, rng, cfg.theta_radius)
    mean, se = covariant_risk_mc(model, theta, cfg.reps, (cfg.seed, 1))
    extras = {"theta": theta.to_vector(), "temperatures": model.temperatures, "variances": model.variances}
    report = RiskReport("gaussian-risk", cfg.echo(), mean, se, minimax_constant(model),
                        cfg.reps, cfg.seed, extras=extras)
    return _finish(report, start)


def run_bayes_risk(cfg: ExperimentConfig) -> RiskReport:
    """Bayes risk of per-mode shrinkage, weighted by the eigenvalue gaps as in the local loss."""
    start = time.perf_counter()
    center = _center(cfg)
    model = build_model(center)
    prior = cfg.prior_vars[0] if cfg.prior_vars else 1.0
    modes = []
    total = variance = theory = 0.0
    for k, ((i, j), s2, kappa) in enumerate(zip(model.mode_index, model.variances, model.kappa)):
        mc = bayes_risk_mode_mc(float(s2), prior, cfg.reps, (cfg.seed, k))
        closed = bayes_risk_mode(float(s2), prior)
        tail, tail_se = prior_tail_mc(float(s2), prior, 3 * math.sqrt(prior), cfg.reps, (cfg.seed, k, 1))
        modes.append({
            "mode": [i + 1, j + 1], "kind": "pure" if j >= center.rank else "thermal",
            "sigma2": s2, "mc": mc["risk"], "stderr": mc["stderr"], "closed_form": closed,
            "unshrunk": mc["unshrunk_risk"],
            "classical_pure_comparator": classical_mode_bayes_risk(0.5, prior),
            "tail_beyond_3sd": tail, "tail_stderr": tail_se,
        })
        total += kappa * mc["risk"]
        variance += (kappa * mc["stderr"]) ** 2
        theory += kappa * closed
    extras: dict = {"prior_variance": prior, "modes": modes}
    if center.rank > 1:
        cov = model.classical_cov
        extras["classical_block"] = {
            "closed_form": classical_bayes_risk(cov, prior * np.eye(cov.shape[0])),
            "mc": classical_bayes_mc(cov, prior, cfg.reps, (cfg.seed, 10_000)),
        }
    report = RiskReport("bayes-risk", cfg.echo(), total, math.sqrt(variance), theory,
                        cfg.reps, cfg.seed, extras=extras)
    return _finish(report, start)


# ---------------------------------------------------------------- functional


def _observable(cfg: ExperimentConfig) -> np.ndarray:
    if cfg.observable is not None:
        return np.asarray(cfg.observable, dtype=float)
    return random_hermitian(cfg.d, np.random.default_rng(seed_sequence(cfg.seed, 0)))


def run_functional(cfg: ExperimentConfig) -> RiskReport:
    start = time.perf_counter()
    problem = fn.functional_problem(_center(cfg), _observable(cfg))
    b = cfg.prior_vars[1] if cfg.prior_vars else float("inf")
    report = fn.functional_minimax_check(problem, cfg.n, cfg.reps, cfg.seed, b)
    report.config = cfg.echo()
    report.extras["observable"] = problem.a.entries
    return _finish(report, start)


# ---------------------------------------------------------------- tomography


def _tomo_replicate(cfg: ExperimentConfig, rho: np.ndarray, design, index: int) -> dict:
    rng = np.random.default_rng(seed_sequence(cfg.seed, index))
    res = preliminary_estimate(rho, cfg.n, cfg.eps, rng, design)
    hs2 = float(np.linalg.norm(rho - res.estimate.entries) ** 2)
    return {"hs2": hs2, "rank_ok": res.detected_rank == cfg.r}


def run_tomography_concentration(cfg: ExperimentConfig) -> RiskReport:
    """Empirical tail probability P[||rho - rho_tilde||^2 >= 25 r eps^2] against the bound."""
    start = time.perf_counter()
    mu = cfg.spectrum()
    rho = validate_state(np.diag(np.concatenate([mu, np.zeros(cfg.d - cfg.r)]))).entries
    design = make_two_design(cfg.d)
    rows = _parallel_map(lambda i: _tomo_replicate(cfg, rho, design, i), cfg.reps, cfg.workers)
    hs2 = np.array([r["hs2"] for r in rows])
    exceed = hs2 >= 25 * cfg.r * cfg.eps**2
    p = float(exceed.mean())
    se = math.sqrt(max(p * (1 - p), 0.0) / cfg.reps) if cfg.reps > 1 else float("nan")
    extras = {
        "rank_success_rate": float(np.mean([r["rank_ok"] for r in rows])),
        "mean_hs2": float(hs2.mean()),
        "threshold": 25 * cfg.r * cfg.eps**2,
        "design_residual": design.residual(),
        "min_nonzero_eigenvalue_over_6eps": float(mu[-1] / (6 * cfg.eps)),
    }
    report = RiskReport("tomo-concentration", cfg.echo(), p, se,
                        concentration_bound(cfg.d, cfg.n, cfg.eps), cfg.reps, cfg.seed, extras=extras)
    return _finish(report, start)


# ---------------------------------------------------------------- Schur-Weyl


def run_schurweyl_verify(cfg: ExperimentConfig) -> VerificationReport:
    report = verify_suite(cfg.d, cfg.n_max, cfg.seed)
    report.config = cfg.echo()
    return report


RUNNERS: dict[str, Callable[[ExperimentConfig], object]] = {
    "two-stage": run_two_stage,
    "gaussian-risk": run_gaussian_risk,
    "bayes-risk": run_bayes_risk,
    "functional": run_functional,
    "tomo-concentration": run_tomography_concentration,
    "schurweyl-verify": run_schurweyl_verify,
}


def run(cfg: ExperimentConfig):
    return RUNNERS[cfg.experiment](cfg)

