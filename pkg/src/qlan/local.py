"""Local coordinates around a rank-r state.

A center state is ``B diag(mu_1..mu_r, 0..0) B*``. A local parameter
``theta = (u, z)`` moves the first r-1 eigenvalues by ``scale * u`` (the last
one compensates so the trace stays 1) and rotates the eigenbasis by a unitary
generated by the off-diagonal coordinates ``z[i, j]`` with ``i < r`` and
``i < j < d`` (0-based). The rotation is normalized so that, to first order,
the entry ``(j, i)`` of the state in the center frame moves by
``scale * z[i, j] * sqrt(mu_i - mu_j)`` with ``mu_j = 0`` for ``j >= r``.

All matrices returned here are in the computational frame.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    DiagonalOutOfRange,
    DimensionMismatch,
    GapTooSmall,
    IndexMismatch,
    NotLocal,
    NotUnitTrace,
)
from .states import DensityMatrix, Observable, eigh_desc, validate_state
from .tolerance import DEFAULT_TOL, Tolerance


@lru_cache(maxsize=None)
def mode_index(d: int, r: int) -> tuple[tuple[int, int], ...]:
    """Ordered 0-based pairs (i, j) with i < r and i < j < d."""
    return tuple((i, j) for i in range(r) for j in range(i + 1, d))


@dataclass(frozen=True)
class CenterState:
    dim: int
    rank: int
    mu: np.ndarray
    basis: np.ndarray

    @classmethod
    def create(
        cls, mu, d: int, basis=None, tol: Tolerance = DEFAULT_TOL
    ) -> "CenterState":
        mu = np.asarray(mu, dtype=float)
        r = mu.size
        if r < 1 or r > d:
            raise DimensionMismatch(f"rank {r} incompatible with dimension {d}")
        if abs(mu.sum() - 1.0) > tol.tol:
            raise NotUnitTrace(f"eigenvalues sum to {mu.sum()!r}")
        gaps = np.append(-np.diff(mu), mu[-1])
        if np.min(gaps) < tol.gap_min:
            raise GapTooSmall(f"eigenvalue gap {np.min(gaps):.3e} below {tol.gap_min}")
        if basis is None:
            basis = np.eye(d, dtype=complex)
        basis = np.asarray(basis, dtype=complex)
        if basis.shape != (d, d):
            raise DimensionMismatch(f"basis shape {basis.shape} for dimension {d}")
        if np.max(np.abs(basis.conj().T @ basis - np.eye(d))) > 1e3 * tol.tol:
            raise DimensionMismatch("basis is not unitary")
        mu.setflags(write=False)
        basis.setflags(write=False)
        return cls(dim=d, rank=r, mu=mu, basis=basis)

    @classmethod
    def from_state(
        cls, rho, rank: int | None = None, tol: Tolerance = DEFAULT_TOL
    ) -> "CenterState":
        """Center from the top eigenpairs of a state (renormalized to unit trace)."""
        entries = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
        vals, vecs = eigh_desc(entries)
        if rank is None:
            rank = int(np.sum(vals > tol.rank_cutoff))
        mu = vals[:rank] / vals[:rank].sum()
        return cls.create(mu, entries.shape[0], vecs, tol)

    @property
    def kappa(self) -> np.ndarray:
        """Per-mode eigenvalue gaps mu_i - mu_j (mu_j = 0 beyond the rank)."""
        full = self.full_spectrum
        return np.array([full[i] - full[j] for i, j in mode_index(self.dim, self.rank)])

    @property
    def full_spectrum(self) -> np.ndarray:
        return np.concatenate([self.mu, np.zeros(self.dim - self.rank)])

    def state(self) -> DensityMatrix:
        m = self.basis @ np.diag(self.full_spectrum) @ self.basis.conj().T
        return validate_state(m)


@dataclass(frozen=True)
class LocalParams:
    """theta = (u, z): r-1 real eigenvalue shifts and complex rotation coordinates."""

    u: np.ndarray
    z: np.ndarray
    dim: int
    rank: int

    @classmethod
    def create(cls, u, z, d: int, r: int) -> "LocalParams":
        u = np.atleast_1d(np.asarray(u, dtype=float)).reshape(-1)
        z = np.atleast_1d(np.asarray(z, dtype=complex)).reshape(-1)
        if u.size != r - 1 or z.size != len(mode_index(d, r)):
            raise IndexMismatch(
                f"expected {r - 1} shifts and {len(mode_index(d, r))} modes, "
                f"got {u.size} and {z.size}"
            )
        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(z))):
            raise IndexMismatch("non-finite local parameters")
        return cls(u=u, z=z, dim=d, rank=r)

    @classmethod
    def zeros(cls, d: int, r: int) -> "LocalParams":
        return cls.create(np.zeros(r - 1), np.zeros(len(mode_index(d, r))), d, r)

    @classmethod
    def from_vector(cls, vec, d: int, r: int) -> "LocalParams":
        vec = np.asarray(vec, dtype=float)
        k = len(mode_index(d, r))
        return cls.create(vec[: r - 1], vec[r - 1 : r - 1 + k] + 1j * vec[r - 1 + k :], d, r)

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.u, self.z.real, self.z.imag])

    def norm(self) -> float:
        return float(np.linalg.norm(self.to_vector()))

    def u_full(self) -> np.ndarray:
        """Shifts for all r eigenvalues, the last one being minus the sum."""
        return np.append(self.u, -self.u.sum())

    def __add__(self, other: "LocalParams") -> "LocalParams":
        return LocalParams.create(self.u + other.u, self.z + other.z, self.dim, self.rank)

    def __sub__(self, other: "LocalParams") -> "LocalParams":
        return LocalParams.create(self.u - other.u, self.z - other.z, self.dim, self.rank)

    def __mul__(self, factor: float) -> "LocalParams":
        return LocalParams.create(self.u * factor, self.z * factor, self.dim, self.rank)

    __rmul__ = __mul__


def random_local_params(
    d: int, r: int, rng: np.random.Generator, radius: float = 1.0
) -> LocalParams:
    """Uniform draw from the ball of the given radius in the real coordinate vector."""
    dim = (r - 1) + 2 * len(mode_index(d, r))
    direction = rng.normal(size=dim)
    direction /= np.linalg.norm(direction)
    length = radius * rng.random() ** (1.0 / dim)
    return LocalParams.from_vector(direction * length, d, r)


def _check_compatible(center: CenterState, theta: LocalParams) -> None:
    if theta.dim != center.dim or theta.rank != center.rank:
        raise IndexMismatch(
            f"parameters for (d={theta.dim}, r={theta.rank}) "
            f"used with center (d={center.dim}, r={center.rank})"
        )


def su_generators(d: int) -> list[Observable]:
    """Standard su(d) basis: H_j then, for each j < k, the pair T_{j,k}, T_{k,j}."""
    gens = []
    for j in range(d - 1):
        h = np.zeros((d, d), dtype=complex)
        h[j, j], h[j + 1, j + 1] = 1, -1
        gens.append(Observable(h, label=f"H_{j + 1}"))
    for j in range(d):
        for k in range(j + 1, d):
            t_imag = np.zeros((d, d), dtype=complex)
            t_imag[j, k], t_imag[k, j] = 1j, -1j
            t_real = np.zeros((d, d), dtype=complex)
            t_real[j, k] = t_real[k, j] = 1
            gens.append(Observable(t_imag, label=f"T_{j + 1},{k + 1}"))
            gens.append(Observable(t_real, label=f"T_{k + 1},{j + 1}"))
    return gens


def _rotation_generator(center: CenterState, theta: LocalParams, scale: float) -> np.ndarray:
    """Hermitian exponent in the center frame."""
    d = center.dim
    gen = np.zeros((d, d), dtype=complex)
    kappa = center.kappa
    if np.any(kappa <= 0):
        raise GapTooSmall("non-positive eigenvalue gap")
    for (i, j), z, k in zip(mode_index(d, center.rank), theta.z, kappa):
        coeff = scale * z / np.sqrt(k)
        # Re(c) T_{i,j} + Im(c) T_{j,i}, with T_{i,j} = iE_ij - iE_ji, T_{j,i} = E_ij + E_ji
        gen[i, j] += 1j * coeff.real + coeff.imag
        gen[j, i] += -1j * coeff.real + coeff.imag
    return gen


def _expi(herm: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(herm)
    return (vecs * np.exp(1j * vals)) @ vecs.conj().T


def rotation(center: CenterState, theta: LocalParams, scale: float) -> np.ndarray:
    """The unitary moving the center eigenbasis, in the computational frame."""
    _check_compatible(center, theta)
    inner = _expi(_rotation_generator(center, theta, scale))
    return center.basis @ inner @ center.basis.conj().T


def _shifted_spectrum(center: CenterState, theta: LocalParams, scale: float) -> np.ndarray:
    diag = center.mu + scale * theta.u_full()
    if np.any(diag < 0) or np.any(diag > 1):
        raise DiagonalOutOfRange(f"shifted eigenvalues {diag} leave [0, 1]")
    return np.concatenate([diag, np.zeros(center.dim - center.rank)])


def local_state(center: CenterState, theta: LocalParams, scale: float) -> DensityMatrix:
    """rho = R diag(mu + scale*u, 0) R* with R the rotation, in the computational frame."""
    _check_compatible(center, theta)
    spectrum = _shifted_spectrum(center, theta, scale)
    inner = _expi(_rotation_generator(center, theta, scale))
    frame = center.basis @ inner
    return validate_state(frame @ np.diag(spectrum) @ frame.conj().T)


def first_order_state(center: CenterState, theta: LocalParams, scale: float) -> np.ndarray:
    """Linearization of :func:`local_state` in scale (Hermitian, unit trace)."""
    _check_compatible(center, theta)
    m = np.diag(_shifted_spectrum(center, theta, scale)).astype(complex)
    for (i, j), z, k in zip(mode_index(center.dim, center.rank), theta.z, center.kappa):
        m[j, i] = scale * z * np.sqrt(k)
        m[i, j] = np.conj(m[j, i])
    return center.basis @ m @ center.basis.conj().T


def _linear_read(center: CenterState, rotated: np.ndarray, scale: float) -> LocalParams:
    r = center.rank
    u = (np.diag(rotated)[: r - 1].real - center.mu[: r - 1]) / scale
    z = np.array(
        [rotated[j, i] / (scale * np.sqrt(k))
         for (i, j), k in zip(mode_index(center.dim, r), center.kappa)],
        dtype=complex,
    )
    return LocalParams.create(u, z, center.dim, r)


def extract_local_params(
    rho,
    center: CenterState,
    scale: float,
    refine: int = 0,
    tol: Tolerance = DEFAULT_TOL,
) -> LocalParams:
    """Read local coordinates of rho relative to the center.

    With ``refine=0`` this is the exact inverse of :func:`first_order_state`.
    A positive ``refine`` runs that many fixed-point corrections so that
    ``local_state(center, theta, scale)`` reproduces rho beyond first order
    (useful when rho is a rank-r state far enough out that the linear read
    has a visible second-order error).
    """
    entries = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    if entries.shape != (center.dim, center.dim):
        raise DimensionMismatch(f"state shape {entries.shape} for dimension {center.dim}")
    origin = center.basis @ np.diag(center.full_spectrum) @ center.basis.conj().T
    dist = float(np.linalg.norm(entries - origin))
    if dist > tol.loc_radius:
        raise NotLocal(f"HS distance {dist:.3e} exceeds radius {tol.loc_radius}")
    to_frame = center.basis.conj().T
    theta = _linear_read(center, to_frame @ entries @ center.basis, scale)
    resting = np.diag(center.full_spectrum).astype(complex)
    for _ in range(refine):
        current = local_state(center, theta, scale).entries
        residual = to_frame @ (entries - current) @ center.basis
        step = _linear_read(center, residual + resting, scale)
        theta = theta + step
        if step.norm() <= 1e-13 * max(1.0, theta.norm()):
            break
    return theta


def loss_from_differences(mu: np.ndarray, kappa: np.ndarray, du: np.ndarray, dz: np.ndarray) -> np.ndarray:
    """Vectorized local loss over the last axis of du (shifts) and dz (modes)."""
    classical = np.sum(du**2, axis=-1) + np.sum(du, axis=-1) ** 2
    quantum = 2.0 * np.sum(kappa * np.abs(dz) ** 2, axis=-1)
    return classical + quantum


def theta_loss(center: CenterState, theta1: LocalParams, theta2: LocalParams) -> float:
    _check_compatible(center, theta1)
    _check_compatible(center, theta2)
    diff = theta1 - theta2
    return float(loss_from_differences(center.mu, center.kappa, diff.u, diff.z))


def quadratic_loss_check(
    center: CenterState, theta1: LocalParams, theta2: LocalParams, n_list
) -> list[dict]:
    """Rows comparing n*||rho_1 - rho_2||^2 with the local loss for each n."""
    loss = theta_loss(center, theta1, theta2)
    rows = []
    for n in n_list:
        scale = 1.0 / np.sqrt(n)
        rho1 = local_state(center, theta1, scale)
        rho2 = local_state(center, theta2, scale)
        hs2 = float(np.linalg.norm(rho1.entries - rho2.entries) ** 2)
        scaled = n * hs2
        ratio = scaled / loss if loss > 0 else float("nan")
        rows.append({"n": int(n), "hs2": hs2, "loss_over_n": loss / n, "ratio": ratio})
    return rows
