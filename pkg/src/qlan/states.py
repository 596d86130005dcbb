"""Finite-dimensional quantum primitives: states, observables, POVMs, distances and sampling."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    NegativeProbability,
    NotHermitian,
    NotPOVM,
    NotPSD,
    NotUnitTrace,
)
from .tolerance import DEFAULT_TOL, Tolerance


def _as_square(m, name: str = "matrix") -> np.ndarray:
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {arr.shape}")
    return arr


def _check_hermitian(arr: np.ndarray, tol: float) -> None:
    dev = np.max(np.abs(arr - arr.conj().T)) if arr.size else 0.0
    if dev > tol:
        raise NotHermitian(f"hermiticity violated by {dev:.3e}")


def eigh_desc(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Hermitian eigendecomposition with eigenvalues sorted descending.

    Each eigenvector's phase is fixed so that its largest-magnitude component
    is real and positive, which makes the output deterministic.
    """
    arr = np.asarray(m, dtype=complex)
    herm = (arr + arr.conj().T) / 2
    vals, vecs = np.linalg.eigh(herm)
    order = np.argsort(vals, kind="stable")[::-1]
    vals = vals[order]
    vecs = vecs[:, order]
    pivots = np.argmax(np.abs(vecs), axis=0)
    phases = vecs[pivots, np.arange(vecs.shape[1])]
    vecs = vecs * (np.abs(phases) / phases)[np.newaxis, :]
    return vals, vecs


@dataclass(frozen=True)
class DensityMatrix:
    """A validated density matrix. Build it with :func:`validate_state`."""

    entries: np.ndarray
    tol: float = DEFAULT_TOL.tol
    rank: int = 0

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def eigh(self) -> tuple[np.ndarray, np.ndarray]:
        return eigh_desc(self.entries)

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)


@dataclass(frozen=True)
class Observable:
    entries: np.ndarray
    label: str = ""

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)


@dataclass(frozen=True)
class Povm:
    elements: tuple[np.ndarray, ...]
    labels: tuple = field(default=())

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def __len__(self) -> int:
        return len(self.elements)


def validate_state(m, tol: float | Tolerance = DEFAULT_TOL) -> DensityMatrix:
    """Check hermiticity, unit trace and positivity, returning a frozen DensityMatrix."""
    policy = tol if isinstance(tol, Tolerance) else Tolerance(tol=float(tol))
    arr = _as_square(m, "state")
    _check_hermitian(arr, policy.tol)
    trace = np.trace(arr).real
    if abs(trace - 1.0) > policy.tol:
        raise NotUnitTrace(f"trace is {trace!r}")
    herm = (arr + arr.conj().T) / 2
    vals = np.linalg.eigvalsh(herm)
    if vals[0] < -policy.tol:
        raise NotPSD(float(vals[0]))
    rank = int(np.sum(vals > policy.rank_cutoff))
    herm.setflags(write=False)
    return DensityMatrix(entries=herm, tol=policy.tol, rank=rank)


def as_state(rho, tol: float | Tolerance = DEFAULT_TOL) -> DensityMatrix:
    return rho if isinstance(rho, DensityMatrix) else validate_state(rho, tol)


def make_observable(m, tol: float = DEFAULT_TOL.tol, label: str = "") -> Observable:
    arr = _as_square(m, "observable")
    _check_hermitian(arr, tol)
    herm = (arr + arr.conj().T) / 2
    herm.setflags(write=False)
    return Observable(entries=herm, label=label)


def _entries(x) -> np.ndarray:
    if isinstance(x, (DensityMatrix, Observable)):
        return x.entries
    return np.asarray(x, dtype=complex)


def make_povm(
    elements: Sequence, labels: Sequence | None = None, tol: float = DEFAULT_TOL.tol
) -> Povm:
    """Validate a list of PSD effects that sum to the identity."""
    mats = [_as_square(e, "POVM element") for e in elements]
    if not mats:
        raise NotPOVM("empty POVM")
    d = mats[0].shape[0]
    for e in mats:
        if e.shape != (d, d):
            raise DimensionMismatch("POVM elements have inconsistent shapes")
        _check_hermitian(e, tol)
        low = np.linalg.eigvalsh((e + e.conj().T) / 2)[0]
        if low < -tol:
            raise NotPSD(float(low))
    dev = np.max(np.abs(sum(mats) - np.eye(d)))
    if dev > tol:
        raise NotPOVM(f"elements sum to identity only within {dev:.3e}")
    labels = tuple(range(len(mats))) if labels is None else tuple(labels)
    if len(labels) != len(mats):
        raise DimensionMismatch("labels and elements differ in length")
    frozen = []
    for e in mats:
        e = e.copy()
        e.setflags(write=False)
        frozen.append(e)
    return Povm(elements=tuple(frozen), labels=labels)


def projective_povm(basis: np.ndarray) -> Povm:
    """POVM of rank-one projectors onto the columns of a unitary."""
    basis = np.asarray(basis, dtype=complex)
    return make_povm([np.outer(basis[:, k], basis[:, k].conj()) for k in range(basis.shape[1])])


def born_probabilities(rho, povm: Povm, tol: float = DEFAULT_TOL.tol) -> np.ndarray:
    """Outcome probabilities Tr(rho M_i); tiny negatives are clamped and renormalized."""
    state = _entries(rho)
    if state.shape[0] != povm.dim:
        raise DimensionMismatch(f"state dim {state.shape[0]} vs POVM dim {povm.dim}")
    stack = np.stack(povm.elements)
    # Tr(rho M) = sum_ab rho_ab M_ba
    probs = np.einsum("ab,kba->k", state, stack).real
    if probs.min() < -tol:
        raise NegativeProbability(f"probability {probs.min():.3e} below -tol")
    probs = np.clip(probs, 0.0, None)
    return probs / probs.sum()


def sample_outcomes(rho, povm: Povm, n: int, seed) -> np.ndarray:
    """Multinomial outcome counts for n independent measurements."""
    probs = born_probabilities(rho, povm)
    rng = np.random.default_rng(seed)
    return rng.multinomial(n, probs)


def expectation(rho, obs) -> float:
    return float(np.trace(_entries(rho) @ _entries(obs)).real)


def variance(rho, obs) -> float:
    a = _entries(obs)
    mean = expectation(rho, a)
    return max(expectation(rho, a @ a) - mean**2, 0.0)


def trace_distance(a, b) -> float:
    """Trace norm of the difference (no factor 1/2)."""
    diff = _entries(a) - _entries(b)
    return float(np.sum(np.abs(np.linalg.eigvalsh((diff + diff.conj().T) / 2))))


def hs_distance(a, b) -> float:
    return float(np.linalg.norm(_entries(a) - _entries(b)))


def pure_state(psi) -> DensityMatrix:
    vec = np.asarray(psi, dtype=complex)
    vec = vec / np.linalg.norm(vec)
    return validate_state(np.outer(vec, vec.conj()))


def random_state(d: int, rank: int, rng: np.random.Generator) -> DensityMatrix:
    """Random density matrix of the given rank (Ginibre construction)."""
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    m = g @ g.conj().T
    return validate_state(m / np.trace(m).real)


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (g + g.conj().T) / 2


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR with phase correction."""
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(g)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))
