"""Preliminary estimator: 2-design measurement, linear inversion, spectral thresholding."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import DimensionMismatch, LengthMismatch, UnsupportedDimension
from .states import DensityMatrix, Povm, as_state, born_probabilities, eigh_desc, make_povm, validate_state
from .tolerance import DEFAULT_TOL

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# Five commuting triples partitioning the 15 non-identity two-qubit Paulis.
_TWO_QUBIT_CLASSES = (
    ("IZ", "ZI", "ZZ"),
    ("IX", "XI", "XX"),
    ("IY", "YI", "YY"),
    ("XY", "YZ", "ZX"),
    ("XZ", "YX", "ZY"),
)


@dataclass(frozen=True)
class TwoDesign:
    dim: int
    vectors: np.ndarray  # shape (m, d), unit rows

    @property
    def size(self) -> int:
        return self.vectors.shape[0]

    def povm(self) -> Povm:
        scale = self.dim / self.size
        return make_povm([scale * np.outer(v, v.conj()) for v in self.vectors])

    def projectors(self) -> np.ndarray:
        return np.einsum("ma,mb->mab", self.vectors, self.vectors.conj())

    def residual(self) -> float:
        """Max-abs deviation of the averaged second tensor power from P_sym / C(d+1, 2)."""
        d = self.dim
        doubled = np.einsum("ma,mb->mab", self.vectors, self.vectors).reshape(self.size, d * d)
        moment = doubled.T @ doubled.conj() / self.size
        swap = np.zeros((d * d, d * d))
        for a in range(d):
            for b in range(d):
                swap[a * d + b, b * d + a] = 1.0
        target = (np.eye(d * d) + swap) / 2 / comb(d + 1, 2)
        return float(np.max(np.abs(moment - target)))


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % k for k in range(2, int(p**0.5) + 1))


def _prime_mubs(p: int) -> list[np.ndarray]:
    """Computational basis plus p Fourier-type bases (Wootters-Fields for odd p)."""
    bases = [np.eye(p, dtype=complex)]
    k = np.arange(p)
    if p == 2:
        s = 1 / np.sqrt(2)
        bases.append(np.array([[s, s], [s, -s]], dtype=complex))
        bases.append(np.array([[s, s], [1j * s, -1j * s]], dtype=complex))
        return bases
    omega = np.exp(2j * np.pi / p)
    for a in range(p):
        cols = [omega ** ((a * k * k + b * k) % p) / np.sqrt(p) for b in range(p)]
        bases.append(np.stack(cols, axis=1))
    return bases


def _two_qubit_mubs() -> list[np.ndarray]:
    bases = []
    for trio in _TWO_QUBIT_CLASSES:
        ops = [np.kron(_PAULI[name[0]], _PAULI[name[1]]) for name in trio]
        # eigenvalues a + 2b with a, b in {+1, -1} are distinct
        _, vecs = np.linalg.eigh(ops[0] + 2 * ops[1])
        bases.append(vecs)
    return bases


def make_two_design(d: int) -> TwoDesign:
    """Complete set of mutually unbiased bases for prime d or d = 4."""
    if _is_prime(d):
        bases = _prime_mubs(d)
    elif d == 4:
        bases = _two_qubit_mubs()
    else:
        raise UnsupportedDimension(f"no 2-design construction for d={d}")
    vectors = np.concatenate([b.T for b in bases], axis=0)
    vectors.setflags(write=False)
    return TwoDesign(dim=d, vectors=vectors)


def least_squares(design: TwoDesign, frequencies) -> np.ndarray:
    """Linear inversion (d+1) * sum_i f_i |v_i><v_i| - I."""
    freqs = np.asarray(frequencies, dtype=float)
    if freqs.shape != (design.size,):
        raise LengthMismatch(f"{freqs.size} frequencies for {design.size} outcomes")
    if abs(freqs.sum() - 1.0) > DEFAULT_TOL.tol:
        raise LengthMismatch(f"frequencies sum to {freqs.sum()!r}")
    d = design.dim
    weighted = np.einsum("m,ma,mb->ab", freqs, design.vectors, design.vectors.conj())
    return (d + 1) * weighted - np.eye(d)


@dataclass(frozen=True)
class ThresholdResult:
    estimate: DensityMatrix
    detected_rank: int
    eigen_trace: tuple[np.ndarray, ...]
    eigenvectors: np.ndarray


def spectral_threshold(lhat, eps: float) -> ThresholdResult:
    """Zero eigenvalues at or below 2*eps from the bottom up, spreading their mass over the survivors.

    Eigenvectors of the input are kept fixed; only the spectrum changes.
    """
    if not 0 < eps < 0.5:
        raise ValueError(f"eps must lie in (0, 0.5), got {eps}")
    lhat = np.asarray(lhat, dtype=complex)
    d = lhat.shape[0]
    vals, vecs = eigh_desc(lhat)
    vals = vals.copy()
    trace = [vals.copy()]
    stop = d + 1
    for k in range(1, d + 1):
        last = d - k
        if vals[last] > 2 * eps:
            stop = k
            break
        mass = vals[last]
        vals[last] = 0.0
        if last > 0:
            vals[:last] += mass / last
        trace.append(vals.copy())
    rank = d - stop + 1
    estimate = validate_state((vecs * vals) @ vecs.conj().T)
    return ThresholdResult(
        estimate=estimate, detected_rank=rank, eigen_trace=tuple(trace), eigenvectors=vecs
    )


def estimate_from_frequencies(design: TwoDesign, frequencies, eps: float) -> ThresholdResult:
    return spectral_threshold(least_squares(design, frequencies), eps)


def preliminary_estimate(
    rho_true, n: int, eps: float, seed, design: TwoDesign | None = None
) -> ThresholdResult:
    """Measure n copies with the 2-design POVM, invert, then threshold."""
    rho = as_state(rho_true)
    design = design or make_two_design(rho.dim)
    if design.dim != rho.dim:
        raise DimensionMismatch("design and state dimensions differ")
    probs = born_probabilities(rho, design.povm())
    counts = np.random.default_rng(seed).multinomial(n, probs)
    return estimate_from_frequencies(design, counts / n, eps)


def concentration_bound(d: int, n: int, eps: float) -> float:
    """Upper bound d * exp(-3 n eps^2 / (16 d)) on the thresholded estimator's failure probability."""
    return d * float(np.exp(-3.0 * n * eps**2 / (16.0 * d)))
