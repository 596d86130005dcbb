"""Brute-force Schur-Weyl machinery on (C^d)^{otimes n} for small d and n.

Conventions:
  * Tableau entries are 1-based integers; tableau boxes are numbered row-major,
    and box k is tensor factor k.
  * A flat tensor index is little-endian: factor 0 is the lowest digit, so a flat
    vector reshaped with ``order="F"`` to ``(d,)*n`` has axis k for factor k.
  * Permutations act by permuting tensor factors. Row symmetrizers and column
    antisymmetrizers are applied lazily as index transpositions, never as dense
    d^n x d^n matrices (except in the explicit ``TensorOperator.matrix``).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import factorial, prod
from typing import Iterator, Sequence

import numpy as np

from .errors import DimensionMismatch, NotSemistandard, TooLarge
from .local import CenterState

DIM_MAX = 6561
N_MAX = 8


@dataclass(frozen=True)
class YoungDiagram:
    rows: tuple[int, ...]

    def __init__(self, rows: Sequence[int]):
        rows = tuple(int(x) for x in rows)
        if any(x < 0 for x in rows) or any(a < b for a, b in zip(rows, rows[1:])):
            raise ValueError(f"row lengths must be weakly decreasing and nonnegative: {rows}")
        object.__setattr__(self, "rows", rows)

    @property
    def parts(self) -> tuple[int, ...]:
        return tuple(x for x in self.rows if x > 0)

    @property
    def n(self) -> int:
        return sum(self.rows)

    @property
    def n_rows(self) -> int:
        return len(self.parts)

    def column_lengths(self) -> tuple[int, ...]:
        parts = self.parts
        return tuple(sum(1 for x in parts if x > c) for c in range(parts[0] if parts else 0))

    def row_positions(self) -> list[list[int]]:
        out, start = [], 0
        for length in self.parts:
            out.append(list(range(start, start + length)))
            start += length
        return out

    def column_positions(self) -> list[list[int]]:
        rows = self.row_positions()
        return [[rows[i][c] for i in range(len(rows)) if len(rows[i]) > c]
                for c in range(len(rows[0]) if rows else 0)]

    def padded(self, length: int) -> tuple[int, ...]:
        return self.parts + (0,) * (length - self.n_rows)


def _as_diagram(lam) -> YoungDiagram:
    return lam if isinstance(lam, YoungDiagram) else YoungDiagram(lam)


def partitions(n: int, max_rows: int | None = None) -> list[YoungDiagram]:
    """All partitions of n with at most max_rows parts, in reverse lexicographic order."""
    out: list[YoungDiagram] = []

    def rec(remaining: int, cap: int, acc: list[int]) -> None:
        if remaining == 0:
            out.append(YoungDiagram(acc))
            return
        if max_rows is not None and len(acc) == max_rows:
            return
        for part in range(min(remaining, cap), 0, -1):
            rec(remaining - part, part, acc + [part])

    rec(n, n, [])
    return out


@dataclass(frozen=True)
class MultiplicityMatrix:
    """Counts m[i, j] of entry j in row i (1-based, i < j); zero entries are omitted."""

    entries: tuple[tuple[tuple[int, int], int], ...] = ()

    @classmethod
    def from_dict(cls, counts: dict) -> "MultiplicityMatrix":
        items = []
        for (i, j), m in counts.items():
            if not i < j:
                raise ValueError(f"multiplicity index ({i}, {j}) must satisfy i < j")
            if m < 0:
                raise ValueError("multiplicities must be nonnegative")
            if m:
                items.append(((int(i), int(j)), int(m)))
        return cls(tuple(sorted(items)))

    @classmethod
    def from_tableau(cls, tableau: Sequence[Sequence[int]]) -> "MultiplicityMatrix":
        counts: dict = {}
        for i, row in enumerate(tableau, start=1):
            for entry in row:
                if entry != i:
                    counts[(i, entry)] = counts.get((i, entry), 0) + 1
        return cls.from_dict(counts)

    def get(self, i: int, j: int) -> int:
        return dict(self.entries).get((i, j), 0)

    def as_dict(self) -> dict:
        return dict(self.entries)

    @property
    def total(self) -> int:
        return sum(m for _, m in self.entries)

    def to_tableau(self, lam) -> tuple[tuple[int, ...], ...]:
        """Row i holds its own label i first, then the substituted j's in increasing order."""
        lam = _as_diagram(lam)
        rows = []
        for i, length in enumerate(lam.parts, start=1):
            subs = sorted((j, m) for (a, j), m in self.entries if a == i)
            moved = sum(m for _, m in subs)
            if moved > length:
                raise NotSemistandard(f"row {i} receives {moved} substitutions but has {length} boxes")
            row = [i] * (length - moved)
            for j, m in subs:
                row += [j] * m
            rows.append(tuple(row))
        if any(a > lam.n_rows for (a, _), _ in self.entries):
            raise NotSemistandard("multiplicity refers to a row outside the diagram")
        tableau = tuple(rows)
        if not is_semistandard(tableau):
            raise NotSemistandard(f"tableau {tableau} is not semistandard")
        return tableau

    def row_balance(self, n_rows: int) -> tuple[int, ...]:
        """For each row i: boxes moved out of row-label i minus label-i boxes placed in earlier rows."""
        counts = self.as_dict()
        out = []
        for i in range(1, n_rows + 1):
            outgoing = sum(m for (a, _), m in counts.items() if a == i)
            incoming = sum(m for (_, b), m in counts.items() if b == i)
            out.append(outgoing - incoming)
        return tuple(out)


def is_semistandard(tableau: Sequence[Sequence[int]]) -> bool:
    for row in tableau:
        if any(a > b for a, b in zip(row, row[1:])):
            return False
    for upper, lower in zip(tableau, tableau[1:]):
        if len(lower) > len(upper) or any(upper[c] >= lower[c] for c in range(len(lower))):
            return False
    return True


def ssyt_tableaux(lam, d: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Semistandard tableaux of shape lam with entries in 1..d."""
    lam = _as_diagram(lam)
    shape = lam.parts
    if not shape:
        yield ()
        return
    boxes = [(i, c) for i, length in enumerate(shape) for c in range(length)]
    grid = [[0] * length for length in shape]

    def rec(k: int):
        if k == len(boxes):
            yield tuple(tuple(row) for row in grid)
            return
        i, c = boxes[k]
        low = max(grid[i][c - 1] if c else 1, grid[i - 1][c] + 1 if i else 1)
        for v in range(low, d + 1):
            grid[i][c] = v
            yield from rec(k + 1)
        grid[i][c] = 0

    yield from rec(0)


def enumerate_ssyt(lam, d: int) -> list[MultiplicityMatrix]:
    lam = _as_diagram(lam)
    if lam.n > N_MAX:
        raise TooLarge(f"n={lam.n} exceeds {N_MAX}")
    return [MultiplicityMatrix.from_tableau(t) for t in ssyt_tableaux(lam, d)]


def weyl_dimension(lam, d: int) -> int:
    """Dimension of the unitary-group irrep: prod_{i<j<=d} (l_i - l_j + j - i) / (j - i)."""
    lam = _as_diagram(lam)
    if lam.n_rows > d:
        return 0
    rows = lam.padded(d)
    value = Fraction(1)
    for i in range(d):
        for j in range(i + 1, d):
            value *= Fraction(rows[i] - rows[j] + j - i, j - i)
    return int(value)


def dim_k(lam) -> int:
    """Dimension of the symmetric-group irrep:
    n! * prod_{l<k} (l_l - l_k + k - l) / prod_l (l_l + r - l)!  with r the number of rows."""
    lam = _as_diagram(lam)
    rows = lam.parts
    r = len(rows)
    num = Fraction(factorial(lam.n))
    for a in range(r):
        for b in range(a + 1, r):
            num *= rows[a] - rows[b] + b - a
    den = prod(factorial(rows[a] + r - (a + 1)) for a in range(r))
    return int(num / den)


def hook_length_dimension(lam) -> int:
    """Independent count of standard tableaux via the hook-length formula."""
    lam = _as_diagram(lam)
    cols = lam.column_lengths()
    hooks = 1
    for i, length in enumerate(lam.parts):
        for c in range(length):
            hooks *= (length - c - 1) + (cols[c] - i - 1) + 1
    return factorial(lam.n) // hooks


# ---------------------------------------------------------------- tensor operators


def _check_size(d: int, n: int) -> None:
    if n > N_MAX or d**n > DIM_MAX:
        raise TooLarge(f"d^n = {d}^{n} exceeds the brute-force limit")


def _to_tensor(vec: np.ndarray, d: int, n: int) -> np.ndarray:
    batch = vec.shape[1:]
    return vec.reshape((d,) * n + batch, order="F")


def _to_flat(tensor: np.ndarray, d: int, n: int) -> np.ndarray:
    batch = tensor.shape[n:]
    return tensor.reshape((d**n,) + batch, order="F")


def _group_sum(tensor: np.ndarray, positions: Sequence[int], sign: int) -> np.ndarray:
    """Apply sum over all permutations of the given factors (signed if sign = -1).

    Uses S_k = (e + sum_{j<k} (j k)) S_{k-1}, i.e. O(k^2) transpositions instead of k!.
    """
    out = tensor
    for k in range(1, len(positions)):
        acc = out.copy()
        for j in range(k):
            acc += sign * np.swapaxes(out, positions[j], positions[k])
        out = acc
    return out


@dataclass(frozen=True)
class TensorOperator:
    """Product of factor-permutation group sums, applied right to left in ``factors`` order.

    ``factors`` lists (sign, positions) pairs in the order they act on a vector.
    """

    d: int
    n: int
    factors: tuple[tuple[int, tuple[int, ...]], ...]

    @property
    def dim(self) -> int:
        return self.d**self.n

    def apply(self, vec) -> np.ndarray:
        vec = np.asarray(vec, dtype=complex)
        if vec.shape[0] != self.dim:
            raise DimensionMismatch(f"vector length {vec.shape[0]} vs operator dimension {self.dim}")
        tensor = _to_tensor(vec, self.d, self.n)
        for sign, positions in self.factors:
            tensor = _group_sum(tensor, positions, sign)
        return _to_flat(tensor, self.d, self.n)

    def __matmul__(self, other):
        if isinstance(other, TensorOperator):
            if (other.d, other.n) != (self.d, self.n):
                raise DimensionMismatch("operators act on different spaces")
            return TensorOperator(self.d, self.n, other.factors + self.factors)
        return self.apply(other)

    def matrix(self) -> np.ndarray:
        return self.apply(np.eye(self.dim, dtype=complex))


def projector(lam, kind: str, d: int) -> TensorOperator:
    """Row symmetrizer p, column antisymmetrizer q, or Young symmetrizer y = q p."""
    lam = _as_diagram(lam)
    _check_size(d, lam.n)
    rows = tuple((1, tuple(r)) for r in lam.row_positions() if len(r) > 1)
    cols = tuple((-1, tuple(c)) for c in lam.column_positions() if len(c) > 1)
    if kind == "rows":
        factors = rows
    elif kind == "columns":
        factors = cols
    elif kind == "young":
        factors = rows + cols
    else:
        raise ValueError(f"unknown projector kind {kind!r}")
    return TensorOperator(d, lam.n, factors)


def row_scale(lam) -> int:
    """p^2 = (prod_i l_i!) p."""
    return prod(factorial(x) for x in _as_diagram(lam).parts)


def column_scale(lam) -> int:
    """q^2 = (prod over columns of length!) q = prod_i (i!)^(l_i - l_{i+1}) q."""
    return prod(factorial(c) for c in _as_diagram(lam).column_lengths())


def zero_vector_norm(lam) -> float:
    """Closed-form norm of y f_0 where f_0 puts label i in every box of row i."""
    return float(row_scale(lam) * np.sqrt(column_scale(lam)))


def basis_index(filling: Sequence[int], d: int) -> int:
    """Flat little-endian index of f_{a_1} x ... x f_{a_n} for 1-based labels."""
    return int(sum((a - 1) * d**k for k, a in enumerate(filling)))


def filling_of(tableau: Sequence[Sequence[int]]) -> tuple[int, ...]:
    return tuple(x for row in tableau for x in row)


def basis_ket(filling: Sequence[int], d: int) -> np.ndarray:
    vec = np.zeros(d ** len(filling), dtype=complex)
    vec[basis_index(filling, d)] = 1.0
    return vec


def unnormalized_basis_vector(lam, m: MultiplicityMatrix, d: int) -> np.ndarray:
    lam = _as_diagram(lam)
    tableau = m.to_tableau(lam)
    if any(x > d for row in tableau for x in row):
        raise NotSemistandard(f"tableau entries exceed d={d}")
    return projector(lam, "young", d).apply(basis_ket(filling_of(tableau), d))


def basis_vector(lam, m: MultiplicityMatrix, d: int) -> np.ndarray:
    """|m_lambda> = y f_m / ||y f_m||."""
    vec = unnormalized_basis_vector(lam, m, d)
    return vec / np.linalg.norm(vec)


def product_state(u: np.ndarray, filling: Sequence[int]) -> np.ndarray:
    """U^{otimes n} f_b as a flat vector."""
    tensor = np.ones((), dtype=complex)
    for b in filling:
        # new factor becomes the highest digit, i.e. the last F-order axis
        tensor = np.multiply.outer(tensor, u[:, b - 1])
    n = len(filling)
    d = u.shape[0]
    return tensor.reshape(d**n, order="F")


def inner_product_determinant_check(lam, a: Sequence[int], b: Sequence[int], u) -> tuple[complex, complex]:
    """<f_a| q U^{otimes n} |f_b> computed directly and as a product of column minors."""
    lam = _as_diagram(lam)
    u = np.asarray(u, dtype=complex)
    d = u.shape[0]
    if len(a) != lam.n or len(b) != lam.n:
        raise DimensionMismatch("fillings must have one entry per box")
    vec = projector(lam, "columns", d).apply(product_state(u, b))
    lhs = complex(vec[basis_index(a, d)])
    rhs = 1.0 + 0j
    for col in lam.column_positions():
        rows_a = [a[p] - 1 for p in col]
        cols_b = [b[p] - 1 for p in col]
        rhs *= np.linalg.det(u[np.ix_(rows_a, cols_b)])
    return lhs, complex(rhs)


def _distinct_permutations(items: Sequence[int]) -> Iterator[tuple[int, ...]]:
    seq = sorted(items)
    while True:
        yield tuple(seq)
        k = len(seq) - 2
        while k >= 0 and seq[k] >= seq[k + 1]:
            k -= 1
        if k < 0:
            return
        j = len(seq) - 1
        while seq[j] <= seq[k]:
            j -= 1
        seq[k], seq[j] = seq[j], seq[k]
        seq[k + 1:] = reversed(seq[k + 1:])


def orbit(lam, m: MultiplicityMatrix) -> list[tuple[int, ...]]:
    """Fillings obtained from f_m by permuting entries within each row."""
    lam = _as_diagram(lam)
    tableau = m.to_tableau(lam)
    per_row = [list(_distinct_permutations(row)) for row in tableau]
    return [sum(choice, ()) for choice in itertools.product(*per_row)]


def _columns_of(lam: YoungDiagram, filling: Sequence[int]) -> list[tuple[int, ...]]:
    return [tuple(filling[p] for p in col) for col in lam.column_positions()]


def is_admissible(lam, filling: Sequence[int]) -> bool:
    """No column repeats an entry."""
    return all(len(set(col)) == len(col) for col in _columns_of(_as_diagram(lam), filling))


def substitution_gap(lam, m: MultiplicityMatrix, filling: Sequence[int]) -> int:
    """|m| minus the number of columns that differ from the reference column (1, 2, ..., len)."""
    cols = _columns_of(_as_diagram(lam), filling)
    moved = sum(1 for col in cols if col != tuple(range(1, len(col) + 1)))
    return m.total - moved


def zero_gap_fillings(lam, m: MultiplicityMatrix) -> list[tuple[int, ...]]:
    lam = _as_diagram(lam)
    if lam.n > N_MAX:
        raise TooLarge(f"n={lam.n} exceeds {N_MAX}")
    return [f for f in orbit(lam, m) if is_admissible(lam, f) and substitution_gap(lam, m, f) == 0]


def count_v0(lam, m: MultiplicityMatrix) -> int:
    return len(zero_gap_fillings(lam, m))


def formula_v0(lam, m: MultiplicityMatrix) -> float:
    """Leading-order count prod (l_i - l_j)^{m_ij} / m_ij! (rows beyond the diagram have length 0)."""
    lam = _as_diagram(lam)
    rows = lam.parts
    value = 1.0
    for (i, j), mult in m.entries:
        gap = rows[i - 1] - (rows[j - 1] if j <= len(rows) else 0)
        value *= gap**mult / factorial(mult)
    return value


def orbit_overlap(lam, m: MultiplicityMatrix, a: Sequence[int], d: int) -> complex:
    """<f_a| q sum_{b in orbit(m)} f_b>."""
    lam = _as_diagram(lam)
    total = np.zeros(d**lam.n, dtype=complex)
    for f in orbit(lam, m):
        total[basis_index(f, d)] += 1.0
    vec = projector(lam, "columns", d).apply(total)
    return complex(vec[basis_index(a, d)])


def quasi_orthogonality_zero(lam, m: MultiplicityMatrix, l: MultiplicityMatrix) -> bool:
    """True when the row balances differ for some row, which forces <m|l> = 0."""
    rows = _as_diagram(lam).n_rows
    return m.row_balance(rows) != l.row_balance(rows)


def explicit_overlap(lam, m: MultiplicityMatrix, l: MultiplicityMatrix, d: int) -> complex:
    return complex(np.vdot(basis_vector(lam, m, d), basis_vector(lam, l, d)))


def content(tableau: Sequence[Sequence[int]], d: int) -> np.ndarray:
    counts = np.zeros(d, dtype=int)
    for row in tableau:
        for x in row:
            counts[x - 1] += 1
    return counts


def block_probabilities(center: CenterState, u, n: int) -> dict[tuple[int, ...], float]:
    """Weight of each Schur-Weyl block for the diagonal state mu + u / sqrt(n).

    p_lambda = s_lambda(spectrum) * dim K_lambda, with the Schur polynomial evaluated as a sum
    over semistandard tableaux with entries up to d. Entries above the rank carry weight 0,
    so diagrams with more rows than the rank get probability exactly 0.
    """
    if n > N_MAX:
        raise TooLarge(f"n={n} exceeds {N_MAX}")
    u = np.atleast_1d(np.asarray(getattr(u, "u", u), dtype=float))
    if u.size != center.rank - 1:
        raise DimensionMismatch(f"expected {center.rank - 1} eigenvalue shifts, got {u.size}")
    shifted = center.mu + np.append(u, -u.sum()) / np.sqrt(n)
    spectrum = np.concatenate([shifted, np.zeros(center.dim - center.rank)])
    out = {}
    for lam in partitions(n, center.dim):
        schur = sum(
            float(np.prod(spectrum ** content(t, center.dim))) for t in ssyt_tableaux(lam, center.dim)
        )
        out[lam.parts] = schur * dim_k(lam)
    return out


# ---------------------------------------------------------------- verification suite


def _relative(residual: float, scale: float) -> float:
    return residual / scale if scale > 0 else residual


def _random_column_filling(lam: YoungDiagram, d: int, rng: np.random.Generator) -> tuple[int, ...]:
    filling = [0] * lam.n
    for col in lam.column_positions():
        labels = rng.choice(np.arange(1, d + 1), size=len(col), replace=False)
        for p, v in zip(col, labels):
            filling[p] = int(v)
    return tuple(filling)


def _random_spectrum(rank: int, rng: np.random.Generator) -> np.ndarray:
    while True:
        mu = np.sort(rng.dirichlet(np.ones(rank)))[::-1]
        if rank == 1 or np.min(-np.diff(mu)) > 1e-3 and mu[-1] > 1e-3:
            return mu


def verify_suite(d_max: int, n_max: int, seed: int, n_det: int = 50, dense_limit: int = 243):
    """Run every brute-force identity for 2 <= d <= d_max and 1 <= n <= n_max.

    Exact identities are asserted with tight thresholds; the leading-order orbit count and
    the size of non-forced overlaps are recorded for inspection only (threshold inf).
    """
    import time

    from .reports import VerificationReport
    from .states import random_unitary

    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    report = VerificationReport(config={"d_max": d_max, "n_max": n_max, "seed": seed, "n_det": n_det})
    for d in range(2, d_max + 1):
        for n in range(1, n_max + 1):
            _check_size(d, n)
            shapes = partitions(n, d)
            total = sum(weyl_dimension(lam, d) * dim_k(lam) for lam in shapes)
            report.add("completeness", (d, n), abs(total - d**n), 0)
            for lam in shapes:
                _verify_diagram(report, lam, d, rng, dense_limit)
            for rank in range(1, d + 1):
                center = CenterState.create(_random_spectrum(rank, rng), d)
                shift = rng.uniform(-0.05, 0.05, size=rank - 1)
                probs = block_probabilities(center, shift, n)
                report.add("block_sum", (d, n, rank), abs(sum(probs.values()) - 1.0), 1e-10)
                excess = max((abs(p) for lam, p in probs.items() if len(lam) > rank), default=0.0)
                report.add("block_vanishing", (d, n, rank), excess, 0.0)
    for _ in range(n_det):
        d = int(rng.integers(2, d_max + 1))
        n = int(rng.integers(2, min(n_max, 5) + 1))
        shapes = partitions(n, d)
        lam = shapes[int(rng.integers(len(shapes)))]
        u = random_unitary(d, rng)
        a = _random_column_filling(lam, d, rng)
        b = _random_column_filling(lam, d, rng)
        lhs, rhs = inner_product_determinant_check(lam, a, b, u)
        report.add("determinant_identity", (d,) + lam.parts, abs(lhs - rhs), 1e-10)
    report.elapsed_ms = (time.perf_counter() - start) * 1e3
    return report


def _verify_diagram(report, lam: YoungDiagram, d: int, rng: np.random.Generator, dense_limit: int) -> None:
    shape = (d,) + lam.parts
    tableaux = list(ssyt_tableaux(lam, d))
    report.add("ssyt_count", shape, abs(len(tableaux) - weyl_dimension(lam, d)), 0)
    report.add("dim_k_hook", shape, abs(dim_k(lam) - hook_length_dimension(lam)), 0)

    probe = rng.normal(size=(d**lam.n, 2)) + 1j * rng.normal(size=(d**lam.n, 2))
    for kind, scale in (("rows", row_scale(lam)), ("columns", column_scale(lam))):
        op = projector(lam, kind, d)
        once = op.apply(probe)
        twice = op.apply(once)
        res = _relative(float(np.max(np.abs(twice - scale * once))), float(np.max(np.abs(scale * once))))
        report.add(f"{kind}_square", shape, res, 1e-12)

    zero = unnormalized_basis_vector(lam, MultiplicityMatrix(), d)
    expected = zero_vector_norm(lam)
    report.add("zero_vector_norm", shape, abs(np.linalg.norm(zero) - expected) / expected, 1e-12)

    if d**lam.n <= dense_limit:
        rank = np.linalg.matrix_rank(projector(lam, "young", d).matrix(), tol=1e-8)
        report.add("young_rank", shape, abs(rank - len(tableaux)), 0)

    spectrum = np.sort(rng.random(d))[::-1]
    diag_power = np.ones(1)
    for _ in range(lam.n):
        # little-endian: each new factor is a higher digit
        diag_power = np.kron(spectrum, diag_power)
    mults = [MultiplicityMatrix.from_tableau(t) for t in tableaux]
    vectors = []
    for m, t in zip(mults, tableaux):
        raw = unnormalized_basis_vector(lam, m, d)
        vec = raw / np.linalg.norm(raw)
        vectors.append(vec)
        report.add("basis_norm", shape, abs(np.linalg.norm(vec) - 1.0), 1e-12)
        eig = float(np.prod(spectrum ** content(t, d)))
        report.add("eigenvector", shape, float(np.max(np.abs(diag_power * vec - eig * vec))), 1e-12)

    for idx, m in enumerate(mults):
        for jdx in range(idx + 1, len(mults)):
            overlap = abs(np.vdot(vectors[idx], vectors[jdx]))
            if quasi_orthogonality_zero(lam, m, mults[jdx]):
                report.add("forced_zero_overlap", shape, overlap, 1e-12)
            else:
                report.add("unforced_overlap", shape, overlap, float("inf"),
                           detail=f"{m.as_dict()} vs {mults[jdx].as_dict()}")

    for m in mults:
        if m.total > 4:
            continue
        fills = zero_gap_fillings(lam, m)
        report.add("orbit_count_vs_leading_order", shape, abs(len(fills) - formula_v0(lam, m)),
                   float("inf"), detail=f"{m.as_dict()}: {len(fills)} vs {formula_v0(lam, m)}")
        for f in fills:
            report.add("orbit_overlap_unit", shape, abs(orbit_overlap(lam, m, f, d) - 1.0), 1e-12)
