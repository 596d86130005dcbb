from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerance:
    """Numerical tolerance policy threaded through constructors.

    Attributes:
        tol: generic validation tolerance (hermiticity, trace, PSD).
        rank_cutoff: eigenvalues at or below this count as zero.
        gap_min: minimum spacing between distinct center eigenvalues.
        loc_radius: Hilbert-Schmidt radius inside which localization is trusted.
        design_tol: residual allowed in the 2-design identity.
    """

    tol: float = 1e-8
    rank_cutoff: float = 1e-9
    gap_min: float = 1e-6
    loc_radius: float = 0.1
    design_tol: float = 1e-12


DEFAULT_TOL = Tolerance()
