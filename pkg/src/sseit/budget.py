"""Closed-form rescattering error budget for 2D and 3D arrays.

The imaged atom sits at the center of the array and emits isotropically;
surrounding atoms are approximated as shells at radii r_i = i L.  Each
spectator at distance r rescatters a resonant photon with probability
lambda^2 / (8 pi^2 r^2), suppressed by the EIT factor R, and gamma photons
are scattered per measurement.

Summing shells gives

    2D:  error(n) = lambda^2 R gamma / (4 pi L^2) * H_n   (harmonic number)
    3D:  error(n) = lambda^2 R gamma / (2 pi L^2) * n     (constant per shell)

Array sizes are reported as a square or cube of side round(2 n*), where n*
is the continuous shell count solving error(n*) = target (for 2D through
the large-n asymptote H(n) ~ ln n + gamma_EM, consistent with the shell
approximation itself).  With lambda = 852.35 nm, L = 5 um, gamma = 100 and
R = 8e-5 this convention yields 125 atoms (3D, 1e-4), 157,464 atoms (3D,
1e-3) and 62,500 atoms (2D, 1e-4).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

__all__ = [
    "BudgetInput",
    "BudgetResult",
    "resonant_cross_section",
    "rescatter_probability",
    "total_error",
    "max_array",
]

_EULER_GAMMA = 0.5772156649015329


@dataclass(frozen=True)
class BudgetInput:
    """Inputs of one error-budget evaluation.

    Exactly one of ``n_shells`` (for :func:`total_error`) or ``error_target``
    (for :func:`max_array`) must be given.
    """

    wavelength: float            # [m]
    lattice_spacing: float       # [m]
    photons: float               # scattered photons per measurement
    suppression: float           # EIT suppression factor R
    dimensionality: int          # 2 or 3
    n_shells: int | None = None
    error_target: float | None = None

    def __post_init__(self):
        if self.wavelength <= 0 or self.lattice_spacing <= 0:
            raise DomainError("wavelength and lattice spacing must be positive")
        if self.photons <= 0:
            raise DomainError("photon count must be positive")
        if self.suppression < 0:
            raise DomainError("suppression factor must be non-negative")
        if self.dimensionality not in (2, 3):
            raise DomainError("dimensionality must be 2 or 3")
        if (self.n_shells is None) == (self.error_target is None):
            raise DomainError("give exactly one of n_shells or error_target")
        if self.n_shells is not None and self.n_shells < 1:
            raise DomainError("n_shells must be at least 1")
        if self.error_target is not None and self.error_target <= 0:
            raise DomainError("error target must be positive")


@dataclass(frozen=True)
class BudgetResult:
    per_shell_errors: tuple[float, ...]
    total_error: float
    n_shells: int
    n_shells_continuous: float
    atoms: int


def resonant_cross_section(wavelength: float) -> float:
    """Resonant reabsorption cross section lambda^2 / (2 pi) [m^2]."""
    if wavelength <= 0:
        raise DomainError("wavelength must be positive")
    return wavelength**2 / (2 * math.pi)


def rescatter_probability(wavelength: float, distance: float) -> float:
    """Probability that an atom at ``distance`` rescatters one photon."""
    if distance <= 0:
        raise DomainError("distance must be positive")
    return resonant_cross_section(wavelength) / (4 * math.pi * distance**2)


def _per_shell_error(inp: BudgetInput, shell: int) -> float:
    base = inp.wavelength**2 * inp.suppression * inp.photons
    if inp.dimensionality == 2:
        return base / (4 * math.pi * shell * inp.lattice_spacing**2)
    return base / (2 * math.pi * inp.lattice_spacing**2)


def total_error(inp: BudgetInput) -> BudgetResult:
    """Total rescattering error summed over ``n_shells`` shells."""
    if inp.n_shells is None:
        raise DomainError("total_error needs an input carrying n_shells")
    shells = tuple(_per_shell_error(inp, i) for i in range(1, inp.n_shells + 1))
    return BudgetResult(
        per_shell_errors=shells,
        total_error=float(sum(shells)),
        n_shells=inp.n_shells,
        n_shells_continuous=float(inp.n_shells),
        atoms=round(2 * inp.n_shells) ** inp.dimensionality,
    )


def _continuous_shells(inp: BudgetInput) -> float:
    first = _per_shell_error(inp, 1)
    if first == 0.0:
        return math.inf
    if inp.dimensionality == 3:
        return inp.error_target / first
    # 2D: invert error(n) = first * H(n) via H(n) ~ ln n + gamma_EM
    return math.exp(inp.error_target / first - _EULER_GAMMA)


_SHELL_LIST_CAP = 10_000


def _harmonic(n: int) -> float:
    if n <= 0:
        return 0.0
    if n <= 100_000:
        return math.fsum(1.0 / i for i in range(1, n + 1))
    # asymptotic expansion; next term is O(1/n^4), far below 1e-12 relative
    return math.log(n) + _EULER_GAMMA + 1.0 / (2 * n) - 1.0 / (12 * n * n)


def _exact_total(inp: BudgetInput, n: int) -> float:
    first = _per_shell_error(inp, 1)
    if inp.dimensionality == 3:
        return first * n
    return first * _harmonic(n)


def max_array(inp: BudgetInput) -> BudgetResult:
    """Largest array whose total rescattering error stays within the target.

    ``n_shells`` in the result is the largest integer shell count whose
    exact summed error does not exceed the target; the atom count uses the
    continuous shell count n* as side = round(2 n*).  ``per_shell_errors``
    lists at most the first 10,000 shells.
    """
    if inp.error_target is None:
        raise DomainError("max_array needs an input carrying error_target")
    n_star = _continuous_shells(inp)
    if math.isinf(n_star):
        raise DomainError("error budget is unbounded for R = 0")

    n_int = max(0, math.floor(n_star))
    slack = 1 + 1e-12
    while n_int > 0 and _exact_total(inp, n_int) > inp.error_target * slack:
        n_int -= 1
    while _exact_total(inp, n_int + 1) <= inp.error_target * slack:
        n_int += 1

    shells = tuple(
        _per_shell_error(inp, i) for i in range(1, min(n_int, _SHELL_LIST_CAP) + 1)
    )
    return BudgetResult(
        per_shell_errors=shells,
        total_error=_exact_total(inp, n_int),
        n_shells=n_int,
        n_shells_continuous=n_star,
        atoms=round(2 * n_star) ** inp.dimensionality,
    )
