"""Dressed-state analysis: eigensystems and protection maps.

The figure of merit is the non-ground population ``1 - max_i |<psi_i|t>|^2``
of the dressed state with the largest projection on a target ground
sublevel; for adiabatic preparation it is proportional to the scattering
rate of that state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .atomdata import StateLabel
from .errors import DomainError
from .hamiltonian import HermitianOperator, SchemeConfig, build_rwa_hamiltonian
from .parallel import ordered_map

__all__ = [
    "ProtectionMap",
    "eigensystem",
    "nonground_population",
    "dressed_rate_estimate",
    "protection_map",
]


@dataclass(frozen=True)
class ProtectionMap:
    """Non-ground population over a (detuning, intensity) grid.

    ``values[i, j]`` corresponds to ``intensity_axis[i]`` and
    ``detuning_axis[j]``.
    """

    detuning_axis: np.ndarray     # [rad/s]
    intensity_axis: np.ndarray    # [W/cm^2]
    values: np.ndarray
    target: StateLabel

    def __post_init__(self):
        det = np.asarray(self.detuning_axis, dtype=float)
        inten = np.asarray(self.intensity_axis, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "detuning_axis", det)
        object.__setattr__(self, "intensity_axis", inten)
        object.__setattr__(self, "values", vals)
        if np.any(np.diff(det) <= 0) or np.any(np.diff(inten) <= 0):
            raise DomainError("grid axes must be strictly increasing")
        if vals.shape != (inten.size, det.size):
            raise DomainError("values shape does not match the axes")
        if np.any(vals < -1e-12) or np.any(vals > 1 + 1e-12):
            raise DomainError("non-ground populations must lie in [0, 1]")

    def resonant_column(self) -> np.ndarray:
        """Values along the detuning closest to zero, one per intensity."""
        j = int(np.argmin(np.abs(self.detuning_axis)))
        return self.values[:, j]


def _as_matrix(operator) -> np.ndarray:
    if isinstance(operator, HermitianOperator):
        return operator.entries
    matrix = np.asarray(operator, dtype=complex)
    dev = np.linalg.norm(matrix - matrix.conj().T)
    if dev > 1e-12 * max(np.linalg.norm(matrix), 1.0):
        raise DomainError("eigensystem requires a Hermitian operator")
    return matrix


def eigensystem(operator) -> list[tuple[float, np.ndarray]]:
    """Complete orthonormal eigensystem, eigenvalues ascending [rad/s]."""
    matrix = _as_matrix(operator)
    values, vectors = np.linalg.eigh(matrix)
    return [(float(values[k]), vectors[:, k]) for k in range(values.size)]


def _max_overlap_index(vectors: np.ndarray, target_index: int) -> int:
    overlaps = np.abs(vectors[target_index, :]) ** 2
    return int(np.argmax(overlaps))


def nonground_population(operator: HermitianOperator, target: StateLabel) -> float:
    """1 - max_i |<psi_i|target>|^2 over the dressed states.

    At eigenvalue crossings the projections of two branches can tie within
    1e-9; taking the maximum projection then automatically selects the
    smaller non-ground population, which is the documented tie-break.
    """
    matrix = _as_matrix(operator)
    idx = operator.index(target) if isinstance(operator, HermitianOperator) else target
    _, vectors = np.linalg.eigh(matrix)
    best = np.max(np.abs(vectors[idx, :]) ** 2)
    return float(min(max(1.0 - best, 0.0), 1.0))


def dressed_rate_estimate(config: SchemeConfig, target: StateLabel) -> float:
    """Scattering-rate estimate from the dressed state tracking ``target``.

    Weak-probe steady scattering of the adiabatically followed state:
    Gamma_intermediate * P_intermediate + Gamma_excited * P_excited, with the
    populations taken from the max-projection eigenstate and the excited
    decay rescaled to the full 7S rate (each upper-leg decay feeds exactly
    one detection-leg photon through the cascade).
    """
    from .lindblad import excited_total_rate  # local import to avoid a cycle

    reg = config.registry
    h = build_rwa_hamiltonian(config)
    _, vectors = np.linalg.eigh(h.entries)
    k = _max_overlap_index(vectors, h.index(target))
    state = vectors[:, k]
    inter = reg.indices_of(config.intermediate_manifold)
    exc = reg.indices_of(config.excited_manifold)
    p_inter = float(np.sum(np.abs(state[list(inter)]) ** 2))
    p_exc = float(np.sum(np.abs(state[list(exc)]) ** 2))
    gamma_i = reg.data(config.intermediate_manifold).natural_linewidth
    gamma_e = excited_total_rate(reg)
    return gamma_i * p_inter + gamma_e * p_exc


def _map_point(task) -> float:
    config, detuning, intensity, target = task
    point = config.with_detection_detuning(detuning).with_protection_intensity(intensity)
    return nonground_population(build_rwa_hamiltonian(point), target)


def protection_map(config: SchemeConfig, detuning_grid, intensity_grid,
                   target: StateLabel, workers: int | None = None) -> ProtectionMap:
    """Evaluate the non-ground population over a (detuning, intensity) grid.

    Every grid point builds a fresh Hamiltonian; points are independent pure
    tasks, so the result does not depend on evaluation order or worker
    count.
    """
    detuning_grid = np.asarray(list(detuning_grid), dtype=float)
    intensity_grid = np.asarray(list(intensity_grid), dtype=float)
    if detuning_grid.size == 0 or intensity_grid.size == 0:
        raise DomainError("grids must be non-empty")
    if target not in config.registry:
        raise DomainError(f"target {target} not in registry basis")
    tasks = [
        (config, float(d), float(i), target)
        for i in intensity_grid
        for d in detuning_grid
    ]
    flat = ordered_map(_map_point, tasks, workers=workers)
    values = np.array(flat, dtype=float).reshape(intensity_grid.size, detuning_grid.size)
    return ProtectionMap(
        detuning_axis=detuning_grid,
        intensity_axis=intensity_grid,
        values=values,
        target=target,
    )


def default_detuning_grid(n: int = 121, half_span_hz: float = 300e6) -> np.ndarray:
    """Symmetric detection-detuning grid [rad/s], default +-300 MHz."""
    return 2 * np.pi * np.linspace(-half_span_hz, half_span_hz, n)


def default_intensity_grid(n: int = 61, low: float = 1e-1, high: float = 1e4) -> np.ndarray:
    """Log-spaced protection-intensity grid [W/cm^2], default 0.1 to 1e4."""
    return np.logspace(np.log10(low), np.log10(high), n)
