"""Open-system dynamics: jump operators, time evolution, steady rates, R.

Scattering rates count photons on the detection leg only (the intermediate
manifold linewidth times its population); upper-leg emission from the
excited manifold is tracked separately and excluded from the suppression
factor, since photon reabsorption concerns detection-wavelength photons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .atomdata import LevelRegistry, Manifold, StateLabel, dipole_element
from .constants import (
    DEFAULT_DURATION,
    DEFAULT_SAMPLE_EVERY,
    DEFAULT_SETTLE_WINDOW,
    POSITIVITY_TOL,
    TRACE_TOL,
)
from .errors import DomainError, IntegrationError
from .hamiltonian import HermitianOperator, SchemeConfig, build_rwa_hamiltonian
from .propagators import propagate

__all__ = [
    "DensityMatrix",
    "JumpOperator",
    "RateTrace",
    "collapse_operators",
    "excited_total_rate",
    "evolve",
    "steady_rate",
    "suppression_factor",
]


@dataclass(frozen=True)
class DensityMatrix:
    """Dense density matrix over the scheme basis."""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        object.__setattr__(self, "entries", entries)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DomainError("density matrix must be square")
        if np.linalg.norm(entries - entries.conj().T) > 1e-8 * max(
            1.0, np.linalg.norm(entries)
        ):
            raise DomainError("density matrix must be Hermitian")
        if abs(entries.trace().real - 1.0) > 1e-8 or abs(entries.trace().imag) > 1e-8:
            raise DomainError("density matrix must have unit trace")
        if np.linalg.eigvalsh(entries).min() < -1e-8:
            raise DomainError("density matrix must be positive semidefinite")

    @classmethod
    def pure(cls, index: int, dimension: int) -> "DensityMatrix":
        entries = np.zeros((dimension, dimension), dtype=complex)
        entries[index, index] = 1.0
        return cls(entries)

    @classmethod
    def from_state(cls, label: StateLabel, registry: LevelRegistry) -> "DensityMatrix":
        return cls.pure(registry.index(label), registry.dimension)


@dataclass(frozen=True)
class JumpOperator:
    """One spontaneous-emission jump operator (sqrt(rate) included)."""

    matrix: np.ndarray
    source: Manifold
    target: Manifold
    q: int


@dataclass(frozen=True)
class RateTrace:
    """Sampled scattering rates and per-state populations."""

    times: np.ndarray            # [s]
    rates: np.ndarray            # detection-leg photons/s
    upper_rates: np.ndarray      # excited-manifold photons/s
    populations: np.ndarray      # (n_times, dim)
    basis: tuple[StateLabel, ...]
    final_state: np.ndarray | None = None  # density matrix at the last sample

    def __post_init__(self):
        if np.any(np.diff(self.times) <= 0):
            raise DomainError("trace times must be strictly increasing")
        if np.any(self.rates < -1e-9):
            raise DomainError("scattering rates must be non-negative")

    @property
    def duration(self) -> float:
        return float(self.times[-1] - self.times[0])

    def population(self, label: StateLabel) -> np.ndarray:
        return self.populations[:, self.basis.index(label)]

    def final_populations(self) -> dict[StateLabel, float]:
        return {s: float(self.populations[-1, i]) for i, s in enumerate(self.basis)}


def excited_total_rate(registry: LevelRegistry) -> float:
    """Full tabulated decay rate of the excited manifold (1/tau_7S) [1/s]."""
    excited = registry.manifold_of_tier("excited")
    return registry.data(excited).natural_linewidth


def collapse_operators(registry: LevelRegistry) -> list[JumpOperator]:
    """Jump operators for every decay route present in the registry basis.

    One operator per (manifold pair, polarization q).  Within each decaying
    upper sublevel the branching amplitudes follow the dipole elements,
    normalized over the channels retained in the basis, and the total decay
    rate equals the manifold's full tabulated rate.  For 7S this rescales
    the partial rate into the single simulated 6P manifold so the 7S
    lifetime is reproduced; for truncated toy registries it keeps every
    short-lived state at its natural total linewidth.
    """
    n = registry.dimension
    basis = registry.basis
    present = {s.manifold for s in basis}
    operators: list[JumpOperator] = []

    for upper_manifold in sorted(present, key=lambda m: m.value):
        channels = registry.data(upper_manifold).decay_channels
        if not channels:
            continue
        total_rate = sum(ch.rate for ch in channels)
        targets = [ch.target for ch in channels if ch.target in present]
        if not targets:
            continue

        upper_states = [(i, s) for i, s in enumerate(basis) if s.manifold == upper_manifold]
        # per-upper-state normalization over the retained channels;
        # q = mF(upper) - mF(lower) labels the polarization throughout
        strength = {}
        for i_up, up in upper_states:
            total = 0.0
            for target in targets:
                for i_low, low in enumerate(basis):
                    if low.manifold != target:
                        continue
                    q = up.mF - low.mF
                    if abs(q) > 1:
                        continue
                    elem = dipole_element(low, up, q, registry)
                    total += elem * elem
            strength[i_up] = total

        for target in sorted(targets, key=lambda m: m.value):
            for q in (-1, 0, 1):
                matrix = np.zeros((n, n), dtype=complex)
                nonzero = False
                for i_up, up in upper_states:
                    if strength[i_up] == 0.0:
                        continue
                    for i_low, low in enumerate(basis):
                        if low.manifold != target or up.mF - low.mF != q:
                            continue
                        elem = dipole_element(low, up, q, registry)
                        if elem == 0.0:
                            continue
                        amp = math.sqrt(total_rate / strength[i_up]) * elem
                        matrix[i_low, i_up] = amp
                        nonzero = True
                if nonzero:
                    operators.append(
                        JumpOperator(matrix=matrix, source=upper_manifold,
                                     target=target, q=q)
                    )
    return operators


def _as_rho0(rho0, dimension: int) -> np.ndarray:
    if isinstance(rho0, DensityMatrix):
        return rho0.entries
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (dimension, dimension):
        raise DomainError("initial state shape does not match the basis")
    return rho0


def _manifold_population(populations: np.ndarray, registry: LevelRegistry,
                         tier: str) -> np.ndarray:
    try:
        manifold = registry.manifold_of_tier(tier)
    except DomainError:
        return np.zeros(populations.shape[0])
    idx = list(registry.indices_of(manifold))
    return populations[:, idx].sum(axis=1)


def evolve(rho0, hamiltonian: HermitianOperator, jumps, registry: LevelRegistry,
           duration: float, sample_every: float = DEFAULT_SAMPLE_EVERY,
           backend: str = "auto", validate: bool = True) -> RateTrace:
    """Integrate d rho/dt = -i[H, rho] + sum_k D[L_k] rho and sample rates.

    The instantaneous detection-photon scattering rate is the intermediate
    manifold linewidth times the intermediate population; the upper-leg
    (excited manifold) rate is recorded separately.
    """
    if duration <= 0:
        raise DomainError("duration must be positive")
    if sample_every <= 0 or sample_every > duration:
        raise DomainError("sample_every must lie in (0, duration]")
    n_steps = max(2, int(round(duration / sample_every)))
    times = np.linspace(0.0, duration, n_steps + 1)

    matrices = [j.matrix if isinstance(j, JumpOperator) else np.asarray(j, complex)
                for j in jumps]
    rho0 = _as_rho0(rho0, registry.dimension)
    rhos = propagate(hamiltonian.entries, matrices, rho0, times, backend=backend)

    traces = np.einsum("tii->t", rhos)
    populations = np.einsum("tii->ti", rhos).real
    if validate:
        worst_trace = float(np.abs(traces - 1.0).max())
        if worst_trace > TRACE_TOL:
            raise IntegrationError(
                f"trace deviated by {worst_trace:.3e} (tolerance {TRACE_TOL})",
                worst_error=worst_trace,
            )
        herm_dev = float(
            max(np.linalg.norm(r - r.conj().T) for r in rhos[:: max(1, len(rhos) // 16)])
        )
        if herm_dev > 1e-8:
            raise IntegrationError(
                f"hermiticity deviated by {herm_dev:.3e}", worst_error=herm_dev
            )
        eig_min = float(
            min(np.linalg.eigvalsh(r).min() for r in rhos[:: max(1, len(rhos) // 16)])
        )
        if eig_min < -POSITIVITY_TOL:
            raise IntegrationError(
                f"negative population {eig_min:.3e}", worst_error=-eig_min
            )

    try:
        gamma_i = registry.data(registry.manifold_of_tier("intermediate")).natural_linewidth
    except DomainError:
        gamma_i = 0.0
    try:
        gamma_e = excited_total_rate(registry)
    except DomainError:
        gamma_e = 0.0
    rates = gamma_i * np.clip(_manifold_population(populations, registry, "intermediate"), 0.0, None)
    upper = gamma_e * np.clip(_manifold_population(populations, registry, "excited"), 0.0, None)

    return RateTrace(times=times, rates=rates, upper_rates=upper,
                     populations=populations, basis=registry.basis,
                     final_state=rhos[-1])


def steady_rate(trace: RateTrace, settle_window: float = DEFAULT_SETTLE_WINDOW,
                mode: str = "mean") -> float:
    """Settled scattering rate of a trace [photons/s].

    ``mean`` averages the rate over the final ``settle_window``.
    ``exponential`` fits A exp(-t/T) to the post-transient rate (everything
    after the first ``settle_window``) and returns the fitted initial rate
    A, for open detection transitions whose rate decays as population is
    pumped into dark states.
    """
    if trace.duration < 2 * settle_window:
        raise DomainError("trace must cover at least twice the settle window")
    if mode == "mean":
        mask = trace.times >= trace.times[-1] - settle_window
        return float(trace.rates[mask].mean())
    if mode == "exponential":
        mask = trace.times >= trace.times[0] + settle_window
        t = trace.times[mask]
        r = trace.rates[mask]
        if np.any(r <= 0):
            raise DomainError("exponential fit requires strictly positive rates")
        slope, intercept = np.polyfit(t, np.log(r), 1)
        return float(np.exp(intercept))
    raise DomainError(f"unknown steady-rate mode {mode!r}")


@dataclass(frozen=True)
class SuppressionParts:
    """Diagnostic breakdown of one suppression-factor evaluation."""

    ratio: float
    protected_rate: float
    detected_rate: float
    protected_upper_rate: float
    protected_trace: RateTrace
    detected_trace: RateTrace


def suppression_parts(config: SchemeConfig, protection_intensity: float,
                      duration: float = DEFAULT_DURATION,
                      settle_window: float = DEFAULT_SETTLE_WINDOW,
                      sample_every: float = DEFAULT_SAMPLE_EVERY,
                      backend: str = "auto",
                      detected_trace: RateTrace | None = None) -> SuppressionParts:
    """R with its ingredients; both runs use the identical detection field."""
    if not config.protected_states:
        raise DomainError("config declares no protected state")
    if config.detected_state is None:
        raise DomainError("config declares no detected state")
    cfg = config.with_protection_intensity(protection_intensity)
    reg = cfg.registry
    h = build_rwa_hamiltonian(cfg)
    jumps = collapse_operators(reg)

    protected = evolve(
        DensityMatrix.from_state(cfg.protected_states[0], reg), h, jumps, reg,
        duration=duration, sample_every=sample_every, backend=backend,
    )
    if detected_trace is None:
        # toy ladders have no separate cycling transition: their normalizing
        # unprotected rate is the same state with the protection beam off
        den_cfg = cfg.with_protection_intensity(0.0) if cfg.normalize_unprotected else cfg
        den_h = build_rwa_hamiltonian(den_cfg) if cfg.normalize_unprotected else h
        detected_trace = evolve(
            DensityMatrix.from_state(cfg.detected_state, reg), den_h, jumps, reg,
            duration=duration, sample_every=sample_every, backend=backend,
        )
    detected_mode = "exponential" if cfg.open_detection else "mean"
    num = steady_rate(protected, settle_window, mode="mean")
    den = steady_rate(detected_trace, settle_window, mode=detected_mode)
    if den <= 0.0:
        raise IntegrationError("detected-state steady rate vanished")
    upper = float(protected.upper_rates[trail_mask(protected.times, settle_window)].mean())
    return SuppressionParts(
        ratio=num / den,
        protected_rate=num,
        detected_rate=den,
        protected_upper_rate=upper,
        protected_trace=protected,
        detected_trace=detected_trace,
    )


def trail_mask(times: np.ndarray, settle_window: float) -> np.ndarray:
    return times >= times[-1] - settle_window


def suppression_factor(config: SchemeConfig, protection_intensity: float,
                       duration: float = DEFAULT_DURATION,
                       settle_window: float = DEFAULT_SETTLE_WINDOW,
                       sample_every: float = DEFAULT_SAMPLE_EVERY,
                       backend: str = "auto") -> float:
    """Suppression factor R at one protection intensity.

    R is the settled scattering rate of the protected state under both
    beams, normalized to the settled rate of the detected state on its
    resonant detection transition.
    """
    return suppression_parts(
        config, protection_intensity, duration=duration,
        settle_window=settle_window, sample_every=sample_every, backend=backend,
    ).ratio
