"""Rotating-frame Hamiltonians for two-field ladder schemes.

The rotating frame uses one rotation per tier: ground states are untouched,
intermediate states rotate at the detection laser frequency, excited states
at the sum of the detection and protection frequencies.  With the
rotating-wave approximation (counter-rotating terms and cross-manifold
couplings of each beam dropped) the Hamiltonian is exactly time independent.

Operators are stored in angular-frequency units (entries are H / hbar in
rad/s).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
import scipy.constants as const

from .atomdata import LevelRegistry, Manifold, StateLabel, dipole_element, zeeman_shift
from .errors import ConfigurationError, DomainError
from .lightfield import FieldSpec, electric_field_amplitude
from .constants import HERMITICITY_TOL

__all__ = ["SchemeConfig", "HermitianOperator", "build_rwa_hamiltonian"]


@dataclass(frozen=True)
class HermitianOperator:
    """Dense Hermitian operator over a registry basis, in rad/s units."""

    entries: np.ndarray
    basis: tuple[StateLabel, ...]

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        object.__setattr__(self, "entries", entries)
        if entries.shape != (len(self.basis), len(self.basis)):
            raise DomainError("operator shape does not match basis size")
        scale = np.linalg.norm(entries)
        dev = np.linalg.norm(entries - entries.conj().T)
        if dev > HERMITICITY_TOL * max(scale, 1.0):
            raise DomainError(f"operator is not Hermitian (deviation {dev:.3e})")

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def index(self, label: StateLabel) -> int:
        try:
            return self.basis.index(label)
        except ValueError:
            raise DomainError(f"state {label} not in operator basis") from None


@dataclass(frozen=True)
class SchemeConfig:
    """Complete description of one state-selective EIT simulation.

    ``detection`` couples the ground to the intermediate manifold and
    ``protection`` the intermediate to the excited manifold (ladder
    configuration).  ``spectator_sink`` drops the detection-beam couplings of
    the ground hyperfine level that does not contain the detection reference
    state and zeroes its rotating-frame offsets; those couplings are detuned
    by the full ground hyperfine splitting (9.2 GHz) and contribute at the
    (Omega/2 Delta)^2 ~ 1e-9 level, while removing them lets the propagator
    take ~5x larger steps.  Populations still decay into that level.
    """

    registry: LevelRegistry
    detection: FieldSpec
    protection: FieldSpec
    magnetic_field: float = 0.0          # [T]
    protected_states: tuple[StateLabel, ...] = ()
    detected_state: StateLabel | None = None
    watch_states: tuple[StateLabel, ...] = ()
    open_detection: bool = False
    normalize_unprotected: bool = False
    spectator_sink: bool = False
    name: str = ""

    def __post_init__(self):
        reg = self.registry
        ground = reg.manifold_of_tier("ground")
        intermediate = reg.manifold_of_tier("intermediate")
        excited = reg.manifold_of_tier("excited")
        if (self.detection.lower_manifold, self.detection.upper_manifold) != (
            ground,
            intermediate,
        ):
            raise ConfigurationError(
                "detection beam must couple the ground and intermediate manifolds"
            )
        if (self.protection.lower_manifold, self.protection.upper_manifold) != (
            intermediate,
            excited,
        ):
            raise ConfigurationError(
                "protection beam must couple the intermediate and excited manifolds"
            )
        if self.detected_state is not None and self.detected_state.manifold != ground:
            raise ConfigurationError("detected state must be in the ground manifold")
        for state in (*self.protected_states, *self.watch_states):
            if state not in reg:
                raise ConfigurationError(f"state {state} not in registry basis")
        if self.detected_state is not None and self.detected_state not in reg:
            raise ConfigurationError(f"state {self.detected_state} not in registry basis")

    def replace(self, **kwargs) -> "SchemeConfig":
        return replace(self, **kwargs)

    def with_protection_intensity(self, intensity: float) -> "SchemeConfig":
        return self.replace(protection=self.protection.replace(intensity=intensity))

    def with_detection_detuning(self, detuning: float) -> "SchemeConfig":
        return self.replace(detection=self.detection.replace(detuning=detuning))

    @property
    def ground_manifold(self) -> Manifold:
        return self.registry.manifold_of_tier("ground")

    @property
    def intermediate_manifold(self) -> Manifold:
        return self.registry.manifold_of_tier("intermediate")

    @property
    def excited_manifold(self) -> Manifold:
        return self.registry.manifold_of_tier("excited")

    def far_ground_f_values(self) -> tuple[int, ...]:
        """Ground F levels not containing the detection reference state."""
        ref_f = self.detection.reference[0].F
        ground = self.ground_manifold
        return tuple(
            f for f in self.registry.data(ground).f_values if f != ref_f
        )


@lru_cache(maxsize=256)
def _coupling_table(registry: LevelRegistry, lower_manifold: Manifold,
                    upper_manifold: Manifold, amplitudes: tuple) -> tuple:
    """(i_lower, i_upper, d_q a_q / hbar) for every allowed coupling of a beam."""
    entries = []
    for i_low, low in enumerate(registry.basis):
        if low.manifold != lower_manifold:
            continue
        for i_up, up in enumerate(registry.basis):
            if up.manifold != upper_manifold:
                continue
            q = up.mF - low.mF
            if abs(q) > 1:
                continue
            a_q = amplitudes[q + 1]
            if a_q == 0.0:
                continue
            dip = dipole_element(low, up, q, registry)
            if dip == 0.0:
                continue
            entries.append((i_low, i_up, a_q * dip / const.hbar))
    return tuple(entries)


def _add_field_couplings(h: np.ndarray, config: SchemeConfig, beam: FieldSpec,
                         skip_ground_f: tuple[int, ...] = ()) -> None:
    table = _coupling_table(
        config.registry, beam.lower_manifold, beam.upper_manifold,
        beam.polarization.amplitudes,
    )
    e_field = electric_field_amplitude(beam.intensity)
    if e_field == 0.0:
        return
    basis = config.registry.basis
    for i_low, i_up, coeff in table:
        if skip_ground_f and basis[i_low].F in skip_ground_f:
            continue
        omega = e_field * coeff
        h[i_up, i_low] += 0.5 * omega
        h[i_low, i_up] += 0.5 * np.conj(omega)


def build_rwa_hamiltonian(config: SchemeConfig) -> HermitianOperator:
    """Time-independent rotating-frame Hamiltonian of a scheme [rad/s].

    Diagonal: ground states carry their hyperfine offset from the detection
    reference lower state; intermediate states carry their offset from the
    detection reference upper state minus the detection detuning; excited
    states additionally subtract the protection detuning, with offsets taken
    through the protection reference transition.  Zeeman shifts are added to
    every diagonal.  Off-diagonal: hbar Omega / 2 couplings from each beam
    between its manifold pair only.
    """
    reg = config.registry
    n = reg.dimension
    h = np.zeros((n, n), dtype=complex)

    det, prot = config.detection, config.protection
    ref_low_det, ref_up_det = det.reference
    ref_low_prot, ref_up_prot = prot.reference

    hf = reg.hyperfine_shift
    base_ground = hf(ref_low_det)
    base_inter = hf(ref_up_det) + det.detuning
    base_excited = (
        hf(ref_up_prot)
        + prot.detuning
        + det.detuning
        - (hf(ref_low_prot) - hf(ref_up_det))
    )

    sink_f = config.far_ground_f_values() if config.spectator_sink else ()
    b_field = config.magnetic_field
    for i, label in enumerate(reg.basis):
        tier = label.manifold.tier
        if tier == "ground":
            if label.F in sink_f:
                continue
            h[i, i] = hf(label) - base_ground
        elif tier == "intermediate":
            h[i, i] = hf(label) - base_inter
        else:
            h[i, i] = hf(label) - base_excited
        if b_field:
            h[i, i] += zeeman_shift(label, b_field, reg)

    _add_field_couplings(h, config, det, skip_ground_f=sink_f)
    _add_field_couplings(h, config, prot)

    return HermitianOperator(entries=h, basis=reg.basis)
