"""Classical light fields: polarization, intensity and Rabi frequencies."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import scipy.constants as const

from .atomdata import LevelRegistry, StateLabel, dipole_element
from .errors import DomainError

__all__ = [
    "Polarization",
    "FieldRole",
    "FieldSpec",
    "electric_field_amplitude",
    "rabi_frequency",
]


@dataclass(frozen=True)
class Polarization:
    """Complex amplitudes over the spherical components q = -1, 0, +1.

    Amplitudes are normalized so that sum |a_q|^2 = 1.  The fractional power
    in a wrong component q for a nominally q0-polarized beam is |a_q|^2.
    """

    amplitudes: tuple[complex, complex, complex]

    def __post_init__(self):
        norm = math.sqrt(sum(abs(a) ** 2 for a in self.amplitudes))
        if norm == 0.0:
            raise DomainError("polarization amplitudes cannot all vanish")
        object.__setattr__(
            self, "amplitudes", tuple(complex(a) / norm for a in self.amplitudes)
        )

    def component(self, q: int) -> complex:
        if q not in (-1, 0, 1):
            raise DomainError(f"q must be -1, 0 or +1, got {q!r}")
        return self.amplitudes[q + 1]

    def wrong_fraction(self, nominal_q: int) -> float:
        return 1.0 - abs(self.component(nominal_q)) ** 2

    @classmethod
    def sigma_plus(cls) -> "Polarization":
        return cls((0.0, 0.0, 1.0))

    @classmethod
    def sigma_minus(cls) -> "Polarization":
        return cls((1.0, 0.0, 0.0))

    @classmethod
    def pi(cls) -> "Polarization":
        return cls((0.0, 1.0, 0.0))

    @classmethod
    def mixture(cls, nominal_q: int, wrong_q: int, fraction: float) -> "Polarization":
        """Mostly-pure polarization with a power fraction in a wrong component."""
        if not 0.0 <= fraction <= 1.0:
            raise DomainError("wrong-polarization fraction must lie in [0, 1]")
        if nominal_q == wrong_q:
            raise DomainError("wrong component must differ from the nominal one")
        amps = [0.0, 0.0, 0.0]
        amps[nominal_q + 1] = math.sqrt(1.0 - fraction)
        amps[wrong_q + 1] = math.sqrt(fraction)
        return cls(tuple(amps))

    @classmethod
    def equal_sigma(cls) -> "Polarization":
        """50/50 sigma+ / sigma- mixture."""
        return cls((1.0, 0.0, 1.0))


class FieldRole(Enum):
    DETECTION = "detection"
    PROTECTION = "protection"


@dataclass(frozen=True)
class FieldSpec:
    """One classical beam coupling a lower manifold to an upper manifold.

    The laser frequency is the zero-field resonance of ``reference`` plus
    ``detuning``; magnetic-field shifts move the atomic levels, not the
    laser.
    """

    lower_manifold: object
    upper_manifold: object
    reference: tuple[StateLabel, StateLabel]
    detuning: float                      # [rad/s]
    intensity: float                     # [W/cm^2]
    polarization: Polarization
    role: FieldRole = FieldRole.DETECTION

    def __post_init__(self):
        if self.intensity < 0:
            raise DomainError("intensity must be non-negative")
        ref_low, ref_up = self.reference
        if ref_low.manifold != self.lower_manifold or ref_up.manifold != self.upper_manifold:
            raise DomainError(
                "reference transition states must belong to the declared manifolds"
            )

    def replace(self, **kwargs) -> "FieldSpec":
        from dataclasses import replace as _replace

        return _replace(self, **kwargs)


def electric_field_amplitude(intensity: float) -> float:
    """Peak electric field E = sqrt(2 I / (c eps0)) [V/m] for I in W/cm^2."""
    if intensity < 0:
        raise DomainError("intensity must be non-negative")
    intensity_si = intensity * 1e4  # W/cm^2 -> W/m^2
    return math.sqrt(2.0 * intensity_si / (const.c * const.epsilon_0))


def rabi_frequency(field: FieldSpec, lower: StateLabel, upper: StateLabel,
                   registry: LevelRegistry) -> complex:
    """Complex Rabi frequency Omega = E a_q <upper|d_q|lower> / hbar [rad/s].

    ``q = mF(upper) - mF(lower)``; returns 0 when |q| > 1 or the beam has no
    power in that component.  Raises for states outside the field's manifold
    pair.
    """
    if lower.manifold != field.lower_manifold or upper.manifold != field.upper_manifold:
        raise DomainError(
            f"states {lower}, {upper} are outside the field's manifold pair"
        )
    q = upper.mF - lower.mF
    if abs(q) > 1:
        return 0.0j
    amplitude = field.polarization.component(q)
    if amplitude == 0.0:
        return 0.0j
    dip = dipole_element(lower, upper, q, registry)
    if dip == 0.0:
        return 0.0j
    e_field = electric_field_amplitude(field.intensity)
    return amplitude * dip * e_field / const.hbar
