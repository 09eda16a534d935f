"""Preset scheme builders: the three protection schemes and the toy ladders.

Scheme 1: D2 line, sigma+ detection on the |4,4> -> |5',5'> cycling
transition, pi protection on 5' -> 4''; every F=4 sublevel except |4,4> is
EIT protected.

Scheme 2: D1 line, sigma+ detection on the open |3,3> -> |4',4'> transition,
sigma+ protection on 4' -> 4''; the detected upper state |4',4'> escapes
protection because there is no mF = 5 level in F''=4.

Scheme 3: D1 line, pi detection on the open |4,4> -> |4',4'> transition with
the |4,0> clock state protected by the vanishing |4,0> -> |4',0'> matrix
element; sigma+ protection on 4' -> 4'' guards the remaining sublevels.

Toy ladders (3 to 6 levels) truncate the D2 registry to the sublevels that
explain the full map one feature at a time; couplings and splittings are the
physical ones, while spontaneous decay is redistributed over the retained
sublevels so every short-lived state keeps its natural total linewidth.
"""

from __future__ import annotations

from .atomdata import Manifold, StateLabel, cesium_registry
from .errors import DomainError
from .hamiltonian import SchemeConfig
from .lightfield import FieldRole, FieldSpec, Polarization

__all__ = ["scheme1", "scheme2", "scheme3", "toy_model",
           "DETECTION_INTENSITY", "DEFAULT_PROTECTION_INTENSITY"]

DETECTION_INTENSITY = 12.7e-6          # [W/cm^2], an order below saturation
DEFAULT_PROTECTION_INTENSITY = 1e3     # [W/cm^2], inside the saturated-R region


def _field(lower, upper, reference, polarization, intensity, role, detuning=0.0):
    return FieldSpec(
        lower_manifold=lower, upper_manifold=upper, reference=reference,
        detuning=detuning, intensity=intensity, polarization=polarization,
        role=role,
    )


def scheme1(protection_intensity: float = DEFAULT_PROTECTION_INTENSITY) -> SchemeConfig:
    """Cycling-transition scheme on the D2 line (64 states)."""
    reg = cesium_registry(Manifold.P6_32)
    s = StateLabel
    detection = _field(
        Manifold.S6, Manifold.P6_32,
        (s(Manifold.S6, 4, 4), s(Manifold.P6_32, 5, 5)),
        Polarization.sigma_plus(), DETECTION_INTENSITY, FieldRole.DETECTION,
    )
    protection = _field(
        Manifold.P6_32, Manifold.S7,
        (s(Manifold.P6_32, 5, 1), s(Manifold.S7, 4, 1)),
        Polarization.pi(), protection_intensity, FieldRole.PROTECTION,
    )
    return SchemeConfig(
        registry=reg, detection=detection, protection=protection,
        protected_states=(s(Manifold.S6, 4, 0),),
        detected_state=s(Manifold.S6, 4, 4),
        watch_states=(
            s(Manifold.S6, 3, 0), s(Manifold.S6, 3, 1), s(Manifold.S6, 3, 2),
            s(Manifold.S6, 4, 1), s(Manifold.S6, 4, 2),
        ),
        open_detection=False,
        name="scheme1",
    )


def scheme2(protection_intensity: float = DEFAULT_PROTECTION_INTENSITY) -> SchemeConfig:
    """Open-transition scheme on the D1 line (48 states)."""
    reg = cesium_registry(Manifold.P6_12)
    s = StateLabel
    detection = _field(
        Manifold.S6, Manifold.P6_12,
        (s(Manifold.S6, 3, 3), s(Manifold.P6_12, 4, 4)),
        Polarization.sigma_plus(), DETECTION_INTENSITY, FieldRole.DETECTION,
    )
    protection = _field(
        Manifold.P6_12, Manifold.S7,
        (s(Manifold.P6_12, 4, 1), s(Manifold.S7, 4, 2)),
        Polarization.sigma_plus(), protection_intensity, FieldRole.PROTECTION,
    )
    return SchemeConfig(
        registry=reg, detection=detection, protection=protection,
        protected_states=(s(Manifold.S6, 3, 0),),
        detected_state=s(Manifold.S6, 3, 3),
        watch_states=(
            s(Manifold.S6, 4, 3), s(Manifold.S6, 4, 4), s(Manifold.S6, 3, 2),
        ),
        open_detection=True,
        name="scheme2",
    )


def scheme3(protection_intensity: float = DEFAULT_PROTECTION_INTENSITY) -> SchemeConfig:
    """Forbidden-transition scheme on the D1 line (48 states)."""
    reg = cesium_registry(Manifold.P6_12)
    s = StateLabel
    detection = _field(
        Manifold.S6, Manifold.P6_12,
        (s(Manifold.S6, 4, 4), s(Manifold.P6_12, 4, 4)),
        Polarization.pi(), DETECTION_INTENSITY, FieldRole.DETECTION,
    )
    protection = _field(
        Manifold.P6_12, Manifold.S7,
        (s(Manifold.P6_12, 4, 0), s(Manifold.S7, 4, 1)),
        Polarization.sigma_plus(), protection_intensity, FieldRole.PROTECTION,
    )
    return SchemeConfig(
        registry=reg, detection=detection, protection=protection,
        protected_states=(s(Manifold.S6, 4, 0),),
        detected_state=s(Manifold.S6, 4, 4),
        watch_states=(s(Manifold.S6, 4, 3),),
        open_detection=True,
        name="scheme3",
    )


_TOY_STATES = {
    3: (
        (Manifold.S6, 4, 0),
        (Manifold.P6_32, 5, 1),
        (Manifold.S7, 4, 1),
    ),
    4: ((Manifold.P6_32, 4, 1),),
    5: ((Manifold.S7, 3, 1),),
    6: ((Manifold.P6_32, 3, 1),),
}


def toy_model(n_levels: int,
              protection_intensity: float = DEFAULT_PROTECTION_INTENSITY) -> SchemeConfig:
    """Truncated ladder with 3 to 6 levels around the |4,0> clock state.

    Levels are added in the order that isolates the features of the full
    map: |4',1'> (4-level, saturation), |3'',1''> (5-level, bright-state
    crossing), |3',1'> (6-level, both).  The toy has no separate cycling
    transition, so its normalizing unprotected rate is the same state's
    scattering with the protection beam off.
    """
    if n_levels not in (3, 4, 5, 6):
        raise DomainError(f"toy model has 3 to 6 levels, got {n_levels!r}")
    labels = []
    for n in range(3, n_levels + 1):
        labels.extend(StateLabel(*args) for args in _TOY_STATES[n])
    full = cesium_registry(Manifold.P6_32)
    reg = full.subset(labels)
    s = StateLabel
    g = s(Manifold.S6, 4, 0)
    i = s(Manifold.P6_32, 5, 1)
    e = s(Manifold.S7, 4, 1)
    detection = _field(
        Manifold.S6, Manifold.P6_32, (g, i),
        Polarization.sigma_plus(), DETECTION_INTENSITY, FieldRole.DETECTION,
    )
    protection = _field(
        Manifold.P6_32, Manifold.S7, (i, e),
        Polarization.pi(), protection_intensity, FieldRole.PROTECTION,
    )
    return SchemeConfig(
        registry=reg, detection=detection, protection=protection,
        protected_states=(g,), detected_state=g,
        open_detection=False, normalize_unprotected=True,
        name=f"toy{n_levels}",
    )
