"""Scheme description files: JSON serialization of SchemeConfig.

States are written as "manifold:F:mF" strings, polarization amplitudes as
[re, im] pairs over the spherical components (q = -1, 0, +1).  Presets cover
the shipped schemes, so hand-written files are only needed for variations.
"""

from __future__ import annotations

import json
from pathlib import Path

from .atomdata import Manifold, StateLabel, cesium_registry
from .errors import ConfigurationError
from .hamiltonian import SchemeConfig
from .lightfield import FieldRole, FieldSpec, Polarization
from .schemes import scheme1, scheme2, scheme3, toy_model

__all__ = ["scheme_to_dict", "scheme_from_dict", "load_scheme", "save_scheme",
           "PRESETS"]

PRESETS = {
    "scheme1": scheme1,
    "scheme2": scheme2,
    "scheme3": scheme3,
    "toy3": lambda: toy_model(3),
    "toy4": lambda: toy_model(4),
    "toy5": lambda: toy_model(5),
    "toy6": lambda: toy_model(6),
}


def _field_to_dict(field: FieldSpec) -> dict:
    return {
        "lower": field.lower_manifold.value,
        "upper": field.upper_manifold.value,
        "reference": [str(s) for s in field.reference],
        "detuning_rad_s": field.detuning,
        "intensity_W_cm2": field.intensity,
        "polarization": [[a.real, a.imag] for a in field.polarization.amplitudes],
        "role": field.role.value,
    }


def _field_from_dict(d: dict) -> FieldSpec:
    amps = tuple(complex(re, im) for re, im in d["polarization"])
    return FieldSpec(
        lower_manifold=Manifold.from_name(d["lower"]),
        upper_manifold=Manifold.from_name(d["upper"]),
        reference=tuple(StateLabel.parse(s) for s in d["reference"]),
        detuning=float(d["detuning_rad_s"]),
        intensity=float(d["intensity_W_cm2"]),
        polarization=Polarization(amps),
        role=FieldRole(d.get("role", "detection")),
    )


def scheme_to_dict(config: SchemeConfig) -> dict:
    full = cesium_registry(config.intermediate_manifold)
    truncated = config.registry.dimension != full.dimension
    return {
        "name": config.name,
        "intermediate": config.intermediate_manifold.value,
        "basis": [str(s) for s in config.registry.basis] if truncated else None,
        "detection": _field_to_dict(config.detection),
        "protection": _field_to_dict(config.protection),
        "magnetic_field_T": config.magnetic_field,
        "protected_states": [str(s) for s in config.protected_states],
        "detected_state": (
            str(config.detected_state) if config.detected_state else None
        ),
        "watch_states": [str(s) for s in config.watch_states],
        "open_detection": config.open_detection,
        "normalize_unprotected": config.normalize_unprotected,
        "spectator_sink": config.spectator_sink,
    }


def scheme_from_dict(data: dict) -> SchemeConfig:
    try:
        registry = cesium_registry(Manifold.from_name(data["intermediate"]))
        if data.get("basis"):
            registry = registry.subset(StateLabel.parse(s) for s in data["basis"])
        return SchemeConfig(
            registry=registry,
            detection=_field_from_dict(data["detection"]),
            protection=_field_from_dict(data["protection"]),
            magnetic_field=float(data.get("magnetic_field_T", 0.0)),
            protected_states=tuple(
                StateLabel.parse(s) for s in data.get("protected_states", [])
            ),
            detected_state=(
                StateLabel.parse(data["detected_state"])
                if data.get("detected_state") else None
            ),
            watch_states=tuple(
                StateLabel.parse(s) for s in data.get("watch_states", [])
            ),
            open_detection=bool(data.get("open_detection", False)),
            normalize_unprotected=bool(data.get("normalize_unprotected", False)),
            spectator_sink=bool(data.get("spectator_sink", False)),
            name=data.get("name", ""),
        )
    except KeyError as exc:
        raise ConfigurationError(f"scheme file missing field {exc}") from exc


def save_scheme(config: SchemeConfig, path) -> None:
    Path(path).write_text(json.dumps(scheme_to_dict(config), indent=2) + "\n")


def load_scheme(name_or_path: str) -> SchemeConfig:
    """Resolve a preset name or a scheme description file path."""
    if name_or_path in PRESETS:
        return PRESETS[name_or_path]()
    path = Path(name_or_path)
    if not path.exists():
        raise ConfigurationError(
            f"scheme {name_or_path!r} is neither a preset "
            f"({', '.join(sorted(PRESETS))}) nor an existing file"
        )
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"cannot parse scheme file {path}: {exc}") from exc
    return scheme_from_dict(data)
