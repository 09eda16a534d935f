"""Cesium level registry: manifolds, hyperfine structure, decay data, basis.

Physical constants live in ``data/cesium_133.json`` (one record per
manifold, energies in MHz, rates in MHz, wavelengths in nm, dipole elements
in atomic units, each value with its literature source) and are unit
converted to SI angular frequencies at load time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from importlib import resources
from typing import Mapping

import scipy.constants as const

from .angular import HalfInt, hyperfine_dipole_element
from .errors import DomainError

__all__ = [
    "Manifold",
    "StateLabel",
    "DecayChannel",
    "ManifoldData",
    "LevelRegistry",
    "cesium_registry",
    "dipole_element",
    "zeeman_shift",
]

_EA0 = const.e * const.physical_constants["Bohr radius"][0]  # 1 e*a0 in C m
_MU_B = const.physical_constants["Bohr magneton"][0]
_MHZ = 2.0e6 * const.pi  # MHz -> rad/s


class Manifold(Enum):
    """Electronic fine-structure manifolds included in the model."""

    S6 = "6S1/2"
    P6_12 = "6P1/2"
    P6_32 = "6P3/2"
    S7 = "7S1/2"

    @property
    def J(self) -> HalfInt:
        return HalfInt.of({"S6": 0.5, "P6_12": 0.5, "P6_32": 1.5, "S7": 0.5}[self.name])

    @property
    def tier(self) -> str:
        """Ladder position: ground, intermediate or excited."""
        return {"S6": "ground", "P6_12": "intermediate",
                "P6_32": "intermediate", "S7": "excited"}[self.name]

    @classmethod
    def from_name(cls, name: str) -> "Manifold":
        for member in cls:
            if member.value == name:
                return member
        raise DomainError(f"unknown manifold {name!r}")

    def __repr__(self) -> str:
        return f"Manifold({self.value})"


@dataclass(frozen=True, order=True)
class StateLabel:
    """One magnetic hyperfine sublevel |F, mF> of a manifold."""

    manifold: Manifold
    F: int
    mF: int

    def __post_init__(self):
        if abs(self.mF) > self.F:
            raise DomainError(f"|mF| > F in {self.manifold.value}:{self.F}:{self.mF}")

    def __str__(self) -> str:
        return f"{self.manifold.value}:{self.F}:{self.mF}"

    @classmethod
    def parse(cls, text: str) -> "StateLabel":
        try:
            manifold, f, mf = text.rsplit(":", 2)
            return cls(Manifold.from_name(manifold), int(f), int(mf))
        except (ValueError, TypeError) as exc:
            raise DomainError(f"cannot parse state label {text!r}") from exc


@dataclass(frozen=True)
class DecayChannel:
    """Spontaneous decay route from one manifold to a lower one."""

    target: Manifold
    rate: float              # partial decay rate [1/s]
    wavelength: float        # vacuum wavelength [m]
    reduced_dipole: float    # <J_lower||d||J_upper> [C m]


@dataclass(frozen=True)
class ManifoldData:
    """Energies, g factors and decay data for one manifold."""

    manifold: Manifold
    fine_structure_energy: float          # [rad/s] relative to 6S1/2
    hyperfine_shifts: Mapping[int, float]  # F -> shift from centroid [rad/s]
    lande_g: Mapping[int, float]           # F -> gF
    decay_channels: tuple[DecayChannel, ...]

    @property
    def f_values(self) -> tuple[int, ...]:
        return tuple(sorted(self.hyperfine_shifts))

    @property
    def natural_linewidth(self) -> float:
        """Total decay rate Gamma = 1/tau [rad/s] (0 for the ground manifold)."""
        return sum(ch.rate for ch in self.decay_channels)


class LevelRegistry:
    """Immutable basis of |F, mF> sublevels over a set of manifolds.

    Basis order is deterministic: manifolds in ladder order (ground,
    intermediate, excited), then ascending F, then ascending mF.
    """

    def __init__(self, manifolds: Mapping[Manifold, ManifoldData],
                 basis: tuple[StateLabel, ...], nuclear_spin: HalfInt):
        self._manifolds = dict(manifolds)
        self._basis = tuple(basis)
        self._nuclear_spin = nuclear_spin
        self._index = {label: i for i, label in enumerate(self._basis)}
        if len(self._index) != len(self._basis):
            raise DomainError("duplicate states in basis")

    @property
    def manifolds(self) -> Mapping[Manifold, ManifoldData]:
        return dict(self._manifolds)

    @property
    def basis(self) -> tuple[StateLabel, ...]:
        return self._basis

    @property
    def nuclear_spin(self) -> HalfInt:
        return self._nuclear_spin

    @property
    def dimension(self) -> int:
        return len(self._basis)

    def index(self, label: StateLabel) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise DomainError(f"state {label} not in basis") from None

    def __contains__(self, label: StateLabel) -> bool:
        return label in self._index

    def data(self, manifold: Manifold) -> ManifoldData:
        try:
            return self._manifolds[manifold]
        except KeyError:
            raise DomainError(f"manifold {manifold.value} not in registry") from None

    def states_of(self, manifold: Manifold) -> tuple[StateLabel, ...]:
        return tuple(s for s in self._basis if s.manifold == manifold)

    def indices_of(self, manifold: Manifold) -> tuple[int, ...]:
        return tuple(i for i, s in enumerate(self._basis) if s.manifold == manifold)

    def manifold_of_tier(self, tier: str) -> Manifold:
        present = {s.manifold for s in self._basis}
        matches = [m for m in Manifold if m in present and m.tier == tier]
        if len(matches) != 1:
            raise DomainError(f"registry has {len(matches)} manifolds of tier {tier!r}")
        return matches[0]

    def decay_pairs(self) -> tuple[tuple[Manifold, Manifold, DecayChannel], ...]:
        """(upper, lower, channel) for every decay route present in the basis."""
        present = {s.manifold for s in self._basis}
        pairs = []
        for manifold in sorted(present, key=lambda m: m.value):
            for ch in self._manifolds[manifold].decay_channels:
                if ch.target in present:
                    pairs.append((manifold, ch.target, ch))
        return tuple(pairs)

    def pair_channel(self, lower: Manifold, upper: Manifold) -> DecayChannel:
        """Decay channel connecting a dipole-coupled manifold pair."""
        if upper in self._manifolds:
            for ch in self._manifolds[upper].decay_channels:
                if ch.target == lower:
                    return ch
        raise DomainError(
            f"manifolds {lower.value} and {upper.value} are not dipole-connected"
        )

    def hyperfine_shift(self, label: StateLabel) -> float:
        """Hyperfine shift of the state from its manifold centroid [rad/s]."""
        shifts = self.data(label.manifold).hyperfine_shifts
        if label.F not in shifts:
            raise DomainError(f"F={label.F} not allowed in {label.manifold.value}")
        return shifts[label.F]

    def subset(self, labels) -> "LevelRegistry":
        """Registry truncated to the given sublevels, kept in canonical order."""
        labels = set(labels)
        for label in labels:
            if label not in self._index:
                raise DomainError(f"state {label} not in basis")
        basis = tuple(s for s in self._basis if s in labels)
        manifolds = {m: d for m, d in self._manifolds.items()
                     if any(s.manifold == m for s in basis)}
        return LevelRegistry(manifolds, basis, self._nuclear_spin)

    def to_jsonable(self) -> dict:
        """Deterministic plain-data form (used for serialization checks)."""
        return {
            "nuclear_spin": self._nuclear_spin.twice / 2,
            "basis": [str(s) for s in self._basis],
            "manifolds": {
                m.value: {
                    "fine_structure_energy": d.fine_structure_energy,
                    "hyperfine_shifts": {str(f): v for f, v in sorted(d.hyperfine_shifts.items())},
                    "lande_g": {str(f): v for f, v in sorted(d.lande_g.items())},
                    "decay": [
                        {
                            "target": ch.target.value,
                            "rate": ch.rate,
                            "wavelength": ch.wavelength,
                            "reduced_dipole": ch.reduced_dipole,
                        }
                        for ch in d.decay_channels
                    ],
                }
                for m, d in sorted(self._manifolds.items(), key=lambda kv: kv[0].value)
            },
        }


@lru_cache(maxsize=1)
def _load_table() -> dict:
    with resources.files("sseit.data").joinpath("cesium_133.json").open() as fh:
        return json.load(fh)


def _build_manifold_data(record: dict) -> ManifoldData:
    manifold = Manifold.from_name(record["name"])
    shifts = {int(f): v * _MHZ for f, v in record["hyperfine_shift_MHz"].items()}
    lande = {int(f): v for f, v in record["g_F"].items()}
    channels = tuple(
        DecayChannel(
            target=Manifold.from_name(ch["to"]),
            rate=ch["rate_MHz"] * _MHZ,
            wavelength=ch["wavelength_nm"] * 1e-9,
            reduced_dipole=ch["dipole_ea0"] * _EA0,
        )
        for ch in record["decay"]
    )
    return ManifoldData(
        manifold=manifold,
        fine_structure_energy=record["fine_structure_MHz"] * _MHZ,
        hyperfine_shifts=shifts,
        lande_g=lande,
        decay_channels=channels,
    )


def cesium_registry(intermediate: Manifold | str = Manifold.P6_32) -> LevelRegistry:
    """Registry with 6S1/2, one 6P fine-structure manifold, and 7S1/2.

    Only one 6P manifold is included per run; the 7S decay route to the
    missing 6P manifold is restored by rescaling in
    :func:`sseit.lindblad.collapse_operators`.
    """
    if isinstance(intermediate, str):
        intermediate = Manifold.from_name(intermediate)
    if intermediate.tier != "intermediate":
        raise DomainError(f"{intermediate.value} is not an intermediate manifold")
    table = _load_table()
    records = {r["name"]: r for r in table["manifolds"]}
    manifolds = {}
    basis = []
    for member in (Manifold.S6, intermediate, Manifold.S7):
        data = _build_manifold_data(records[member.value])
        manifolds[member] = data
        for f in data.f_values:
            for mf in range(-f, f + 1):
                basis.append(StateLabel(member, f, mf))
    return LevelRegistry(manifolds, tuple(basis), HalfInt.of(table["nuclear_spin"]))


def seventh_s_lifetime() -> float:
    """Tabulated 7S1/2 lifetime [s]."""
    table = _load_table()
    for record in table["manifolds"]:
        if record["name"] == "7S1/2":
            return record["lifetime_ns"] * 1e-9
    raise DomainError("7S1/2 record missing from data table")


def dipole_element(lower: StateLabel, upper: StateLabel, q: int,
                   registry: LevelRegistry) -> float:
    """<F' mF'|d_q|F mF> between registry states [C m], primes on ``upper``.

    Zero unless mF' = mF + q and |F - F'| <= 1; raises
    :class:`~sseit.errors.DomainError` when the manifolds are not
    dipole-connected.
    """
    channel = registry.pair_channel(lower.manifold, upper.manifold)
    return hyperfine_dipole_element(
        lower.F, lower.mF, upper.F, upper.mF, q,
        j_lower=lower.manifold.J,
        j_upper=upper.manifold.J,
        nuclear_spin=registry.nuclear_spin,
        reduced_element=channel.reduced_dipole,
    )


def zeeman_shift(state: StateLabel, field: float, registry: LevelRegistry) -> float:
    """Linear Zeeman shift gF * muB * mF * B / hbar [rad/s]; ``field`` in tesla."""
    data = registry.data(state.manifold)
    if state.F not in data.lande_g:
        raise DomainError(f"F={state.F} not allowed in {state.manifold.value}")
    return data.lande_g[state.F] * _MU_B * state.mF * field / const.hbar
