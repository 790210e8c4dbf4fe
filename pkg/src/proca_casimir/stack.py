"""Five-layer geometry: background | left plate | gap | right plate | background."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Any, Optional

from .errors import DomainError, UnsupportedConfigurationError
from .materials import (
    InfinitelyPermeable,
    MaterialModel,
    PerfectConductor,
    Vacuum,
    material_from_dict,
)

HBAR = 1.054571817e-34  # J s, exact in SI 2019
C_LIGHT = 299792458.0  # m/s, exact
HBAR_C = HBAR * C_LIGHT


class LimitKind(enum.Enum):
    GENERAL = "general"
    CONDUCTOR_CONDUCTOR = "conductor_conductor"
    PERMEABLE_PERMEABLE = "permeable_permeable"
    CONDUCTOR_PERMEABLE = "conductor_permeable"


@dataclass(frozen=True)
class Plate:
    """A plate of given material and thickness (m)."""

    material: MaterialModel
    thickness: float


@dataclass(frozen=True)
class Scales:
    """Conversion between SI quantities and the dimensionless internal units.

    Internally ``hbar = c = 1`` and lengths are measured in ``length_unit``.
    Normally the unit is the separation itself, so that ``gap == 1``.

    Attributes
    ----------
    separation : float
        Plate separation ``a`` in m.
    length_unit : float
        Reference length ``L`` in m.
    gap : float
        ``a / L``.
    m_bar : float
        ``m c L / hbar``.
    tau_l, tau_r : float
        Plate thicknesses over ``L``.
    """

    separation: float
    length_unit: float
    gap: float
    m_bar: float
    tau_l: float
    tau_r: float

    @property
    def energy_scale(self) -> float:
        """``hbar c / L**3`` in J/m^2."""
        return HBAR_C / self.length_unit**3

    @property
    def force_scale(self) -> float:
        """``hbar c / L**4`` in Pa."""
        return HBAR_C / self.length_unit**4

    @property
    def frequency_scale(self) -> float:
        """``c / L`` in rad/s, so that ``xi = u * frequency_scale``."""
        return C_LIGHT / self.length_unit


def mass_from_bar(m_bar: float, length: float) -> float:
    """Field mass in kg for a dimensionless mass ``m c L / hbar``."""
    return m_bar * HBAR / (C_LIGHT * length)


def bar_from_mass(mass: float, length: float) -> float:
    """Dimensionless mass ``m c L / hbar`` for a mass in kg."""
    return mass * C_LIGHT * length / HBAR


@dataclass(frozen=True)
class StackConfig:
    """Background medium, two plates, separation (m) and field mass (kg)."""

    background: MaterialModel
    plate_l: Plate
    plate_r: Plate
    separation: float
    mass: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.separation) and self.separation > 0.0):
            raise DomainError(f"separation must be positive, got {self.separation}")
        for side, plate in (("left", self.plate_l), ("right", self.plate_r)):
            if not (math.isfinite(plate.thickness) and plate.thickness > 0.0):
                raise DomainError(f"{side} plate thickness must be positive, got {plate.thickness}")
        if not (math.isfinite(self.mass) and self.mass >= 0.0):
            raise DomainError(f"mass must be >= 0, got {self.mass}")
        if self.background.is_limit:
            raise UnsupportedConfigurationError("background medium cannot be a limit model")

    @classmethod
    def symmetric(
        cls,
        plate: MaterialModel,
        separation: float,
        thickness: Optional[float] = None,
        background: Optional[MaterialModel] = None,
        m_bar: float = 0.0,
    ) -> "StackConfig":
        """Identical plates; thickness defaults to the separation, mass given as ``m c a / hbar``."""
        t = separation if thickness is None else thickness
        return cls(
            background=background if background is not None else Vacuum(),
            plate_l=Plate(plate, t),
            plate_r=Plate(plate, t),
            separation=separation,
            mass=mass_from_bar(m_bar, separation),
        )

    @property
    def m_bar(self) -> float:
        return bar_from_mass(self.mass, self.separation)

    def scales(self, length_unit: Optional[float] = None) -> Scales:
        """Dimensionless scales; ``length_unit`` defaults to the separation."""
        L = self.separation if length_unit is None else float(length_unit)
        if not (math.isfinite(L) and L > 0.0):
            raise DomainError(f"length unit must be positive, got {L}")
        return Scales(
            separation=self.separation,
            length_unit=L,
            gap=self.separation / L,
            m_bar=bar_from_mass(self.mass, L),
            tau_l=self.plate_l.thickness / L,
            tau_r=self.plate_r.thickness / L,
        )

    def with_separation(self, separation: float) -> "StackConfig":
        return replace(self, separation=separation)

    def with_mass(self, mass: float) -> "StackConfig":
        return replace(self, mass=mass)

    def with_m_bar(self, m_bar: float) -> "StackConfig":
        return replace(self, mass=mass_from_bar(m_bar, self.separation))

    def swapped(self) -> "StackConfig":
        """Mirror image: left and right plates exchanged."""
        return replace(self, plate_l=self.plate_r, plate_r=self.plate_l)

    def to_dict(self) -> dict[str, Any]:
        return {
            "background": self.background.to_dict(),
            "plate_l": {"material": self.plate_l.material.to_dict(), "thickness_m": self.plate_l.thickness},
            "plate_r": {"material": self.plate_r.material.to_dict(), "thickness_m": self.plate_r.thickness},
            "separation_m": self.separation,
            "mass_kg": self.mass,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "StackConfig":
        return cls(
            background=material_from_dict(data["background"]),
            plate_l=Plate(material_from_dict(data["plate_l"]["material"]), float(data["plate_l"]["thickness_m"])),
            plate_r=Plate(material_from_dict(data["plate_r"]["material"]), float(data["plate_r"]["thickness_m"])),
            separation=float(data["separation_m"]),
            mass=float(data.get("mass_kg", 0.0)),
        )


def classify(stack: StackConfig) -> LimitKind:
    """Select the formula family from the two plate materials.

    Raises
    ------
    UnsupportedConfigurationError
        If exactly one plate is a limit marker.
    """
    left, right = stack.plate_l.material, stack.plate_r.material
    if not left.is_limit and not right.is_limit:
        return LimitKind.GENERAL
    if left.is_limit != right.is_limit:
        raise UnsupportedConfigurationError(
            "a limit model plate cannot be combined with a real-material plate"
        )
    kinds = {type(left), type(right)}
    if kinds == {PerfectConductor}:
        return LimitKind.CONDUCTOR_CONDUCTOR
    if kinds == {InfinitelyPermeable}:
        return LimitKind.PERMEABLE_PERMEABLE
    return LimitKind.CONDUCTOR_PERMEABLE


def conductor_on_left(stack: StackConfig) -> bool:
    """Orientation of a conductor/permeable stack."""
    return isinstance(stack.plate_l.material, PerfectConductor)
