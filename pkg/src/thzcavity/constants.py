"""Physical constants and unit conversions, kept in one place."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalConstants:
    """SI-2019 exact values plus the intrinsic junction period of BSCCO."""

    elementary_charge_C: float = 1.602176634e-19
    planck_constant_Js: float = 6.62607015e-34
    speed_of_light_m_per_s: float = 299792458.0
    junction_thickness_nm: float = 1.533

    def __post_init__(self) -> None:
        for name in (
            "elementary_charge_C",
            "planck_constant_Js",
            "speed_of_light_m_per_s",
            "junction_thickness_nm",
        ):
            value = getattr(self, name)
            if not value > 0.0:
                raise ValueError(f"{name} must be positive, got {value!r}")

    @property
    def josephson_constant_Hz_per_V(self) -> float:
        """2e/h."""
        return 2.0 * self.elementary_charge_C / self.planck_constant_Js


CODATA = PhysicalConstants()

# unit factors
GHZ = 1e9
NW = 1e-9
MV = 1e-3
UM = 1e-6
NM = 1e-9
PS = 1e-12
FS = 1e-15
