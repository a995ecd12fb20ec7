"""Bolometer power, photon rates and the free-space link budget."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

from thzcavity.constants import CODATA, FS, GHZ, NW, PS, PhysicalConstants

LOCKIN_COEFFICIENT = 2.0 * math.sqrt(2.0)
FULL_SPHERE_SR = 4.0 * math.pi
HEMISPHERE_SR = 2.0 * math.pi


@dataclass(frozen=True)
class DetectorCalibration:
    name: str
    responsivity_mV_per_nW: float
    lockin_coefficient: float = LOCKIN_COEFFICIENT

    def __post_init__(self) -> None:
        if not self.responsivity_mV_per_nW > 0.0:
            raise ValueError(f"responsivity must be positive, got {self.responsivity_mV_per_nW!r}")
        if not self.lockin_coefficient > 0.0:
            raise ValueError(f"lock-in coefficient must be positive, got {self.lockin_coefficient!r}")


DETECTOR_PRESETS = {
    "HEB": DetectorCalibration("HEB", 3.3),
    "Si": DetectorCalibration("Si", 11.0),
}


def power_from_output_voltage(v_out_mV: float, cal: DetectorCalibration) -> float:
    """Detected power in nW from the lock-in output voltage in mV."""
    if v_out_mV < 0.0:
        raise ValueError(f"output voltage must be >= 0, got {v_out_mV!r}")
    return cal.lockin_coefficient * v_out_mV / cal.responsivity_mV_per_nW


def photon_energy(frequency_GHz: float, constants: PhysicalConstants = CODATA) -> float:
    """Single-photon energy h f in joules."""
    if not frequency_GHz > 0.0:
        raise ValueError(f"frequency must be positive, got {frequency_GHz!r}")
    return constants.planck_constant_Js * frequency_GHz * GHZ


@dataclass(frozen=True)
class PhotonRate:
    per_second: float

    @property
    def per_ps(self) -> float:
        return self.per_second * PS

    @property
    def per_fs(self) -> float:
        return self.per_second * FS


def photon_rate(power_nW: float, frequency_GHz: float, constants: PhysicalConstants = CODATA) -> PhotonRate:
    """Photons per unit time carried by ``power_nW`` at ``frequency_GHz``."""
    if power_nW < 0.0:
        raise ValueError(f"power must be >= 0, got {power_nW!r}")
    return PhotonRate(power_nW * NW / photon_energy(frequency_GHz, constants))


def air_transmission(attenuation_dB_per_km: float, path_m: float) -> float:
    """Power transmission of a path with a uniform specific attenuation."""
    if attenuation_dB_per_km < 0.0 or path_m < 0.0:
        raise ValueError("attenuation and path length must be >= 0")
    return 10.0 ** (-attenuation_dB_per_km * (path_m / 1000.0) / 10.0)


@dataclass(frozen=True)
class LinkBudget:
    """Everything between the emitter and the detector reading.

    ``window_transmissions`` holds ``(label, factor)`` pairs with factors in
    (0, 1].  The emission solid angle defaults to a hemisphere.
    """

    detected_power_nW: float
    measurement_solid_angle_sr: float
    emission_solid_angle_sr: float = HEMISPHERE_SR
    window_transmissions: tuple[tuple[str, float], ...] = ()
    air_attenuation_dB_per_km: float = 0.0
    path_length_m: float = 0.0
    frequency_GHz: float = 750.0

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "window_transmissions",
            tuple((str(label), float(t)) for label, t in self.window_transmissions),
        )
        if self.detected_power_nW < 0.0:
            raise ValueError("detected power must be >= 0")
        if self.measurement_solid_angle_sr == 0.0:
            raise ValueError("measurement solid angle must be nonzero")
        for name in ("measurement_solid_angle_sr", "emission_solid_angle_sr"):
            omega = getattr(self, name)
            if not 0.0 < omega <= FULL_SPHERE_SR * (1.0 + 1e-12):
                raise ValueError(f"{name} must lie in (0, 4 pi], got {omega!r}")
        for label, t in self.window_transmissions:
            if not 0.0 < t <= 1.0:
                raise ValueError(f"transmission of {label!r} must lie in (0, 1], got {t!r}")
        if self.air_attenuation_dB_per_km < 0.0:
            raise ValueError("air attenuation must be >= 0")
        if self.path_length_m < 0.0:
            raise ValueError("path length must be >= 0")
        if not self.frequency_GHz > 0.0:
            raise ValueError("frequency must be positive")


@dataclass(frozen=True)
class SourcePowerEstimate:
    budget: LinkBudget
    solid_angle_ratio: float
    window_product: float
    air_transmission: float
    total_transmission: float
    source_power_nW: float
    source_photons: PhotonRate
    detected_photons: PhotonRate
    factors: tuple[tuple[str, float], ...] = field(default=())


def source_power_estimate(budget: LinkBudget, constants: PhysicalConstants = CODATA) -> SourcePowerEstimate:
    """Back out the emitted power from the detected power.

    ``P_src = P_det * (Omega_emit / Omega_meas) / (prod(windows) * T_air)``
    """
    ratio = budget.emission_solid_angle_sr / budget.measurement_solid_angle_sr
    windows = math.prod(t for _, t in budget.window_transmissions)
    air = air_transmission(budget.air_attenuation_dB_per_km, budget.path_length_m)
    total = windows * air
    source = budget.detected_power_nW * ratio / total
    factors = (
        ("solid_angle_ratio", ratio),
        *((f"window:{label}", t) for label, t in budget.window_transmissions),
        ("air_transmission", air),
        ("total_transmission", total),
    )
    return SourcePowerEstimate(
        budget=budget,
        solid_angle_ratio=ratio,
        window_product=windows,
        air_transmission=air,
        total_transmission=total,
        source_power_nW=source,
        source_photons=photon_rate(source, budget.frequency_GHz, constants),
        detected_photons=photon_rate(budget.detected_power_nW, budget.frequency_GHz, constants),
        factors=factors,
    )


def reference_link_budget() -> LinkBudget:
    """Default budget: two windows plus 10 cm of room air at 750 GHz."""
    return LinkBudget(
        detected_power_nW=0.194,
        measurement_solid_angle_sr=0.02,
        emission_solid_angle_sr=HEMISPHERE_SR,
        window_transmissions=(("quartz cryostat window", 0.75), ("polythene window", 0.90)),
        air_attenuation_dB_per_km=1000.0,
        path_length_m=0.1,
        frequency_GHz=750.0,
    )


def sweep_rows(
    rows: Sequence[tuple[float, float, float | None]],
    cal: DetectorCalibration,
    frequency_GHz: float,
    constants: PhysicalConstants = CODATA,
) -> list[tuple[float, float | None, float, float]]:
    """(bias V, output mV, T) rows -> (bias V, T, power nW, photons per ps)."""
    out = []
    for bias, v_out, temp in rows:
        p = power_from_output_voltage(v_out, cal)
        out.append((bias, temp, p, photon_rate(p, frequency_GHz, constants).per_ps))
    return out
