"""Run configuration: a flat JSON object whose keys carry their units.

Schema (all keys optional, defaults shown by ``RunConfig()``)::

    semi_major_um, semi_minor_um, thickness_um      cavity geometry
    refractive_index_sq                             relative permittivity n^2
    junction_thickness_nm                           intrinsic junction period
    f_max_GHz, m_max, q_max, q_min, q_step          mode scan limits
    grid_resolution                                 field-map samples along 2a
    detector                                        "HEB", "Si" or "custom"
    responsivity_mV_per_nW                          required when detector is "custom"
    lockin_coefficient                              defaults to 2 sqrt 2
    detected_power_nW, measurement_solid_angle_sr,
    emission_solid_angle_sr, air_attenuation_dB_per_km,
    path_length_m, frequency_GHz                    link budget
    window_transmissions                            list of [label, factor]
    n_min, n_max                                    junction-count search range
    output_dir                                      where files are written
    field_map_format                                "csv" or "svg"
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from thzcavity.cavity import EllipseGeometry
from thzcavity.constants import PhysicalConstants
from thzcavity.josephson import DEFAULT_N_RANGE
from thzcavity.radiometry import (
    DETECTOR_PRESETS,
    HEMISPHERE_SR,
    LOCKIN_COEFFICIENT,
    DetectorCalibration,
    LinkBudget,
)


class ConfigError(ValueError):
    """Invalid or unknown configuration entry."""


FIELD_MAP_FORMATS = ("csv", "svg")


@dataclass(frozen=True)
class RunConfig:
    semi_major_um: float = 245.0
    semi_minor_um: float = 52.0
    thickness_um: float = 1.0
    refractive_index_sq: float = 17.76
    junction_thickness_nm: float = 1.533
    f_max_GHz: float = 1500.0
    m_max: int = 2
    q_max: float = 400.0
    q_min: float = 0.0
    q_step: float = 0.5
    grid_resolution: int = 201
    detector: str = "HEB"
    responsivity_mV_per_nW: float | None = None
    lockin_coefficient: float = LOCKIN_COEFFICIENT
    detected_power_nW: float = 0.194
    measurement_solid_angle_sr: float = 0.02
    emission_solid_angle_sr: float = HEMISPHERE_SR
    window_transmissions: tuple[tuple[str, float], ...] = (
        ("quartz cryostat window", 0.75),
        ("polythene window", 0.90),
    )
    air_attenuation_dB_per_km: float = 1000.0
    path_length_m: float = 0.1
    frequency_GHz: float = 750.0
    n_min: int = DEFAULT_N_RANGE[0]
    n_max: int = DEFAULT_N_RANGE[1]
    output_dir: str | None = None
    field_map_format: str = "csv"

    def __post_init__(self) -> None:
        self.validate()

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in dataclasses.fields(cls))

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> "RunConfig":
        if not isinstance(raw, dict):
            raise ConfigError("configuration must be a JSON object")
        known = set(cls.field_names())
        for key in raw:
            if key not in known:
                raise ConfigError(f"unknown configuration key: {key!r}")
        return cls(**{k: _coerce(k, v) for k, v in raw.items()})

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
        return cls.from_dict(raw)

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **{k: _coerce(k, v) for k, v in changes.items()})

    def to_dict(self) -> dict[str, Any]:
        out = dataclasses.asdict(self)
        out["window_transmissions"] = [list(w) for w in self.window_transmissions]
        return out

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()

    def validate(self) -> None:
        for key in ("f_max_GHz", "q_max", "q_step", "frequency_GHz"):
            value = getattr(self, key)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ConfigError(f"{key} must be a positive number, got {value!r}")
        if self.q_min < 0 or self.q_min >= self.q_max:
            raise ConfigError(f"need 0 <= q_min < q_max, got q_min={self.q_min!r}")
        if self.m_max < 0:
            raise ConfigError(f"m_max must be >= 0, got {self.m_max!r}")
        if self.grid_resolution < 3:
            raise ConfigError(f"grid_resolution must be >= 3, got {self.grid_resolution!r}")
        if not 1 <= self.n_min <= self.n_max:
            raise ConfigError(f"need 1 <= n_min <= n_max, got [{self.n_min}, {self.n_max}]")
        if self.field_map_format not in FIELD_MAP_FORMATS:
            raise ConfigError(f"field_map_format must be one of {FIELD_MAP_FORMATS}, got {self.field_map_format!r}")
        if self.detector != "custom" and self.detector not in DETECTOR_PRESETS:
            raise ConfigError(f"detector must be 'custom' or one of {sorted(DETECTOR_PRESETS)}, got {self.detector!r}")
        if self.detector == "custom" and self.responsivity_mV_per_nW is None:
            raise ConfigError("detector 'custom' needs responsivity_mV_per_nW")
        # the domain objects carry their own checks; surface them as config errors
        try:
            self.geometry()
            self.constants()
            self.calibration()
            self.link_budget()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def geometry(self) -> EllipseGeometry:
        return EllipseGeometry(
            self.semi_major_um, self.semi_minor_um, self.thickness_um, self.refractive_index_sq
        )

    def constants(self) -> PhysicalConstants:
        return PhysicalConstants(junction_thickness_nm=self.junction_thickness_nm)

    def calibration(self) -> DetectorCalibration:
        if self.detector == "custom":
            return DetectorCalibration("custom", self.responsivity_mV_per_nW, self.lockin_coefficient)
        preset = DETECTOR_PRESETS[self.detector]
        alpha = self.responsivity_mV_per_nW or preset.responsivity_mV_per_nW
        return DetectorCalibration(preset.name, alpha, self.lockin_coefficient)

    def link_budget(self) -> LinkBudget:
        return LinkBudget(
            detected_power_nW=self.detected_power_nW,
            measurement_solid_angle_sr=self.measurement_solid_angle_sr,
            emission_solid_angle_sr=self.emission_solid_angle_sr,
            window_transmissions=self.window_transmissions,
            air_attenuation_dB_per_km=self.air_attenuation_dB_per_km,
            path_length_m=self.path_length_m,
            frequency_GHz=self.frequency_GHz,
        )


_INT_KEYS = {"m_max", "grid_resolution", "n_min", "n_max"}
_STR_KEYS = {"detector", "output_dir", "field_map_format"}


def _coerce(key: str, value: Any) -> Any:
    if key == "window_transmissions":
        try:
            return tuple((str(label), float(t)) for label, t in value)
        except (TypeError, ValueError) as exc:
            raise ConfigError("window_transmissions must be a list of [label, factor] pairs") from exc
    if value is None and key in ("responsivity_mV_per_nW", "output_dir"):
        return None
    if key in _STR_KEYS:
        if not isinstance(value, str):
            raise ConfigError(f"{key} must be a string, got {value!r}")
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    if key in _INT_KEYS:
        if float(value) != int(value):
            raise ConfigError(f"{key} must be an integer, got {value!r}")
        return int(value)
    return float(value)
