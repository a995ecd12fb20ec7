"""AC Josephson relation for a stack of N junctions in series: f = 2eV / (hN)."""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from thzcavity.constants import CODATA, GHZ, NM, UM, PhysicalConstants

DEFAULT_N_RANGE = (100, 1000)
# residuals this close are treated as a tie
TIE_RTOL = 1e-12


def frequency_from_voltage(voltage_V: float, n_junctions: int, constants: PhysicalConstants = CODATA) -> float:
    """Emission frequency in GHz for bias ``voltage_V`` across ``n_junctions``."""
    if not voltage_V > 0.0:
        raise ValueError(f"voltage must be positive, got {voltage_V!r}")
    if n_junctions < 1:
        raise ValueError(f"junction count must be >= 1, got {n_junctions!r}")
    return constants.josephson_constant_Hz_per_V * voltage_V / n_junctions / GHZ


def junctions_from_fv(frequency_GHz: float, voltage_V: float, constants: PhysicalConstants = CODATA) -> float:
    """Non-integer junction count implied by one (f, V) pair."""
    if not frequency_GHz > 0.0:
        raise ValueError(f"frequency must be positive, got {frequency_GHz!r}")
    if not voltage_V > 0.0:
        raise ValueError(f"voltage must be positive, got {voltage_V!r}")
    return constants.josephson_constant_Hz_per_V * voltage_V / (frequency_GHz * GHZ)


def total_junctions_from_thickness(thickness_um: float, constants: PhysicalConstants = CODATA) -> int:
    """Number of intrinsic junctions in a mesa of the given thickness."""
    if not thickness_um > 0.0:
        raise ValueError(f"thickness must be positive, got {thickness_um!r}")
    return int(round(thickness_um * UM / (constants.junction_thickness_nm * NM)))


@dataclass(frozen=True)
class JosephsonBranch:
    points: tuple[tuple[float, float], ...]
    fitted_N: int
    residual_rms: float
    branch_id: str = ""


def branch_residuals(
    points: Sequence[tuple[float, float]],
    n_values: Iterable[int],
    constants: PhysicalConstants = CODATA,
) -> np.ndarray:
    """RMS of ``f_i - 2e V_i / (h N)`` in GHz for each N."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    volts, freqs = pts[:, 0], pts[:, 1]
    ns = np.asarray(list(n_values), dtype=float)
    # same operation order as frequency_from_voltage, so planted data fits exactly
    model = constants.josephson_constant_Hz_per_V * volts[None, :] / ns[:, None] / GHZ
    return np.sqrt(np.mean((freqs[None, :] - model) ** 2, axis=1))


def fit_branch_junctions(
    points: Sequence[tuple[float, float]],
    n_min: int = DEFAULT_N_RANGE[0],
    n_max: int = DEFAULT_N_RANGE[1],
    constants: PhysicalConstants = CODATA,
    branch_id: str = "",
) -> JosephsonBranch:
    """Integer junction count that best explains a (voltage, frequency) branch.

    Every N in ``[n_min, n_max]`` is tried; ties (residuals equal to within
    ``TIE_RTOL``) go to the smaller N.
    """
    pts = tuple((float(v), float(f)) for v, f in points)
    if not pts:
        raise ValueError("branch has no points")
    if len(pts) < 2:
        raise ValueError(f"need at least 2 points to fit a branch, got {len(pts)}")
    if not all(math.isfinite(v) and math.isfinite(f) for v, f in pts):
        raise ValueError("branch points must be finite")
    if all(v == 0.0 for v, _ in pts):
        raise ValueError("all bias voltages are zero")
    if not 1 <= n_min <= n_max:
        raise ValueError(f"need 1 <= n_min <= n_max, got [{n_min}, {n_max}]")

    ns = np.arange(n_min, n_max + 1)
    rms = branch_residuals(pts, ns, constants)
    floor = float(rms.min())
    best = int(np.flatnonzero(rms <= floor + TIE_RTOL * max(floor, 1e-300))[0])
    return JosephsonBranch(points=pts, fitted_N=int(ns[best]), residual_rms=float(rms[best]), branch_id=branch_id)
