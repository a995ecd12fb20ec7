"""TM modes of a thin elliptical cavity with a Neumann (open) edge.

A mode TM(m, r) is the r-th positive q at which the mu-derivative of the
radial Mathieu function vanishes on the boundary ``mu = mu0``.  The in-plane
wavevector follows from ``q = k^2 l_f^2 / 4`` and ``k = n omega / c``; the
wavevector across the thickness is neglected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from thzcavity.constants import CODATA, GHZ, UM, PhysicalConstants
from thzcavity.mathieu import (
    MathieuSolution,
    Parity,
    angular_derivative,
    angular_value,
    radial_derivative,
    radial_derivative_many,
    radial_value,
    solve_characteristic,
)

DEFAULT_Q_STEP = 0.5
REFINE_FACTOR = 4
MAX_REFINEMENTS = 4
DEFAULT_RTOL = 1e-13


class ModeNotFoundError(LookupError):
    """Fewer roots than requested below the scan limit."""


class ScanError(RuntimeError):
    """Root count would not settle under grid refinement."""


@dataclass(frozen=True)
class EllipseGeometry:
    """Cavity semi-axes and thickness in micrometres, relative permittivity n^2."""

    semi_major_um: float
    semi_minor_um: float
    thickness_um: float = 1.0
    refractive_index_sq: float = 17.76

    def __post_init__(self) -> None:
        a, b = self.semi_major_um, self.semi_minor_um
        if not (math.isfinite(a) and math.isfinite(b)) or b <= 0.0:
            raise ValueError(f"semi-axes must be finite and positive, got a={a!r}, b={b!r}")
        if b >= a:
            raise ValueError(f"semi-minor axis must be smaller than semi-major (b={b!r}, a={a!r})")
        if not self.thickness_um > 0.0:
            raise ValueError(f"thickness must be positive, got {self.thickness_um!r}")
        if not self.refractive_index_sq > 1.0:
            raise ValueError(f"n^2 must exceed 1, got {self.refractive_index_sq!r}")

    @classmethod
    def from_focal(cls, focal_length_um: float, mu0: float, **kwargs) -> "EllipseGeometry":
        """Geometry whose boundary is ``mu = mu0`` for the given focal length."""
        return cls(focal_length_um * math.cosh(mu0), focal_length_um * math.sinh(mu0), **kwargs)

    @property
    def mu0(self) -> float:
        return math.atanh(self.semi_minor_um / self.semi_major_um)

    @property
    def focal_length_um(self) -> float:
        a, b = self.semi_major_um, self.semi_minor_um
        return math.sqrt((a - b) * (a + b))

    @property
    def refractive_index(self) -> float:
        return math.sqrt(self.refractive_index_sq)


def derive_coordinates(geom: EllipseGeometry) -> tuple[float, float]:
    """Boundary coordinate mu0 = atanh(b/a) and focal length (um)."""
    return geom.mu0, geom.focal_length_um


def frequency_from_q(q: float, geom: EllipseGeometry, constants: PhysicalConstants = CODATA) -> float:
    """Mode frequency in GHz: ``f = c sqrt(q) / (pi n l_f)``."""
    if q < 0.0:
        raise ValueError(f"q must be >= 0, got {q!r}")
    lf = geom.focal_length_um * UM
    return constants.speed_of_light_m_per_s * math.sqrt(q) / (math.pi * geom.refractive_index * lf) / GHZ


def q_from_frequency(f_GHz: float, geom: EllipseGeometry, constants: PhysicalConstants = CODATA) -> float:
    if f_GHz < 0.0:
        raise ValueError(f"frequency must be >= 0, got {f_GHz!r}")
    lf = geom.focal_length_um * UM
    root = f_GHz * GHZ * math.pi * geom.refractive_index * lf / constants.speed_of_light_m_per_s
    return root * root


@dataclass(frozen=True, eq=False)
class CavityMode:
    parity: Parity
    m: int
    r: int
    q_root: float
    frequency_GHz: float
    boundary_residual: float
    solution: MathieuSolution

    @property
    def label(self) -> str:
        return f"TM_{self.parity.value}({self.m},{self.r})"


def boundary_slope(parity, m: int, q: float, mu0: float) -> float:
    """d/dmu of the radial function at the boundary, as a function of q."""
    return radial_derivative(solve_characteristic(parity, m, q), mu0)


def _sign_changes(values: np.ndarray) -> np.ndarray:
    s = np.sign(values)
    return np.flatnonzero(s[:-1] * s[1:] < 0.0)


def _bisect(func, lo: float, hi: float, flo: float, fhi: float, rtol: float) -> tuple[float, float]:
    while hi - lo > rtol * max(abs(lo), abs(hi)):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fmid = func(mid)
        if fmid == 0.0:
            return mid, 0.0
        if (fmid < 0.0) == (flo < 0.0):
            lo, flo = mid, fmid
        else:
            hi, fhi = mid, fmid
    return (lo, flo) if abs(flo) <= abs(fhi) else (hi, fhi)


def scan_roots(
    parity,
    m: int,
    mu0: float,
    q_max: float,
    q_min: float = 0.0,
    q_step: float = DEFAULT_Q_STEP,
    rtol: float = DEFAULT_RTOL,
) -> list[tuple[float, float]]:
    """All roots in ``(q_min, q_max]`` of the boundary slope, ascending.

    Sign changes are bracketed on a uniform grid of step ``q_step`` and the
    count is confirmed on a 4x finer grid; disagreements trigger further 4x
    refinements.  Each root is bisected down to relative width ``rtol``.
    Returns ``(q, scaled residual)`` pairs, the residual being
    ``|g(q)| / max(|g|)`` over the bracket endpoints.
    """
    parity = Parity(parity)
    if not q_max > q_min:
        raise ValueError(f"q_max ({q_max!r}) must exceed q_min ({q_min!r})")
    if not q_step > 0.0:
        raise ValueError(f"q_step must be positive, got {q_step!r}")

    cache: dict[float, float] = {}

    def g(q: float) -> float:
        if q not in cache:
            cache[q] = boundary_slope(parity, m, q, mu0)
        return cache[q]

    def grid(step: float) -> np.ndarray:
        n = max(1, math.ceil((q_max - q_min) / step - 1e-9))
        pts = q_min + step * np.arange(1, n + 1)
        pts[-1] = min(pts[-1], q_max)
        # q = 0 is a trivial root of the m = 0 slope; start just above it
        head = q_min if q_min > 0.0 else min(step, q_max) * 1e-3
        return np.concatenate(([head], pts))

    def brackets(step: float):
        pts = grid(step)
        vals = radial_derivative_many(parity, m, pts, mu0)
        return pts, vals, _sign_changes(vals)

    step = q_step
    pts, vals, idx = brackets(step)
    for _ in range(MAX_REFINEMENTS):
        step /= REFINE_FACTOR
        fine_pts, fine_vals, fine_idx = brackets(step)
        settled = len(fine_idx) == len(idx)
        pts, vals, idx = fine_pts, fine_vals, fine_idx
        if settled:
            break
    else:
        raise ScanError(f"root count for {parity} m={m} unstable down to q step {step:g}")

    roots = []
    for i in idx:
        lo, hi = float(pts[i]), float(pts[i + 1])
        flo, fhi = float(vals[i]), float(vals[i + 1])
        q, fq = _bisect(g, lo, hi, flo, fhi, rtol)
        scale = max(abs(flo), abs(fhi))
        roots.append((q, abs(fq) / scale))
    return roots


def _make_mode(parity: Parity, m: int, r: int, q: float, residual: float, geom, constants) -> CavityMode:
    return CavityMode(
        parity=parity,
        m=m,
        r=r,
        q_root=q,
        frequency_GHz=frequency_from_q(q, geom, constants),
        boundary_residual=residual,
        solution=solve_characteristic(parity, m, q),
    )


def find_mode(
    parity,
    m: int,
    r: int,
    geom: EllipseGeometry,
    q_max: float = 400.0,
    q_min: float = 0.0,
    q_step: float = DEFAULT_Q_STEP,
    constants: PhysicalConstants = CODATA,
) -> CavityMode:
    """The r-th (1-based) Neumann root above ``q_min`` for order m."""
    parity = Parity(parity)
    if r < 1:
        raise ValueError(f"root index r must be >= 1, got {r}")
    roots = scan_roots(parity, m, geom.mu0, q_max, q_min=q_min, q_step=q_step)
    if len(roots) < r:
        raise ModeNotFoundError(
            f"only {len(roots)} {parity} m={m} roots below q_max={q_max:g}, asked for r={r}"
        )
    q, residual = roots[r - 1]
    return _make_mode(parity, m, r, q, residual, geom, constants)


def enumerate_modes(
    geom: EllipseGeometry,
    f_max_GHz: float,
    m_max: int = 4,
    q_min: float = 0.0,
    q_step: float = DEFAULT_Q_STEP,
    constants: PhysicalConstants = CODATA,
) -> list[CavityMode]:
    """Every mode with m <= m_max and frequency <= f_max, sorted by frequency.

    Ties are ordered even before odd, then by m.
    """
    if not f_max_GHz > 0.0:
        raise ValueError(f"f_max must be positive, got {f_max_GHz!r}")
    if m_max < 0:
        raise ValueError(f"m_max must be >= 0, got {m_max}")
    q_max = q_from_frequency(f_max_GHz, geom, constants)
    modes = []
    if q_max <= q_min:
        return modes
    for parity in (Parity.EVEN, Parity.ODD):
        for m in range(0 if parity is Parity.EVEN else 1, m_max + 1):
            roots = scan_roots(parity, m, geom.mu0, q_max, q_min=q_min, q_step=q_step)
            for r, (q, residual) in enumerate(roots, start=1):
                mode = _make_mode(parity, m, r, q, residual, geom, constants)
                if mode.frequency_GHz <= f_max_GHz:
                    modes.append(mode)
    modes.sort(key=lambda md: (md.frequency_GHz, md.parity is Parity.ODD, md.m, md.r))
    return modes


# ---------------------------------------------------------------- fields


def cartesian_to_elliptic(x_um, y_um, focal_length_um: float) -> tuple[np.ndarray, np.ndarray]:
    """(mu, nu) with mu >= 0 and nu in [0, 2 pi) for x + iy = l_f cosh(mu + i nu)."""
    w = np.arccosh((np.asarray(x_um, dtype=float) + 1j * np.asarray(y_um, dtype=float)) / focal_length_um)
    mu = np.abs(w.real)
    nu = np.where(w.real < 0.0, -w.imag, w.imag)
    return mu, np.mod(nu, 2.0 * math.pi)


def elliptic_to_cartesian(mu, nu, focal_length_um: float) -> tuple[np.ndarray, np.ndarray]:
    return (
        focal_length_um * np.cosh(mu) * np.cos(nu),
        focal_length_um * np.sinh(mu) * np.sin(nu),
    )


def metric_scale(mu, nu, focal_length_um: float) -> np.ndarray:
    """Lame coefficient h with ds^2 = h^2 (dmu^2 + dnu^2)."""
    return focal_length_um * np.sqrt(np.sinh(mu) ** 2 + np.sin(nu) ** 2)


def mode_field(mode: CavityMode, mu, nu):
    """Radial times angular factor at elliptic coordinates."""
    return np.asarray(radial_value(mode.solution, mu)) * np.asarray(angular_value(mode.solution, nu))


def mode_field_gradient(mode: CavityMode, mu, nu) -> tuple[np.ndarray, np.ndarray]:
    """(d/dmu, d/dnu) of :func:`mode_field`."""
    sol = mode.solution
    rad = np.asarray(radial_value(sol, mu))
    ang = np.asarray(angular_value(sol, nu))
    return np.asarray(radial_derivative(sol, mu)) * ang, rad * np.asarray(angular_derivative(sol, nu))


@dataclass(frozen=True, eq=False)
class FieldMap:
    """Field sampled on a Cartesian grid; NaN outside the ellipse.

    ``values[i, j]`` is the field at ``(x_um[j], y_um[i])``.
    """

    mode: CavityMode
    x_um: np.ndarray
    y_um: np.ndarray
    values: np.ndarray

    @property
    def inside(self) -> np.ndarray:
        return np.isfinite(self.values)


def _symmetric_axis(half: float, n: int) -> np.ndarray:
    # built by mirroring so that -x and x are bitwise negatives
    n = max(3, n | 1)
    pos = half * np.arange(1, n // 2 + 1) / (n // 2)
    return np.concatenate((-pos[::-1], [0.0], pos))


def field_map(mode: CavityMode, geom: EllipseGeometry, grid_resolution: int = 201) -> FieldMap:
    """Sample the standalone-cavity mode field over the ellipse.

    ``grid_resolution`` points span the major axis (rounded up to odd); the
    minor axis gets the same spacing.
    """
    if grid_resolution < 3:
        raise ValueError(f"grid_resolution must be >= 3, got {grid_resolution}")
    a, b = geom.semi_major_um, geom.semi_minor_um
    x = _symmetric_axis(a, grid_resolution)
    ny = int(round((grid_resolution - 1) * b / a)) + 1
    y = _symmetric_axis(b, ny)
    xx, yy = np.meshgrid(x, y)
    mu, nu = cartesian_to_elliptic(xx, yy, geom.focal_length_um)
    inside = mu <= geom.mu0 * (1.0 + 1e-12)
    values = np.full(xx.shape, np.nan)
    values[inside] = mode_field(mode, mu[inside], nu[inside])
    return FieldMap(mode=mode, x_um=x, y_um=y, values=values)
