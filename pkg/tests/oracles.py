"""Independent reference values by direct integration of the Mathieu ODEs.

Nothing here touches the Fourier/Bessel series in the package.  The
characteristic value comes from a Pruefer-angle shooting problem on the
quarter period; the functions themselves from integrating the ODE with
that value.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.optimize import brentq

RTOL = 1e-12
ATOL = 1e-14


def _class_of(kind: str, m: int) -> tuple[float, float, int]:
    """(start angle, end offset, n) for the quarter-period problem."""
    n = m // 2 if kind == "even" else (m - 1) // 2
    if kind == "even":
        start = math.pi / 2  # y'(0) = 0
    else:
        start = 0.0  # y(0) = 0
    # ce_2n, se_2n+1 end with y'(pi/2)=0; ce_2n+1, se_2n+2 end with y(pi/2)=0
    end_is_zero_value = (kind == "even" and m % 2 == 1) or (kind == "odd" and m % 2 == 0)
    end = math.pi if end_is_zero_value else math.pi / 2
    if kind == "odd" and m % 2 == 0:
        n = (m - 2) // 2
    return start, end, n


def _prufer_end(a: float, q: float, start: float) -> float:
    def rhs(nu, th):
        return [math.cos(th[0]) ** 2 + (a - 2.0 * q * math.cos(2.0 * nu)) * math.sin(th[0]) ** 2]

    sol = solve_ivp(rhs, (0.0, math.pi / 2), [start], method="DOP853", rtol=RTOL, atol=ATOL)
    return float(sol.y[0, -1])


@lru_cache(maxsize=None)
def characteristic_value(kind: str, m: int, q: float) -> float:
    start, end, n = _class_of(kind, m)
    target = end + n * math.pi
    lo, hi = -2.0 * q - 2.0, m * m + 2.0 * q + 2.0
    while _prufer_end(hi, q, start) < target:
        hi += 10.0 + hi
    return brentq(lambda a: _prufer_end(a, q, start) - target, lo, hi, xtol=1e-14, rtol=1e-15, maxiter=200)


def _sign_at_half_pi(kind: str, m: int) -> tuple[int, int]:
    """(which, sign): which=0 pins y(pi/2), which=1 pins y'(pi/2)."""
    if kind == "even":
        n = m // 2
        return (0, (-1) ** n) if m % 2 == 0 else (1, (-1) ** (n + 1))
    if m % 2 == 1:
        return 0, (-1) ** ((m - 1) // 2)
    return 1, (-1) ** ((m - 2) // 2 + 1)


def _angular_ivp(kind: str, a: float, q: float, t_end: float):
    y0 = [1.0, 0.0] if kind == "even" else [0.0, 1.0]

    def rhs(nu, y):
        return [y[1], -(a - 2.0 * q * math.cos(2.0 * nu)) * y[0]]

    return solve_ivp(rhs, (0.0, t_end), y0, method="DOP853", rtol=RTOL, atol=ATOL, dense_output=True)


@lru_cache(maxsize=None)
def _angular_normalizer(kind: str, m: int, q: float) -> float:
    a = characteristic_value(kind, m, q)
    sol = _angular_ivp(kind, a, q, math.pi / 2)
    # every class is symmetric enough that |y|^2 over [0, 2 pi] is 4x the quarter
    quarter, _ = quad(lambda t: sol.sol(t)[0] ** 2, 0.0, math.pi / 2, epsabs=0.0, epsrel=1e-13, limit=400)
    which, sign = _sign_at_half_pi(kind, m)
    at_half = sol.sol(math.pi / 2)[which]
    return math.copysign(1.0, at_half) * sign / math.sqrt(4.0 * quarter / math.pi)


def angular(kind: str, m: int, q: float, nu: float) -> tuple[float, float]:
    """(ce or se, derivative) at nu in [0, 2 pi], normalized so the square integrates to pi."""
    a = characteristic_value(kind, m, q)
    sol = _angular_ivp(kind, a, q, max(nu, 1e-9))
    scale = _angular_normalizer(kind, m, q)
    y, dy = sol.sol(nu)
    return scale * y, scale * dy


def radial(kind: str, m: int, q: float, mu: float) -> tuple[float, float]:
    """(Ce or Se, derivative) with Ce(0)=1, Ce'(0)=0 or Se(0)=0, Se'(0)=1."""
    a = characteristic_value(kind, m, q)
    y0 = [1.0, 0.0] if kind == "even" else [0.0, 1.0]

    def rhs(t, y):
        return [y[1], (a - 2.0 * q * math.cosh(2.0 * t)) * y[0]]

    sol = solve_ivp(rhs, (0.0, mu), y0, method="DOP853", rtol=RTOL, atol=ATOL)
    return float(sol.y[0, -1]), float(sol.y[1, -1])


def neumann_roots_on_grid(kind: str, m: int, mu0: float, qs: np.ndarray) -> np.ndarray:
    """Sign of the radial derivative at mu0 for each q (coarse root locator)."""
    return np.array([radial(kind, m, float(q), mu0)[1] for q in qs])
