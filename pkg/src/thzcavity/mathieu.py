"""Angular and radial (modified) Mathieu functions of integer order.

Conventions
-----------
Angular functions solve ``y'' + (a - 2q cos 2v) y = 0``::

    ce_m(v, q) = sum_k A_k cos(k v)      se_m(v, q) = sum_k B_k sin(k v)

with ``k`` running over the even or odd integers matching ``m``.  Coefficients
are normalized so that ``int_0^{2pi} ce_m^2 dv = pi`` (likewise for se_m), and
the sign is fixed at v = pi/2: ``ce_2n(pi/2) ~ (-1)^n``,
``ce'_2n+1(pi/2) ~ (-1)^(n+1)``, ``se_2n+1(pi/2) ~ (-1)^n``,
``se'_2n+2(pi/2) ~ (-1)^(n+1)``.  For real q >= 0 this agrees with the usual
``ce_m(0) > 0``, ``se_m'(0) > 0`` rule but does not depend on the
exponentially small values near v = 0 at large q.

Radial functions solve ``Y'' - (a - 2q cosh 2u) Y = 0`` and are the
first-kind solutions proportional to ``ce_m(iu, q)`` and ``-i se_m(iu, q)``.
They are evaluated from the Bessel-product series and normalized at the
origin::

    Ce_m(0, q) = 1, Ce_m'(0, q) = 0        Se_m(0, q) = 0, Se_m'(0, q) = 1

so that at q = 0 they reduce to ``cosh(m u)`` and ``sinh(m u) / m``.  Zeros of
the radial functions and of their derivatives do not depend on this choice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.linalg import eigh_tridiagonal

from thzcavity.bessel import bessel_j_table

TAIL_TOLERANCE = 1e-14
MAX_TRUNCATION = 8192
# largest sqrt(q) * exp(mu) the Bessel tables are asked to handle
MAX_RADIAL_ARGUMENT = 1e4


class Parity(str, Enum):
    EVEN = "even"
    ODD = "odd"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, eq=False)
class MathieuSolution:
    """Characteristic value and Fourier coefficients of ce_m or se_m.

    ``coeffs[j]`` multiplies ``cos(k_j v)`` (even) or ``sin(k_j v)`` (odd)
    where ``k_j = wavenumbers[j]``.
    """

    kind: Parity
    order: int
    q: float
    char_value: float
    coeffs: np.ndarray
    truncation: int

    @property
    def wavenumbers(self) -> np.ndarray:
        return _first_wavenumber(self.kind, self.order) + 2 * np.arange(len(self.coeffs))

    def scaled(self, factor: float) -> "MathieuSolution":
        """Same solution with every coefficient multiplied by ``factor``."""
        if factor == 0.0 or not math.isfinite(factor):
            raise ValueError("scale factor must be finite and nonzero")
        coeffs = self.coeffs * factor
        coeffs.setflags(write=False)
        return MathieuSolution(self.kind, self.order, self.q, self.char_value, coeffs, self.truncation)


def _check_kind(kind, m) -> Parity:
    kind = Parity(kind)
    if isinstance(m, bool) or int(m) != m:
        raise ValueError(f"order must be an integer, got {m!r}")
    if kind is Parity.EVEN and m < 0:
        raise ValueError(f"even Mathieu functions need m >= 0, got {m}")
    if kind is Parity.ODD and m < 1:
        raise ValueError(f"odd Mathieu functions need m >= 1, got {m}")
    return kind


def _first_wavenumber(kind: Parity, m: int) -> int:
    if m % 2:
        return 1
    return 0 if kind is Parity.EVEN else 2


def _class_index(kind: Parity, m: int) -> int:
    if kind is Parity.ODD and m % 2 == 0:
        return m // 2 - 1
    return m // 2


def default_truncation(m: int, q: float) -> int:
    return max(25, m + 10 + math.ceil(1.5 * math.sqrt(q)))


def _recurrence_matrix(kind: Parity, m: int, q: float, size: int):
    """Diagonal and off-diagonal of the symmetrized three-term recurrence."""
    k = _first_wavenumber(kind, m) + 2 * np.arange(size)
    diag = (k * k).astype(float)
    off = np.full(size - 1, q, dtype=float)
    if k[0] == 0:
        # A_0 enters row 1 as 2q A_0; scaling A_0 by sqrt(2) symmetrizes it
        off[0] = math.sqrt(2.0) * q
    elif k[0] == 1:
        diag[0] += q if kind is Parity.EVEN else -q
    return diag, off


def _sign_reference(kind: Parity, m: int, coeffs: np.ndarray) -> tuple[float, int]:
    """Quantity at v = pi/2 whose sign is pinned, and the sign it must have."""
    k = _first_wavenumber(kind, m) + 2 * np.arange(len(coeffs))
    n = m // 2 if m % 2 == 0 else (m - 1) // 2
    alt = np.where(np.arange(len(coeffs)) % 2 == 0, 1.0, -1.0)
    if kind is Parity.EVEN and m % 2 == 0:
        return float(np.dot(alt, coeffs)), (-1) ** n
    if kind is Parity.EVEN:
        return float(-np.dot(k * alt, coeffs)), (-1) ** (n + 1)
    if m % 2:
        return float(np.dot(alt, coeffs)), (-1) ** n
    n = m // 2 - 1
    return float(-np.dot(k * alt, coeffs)), (-1) ** (n + 1)


def solve_characteristic(kind, m: int, q: float, truncation: int | None = None) -> MathieuSolution:
    """Characteristic value a_m(q) / b_m(q) and Fourier coefficients.

    The truncated recurrence is solved as a symmetric tridiagonal eigenproblem.
    Unless ``truncation`` is given, the size starts at
    ``max(25, m + 10 + ceil(1.5 sqrt(q)))`` and doubles until the last retained
    coefficient is below ``1e-14`` of the largest.
    """
    kind = _check_kind(kind, m)
    m = int(m)
    q = float(q)
    if not math.isfinite(q):
        raise ValueError(f"q must be finite, got {q!r}")
    if q < 0.0:
        raise ValueError(f"negative q is not supported, got {q!r}")

    idx = _class_index(kind, m)
    size = truncation if truncation is not None else default_truncation(m, q)
    if size <= idx + 1:
        raise ValueError(f"truncation {size} too small for order {m}")
    while True:
        diag, off = _recurrence_matrix(kind, m, q, size)
        w, v = eigh_tridiagonal(diag, off, select="i", select_range=(idx, idx))
        coeffs = v[:, 0].copy()
        if _first_wavenumber(kind, m) == 0:
            coeffs[0] /= math.sqrt(2.0)
        tail_ok = abs(coeffs[-1]) < TAIL_TOLERANCE * np.max(np.abs(coeffs))
        if tail_ok or truncation is not None:
            break
        if size >= MAX_TRUNCATION:
            raise RuntimeError(f"Fourier series for {kind} m={m}, q={q} did not converge")
        size *= 2

    ref, want = _sign_reference(kind, m, coeffs)
    if ref * want < 0.0:
        coeffs = -coeffs
    coeffs.setflags(write=False)
    return MathieuSolution(kind, m, q, float(w[0]), coeffs, size)


# ---------------------------------------------------------------- angular


def _angular(sol: MathieuSolution, nu, deriv: int, magnitude: bool = False) -> np.ndarray:
    nu = np.asarray(nu, dtype=float)
    k = sol.wavenumbers.astype(float)
    phase = np.multiply.outer(nu, k)
    if sol.kind is Parity.EVEN:
        basis = (np.cos, lambda t: -np.sin(t), lambda t: -np.cos(t))[deriv](phase)
    else:
        basis = (np.sin, np.cos, lambda t: -np.sin(t))[deriv](phase)
    weights = sol.coeffs * k**deriv
    if magnitude:
        # sum of |terms|: the size the roundoff of the series scales with
        return np.abs(basis) @ np.abs(weights)
    return basis @ weights


def _scalar_out(value: np.ndarray):
    return float(value) if np.ndim(value) == 0 else value


def angular_value(sol: MathieuSolution, nu):
    """ce_m(nu, q) or se_m(nu, q); ``nu`` in radians, scalar or array."""
    return _scalar_out(_angular(sol, nu, 0))


def angular_derivative(sol: MathieuSolution, nu):
    return _scalar_out(_angular(sol, nu, 1))


def angular_second_derivative(sol: MathieuSolution, nu):
    return _scalar_out(_angular(sol, nu, 2))


# ---------------------------------------------------------------- radial


def _series_layout(sol: MathieuSolution) -> tuple[int, float]:
    """Order offset and cross-term sign of the Bessel-product series."""
    if sol.kind is Parity.EVEN:
        return (0 if sol.order % 2 == 0 else 1), 1.0
    return (1 if sol.order % 2 else 2), -1.0


def _extend_negative(table: np.ndarray) -> np.ndarray:
    """Rows for orders -K..K from a table of orders 0..K (J_-k = (-1)^k J_k)."""
    k = np.arange(1, table.shape[0])
    neg = table[1:] * np.where(k % 2 == 1, -1.0, 1.0)[:, None]
    return np.concatenate((neg[::-1], table))


def _product_series(sol: MathieuSolution, mu: np.ndarray, upto: int) -> list[np.ndarray]:
    """Unnormalized series and its first ``upto`` mu-derivatives at ``mu`` (1-D)."""
    h = math.sqrt(sol.q)
    u = h * np.exp(-mu)
    x = h * np.exp(mu)
    if np.any(x > MAX_RADIAL_ARGUMENT):
        raise OverflowError(f"radial argument too large for q={sol.q} (mu up to {mu.max():g})")
    c = sol.coeffs
    ell = np.arange(len(c))
    s = int(np.argmax(np.abs(c)))
    off, sigma = _series_layout(sol)
    kmax = len(c) + s + off
    both = _extend_negative(bessel_j_table(kmax, np.concatenate((u, x))))
    ju, jx = both[:, : len(mu)], both[:, len(mu) :]
    a_row = ell - s + kmax
    b_row = ell + s + off + kmax
    weights = np.where(ell % 2 == 0, 1.0, -1.0) * c

    au, bu = ju[a_row], ju[b_row]
    ax, bx = jx[a_row], jx[b_row]
    out = [weights @ (au * bx + sigma * bu * ax)]
    if upto == 0:
        return out
    # d/dmu J(u) = -u J'(u), d/dmu J(x) = x J'(x), J' = (J_{k-1} - J_{k+1}) / 2
    du_a = -0.5 * u * (ju[a_row - 1] - ju[a_row + 1])
    du_b = -0.5 * u * (ju[b_row - 1] - ju[b_row + 1])
    dx_a = 0.5 * x * (jx[a_row - 1] - jx[a_row + 1])
    dx_b = 0.5 * x * (jx[b_row - 1] - jx[b_row + 1])
    out.append(weights @ (du_a * bx + au * dx_b + sigma * (du_b * ax + bu * dx_a)))
    if upto == 1:
        return out
    # d2/dmu2 J_k(h e^{+-mu}) = (k^2 - arg^2) J_k(arg) by Bessel's equation
    ka2 = ((ell - s) ** 2).astype(float)[:, None]
    kb2 = ((ell + s + off) ** 2).astype(float)[:, None]
    first = (ka2 - u * u) * au * bx + 2.0 * du_a * dx_b + au * (kb2 - x * x) * bx
    second = (kb2 - u * u) * bu * ax + 2.0 * du_b * dx_a + bu * (ka2 - x * x) * ax
    out.append(weights @ (first + sigma * second))
    return out


def _radial(sol: MathieuSolution, mu, deriv: int):
    mu_arr = np.asarray(mu, dtype=float)
    if not np.all(np.isfinite(mu_arr)) or np.any(mu_arr < 0.0):
        raise ValueError("mu must be finite and non-negative")
    flat = mu_arr.reshape(-1)
    m = sol.order
    if sol.q == 0.0:
        with np.errstate(over="raise"):
            try:
                vals = _radial_q0(sol.kind, m, flat, deriv)
            except FloatingPointError as exc:
                raise OverflowError(f"cosh({m} mu) overflows for mu up to {flat.max():g}") from exc
        return _scalar_out(vals.reshape(mu_arr.shape))
    # the origin rides along for the normalization
    series = _product_series(sol, np.concatenate(([0.0], flat)), max(deriv, 1))
    norm = series[0][0] if sol.kind is Parity.EVEN else series[1][0]
    return _scalar_out((series[deriv][1:] / norm).reshape(mu_arr.shape))


def _radial_q0(kind: Parity, m: int, mu: np.ndarray, deriv: int) -> np.ndarray:
    if kind is Parity.EVEN:
        base = (np.cosh, np.sinh)[deriv % 2](m * mu)
        return m**deriv * base
    base = (np.sinh, np.cosh)[deriv % 2](m * mu)
    return float(m) ** (deriv - 1) * base


def radial_value(sol: MathieuSolution, mu):
    """Ce_m(mu, q) or Se_m(mu, q) for mu >= 0 (normalized at mu = 0)."""
    return _radial(sol, mu, 0)


def radial_derivative(sol: MathieuSolution, mu):
    """Exact mu-derivative of :func:`radial_value` (term-wise, not differenced)."""
    return _radial(sol, mu, 1)


def radial_second_derivative(sol: MathieuSolution, mu):
    return _radial(sol, mu, 2)


def ode_residual(sol: MathieuSolution, t, which: str = "angular", scaled: bool = False):
    """Residual of the (modified) Mathieu equation evaluated from the series.

    ``which="angular"``: ``y'' + (a - 2q cos 2t) y``;
    ``which="radial"``: ``Y'' - (a - 2q cosh 2t) Y``.
    With ``scaled=True`` the residual is divided by the local magnitude of
    the two terms; on the angular side that is the sum of the absolute
    series terms, which stays meaningful where ce/se are exponentially small.
    """
    t = np.asarray(t, dtype=float)
    a, q = sol.char_value, sol.q
    if which == "angular":
        y = _angular(sol, t, 0)
        ypp = _angular(sol, t, 2)
        pot = a - 2.0 * q * np.cos(2.0 * t)
        res = ypp + pot * y
        mag = _angular(sol, t, 2, magnitude=True) + np.abs(pot) * _angular(sol, t, 0, magnitude=True)
    elif which == "radial":
        y = np.asarray(_radial(sol, t, 0))
        ypp = np.asarray(_radial(sol, t, 2))
        pot = a - 2.0 * q * np.cosh(2.0 * t)
        res, mag = ypp - pot * y, np.abs(ypp) + np.abs(pot * y)
    else:
        raise ValueError(f"which must be 'angular' or 'radial', got {which!r}")
    if scaled:
        res = np.where(mag > 0.0, res / np.where(mag > 0.0, mag, 1.0), res)
    return _scalar_out(res)


# ---------------------------------------------------------------- batched


def _coefficients_many(kind: Parity, m: int, qs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Characteristic values and sign-fixed coefficients for many q at once."""
    idx = _class_index(kind, m)
    size = default_truncation(m, float(qs.max()))
    k0 = _first_wavenumber(kind, m)
    while True:
        k = k0 + 2 * np.arange(size)
        mats = np.zeros((len(qs), size, size))
        diag = np.arange(size)
        mats[:, diag, diag] = (k * k).astype(float)
        mats[:, diag[:-1], diag[1:]] = qs[:, None]
        mats[:, diag[1:], diag[:-1]] = qs[:, None]
        if k0 == 0:
            mats[:, 0, 1] = mats[:, 1, 0] = math.sqrt(2.0) * qs
        elif k0 == 1:
            mats[:, 0, 0] += qs if kind is Parity.EVEN else -qs
        w, v = np.linalg.eigh(mats)
        coeffs = v[:, :, idx].copy()
        if k0 == 0:
            coeffs[:, 0] /= math.sqrt(2.0)
        peak = np.max(np.abs(coeffs), axis=1)
        if np.all(np.abs(coeffs[:, -1]) < TAIL_TOLERANCE * peak):
            break
        if size >= MAX_TRUNCATION:
            raise RuntimeError(f"Fourier series for {kind} m={m} did not converge")
        size *= 2
    alt = np.where(np.arange(size) % 2 == 0, 1.0, -1.0)
    n = (m // 2 - 1) if (kind is Parity.ODD and m % 2 == 0) else m // 2
    if (kind is Parity.EVEN) == (m % 2 == 0):
        ref, want = coeffs @ alt, (-1) ** n
    else:
        ref, want = -(coeffs @ (k * alt)), (-1) ** (n + 1)
    coeffs[ref * want < 0.0] *= -1.0
    return w[:, idx], coeffs


def radial_derivative_many(kind, m: int, qs, mu: float) -> np.ndarray:
    """:func:`radial_derivative` at one ``mu`` for many q, vectorized over q.

    Used for scanning root brackets; agrees with the per-solution routine to
    rounding.
    """
    kind = _check_kind(kind, m)
    qs = np.asarray(qs, dtype=float)
    if np.any(~np.isfinite(qs)) or np.any(qs < 0.0):
        raise ValueError("q values must be finite and non-negative")
    out = np.empty(qs.shape)
    zero = qs == 0.0
    if np.any(zero):
        out[zero] = _radial_q0(kind, m, np.array([mu]), 1)[0]
    live = np.flatnonzero(~zero)
    if live.size == 0:
        return out
    q = qs[live]
    _, c = _coefficients_many(kind, m, q)
    nq, n = c.shape
    h = np.sqrt(q)
    u, x = h * math.exp(-mu), h * math.exp(mu)
    if np.any(x > MAX_RADIAL_ARGUMENT):
        raise OverflowError(f"radial argument too large at mu={mu:g}")
    ell = np.arange(n)
    s = np.argmax(np.abs(c), axis=1)
    off, sigma = _series_layout(MathieuSolution(kind, m, 0.0, 0.0, c[0], n))
    kmax = n + int(s.max()) + off
    table = _extend_negative(bessel_j_table(kmax, np.concatenate((h, u, x)))).T
    at_h, at_u, at_x = table[:nq], table[nq : 2 * nq], table[2 * nq :]
    a_row = ell[None, :] - s[:, None] + kmax
    b_row = ell[None, :] + s[:, None] + off + kmax
    weights = np.where(ell % 2 == 0, 1.0, -1.0)[None, :] * c

    def take(tab, rows):
        return np.take_along_axis(tab, rows, axis=1)

    def slope(tu, tx, uu, xx):
        au, bu, ax, bx = take(tu, a_row), take(tu, b_row), take(tx, a_row), take(tx, b_row)
        du_a = -0.5 * uu[:, None] * (take(tu, a_row - 1) - take(tu, a_row + 1))
        du_b = -0.5 * uu[:, None] * (take(tu, b_row - 1) - take(tu, b_row + 1))
        dx_a = 0.5 * xx[:, None] * (take(tx, a_row - 1) - take(tx, a_row + 1))
        dx_b = 0.5 * xx[:, None] * (take(tx, b_row - 1) - take(tx, b_row + 1))
        value = np.sum(weights * (au * bx + sigma * bu * ax), axis=1)
        deriv = np.sum(weights * (du_a * bx + au * dx_b + sigma * (du_b * ax + bu * dx_a)), axis=1)
        return value, deriv

    origin_value, origin_slope = slope(at_h, at_h, h, h)
    _, boundary = slope(at_u, at_x, u, x)
    norm = origin_value if kind is Parity.EVEN else origin_slope
    out[live] = boundary / norm
    return out
