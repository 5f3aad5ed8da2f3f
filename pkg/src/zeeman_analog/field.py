"""Two counter-propagating guiding-wave modes and their sum.

Each mode is

    u_pm = A_pm R(r) P_l^m(cos theta) exp(i (pm m phi - omega_pm t))

with the Coulomb radial function
``R(r) = exp(i w r) r**lt M(lt + 1 - i alpha, 2 lt + 2, -2 i w r)``, which is
real. ``R`` is built with the zero-field frequency ``w = omega0``: the
rotating-frame solution is the field-free one, and the lab field differs
from it only by the Larmor shift ``pm m omega_L`` in the time phase. As a
result ``u(t, phi) = u_zero_field(t, phi - omega_L t)`` holds exactly.

Profiles are stored relative to their value on the orbit: the mode is
evaluated as ``A (R(r)/R(r_n)) (P(x)/P(0))``, so ``A_pm = u0/2`` and
neither ``r_n**lt`` nor ``P_l^m(0)`` (which overflow for l ~ 140) is ever
formed. The amplitude of the raw product is kept as a log-magnitude and a
sign.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from functools import lru_cache
from pathlib import Path
from typing import Literal

import numpy as np

from .errors import ConsistencyError, DomainError
from .model import ModelParams, larmor_frequency
from .orbit import OrbitSolution, solve_orbit_exact
from .specfun import kummer_m, lambda_tilde, legendre_ratio, log_abs_legendre_at_zero

__all__ = [
    "ModePair",
    "FieldGrid",
    "mode_frequencies_zero",
    "radial_log_abs",
    "build_mode_pair",
    "build_selection_pair",
    "zero_field_orbit",
    "mode_profile",
    "eval_mode",
    "eval_total_field",
    "field_on_circle",
    "field_on_orbit_closed_form",
    "group_velocity",
    "field_grid",
    "grid_to_csv",
    "grid_to_pgm",
    "write_grid_csv",
    "write_grid_pgm",
    "MAX_GRID_RESOLUTION",
]

MAX_GRID_RESOLUTION = 4096
DISPERSION_RTOL = 1e-12
_REAL_RTOL = 1e-9

Which = Literal["plus", "minus"]


@dataclass(frozen=True)
class ModePair:
    """Parameters of the two modes that guide one orbit.

    ``A_plus`` and ``A_minus`` multiply the orbit-normalized profiles
    (see module docstring). ``log_raw_plus`` / ``sign_raw_plus`` give the
    amplitude of the unnormalized product ``R(r) P_l^m(cos theta)``.
    ``defect_plus`` is the lab-frame dispersion residual
    ``k - omega - eps``; it vanishes at B = 0 and equals
    ``-omega_L (m - m_eff r_n)`` otherwise.
    """

    n: float
    r_n: float
    alpha: float
    m_eff: float
    omega_L: float
    e_B: float
    u0: float
    m_plus: int
    m_minus: int
    l_plus: int
    l_minus: int
    ltilde_plus: float
    ltilde_minus: float
    omega0_plus: float
    omega0_minus: float
    omega_plus: float
    omega_minus: float
    k_plus: float
    k_minus: float
    eps_plus: float
    eps_minus: float
    A_plus: complex
    A_minus: complex
    log_raw_plus: float = 0.0
    log_raw_minus: float = 0.0
    sign_raw_plus: float = 1.0
    sign_raw_minus: float = 1.0
    defect_plus: float = 0.0
    defect_minus: float = 0.0

    @property
    def n_tilde(self) -> float:
        return 0.5 * (self.m_plus - self.m_minus)

    @property
    def N_big(self) -> float:
        return 0.5 * (self.m_plus + self.m_minus)

    @property
    def k_n(self) -> float:
        return 0.5 * (self.k_plus - self.k_minus)

    @property
    def k_bar(self) -> float:
        return 0.5 * (self.k_plus + self.k_minus)

    @property
    def omega_n(self) -> float:
        return 0.5 * (self.omega_plus + self.omega_minus)

    @property
    def omega0_n(self) -> float:
        return 0.5 * (self.omega0_plus + self.omega0_minus)

    @property
    def beat(self) -> float:
        """Zero-field frequency difference ``omega0_+ - omega0_-``."""
        return self.omega0_plus - self.omega0_minus

    @property
    def eta(self) -> float:
        return 0.5 * (self.eps_plus - self.eps_minus)

    @property
    def eps_bar(self) -> float:
        return 0.5 * (self.eps_plus + self.eps_minus)

    def part(self, which: Which) -> dict:
        """Per-mode parameters as a dict (sign, m, l, ltilde, omega0, omega, A)."""
        if which == "plus":
            return dict(sign=1, m=self.m_plus, l=self.l_plus, ltilde=self.ltilde_plus,
                        omega0=self.omega0_plus, omega=self.omega_plus, A=self.A_plus)
        if which == "minus":
            return dict(sign=-1, m=self.m_minus, l=self.l_minus, ltilde=self.ltilde_minus,
                        omega0=self.omega0_minus, omega=self.omega_minus, A=self.A_minus)
        raise DomainError(f"which must be 'plus' or 'minus', got {which!r}")

    def detuned(self, factor: float) -> "ModePair":
        """Copy with both orbit wave numbers scaled by ``factor``.

        Breaks the synchronization with the orbit; used as a negative
        control by the phase-harmony check.
        """
        return replace(self, k_plus=self.k_plus * factor, k_minus=self.k_minus * factor)

    def to_dict(self) -> dict:
        out = {}
        for key in self.__dataclass_fields__:
            value = getattr(self, key)
            if isinstance(value, complex):
                out[key] = [value.real, value.imag]
            else:
                out[key] = value
        for key in ("n_tilde", "N_big", "k_n", "omega_n", "eta", "eps_bar"):
            out[key] = getattr(self, key)
        return out


@dataclass(frozen=True)
class FieldGrid:
    """Total field sampled on the z = 0 plane.

    ``values[j, i]`` is the field at ``(x[i], x[j])``; rows run along y.
    """

    t: float
    half_extent: float
    resolution: int
    x: np.ndarray
    values: np.ndarray
    magnitudes: np.ndarray


def mode_frequencies_zero(n: float, alpha: float, m_eff: float) -> tuple[float, float]:
    """Zero-field mode frequencies.

    ``omega0_pm = m_eff / sqrt(1 - a**2) * (1 pm a - a**2)`` with
    ``a = alpha / n``.
    """
    if n == 0 or not math.isfinite(n):
        raise DomainError(f"n must be finite and nonzero, got {n!r}")
    a = alpha / n
    if not abs(a) < 1.0:
        raise DomainError(f"|alpha/n| = {abs(a)!r} must be below 1")
    pre = m_eff / math.sqrt(1.0 - a * a)
    return pre * (1.0 + a - a * a), pre * (1.0 - a - a * a)


def radial_log_abs(r: float, ltilde: float, omega: float, alpha: float) -> tuple[float, float]:
    """``(log|R(r)|, sign R(r))`` for the Coulomb radial function.

    ``R = exp(i w r) r**lt M(lt + 1 - i alpha, 2 lt + 2, -2 i w r)`` is real
    by Kummer's transformation; the imaginary part is checked and dropped.
    Returns ``(-inf, 0.0)`` at a node.
    """
    if not r > 0.0:
        raise DomainError(f"r must be positive, got {r!r}")
    m_val = kummer_m(complex(ltilde + 1.0, -alpha), complex(2.0 * ltilde + 2.0, 0.0), complex(0.0, -2.0 * omega * r))
    f = cmath.exp(1j * omega * r) * m_val
    if abs(f.imag) > _REAL_RTOL * max(abs(f), 1e-300):
        raise ConsistencyError(f"radial function not real at r={r!r}: {f!r}")
    if f.real == 0.0:
        return -math.inf, 0.0
    return ltilde * math.log(r) + math.log(abs(f.real)), math.copysign(1.0, f.real)


@lru_cache(maxsize=1 << 16)
def _radial_ratio(r: float, ltilde: float, omega: float, alpha: float, r_n: float) -> float:
    if r == r_n:
        return 1.0
    log_r, sign_r = radial_log_abs(r, ltilde, omega, alpha)
    log_n, sign_n = radial_log_abs(r_n, ltilde, omega, alpha)
    if sign_r == 0.0:
        return 0.0
    return sign_r * sign_n * math.exp(log_r - log_n)


@lru_cache(maxsize=1 << 16)
def _angular_ratio(l: int, m: int, x: float) -> float:
    if x == 0.0:
        return 1.0
    return legendre_ratio(l, m, x)


def zero_field_orbit(n: float, params: ModelParams, m_eff: float) -> OrbitSolution:
    """Relativistic B = 0 orbit: the geometry shared by both modes."""
    return solve_orbit_exact(n, params.with_field(0.0), m_eff, mode="relativistic")


def build_mode_pair(
    m_plus: int,
    m_minus: int,
    orbit: OrbitSolution,
    params: ModelParams,
    l_plus: int | None = None,
    l_minus: int | None = None,
    rtol: float = DISPERSION_RTOL,
) -> ModePair:
    """Fill a :class:`ModePair` for azimuthal orders ``m_plus``, ``m_minus``.

    Parameters
    ----------
    m_plus, m_minus : int
        Non-negative azimuthal orders.
    orbit : OrbitSolution
        Zero-field relativistic orbit (see :func:`zero_field_orbit`); its
        radius is the r_n shared by both modes. The magnetic field is
        taken from ``params``.
    params : ModelParams
    l_plus, l_minus : int, optional
        Degrees, default ``l = m``.
    rtol : float
        Tolerance of the zero-field dispersion check
        ``m/r_n = omega0 + alpha/r_n``.

    Raises
    ------
    DomainError
        Invalid orders, or ``l + m`` odd (equatorial node: the amplitude
        condition has no solution).
    ConsistencyError
        Zero-field dispersion violated, i.e. ``(n, m_plus, m_minus)`` does
        not obey the selection rule for this alpha.
    """
    l_plus = m_plus if l_plus is None else l_plus
    l_minus = m_minus if l_minus is None else l_minus
    for name, value in (("m_plus", m_plus), ("m_minus", m_minus), ("l_plus", l_plus), ("l_minus", l_minus)):
        if isinstance(value, bool) or int(value) != value or value < 0:
            raise DomainError(f"{name} must be a non-negative integer, got {value!r}")
    m_plus, m_minus, l_plus, l_minus = int(m_plus), int(m_minus), int(l_plus), int(l_minus)
    if m_plus > l_plus or m_minus > l_minus:
        raise DomainError("need m <= l for both modes")
    for l, m in ((l_plus, m_plus), (l_minus, m_minus)):
        if (l + m) % 2:
            raise DomainError(f"equatorial node: amplitude condition unsolvable (l={l}, m={m}, l+m odd)")

    alpha = params.alpha
    m_eff = orbit.m_eff
    r_n = orbit.r
    omega_L = larmor_frequency(params, m_eff)
    e_B = params.e_charge * params.B
    w0p, w0m = mode_frequencies_zero(orbit.n, alpha, m_eff)
    k_p, k_m = m_plus / r_n, m_minus / r_n
    for label, k, w0 in (("plus", k_p, w0p), ("minus", k_m, w0m)):
        resid = k - w0 - alpha / r_n
        if abs(resid) > rtol * max(abs(k), abs(w0)):
            raise ConsistencyError(
                f"zero-field dispersion violated for the {label} mode: "
                f"k - omega0 - alpha/r_n = {resid:.3e} (n={orbit.n}, m+={m_plus}, m-={m_minus}, alpha={alpha!r})"
            )
    lt_p, lt_m = lambda_tilde(l_plus, alpha), lambda_tilde(l_minus, alpha)
    eps_p = alpha / r_n + 0.5 * e_B * r_n
    eps_m = alpha / r_n - 0.5 * e_B * r_n
    w_p = w0p + m_plus * omega_L
    w_m = w0m - m_minus * omega_L

    raw = []
    for l, m, lt, w0 in ((l_plus, m_plus, lt_p, w0p), (l_minus, m_minus, lt_m, w0m)):
        log_r, sign_r = radial_log_abs(r_n, lt, w0, alpha)
        if sign_r == 0.0:
            raise DomainError(f"radial node at the orbit radius (l={l}); amplitude condition unsolvable")
        sign_p = -1.0 if ((l - m) // 2) % 2 else 1.0
        log_amp = math.log(0.5 * params.u0) - log_r - log_abs_legendre_at_zero(l, m)
        raw.append((log_amp, sign_r * sign_p))

    return ModePair(
        n=orbit.n, r_n=r_n, alpha=alpha, m_eff=m_eff, omega_L=omega_L, e_B=e_B, u0=params.u0,
        m_plus=m_plus, m_minus=m_minus, l_plus=l_plus, l_minus=l_minus,
        ltilde_plus=lt_p, ltilde_minus=lt_m,
        omega0_plus=w0p, omega0_minus=w0m, omega_plus=w_p, omega_minus=w_m,
        k_plus=k_p, k_minus=k_m, eps_plus=eps_p, eps_minus=eps_m,
        A_plus=complex(0.5 * params.u0), A_minus=complex(0.5 * params.u0),
        log_raw_plus=raw[0][0], log_raw_minus=raw[1][0],
        sign_raw_plus=raw[0][1], sign_raw_minus=raw[1][1],
        defect_plus=k_p - w_p - eps_p, defect_minus=k_m - w_m - eps_m,
    )


def build_selection_pair(
    m_plus: int, m_minus: int, params: ModelParams, m_eff: float, **kwargs
) -> tuple[ModePair, OrbitSolution]:
    """Orbit with ``n = (m_plus - m_minus)/2`` and its mode pair."""
    n = 0.5 * (m_plus - m_minus)
    orbit = zero_field_orbit(n, params, m_eff)
    return build_mode_pair(m_plus, m_minus, orbit, params, **kwargs), orbit


def mode_profile(pair: ModePair, which: Which, r: float, cos_theta: float, omega: float | None = None) -> complex:
    """Time- and phi-independent factor ``A (R(r)/R(r_n)) (P(x)/P(0))``.

    ``omega`` overrides the radial frequency (default: the zero-field one).
    """
    p = pair.part(which)
    w = p["omega0"] if omega is None else omega
    if not r > 0.0:
        raise DomainError(f"r must be positive, got {r!r}")
    if p["A"] == 0:
        return 0j
    rad = _radial_ratio(float(r), p["ltilde"], w, pair.alpha, pair.r_n)
    ang = _angular_ratio(p["l"], p["m"], float(cos_theta))
    return p["A"] * rad * ang


def eval_mode(t: float, r: float, theta: float, phi: float, which: Which, pair: ModePair) -> complex:
    """Value of one mode at spherical point ``(r, theta, phi)`` and time ``t``."""
    p = pair.part(which)
    prof = mode_profile(pair, which, r, math.cos(theta) if theta != 0.5 * math.pi else 0.0)
    return prof * cmath.exp(1j * (p["sign"] * p["m"] * phi - p["omega"] * t))


def eval_total_field(t: float, point: tuple[float, float, float], pair: ModePair) -> complex:
    """``u_+ + u_-`` at ``point = (r, theta, phi)``."""
    r, theta, phi = point
    return eval_mode(t, r, theta, phi, "plus", pair) + eval_mode(t, r, theta, phi, "minus", pair)


def field_on_circle(pair: ModePair, t: float, r: float, phis: np.ndarray) -> np.ndarray:
    """Total field on the equatorial circle of radius ``r`` at angles ``phis``."""
    phis = np.asarray(phis, dtype=float)
    out = np.zeros(phis.shape, dtype=complex)
    for which in ("plus", "minus"):
        p = pair.part(which)
        prof = mode_profile(pair, which, r, 0.0)
        out += prof * np.exp(1j * (p["sign"] * p["m"] * phis - p["omega"] * t))
    return out


def group_velocity(pair: ModePair) -> float:
    """``(k_n - eta) / (omega_n + eps_bar)``."""
    den = pair.omega_n + pair.eps_bar
    if den == 0.0:
        raise DomainError("group velocity denominator omega_n + eps_bar is zero")
    return (pair.k_n - pair.eta) / den


def field_on_orbit_closed_form(
    t: float, phi: float, pair: ModePair, orbit: OrbitSolution, rtol: float = 1e-12
) -> complex:
    """Beat form of the total field on the orbit circle.

    ``u0 exp(i (n_tilde phi - omega_n t)) cos((omega_n + eps_bar)(r_n phi - v_g t))``.
    Agrees with the direct mode sum when the lab dispersion holds, i.e.
    exactly at B = 0; at B != 0 they differ by the Larmor defect, linearly
    in B.
    """
    if abs(orbit.r - pair.r_n) > rtol * pair.r_n:
        raise ConsistencyError(f"orbit radius {orbit.r!r} differs from the pair's r_n {pair.r_n!r}")
    vg = group_velocity(pair)
    wave = pair.omega_n + pair.eps_bar
    return pair.u0 * cmath.exp(1j * (pair.n_tilde * phi - pair.omega_n * t)) * math.cos(wave * (pair.r_n * phi - vg * t))


def field_grid(pair: ModePair, t: float, half_extent: float, resolution: int) -> FieldGrid:
    """Sample the total field on a square z = 0 grid centred on the nucleus.

    The centre point (r = 0) is set to 0. Profiles depend only on r, so
    they are computed once per distinct radius.
    """
    if isinstance(resolution, bool) or int(resolution) != resolution or resolution < 2:
        raise DomainError(f"resolution must be an integer >= 2, got {resolution!r}")
    if resolution > MAX_GRID_RESOLUTION:
        raise DomainError(f"resolution {resolution} exceeds the limit {MAX_GRID_RESOLUTION}")
    if not (math.isfinite(half_extent) and half_extent > 0.0):
        raise DomainError(f"half_extent must be positive, got {half_extent!r}")
    resolution = int(resolution)
    x = np.linspace(-half_extent, half_extent, resolution)
    xx, yy = np.meshgrid(x, x)
    rr = np.hypot(xx, yy)
    phi = np.arctan2(yy, xx)
    radii, inverse = np.unique(rr, return_inverse=True)
    inverse = inverse.reshape(rr.shape)
    values = np.zeros(rr.shape, dtype=complex)
    for which in ("plus", "minus"):
        p = pair.part(which)
        prof = np.array([mode_profile(pair, which, float(r), 0.0) if r > 0.0 else 0j for r in radii])
        values += prof[inverse] * np.exp(1j * (p["sign"] * p["m"] * phi - p["omega"] * t))
    values[rr == 0.0] = 0.0
    return FieldGrid(t=t, half_extent=half_extent, resolution=resolution, x=x,
                     values=values, magnitudes=np.abs(values))


def grid_to_csv(grid: FieldGrid) -> str:
    """Rows ``x, y, re, im, magnitude`` with 17 significant digits."""
    xx, yy = np.meshgrid(grid.x, grid.x)
    columns = (xx.ravel(), yy.ravel(), grid.values.real.ravel(), grid.values.imag.ravel(), grid.magnitudes.ravel())
    lines = ["x,y,re,im,magnitude"]
    lines.extend(",".join(f"{v:.17g}" for v in row) for row in zip(*columns))
    return "\n".join(lines) + "\n"


def grid_to_pgm(grid: FieldGrid) -> str:
    """Plain PGM (P2), ``round(255 |u| / max|u|)``; top row is +y."""
    mags = grid.magnitudes[::-1]
    peak = float(mags.max())
    levels = np.zeros(mags.shape, dtype=int) if peak == 0.0 else np.rint(mags / peak * 255.0).astype(int)
    lines = ["P2", f"{grid.resolution} {grid.resolution}", "255"]
    lines.extend(" ".join(str(v) for v in row) for row in levels)
    return "\n".join(lines) + "\n"


def write_grid_csv(grid: FieldGrid, path: str | Path) -> None:
    Path(path).write_text(grid_to_csv(grid))


def write_grid_pgm(grid: FieldGrid, path: str | Path) -> None:
    Path(path).write_text(grid_to_pgm(grid))
