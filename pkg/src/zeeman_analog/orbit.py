"""Circular orbits of a charge in a Coulomb field plus a uniform magnetic field.

Sign conventions, used consistently across the package:

* ``v > 0`` means anticlockwise motion (along +phi-hat) seen from +z;
* ``n`` carries the sign of the angular momentum L_z;
* ``omega_L = -e B / (2 m_eff)``, positive for B > 0 since e < 0.

The exact solvers treat ``n`` as a continuous real number. The quantities
``r``, ``v`` and ``E`` are found from the radial force balance together
with the action condition ``J = 2 pi n``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, IntegrationError, NoOrbitError, RegimeError, WeakFieldWarning
from .model import ModelParams, larmor_frequency

__all__ = [
    "OrbitSolution",
    "Trajectory",
    "ZeemanRow",
    "METHODS",
    "bohr_radius",
    "regime_parameter",
    "solve_orbit_exact",
    "orbit_perturbative",
    "zeeman_table",
    "action_integral",
    "lorentz_residual",
    "integrate_orbit_ode",
    "circular_initial_state",
    "orbital_period",
    "mean_angular_velocity",
]

METHODS = ("exact-relativistic", "exact-nonrelativistic", "perturbative")
REGIME_WARN = 0.01
REGIME_MAX = 0.1
_MAX_ITER = 200
_ODE_SPEED_LIMIT = 0.05


@dataclass(frozen=True)
class OrbitSolution:
    """One circular orbit.

    Attributes
    ----------
    n : float
        Signed action quantum, J / (2 pi).
    r, v : float
        Radius and signed speed (anticlockwise positive).
    gamma : float
        Kinematic Lorentz factor ``1 / sqrt(1 - v**2)``.
    E : float
        Energy including rest mass. ``gamma m - alpha/r`` for the
        relativistic solver, ``m + m v**2/2 - alpha/r`` for the
        nonrelativistic solver, the closed form for the perturbative one.
    E_nonrel : float
        ``m + m v**2/2 - alpha/r`` for every method, so energies of
        different methods can be put side by side.
    P : float
        Canonical momentum along the orbit, ``gamma_dyn m v + e B r / 2``
        where ``gamma_dyn`` is 1 except for the relativistic solver.
    omega_L, m_eff : float
        Larmor frequency and mass the orbit was solved with.
    method : str
        One of :data:`METHODS`.
    iterations : int
        Root-finder iterations (0 for closed forms).
    """

    n: float
    r: float
    v: float
    gamma: float
    E: float
    E_nonrel: float
    P: float
    omega_L: float
    m_eff: float
    method: str
    B: float
    iterations: int = 0

    @property
    def gamma_dyn(self) -> float:
        """Lorentz factor that enters the dynamics (1 unless relativistic)."""
        return self.gamma if self.method == "exact-relativistic" else 1.0

    @property
    def angular_velocity(self) -> float:
        return self.v / self.r

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "r": self.r,
            "v": self.v,
            "gamma": self.gamma,
            "E": self.E,
            "E_nonrel": self.E_nonrel,
            "P": self.P,
            "omega_L": self.omega_L,
            "m_eff": self.m_eff,
            "B": self.B,
            "method": self.method,
            "iterations": self.iterations,
        }


@dataclass(frozen=True)
class Trajectory:
    """Fixed-step trajectory in the orbital plane.

    ``samples`` has one row ``(t, x, y, vx, vy)`` per stored step.
    """

    samples: np.ndarray
    dt: float
    params: ModelParams
    m_eff: float

    @property
    def t(self) -> np.ndarray:
        return self.samples[:, 0]

    def radius(self) -> np.ndarray:
        return np.hypot(self.samples[:, 1], self.samples[:, 2])

    def energy(self) -> np.ndarray:
        """Nonrelativistic energy ``m v**2/2 - alpha/r`` (B does no work)."""
        s = self.samples
        return 0.5 * self.m_eff * (s[:, 3] ** 2 + s[:, 4] ** 2) - self.params.alpha / self.radius()


@dataclass(frozen=True)
class ZeemanRow:
    n: float
    E0: float
    E_pert: float
    dE: float
    E_exact: float
    dE_exact: float
    omega_L: float


def _check_n(n):
    if not math.isfinite(n):
        raise DomainError(f"n must be finite, got {n!r}")
    if n == 0:
        raise DomainError("n = 0 has no circular orbit")


def _check_mass(m_eff):
    if not (math.isfinite(m_eff) and m_eff > 0.0):
        raise DomainError(f"m_eff must be positive, got {m_eff!r}")


def bohr_radius(n: float, alpha: float, m_eff: float) -> float:
    """Zero-field radius ``n**2 / (m_eff alpha)``."""
    return n * n / (m_eff * alpha)


def regime_parameter(n: float, params: ModelParams, m_eff: float) -> float:
    """Weak-field expansion parameter ``|m_eff omega_L r0**2 / n|``.

    Equals the ratio of the Larmor frequency to the zero-field orbital
    angular velocity; the radius correction is its square.
    """
    _check_n(n)
    _check_mass(m_eff)
    omega_L = larmor_frequency(params, m_eff)
    r0 = bohr_radius(n, params.alpha, m_eff)
    return abs(m_eff * omega_L * r0 * r0 / n)


def _safeguarded_newton(func, lo, hi, x0, xtol_rel=1e-15):
    """Newton steps kept inside a sign-change bracket, bisecting on escape.

    ``func`` returns ``(value, derivative)`` and must be increasing.
    """
    f_lo, _ = func(lo)
    f_hi, _ = func(hi)
    if not (f_lo < 0.0 < f_hi):
        raise NoOrbitError(
            f"no circular orbit in bracket [{lo!r}, {hi!r}]: residuals {f_lo!r}, {f_hi!r}",
            bracket=(lo, hi),
            residuals=(f_lo, f_hi),
        )
    x = x0
    for it in range(1, _MAX_ITER + 1):
        f, df = func(x)
        if f == 0.0:
            return x, it
        if f < 0.0:
            lo = x
        else:
            hi = x
        step_ok = df > 0.0 and math.isfinite(df)
        if step_ok:
            x_new = x - f / df
            if abs(x_new - x) <= xtol_rel * abs(x):
                return x_new, it
        if not (step_ok and lo < x_new < hi):
            x_new = 0.5 * (lo + hi)
        if hi - lo <= xtol_rel * abs(x):
            return x_new, it
        x = x_new
    return x, _MAX_ITER


def _quartic(n, m, alpha, omega_L):
    a4 = (m * omega_L) ** 2
    n2 = n * n
    ma = m * alpha

    def func(r):
        return a4 * r**4 + ma * r - n2, 4.0 * a4 * r**3 + ma

    return func


def _relativistic_balance(n, m, alpha, omega_L):
    # J = 2 pi n gives gamma v = p(r) exactly; the force balance is then a
    # function of r alone: alpha - m r p^2/g + 2 m omega_L r^2 p/g = 0
    def func(r):
        p = n / (m * r) + omega_L * r
        dp = -n / (m * r * r) + omega_L
        g = math.sqrt(1.0 + p * p)
        u = p * p / g
        du = p * (2.0 + p * p) / g**3
        w = p / g
        dw = 1.0 / g**3
        value = alpha - m * r * u + 2.0 * m * omega_L * r * r * w
        deriv = -m * (u + r * du * dp) + 2.0 * m * omega_L * (2.0 * r * w + r * r * dw * dp)
        return value, deriv

    return func


def solve_orbit_exact(
    n: float, params: ModelParams, m_eff: float, mode: str = "relativistic"
) -> OrbitSolution:
    """Numerically exact circular orbit with action ``2 pi n``.

    Parameters
    ----------
    n : float
        Signed, nonzero; need not be an integer.
    params : ModelParams
    m_eff : float
        Dressed mass.
    mode : {"relativistic", "nonrelativistic"}
        In nonrelativistic mode the Lorentz factor in the dynamics is 1
        and the radius solves ``(m w_L)**2 r**4 + m alpha r - n**2 = 0``.

    Returns
    -------
    OrbitSolution

    Raises
    ------
    DomainError
        ``n == 0``, bad mass or unknown mode.
    NoOrbitError
        No sign change of the balance equation in ``[r0/4, 4 r0]``.
    """
    _check_n(n)
    _check_mass(m_eff)
    alpha = params.alpha
    omega_L = larmor_frequency(params, m_eff)
    r0 = bohr_radius(n, alpha, m_eff)
    if mode == "nonrelativistic":
        func = _quartic(n, m_eff, alpha, omega_L)
        method = "exact-nonrelativistic"
    elif mode == "relativistic":
        func = _relativistic_balance(n, m_eff, alpha, omega_L)
        method = "exact-relativistic"
    else:
        raise DomainError(f"unknown mode {mode!r}")
    if omega_L == 0.0 and mode == "nonrelativistic":
        r, iterations = r0, 0
    else:
        r, iterations = _safeguarded_newton(func, 0.25 * r0, 4.0 * r0, r0)

    p = n / (m_eff * r) + omega_L * r
    if mode == "relativistic":
        gamma_dyn = math.sqrt(1.0 + p * p)
        v = p / gamma_dyn
    else:
        gamma_dyn = 1.0
        v = p
    if not abs(v) < 1.0:
        raise RegimeError(f"orbit speed |v| = {abs(v)!r} is not below 1")
    gamma = 1.0 / math.sqrt(1.0 - v * v)
    e_nonrel = m_eff + 0.5 * m_eff * v * v - alpha / r
    energy = gamma * m_eff - alpha / r if mode == "relativistic" else e_nonrel
    P = gamma_dyn * m_eff * v + 0.5 * params.e_charge * params.B * r
    return OrbitSolution(
        n=n, r=r, v=v, gamma=gamma, E=energy, E_nonrel=e_nonrel, P=P,
        omega_L=omega_L, m_eff=m_eff, method=method, B=params.B, iterations=iterations,
    )


def orbit_perturbative(n: float, params: ModelParams, m_eff: float) -> OrbitSolution:
    """Weak-field closed forms for radius, velocity and energy.

    ``r = r0 (1 - x**2)``, ``v = alpha/n + omega_L r0`` and
    ``E = m (1 - alpha**2 / (2 n**2)) + n omega_L`` with ``r0`` the
    zero-field radius and ``x`` from :func:`regime_parameter`.

    Raises
    ------
    RegimeError
        ``x > 0.1``. A :class:`WeakFieldWarning` is issued above 0.01.
    """
    x = regime_parameter(n, params, m_eff)
    if x > REGIME_MAX:
        raise RegimeError(f"weak-field parameter m_eff*omega_L*r0^2/|n| = {x:.3g} exceeds {REGIME_MAX}")
    if x > REGIME_WARN:
        warnings.warn(
            f"weak-field parameter m_eff*omega_L*r0^2/|n| = {x:.3g} above {REGIME_WARN}",
            WeakFieldWarning,
            stacklevel=2,
        )
    alpha = params.alpha
    omega_L = larmor_frequency(params, m_eff)
    r0 = bohr_radius(n, alpha, m_eff)
    r = r0 * (1.0 - (m_eff * omega_L) ** 2 * n**6 / (m_eff * alpha) ** 4)
    v = alpha / n + omega_L * r0
    energy = m_eff * (1.0 - alpha * alpha / (2.0 * n * n)) + n * omega_L
    gamma = 1.0 / math.sqrt(1.0 - v * v)
    P = m_eff * v + 0.5 * params.e_charge * params.B * r
    return OrbitSolution(
        n=n, r=r, v=v, gamma=gamma, E=energy,
        E_nonrel=m_eff + 0.5 * m_eff * v * v - alpha / r, P=P,
        omega_L=omega_L, m_eff=m_eff, method="perturbative", B=params.B,
    )


def zeeman_table(n_list: Iterable[float], params: ModelParams, m_eff: float) -> list[ZeemanRow]:
    """Zeeman-shifted levels for each ``n``.

    The perturbative shift ``dE = n omega_L`` is computed directly, so the
    table is exactly antisymmetric under ``n -> -n`` and ``B -> -B``. The
    exact columns come from the nonrelativistic solver at ``B`` and at 0.
    """
    omega_L = larmor_frequency(params, m_eff)
    zero = params.with_field(0.0)
    rows = []
    for n in n_list:
        _check_n(n)
        e0 = m_eff * (1.0 - params.alpha**2 / (2.0 * n * n))
        d_e = n * omega_L + 0.0  # no negative zero at B = 0
        exact = solve_orbit_exact(n, params, m_eff, mode="nonrelativistic").E
        exact0 = solve_orbit_exact(n, zero, m_eff, mode="nonrelativistic").E
        rows.append(ZeemanRow(n=n, E0=e0, E_pert=e0 + d_e, dE=d_e, E_exact=exact,
                              dE_exact=exact - exact0, omega_L=omega_L))
    return rows


def action_integral(orbit: OrbitSolution, params: ModelParams) -> float:
    """``J = 2 pi r (gamma_dyn m v + e B r / 2)``."""
    return 2.0 * math.pi * orbit.r * (
        orbit.gamma_dyn * orbit.m_eff * orbit.v + 0.5 * params.e_charge * params.B * orbit.r
    )


def lorentz_residual(orbit: OrbitSolution, params: ModelParams) -> float:
    """Force-balance mismatch normalized by the Coulomb force ``alpha/r**2``."""
    r, v = orbit.r, orbit.v
    coulomb = params.alpha / (r * r)
    total = -orbit.m_eff * orbit.gamma_dyn * v * v / r + coulomb - params.e_charge * v * params.B
    return abs(total) / coulomb


def orbital_period(orbit: OrbitSolution) -> float:
    return 2.0 * math.pi * orbit.r / abs(orbit.v)


def circular_initial_state(orbit: OrbitSolution) -> tuple[float, float, float, float]:
    """Start at (r, 0) moving along +y with the orbit's signed speed."""
    return (orbit.r, 0.0, 0.0, orbit.v)


def integrate_orbit_ode(
    initial: Sequence[float],
    params: ModelParams,
    m_eff: float,
    dt: float,
    steps: int,
    r_min: float | None = None,
    stride: int = 1,
) -> Trajectory:
    """Integrate ``m dv/dt = -alpha r_hat/r**2 + e v x B z_hat`` with classical RK4.

    Parameters
    ----------
    initial : (x, y, vx, vy)
    params : ModelParams
    m_eff : float
    dt : float
        Fixed step, > 0.
    steps : int
        Number of steps.
    r_min : float, optional
        Collision guard; defaults to 1e-3 times the initial radius.
    stride : int
        Store every ``stride``-th step (the first and last are always kept).

    Raises
    ------
    DomainError
        Bad step, or initial speed not below 0.05.
    IntegrationError
        Radius fell below ``r_min``; ``state`` holds the last good state.
    """
    _check_mass(m_eff)
    if not (math.isfinite(dt) and dt > 0.0):
        raise DomainError(f"dt must be positive, got {dt!r}")
    if steps < 1 or stride < 1:
        raise DomainError("steps and stride must be positive")
    x, y, vx, vy = (float(c) for c in initial)
    if not math.hypot(vx, vy) < _ODE_SPEED_LIMIT:
        raise DomainError(f"initial speed {math.hypot(vx, vy)!r} outside the nonrelativistic regime (< {_ODE_SPEED_LIMIT})")
    r_start = math.hypot(x, y)
    if r_start == 0.0:
        raise DomainError("initial position at the center")
    if r_min is None:
        r_min = 1e-3 * r_start

    k_c = params.alpha / m_eff
    k_b = params.e_charge * params.B / m_eff

    def accel(px, py, qx, qy):
        r = math.hypot(px, py)
        inv3 = k_c / (r * r * r)
        return -inv3 * px + k_b * qy, -inv3 * py - k_b * qx

    rows = [(0.0, x, y, vx, vy)]
    h = dt
    h2 = 0.5 * dt
    for i in range(1, steps + 1):
        a1x, a1y = accel(x, y, vx, vy)
        x2, y2, u2, w2 = x + h2 * vx, y + h2 * vy, vx + h2 * a1x, vy + h2 * a1y
        a2x, a2y = accel(x2, y2, u2, w2)
        x3, y3, u3, w3 = x + h2 * u2, y + h2 * w2, vx + h2 * a2x, vy + h2 * a2y
        a3x, a3y = accel(x3, y3, u3, w3)
        x4, y4, u4, w4 = x + h * u3, y + h * w3, vx + h * a3x, vy + h * a3y
        a4x, a4y = accel(x4, y4, u4, w4)
        nx = x + h / 6.0 * (vx + 2.0 * u2 + 2.0 * u3 + u4)
        ny = y + h / 6.0 * (vy + 2.0 * w2 + 2.0 * w3 + w4)
        nvx = vx + h / 6.0 * (a1x + 2.0 * a2x + 2.0 * a3x + a4x)
        nvy = vy + h / 6.0 * (a1y + 2.0 * a2y + 2.0 * a3y + a4y)
        if not math.hypot(nx, ny) >= r_min:
            raise IntegrationError(
                f"trajectory reached r < r_min = {r_min!r} at step {i}",
                state=(i * dt - dt, x, y, vx, vy),
            )
        x, y, vx, vy = nx, ny, nvx, nvy
        if i % stride == 0 or i == steps:
            rows.append((i * dt, x, y, vx, vy))
    return Trajectory(samples=np.array(rows), dt=dt, params=params, m_eff=m_eff)


def mean_angular_velocity(traj: Trajectory) -> float:
    """Least-squares slope of the unwrapped polar angle against time."""
    s = traj.samples
    angle = np.unwrap(np.arctan2(s[:, 2], s[:, 1]))
    t = s[:, 0]
    if len(t) < 3:
        raise DomainError("need at least three samples")
    slope, _ = np.polyfit(t - t.mean(), angle, 1)
    return float(slope)
