"""Rotating-frame map and numerical checks of the Larmor cancellation.

The lab-frame operator to first order in B is

    L u = (d_t - i alpha/r)**2 u - laplacian(u) + i e B d_phi u.

Every field handled here is a sum of harmonic components
``f(r, theta) exp(i (M phi - omega t))``, so the t and phi derivatives
are exact and only the r and theta parts of the Laplacian use finite
differences.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ConsistencyError, DomainError, SamplingError
from .field import ModePair, mode_profile
from .model import ModelParams
from .orbit import OrbitSolution

__all__ = [
    "HarmonicComponent",
    "ResidualReport",
    "rotate_coordinates",
    "mode_components",
    "lab_operator_residual",
    "larmor_cancellation_test",
    "particle_larmor_check",
    "default_fd_step",
]


@dataclass(frozen=True)
class HarmonicComponent:
    """``profile(r, theta) * exp(i (azimuthal * phi - omega * t))``."""

    profile: Callable[[float, float], complex]
    azimuthal: int
    omega: float

    def value(self, t: float, r: float, theta: float, phi: float) -> complex:
        return self.profile(r, theta) * np.exp(1j * (self.azimuthal * phi - self.omega * t))


@dataclass(frozen=True)
class ResidualReport:
    """RMS lab-operator residuals of the rotated and unrotated fields."""

    sample_points: list
    residual_rotated: float
    residual_unrotated: float
    ratio: float
    B_value: float
    fd_step: float
    per_point_rotated: list = field(default_factory=list)
    per_point_unrotated: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "sample_count": len(self.sample_points),
            "residual_rotated": self.residual_rotated,
            "residual_unrotated": self.residual_unrotated,
            "ratio": self.ratio,
            "B": self.B_value,
            "fd_step": self.fd_step,
        }


def rotate_coordinates(t: float, point: tuple[float, float, float], omega_L: float) -> tuple[float, float, float]:
    """Cylindrical ``(rho, phi, z)`` seen from a frame rotating at ``omega_L``."""
    rho, phi, z = point
    return rho, phi - omega_L * t, z


def default_fd_step(r_n: float) -> float:
    return 1e-4 * r_n


def mode_components(pair: ModePair, rotated: bool = True) -> list[HarmonicComponent]:
    """The pair's two modes as harmonic components.

    ``rotated=True`` gives the lab field (Larmor-shifted frequencies);
    ``rotated=False`` the same profiles with the zero-field frequencies,
    i.e. the field-free solution left unrotated.
    """
    out = []
    for which in ("plus", "minus"):
        p = pair.part(which)
        if p["A"] == 0:
            continue

        def profile(r, theta, _which=which):
            x = 0.0 if theta == 0.5 * math.pi else math.cos(theta)
            return mode_profile(pair, _which, r, x)

        out.append(HarmonicComponent(
            profile=profile,
            azimuthal=p["sign"] * p["m"],
            omega=p["omega"] if rotated else p["omega0"],
        ))
    return out


def _second_diff(f, x, h):
    f0 = f(x)
    fp, fm = f(x + h), f(x - h)
    return f0, (fp - fm) / (2.0 * h), (fp - 2.0 * f0 + fm) / (h * h)


def _richardson(f, x, h):
    f0, d1h, d2h = _second_diff(f, x, h)
    _, d1H, d2H = _second_diff(f, x, 2.0 * h)
    return f0, (4.0 * d1h - d1H) / 3.0, (4.0 * d2h - d2H) / 3.0


def lab_operator_residual(
    components: Sequence[HarmonicComponent],
    point: tuple[float, float, float, float],
    params: ModelParams,
    fd_step: float,
) -> complex:
    """Apply the first-order lab operator to a sum of harmonic components.

    Parameters
    ----------
    components : sequence of HarmonicComponent
    point : (t, r, theta, phi)
    params : ModelParams
        Supplies alpha, e and B.
    fd_step : float
        Radial step; the polar step is ``fd_step / r``. Both derivatives
        use Richardson extrapolation over steps h and 2h.

    Raises
    ------
    DomainError
        Stencil within ``10 fd_step`` of the centre or the polar axis.
    """
    t, r, theta, phi = point
    if not fd_step > 0.0:
        raise DomainError(f"fd_step must be positive, got {fd_step!r}")
    sin_t = math.sin(theta)
    if r < 10.0 * fd_step or r * abs(sin_t) < 10.0 * fd_step:
        raise DomainError("finite-difference stencil too close to r = 0 or the polar axis")
    h_theta = fd_step / r
    alpha = params.alpha
    e_B = params.e_charge * params.B
    cot_t = math.cos(theta) / sin_t
    total = 0j
    for comp in components:
        f0, fr, frr = _richardson(lambda x: comp.profile(x, theta), r, fd_step)
        _, ft, ftt = _richardson(lambda x: comp.profile(r, x), theta, h_theta)
        M = comp.azimuthal
        lap = frr + 2.0 * fr / r + (ftt + cot_t * ft) / (r * r) - M * M * f0 / (r * r * sin_t * sin_t)
        op = -((comp.omega + alpha / r) ** 2) * f0 - lap - e_B * M * f0
        total += op * np.exp(1j * (M * phi - comp.omega * t))
    return complex(total)


def _sample_points(r_n, count, seed, radial_spread):
    rng = np.random.default_rng(seed)
    r = r_n * (1.0 + radial_spread * rng.uniform(-1.0, 1.0, count))
    theta = rng.uniform(math.pi / 3.0, 2.0 * math.pi / 3.0, count)
    phi = rng.uniform(0.0, 2.0 * math.pi, count)
    # time within one zero-field orbital period
    t = rng.uniform(0.0, 1.0, count)
    return r, theta, phi, t


def larmor_cancellation_test(
    pair: ModePair,
    params: ModelParams,
    sample_count: int = 64,
    seed: int = 0,
    fd_step: float | None = None,
    radial_spread: float = 0.05,
) -> ResidualReport:
    """Compare the lab-operator residual of rotated and unrotated fields.

    Sample points are drawn with a seeded generator: r within
    ``radial_spread`` of the orbit radius, theta in [pi/3, 2pi/3].

    Raises
    ------
    SamplingError
        ``sample_count < 1``.
    ConsistencyError
        The pair was built for a different field than ``params``.
    """
    if sample_count < 1:
        raise SamplingError(f"sample_count must be positive, got {sample_count!r}")
    if not math.isclose(pair.e_B, params.e_charge * params.B, rel_tol=1e-12, abs_tol=0.0):
        raise ConsistencyError("mode pair was built for a different magnetic field")
    h = default_fd_step(pair.r_n) if fd_step is None else fd_step
    rot = mode_components(pair, rotated=True)
    unrot = mode_components(pair, rotated=False)
    r, theta, phi, t_frac = _sample_points(pair.r_n, sample_count, seed, radial_spread)
    period = 2.0 * math.pi * pair.r_n / max(abs(pair.n_tilde / pair.N_big), 1e-300)
    points, res_rot, res_unrot = [], [], []
    for i in range(sample_count):
        pt = (float(t_frac[i] * period), float(r[i]), float(theta[i]), float(phi[i]))
        points.append(pt)
        res_rot.append(abs(lab_operator_residual(rot, pt, params, h)))
        res_unrot.append(abs(lab_operator_residual(unrot, pt, params, h)))
    rms_rot = float(np.sqrt(np.mean(np.square(res_rot))))
    rms_unrot = float(np.sqrt(np.mean(np.square(res_unrot))))
    ratio = rms_rot / rms_unrot if rms_unrot > 0.0 else math.nan
    return ResidualReport(
        sample_points=points, residual_rotated=rms_rot, residual_unrotated=rms_unrot,
        ratio=ratio, B_value=params.B, fd_step=h,
        per_point_rotated=res_rot, per_point_unrotated=res_unrot,
    )


def particle_larmor_check(orbit_B: OrbitSolution, orbit_0: OrbitSolution, omega_L: float) -> dict[str, float]:
    """Residuals of the particle-side Larmor map.

    ``velocity_map = |v_B - (v_0 + omega_L r_0)|`` and
    ``energy_map = |E_B - (E_0 + n omega_L)|``; both are second order in B.
    """
    if orbit_B.n != orbit_0.n:
        raise ConsistencyError(f"orbits have different n: {orbit_B.n!r} vs {orbit_0.n!r}")
    if orbit_B.m_eff != orbit_0.m_eff or orbit_B.method != orbit_0.method:
        raise ConsistencyError("orbits must share m_eff and solver method")
    return {
        "velocity_map": abs(orbit_B.v - (orbit_0.v + omega_L * orbit_0.r)),
        "energy_map": abs(orbit_B.E - (orbit_0.E + orbit_B.n * omega_L)),
    }
