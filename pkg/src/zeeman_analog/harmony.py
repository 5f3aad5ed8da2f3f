"""Wave-particle closure: selection rule, de Broglie relations, phase harmony.

The particle's internal clock stays in phase with the guiding field at
its position. Along a circular orbit this ties the field phase to the
particle Lagrangian, fixes the internal pulsation ``Omega_p`` and, through
the dressed mass ``m_p (1 + sigma Omega_p**2 z0**2)``, the mass itself.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import ConsistencyError, ConvergenceError, DomainError, RegimeError, SamplingError
from .field import ModePair, build_selection_pair, group_velocity
from .model import ModelParams, larmor_frequency
from .orbit import OrbitSolution, solve_orbit_exact

__all__ = [
    "SelectionEntry",
    "InternalFrequency",
    "FixedPoint",
    "PhaseHarmony",
    "HarmonyReport",
    "selection_rule_enumerate",
    "debroglie_consistency",
    "internal_frequency",
    "dressed_mass_fixed_point",
    "lagrangian_value",
    "phase_harmony_residual",
    "gamma_closed_form",
    "build_harmony_report",
    "write_selection_csv",
    "unwrap_phase",
    "selection_to_json",
]

FIXED_POINT_TOL = 1e-14
FIXED_POINT_MAX_ITER = 200
FIXED_POINT_BLOWUP = 10.0
SAMPLES_PER_PHASE_PERIOD = 64
# an orbit solved at B differs from the zero-field r_n by ~x**2 <= 1e-2
GEOMETRY_RTOL = 2e-2


@dataclass(frozen=True)
class SelectionEntry:
    """Mode orders allowed by ``alpha0 = n**2 / N`` (exact rationals)."""

    m_plus: int
    m_minus: int
    n: Fraction
    N_big: Fraction
    alpha0: Fraction

    def row(self) -> tuple:
        return (_fmt_fraction(self.n), _fmt_fraction(self.N_big), self.m_plus, self.m_minus,
                f"{float(self.alpha0):.17g}")

    def to_dict(self) -> dict:
        return {"n": _fmt_fraction(self.n), "N": _fmt_fraction(self.N_big), "m_plus": self.m_plus,
                "m_minus": self.m_minus, "alpha0": str(self.alpha0)}


class InternalFrequency(NamedTuple):
    exact: float
    perturbative: float


@dataclass(frozen=True)
class FixedPoint:
    m_eff: float
    z0: float
    Omega_p: float
    iterations: int
    residual: float
    history: tuple = ()


@dataclass(frozen=True)
class PhaseHarmony:
    """Deviation of the on-orbit field phase from ``L_p t + const``."""

    residual: float
    amplitude_spread: float
    samples: int
    duration: float
    lagrangian: float


@dataclass(frozen=True)
class HarmonyReport:
    Omega_p: float
    Omega_p_perturbative: float
    z0: float
    m_eff: float
    fixed_point_iterations: int
    fixed_point_residual: float
    gamma_closed: float
    gamma_orbit: float
    phase_residual: float
    debroglie_residuals: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def _fmt_fraction(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def selection_rule_enumerate(
    alpha0_inv: int | Fraction, n_max: int | Fraction, include_half_integers: bool = False
) -> list[SelectionEntry]:
    """Positive ``n`` up to ``n_max`` with integer ``m_pm = N pm n``, ``N = n**2 alpha0_inv``.

    Candidates are the positive integers, or with
    ``include_half_integers`` every multiple of 1/2. The flag widens the
    candidate set only; a candidate survives only if both orders are
    non-negative integers. Negative ``n`` follow by swapping ``m_plus``
    and ``m_minus``.
    """
    inv = Fraction(alpha0_inv)
    if inv < 1:
        raise DomainError(f"alpha0_inv must be >= 1, got {alpha0_inv!r}")
    top = Fraction(n_max)
    if top < Fraction(1, 2):
        raise DomainError(f"n_max must be positive, got {n_max!r}")
    step = Fraction(1, 2) if include_half_integers else Fraction(1)
    out = []
    n = step
    while n <= top:
        N = n * n * inv
        m_plus, m_minus = N + n, N - n
        if m_plus.denominator == 1 and m_minus.denominator == 1 and m_minus >= 0:
            out.append(SelectionEntry(m_plus=int(m_plus), m_minus=int(m_minus), n=n, N_big=N, alpha0=1 / inv))
        n += step
    return out


def write_selection_csv(entries: list[SelectionEntry], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["n", "N", "m_plus", "m_minus", "alpha0"])
        for e in entries:
            writer.writerow(e.row())


def selection_to_json(entries: list[SelectionEntry]) -> str:
    return json.dumps([e.to_dict() for e in entries], indent=2)


def _check_pair_orbit(orbit: OrbitSolution, pair: ModePair):
    if orbit.n != pair.n:
        raise ConsistencyError(f"orbit n={orbit.n!r} but pair n={pair.n!r}")
    if abs(orbit.r - pair.r_n) > GEOMETRY_RTOL * pair.r_n:
        raise ConsistencyError(f"orbit radius {orbit.r!r} far from the pair's r_n {pair.r_n!r}")


def debroglie_consistency(orbit: OrbitSolution, pair: ModePair, params: ModelParams) -> dict[str, float]:
    """Relative residuals of ``P = k_n``, ``E = omega_n``, ``v = v_g`` and ``alpha = n**2/N``.

    All four vanish (to rounding) for a relativistic B = 0 orbit and a
    pair obeying the selection rule. At B != 0 with the orbit solved at
    that field they are second order in B.
    """
    _check_pair_orbit(orbit, pair)
    if params.b_const != 1.0:
        raise DomainError("only b = 1 is supported")
    vg = group_velocity(pair)
    n_t = pair.n_tilde
    return {
        "P_minus_k": abs(orbit.P - pair.k_n) / abs(pair.k_n),
        "E_minus_omega": abs(orbit.E - pair.omega_n) / abs(pair.omega_n),
        "vg_minus_vp": abs(vg - orbit.v) / abs(orbit.v),
        "alpha_minus_n2_over_N": abs(params.alpha * pair.N_big / (n_t * n_t) - 1.0),
    }


def internal_frequency(orbit: OrbitSolution, params: ModelParams, m_eff: float | None = None) -> InternalFrequency:
    """``Omega_p = m - (alpha/r + e B r v / 2) gamma`` and its weak-field form.

    The perturbative value is ``m (1 - a**2) + omega_L n (1 - a**2/2)`` with
    ``a = alpha/n``.
    """
    m = orbit.m_eff if m_eff is None else m_eff
    exact = m - (params.alpha / orbit.r + 0.5 * params.e_charge * params.B * orbit.r * orbit.v) * orbit.gamma
    a2 = (params.alpha / orbit.n) ** 2
    omega_L = larmor_frequency(params, m)
    pert = m * (1.0 - a2) + omega_L * orbit.n * (1.0 - 0.5 * a2)
    return InternalFrequency(exact, pert)


def lagrangian_value(orbit: OrbitSolution, params: ModelParams) -> float:
    """``L_p = -m sqrt(1 - v**2) + alpha/r + e B r v / 2``.

    Equals ``P v - E`` for relativistic orbits.
    """
    return (-orbit.m_eff / orbit.gamma + params.alpha / orbit.r
            + 0.5 * params.e_charge * params.B * orbit.r * orbit.v)


def gamma_closed_form(E: float, Omega_p: float, m_eff: float) -> float:
    """Constant-velocity Lorentz factor from energy and internal pulsation.

    ``gamma = E/(2m) + sqrt(E**2 - 4 m (Omega_p - m)) / (2m)``; derived for
    B = 0.
    """
    if not m_eff > 0.0:
        raise DomainError(f"m_eff must be positive, got {m_eff!r}")
    radicand = E * E - 4.0 * m_eff * (Omega_p - m_eff)
    if radicand < 0.0:
        raise DomainError(f"negative radicand {radicand!r} in the gamma closed form")
    return (E + math.sqrt(radicand)) / (2.0 * m_eff)


def dressed_mass_fixed_point(
    params: ModelParams,
    n: float,
    mode: str = "relativistic",
    tol: float = FIXED_POINT_TOL,
    max_iter: int = FIXED_POINT_MAX_ITER,
) -> FixedPoint:
    """Solve ``m = m_p (1 + sigma Omega_p(m)**2 u0**2)`` self-consistently.

    ``Omega_p(m)`` is the exact internal frequency of the orbit re-solved
    at mass ``m``. Iterates with Wegstein acceleration from ``m = m_p``
    until the relative update is below ``tol``.

    Raises
    ------
    RegimeError
        Iterate beyond ``10 m_p``: the coupling is too strong for a
        fixed point (for B = 0 none exists once
        ``4 sigma u0**2 m_p**2 > 1`` approximately).
    ConvergenceError
        No convergence in ``max_iter`` iterations.
    """
    z0 = params.u0
    m_p = params.m_p
    coupling = params.sigma * z0 * z0

    def omega_p(m):
        orbit = solve_orbit_exact(n, params, m, mode=mode)
        return internal_frequency(orbit, params, m).exact

    def g(m):
        return m_p * (1.0 + coupling * omega_p(m) ** 2)

    x = m_p
    gx = g(x)
    history = [x, gx]
    x_prev = gx_prev = None
    for it in range(1, max_iter + 1):
        if abs(gx - x) <= tol * abs(x):
            return FixedPoint(m_eff=gx, z0=z0, Omega_p=omega_p(gx), iterations=it,
                              residual=abs(gx - g(gx)), history=tuple(history))
        # Wegstein step: secant estimate of g' turns x -> g(x) into a
        # Newton-like update; fall back to plain iteration if unusable
        x_new = gx
        if x_prev is not None and x != x_prev:
            slope = (gx - gx_prev) / (x - x_prev)
            if slope != 1.0 and math.isfinite(slope):
                q = min(max(slope / (slope - 1.0), -5.0), 0.9)
                x_new = q * x + (1.0 - q) * gx
        if not (math.isfinite(x_new) and 0.0 < x_new <= FIXED_POINT_BLOWUP * m_p):
            raise RegimeError(
                f"dressed-mass iteration left (0, {FIXED_POINT_BLOWUP} m_p]: m = {x_new!r} "
                f"(sigma u0^2 = {coupling!r})"
            )
        x_prev, gx_prev = x, gx
        x = x_new
        gx = g(x)
        history.append(gx)
    raise ConvergenceError(
        f"dressed-mass fixed point not converged after {max_iter} iterations; last iterates {history[-2]!r}, {history[-1]!r}"
    )


def unwrap_phase(angle: np.ndarray) -> np.ndarray:
    """Nearest-branch unwrapping with an exact integer branch count.

    Unlike a running float sum of 2 pi corrections this does not
    accumulate rounding over millions of samples.
    """
    jumps = np.rint(np.diff(angle) / (2.0 * math.pi)).astype(np.int64)
    branch = np.concatenate(([0], -np.cumsum(jumps)))
    return angle + 2.0 * math.pi * branch


def phase_harmony_residual(
    orbit: OrbitSolution,
    pair: ModePair,
    params: ModelParams,
    t_samples: int | None = None,
    periods: float = 1.0,
) -> PhaseHarmony:
    """Compare the field phase seen by the moving particle with ``L_p t``.

    The mode sum ``sum u0/2 exp(i (pm k r_n phi - omega t))`` is evaluated
    at ``phi = (v/r) t`` over ``periods`` orbital periods, its phase
    unwrapped, ``L_p t`` subtracted, and the largest departure from the
    t = 0 value returned.

    Raises
    ------
    SamplingError
        Fewer than two samples per half phase period of any component.
    """
    _check_pair_orbit(orbit, pair)
    lag = lagrangian_value(orbit, params)
    omega_phi = orbit.v / orbit.r
    rate_p = pair.k_plus * pair.r_n * omega_phi - pair.omega_plus
    rate_m = -pair.k_minus * pair.r_n * omega_phi - pair.omega_minus
    fastest = max(abs(rate_p), abs(rate_m), abs(lag))
    duration = periods * 2.0 * math.pi / abs(omega_phi)
    if t_samples is None:
        t_samples = int(math.ceil(SAMPLES_PER_PHASE_PERIOD * duration * fastest / (2.0 * math.pi))) + 1
    if t_samples < 2:
        raise SamplingError("need at least two samples")
    dt = duration / (t_samples - 1)
    if dt * fastest > math.pi:
        raise SamplingError(
            f"{t_samples} samples leave {dt * fastest:.3g} rad between samples; phase unwrapping is ambiguous"
        )
    t = np.linspace(0.0, duration, t_samples)
    u = 0.5 * pair.u0 * (np.exp(1j * rate_p * t) + np.exp(1j * rate_m * t))
    phase = unwrap_phase(np.angle(u))
    drift = phase - lag * t
    residual = float(np.max(np.abs(drift - drift[0])))
    mags = np.abs(u)
    return PhaseHarmony(residual=residual, amplitude_spread=float(mags.max() - mags.min()),
                        samples=t_samples, duration=duration, lagrangian=lag)


def build_harmony_report(
    params: ModelParams, m_plus: int, m_minus: int, t_samples: int | None = None
) -> HarmonyReport:
    """Run the closure chain for one selection-rule pair.

    Solves the dressed-mass fixed point, then the orbit and modes at that
    mass, and collects the phase, de Broglie and gamma checks. The gamma
    closed form is evaluated on the B = 0 orbit, where it is derived.
    """
    n = 0.5 * (m_plus - m_minus)
    fp = dressed_mass_fixed_point(params, n)
    pair, orbit0 = build_selection_pair(m_plus, m_minus, params, fp.m_eff)
    orbit = solve_orbit_exact(n, params, fp.m_eff)
    omega = internal_frequency(orbit, params)
    omega0 = internal_frequency(orbit0, params.with_field(0.0))
    gamma_c = gamma_closed_form(orbit0.E, omega0.exact, fp.m_eff)
    phase = phase_harmony_residual(orbit, pair, params, t_samples=t_samples)
    return HarmonyReport(
        Omega_p=omega.exact,
        Omega_p_perturbative=omega.perturbative,
        z0=fp.z0,
        m_eff=fp.m_eff,
        fixed_point_iterations=fp.iterations,
        fixed_point_residual=fp.residual,
        gamma_closed=gamma_c,
        gamma_orbit=orbit0.gamma,
        phase_residual=phase.residual,
        debroglie_residuals=debroglie_consistency(orbit, pair, params),
    )
