"""Named numerical checks grouped in suites, shared by the CLI and the tests.

Each check records a measured value, a bound and a comparison kind:

* ``"max"``: pass when ``value <= bound``;
* ``"min"``: pass when ``value >= bound``.

Measured values are deviations or residuals, so a bound of 0 fails any
nonzero residual.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .field import build_selection_pair, field_on_circle, field_on_orbit_closed_form, eval_total_field
from .harmony import (
    dressed_mass_fixed_point,
    gamma_closed_form,
    internal_frequency,
    phase_harmony_residual,
    selection_rule_enumerate,
)
from .larmor import larmor_cancellation_test, particle_larmor_check
from .model import ModelParams, larmor_frequency
from .orbit import (
    action_integral,
    bohr_radius,
    circular_initial_state,
    integrate_orbit_ode,
    lorentz_residual,
    mean_angular_velocity,
    orbital_period,
    solve_orbit_exact,
)

__all__ = [
    "Check",
    "SUITES",
    "run_suites",
    "loglog_slope",
    "count_local_maxima",
    "brute_force_selection",
    "ode_larmor_shift",
    "stroboscopic_rotation_error",
]

HALVING_FIELDS = (1e-5, 5e-6, 2.5e-6)


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    value: float
    bound: float
    kind: str = "max"

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.value):
            return False
        return self.value <= self.bound if self.kind == "max" else self.value >= self.bound

    def with_bound(self, bound: float) -> "Check":
        return Check(self.suite, self.name, self.value, bound, self.kind)

    def to_dict(self) -> dict:
        return {"suite": self.suite, "name": self.name, "value": self.value, "bound": self.bound,
                "kind": self.kind, "passed": self.passed}


def loglog_slope(xs, ys) -> float:
    """Least-squares slope of log(y) against log(x)."""
    slope, _ = np.polyfit(np.log(np.asarray(xs, float)), np.log(np.asarray(ys, float)), 1)
    return float(slope)


def count_local_maxima(values) -> int:
    """Strict local maxima of a periodic sequence."""
    v = np.asarray(values, float)
    return int(np.sum((v > np.roll(v, 1)) & (v > np.roll(v, -1))))


def brute_force_selection(alpha0_inv: int, n_max, m_limit: int, include_half_integers: bool = False):
    """All ``(m_plus, m_minus)`` up to ``m_limit`` with ``N = n**2 alpha0_inv``, ``0 < n <= n_max``.

    Integer test ``2 (m_plus + m_minus) == (m_plus - m_minus)**2 alpha0_inv``
    over every pair, independent of the rational enumeration.
    """
    m = np.arange(m_limit + 1, dtype=np.int64)
    mp, mm = np.meshgrid(m, m, indexing="ij")
    d = mp - mm
    ok = (d > 0) & (d <= 2 * n_max) & (2 * (mp + mm) == d * d * int(alpha0_inv))
    if not include_half_integers:
        ok &= d % 2 == 0
    pairs = [(int(a), int(b)) for a, b in zip(mp[ok], mm[ok])]
    return sorted(pairs, key=lambda p: p[0] - p[1])


def ode_larmor_shift(params: ModelParams, m_eff: float, n: float = 1.0, periods: float = 2.0,
                     steps_per_period: int = 10_000) -> dict:
    """Angular-frequency shift of integrated orbits at ``params.B`` versus B = 0.

    Both runs start on the exact nonrelativistic circular orbit for the
    same ``n`` at their own field.
    """
    out = {}
    for label, p in (("B", params), ("zero", params.with_field(0.0))):
        orbit = solve_orbit_exact(n, p, m_eff, mode="nonrelativistic")
        period = orbital_period(orbit)
        dt = period / steps_per_period
        steps = int(round(periods * steps_per_period))
        traj = integrate_orbit_ode(circular_initial_state(orbit), p, m_eff, dt, steps, stride=10)
        out[label] = mean_angular_velocity(traj)
    omega_L = larmor_frequency(params, m_eff)
    shift = out["B"] - out["zero"]
    return {"shift": shift, "omega_L": omega_L, "relative_error": abs(shift - omega_L) / abs(omega_L)}


def stroboscopic_rotation_error(pair, k: int = 1, r: float | None = None, samples: int = 720) -> float:
    """Max | |u(t_k, phi)| - |u(0, phi - omega_L t_k)| | at ``t_k = 2 pi k / beat``.

    At these times the beat pattern has returned to itself, so only the
    Larmor rotation remains.
    """
    r = pair.r_n if r is None else r
    t = 2.0 * math.pi * k / abs(pair.beat)
    phis = np.linspace(0.0, 2.0 * math.pi, samples, endpoint=False)
    now = np.abs(field_on_circle(pair, t, r, phis))
    before = np.abs(field_on_circle(pair, 0.0, r, phis - pair.omega_L * t))
    return float(np.max(np.abs(now - before)))


def _orbit_suite(params: ModelParams, m_eff: float) -> list[Check]:
    s = "orbit"
    checks = []
    zero = params.with_field(0.0)
    o = solve_orbit_exact(1, zero, m_eff, mode="nonrelativistic")
    r0 = bohr_radius(1, params.alpha, m_eff)
    checks.append(Check(s, "bohr_radius_rel", abs(o.r - r0) / r0, 1e-12))
    checks.append(Check(s, "bohr_velocity_rel", abs(o.v - params.alpha) / params.alpha, 1e-12))
    e0 = m_eff * (1.0 - params.alpha**2 / 2.0)
    checks.append(Check(s, "bohr_energy_rel", abs(o.E - e0) / e0, 1e-12))
    rel = solve_orbit_exact(1, params, m_eff)
    checks.append(Check(s, "action_rel", abs(action_integral(rel, params) / (2.0 * math.pi) - 1.0), 1e-10))
    checks.append(Check(s, "force_balance_rel", lorentz_residual(rel, params), 1e-12))

    def e_residual(n, b):
        p = params.with_field(b)
        e_b = solve_orbit_exact(n, p, m_eff, mode="nonrelativistic").E
        e_z = solve_orbit_exact(n, zero, m_eff, mode="nonrelativistic").E
        return abs(e_b - e_z - n * larmor_frequency(p, m_eff))

    for n in (1, -1, 2, -2):
        slope = loglog_slope(HALVING_FIELDS, [e_residual(n, b) for b in HALVING_FIELDS])
        checks.append(Check(s, f"zeeman_slope_n{n:+d}", slope, 1.9, kind="min"))

    shift = ode_larmor_shift(params, m_eff)
    checks.append(Check(s, "ode_larmor_shift_rel", shift["relative_error"], 0.01))
    return checks


def _field_suite(params: ModelParams, m_eff: float) -> list[Check]:
    s = "field"
    toy = ModelParams(alpha=1.0 / 3.0, m_p=params.m_p, sigma=params.sigma, B=0.0, u0=params.u0)
    pair, orbit = build_selection_pair(4, 2, toy, m_eff)
    checks = [Check(s, "dispersion_zero_field", max(abs(pair.defect_plus) / pair.k_plus,
                                                     abs(pair.defect_minus) / pair.k_minus), 1e-12)]
    rng = np.random.default_rng(7)
    worst = 0.0
    period = orbital_period(orbit)
    for _ in range(100):
        t, phi = rng.uniform(0.0, period), rng.uniform(0.0, 2.0 * math.pi)
        direct = eval_total_field(t, (orbit.r, 0.5 * math.pi, phi), pair)
        closed = field_on_orbit_closed_form(t, phi, pair, orbit)
        worst = max(worst, abs(direct - closed) / pair.u0)
    checks.append(Check(s, "closed_form_vs_sum_B0", worst, 1e-9))
    phis = np.linspace(0.0, 2.0 * math.pi, 3600, endpoint=False)
    maxima = count_local_maxima(np.abs(field_on_circle(pair, 0.0, orbit.r, phis)))
    checks.append(Check(s, "orbit_maxima_count_minus_6", abs(maxima - 6), 0.0))
    for b in (params.B if params.B != 0.0 else 1e-5, 1e-2):
        pair_b, _ = build_selection_pair(4, 2, toy.with_field(b), m_eff)
        checks.append(Check(s, f"larmor_rotation_B{b:g}", stroboscopic_rotation_error(pair_b), 1e-10))
    return checks


def _atom_pair_orders(params: ModelParams):
    inv = Fraction(1.0 / params.alpha).limit_denominator(1000)
    if inv.denominator != 1 or abs(float(inv) * params.alpha - 1.0) > 1e-12:
        return None
    inv = int(inv)
    return inv + 1, inv - 1


def _larmor_suite(params: ModelParams, m_eff: float) -> list[Check]:
    s = "larmor"
    checks = []
    orders = _atom_pair_orders(params)
    b_main = params.B if params.B != 0.0 else 1e-5
    if orders is not None:
        reports = []
        for b in (b_main, 0.5 * b_main):
            p = params.with_field(b)
            pair, _ = build_selection_pair(*orders, p, m_eff)
            reports.append(larmor_cancellation_test(pair, p, sample_count=64))
        checks.append(Check(s, "wave_cancellation_ratio", reports[0].ratio, 0.01))
        slope = loglog_slope([b_main, 0.5 * b_main], [r.residual_unrotated for r in reports])
        checks.append(Check(s, "unrotated_slope_dev", abs(slope - 1.0), 0.1))
    zero = params.with_field(0.0)
    res = []
    for b in (b_main, 0.5 * b_main):
        p = params.with_field(b)
        ob = solve_orbit_exact(1, p, m_eff, mode="nonrelativistic")
        o0 = solve_orbit_exact(1, zero, m_eff, mode="nonrelativistic")
        res.append(particle_larmor_check(ob, o0, larmor_frequency(p, m_eff)))
    for key in ("velocity_map", "energy_map"):
        ratio = res[1][key] / res[0][key]
        checks.append(Check(s, f"particle_{key}_halving_dev", abs(ratio - 0.25), 0.05))
    return checks


def _harmony_suite(params: ModelParams, m_eff: float) -> list[Check]:
    s = "harmony"
    checks = []
    cases = [(ModelParams(alpha=1.0 / 3.0, m_p=params.m_p, sigma=0.0, B=0.0, u0=params.u0), (4, 2), "toy")]
    orders = _atom_pair_orders(params)
    if orders is not None:
        cases.append((params.with_field(0.0), orders, "atom"))
    for p, (mp, mm), label in cases:
        pair, orbit = build_selection_pair(mp, mm, p, m_eff)
        checks.append(Check(s, f"phase_residual_{label}", phase_harmony_residual(orbit, pair, p).residual, 1e-9))
        control = phase_harmony_residual(orbit, pair.detuned(1.01), p).residual
        checks.append(Check(s, f"detuned_control_{label}", control, 1e-3, kind="min"))
        omega = internal_frequency(orbit, p).exact
        g = gamma_closed_form(orbit.E, omega, m_eff)
        checks.append(Check(s, f"gamma_closed_rel_{label}", abs(g * math.sqrt(1.0 - orbit.v**2) - 1.0), 1e-9))
    if params.sigma * params.u0**2 > 0.0:
        fp = dressed_mass_fixed_point(params, 1)
        checks.append(Check(s, "fixed_point_residual_rel", fp.residual / fp.m_eff, 1e-13))
    return checks


def _selection_suite(params: ModelParams, m_eff: float, alpha0_inv: int | None = None, n_max: int = 2) -> list[Check]:
    s = "selection"
    checks = []
    invs = [alpha0_inv] if alpha0_inv is not None else [3, 137]
    for inv in invs:
        got = [(e.m_plus, e.m_minus) for e in selection_rule_enumerate(inv, n_max)]
        limit = int(2 * n_max * n_max * inv + 2 * n_max + 2)
        ref = brute_force_selection(inv, n_max, limit)
        checks.append(Check(s, f"enumeration_mismatches_inv{inv}", float(len(set(got) ^ set(ref))), 0.0))
    return checks


SUITES: dict[str, Callable[..., list[Check]]] = {
    "orbit": _orbit_suite,
    "field": _field_suite,
    "larmor": _larmor_suite,
    "harmony": _harmony_suite,
    "selection": _selection_suite,
}


def run_suites(names, params: ModelParams, m_eff: float, tol_override: float | None = None,
               alpha0_inv: int | None = None, n_max: int = 2) -> list[Check]:
    """Run the named suites in order; optionally replace every bound."""
    checks = []
    for name in names:
        if name == "selection":
            checks.extend(_selection_suite(params, m_eff, alpha0_inv=alpha0_inv, n_max=n_max))
        else:
            checks.extend(SUITES[name](params, m_eff))
    if tol_override is not None:
        checks = [c.with_bound(tol_override) for c in checks]
    return checks
