import json
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import selection_loop_oracle
from zeeman_analog.checks import brute_force_selection
from zeeman_analog.errors import ConsistencyError, ConvergenceError, DomainError, RegimeError, SamplingError
from zeeman_analog.field import build_selection_pair
from zeeman_analog.harmony import (
    build_harmony_report,
    debroglie_consistency,
    dressed_mass_fixed_point,
    gamma_closed_form,
    internal_frequency,
    lagrangian_value,
    phase_harmony_residual,
    selection_rule_enumerate,
    selection_to_json,
    unwrap_phase,
    write_selection_csv,
)
from zeeman_analog.model import ModelParams
from zeeman_analog.orbit import solve_orbit_exact


def params(alpha=1 / 137, B=0.0, sigma=0.1, u0=1.0):
    return ModelParams(alpha=alpha, m_p=1.0, sigma=sigma, B=B, u0=u0)


@pytest.mark.parametrize("inv", [1, 2, 3, 5, 137])
def test_enumeration_matches_loop_oracle(inv):
    got = [(e.m_plus, e.m_minus) for e in selection_rule_enumerate(inv, 2)]
    assert got == selection_loop_oracle(inv, 2, 4 * inv + 4)
    assert got == brute_force_selection(inv, 2, 4 * inv + 4)


def test_known_selection_pairs():
    assert [(e.m_plus, e.m_minus) for e in selection_rule_enumerate(3, 1)] == [(4, 2)]
    assert [(e.m_plus, e.m_minus) for e in selection_rule_enumerate(137, 2)] == [(138, 136), (550, 546)]


@settings(max_examples=50)
@given(st.integers(1, 400), st.integers(1, 6), st.booleans())
def test_entries_are_exact_selection_solutions(inv, n_max, half):
    for e in selection_rule_enumerate(inv, n_max, include_half_integers=half):
        assert e.m_plus - e.m_minus == 2 * e.n
        assert e.alpha0 == e.n * e.n / e.N_big == Fraction(1, inv)
        assert e.m_minus >= 0


def test_half_integer_candidates():
    # 1/2 fails for alpha0_inv = 4 (non-integer orders) but passes for 2
    assert all(e.n.denominator == 1 for e in selection_rule_enumerate(4, 1, include_half_integers=True))
    halves = [e for e in selection_rule_enumerate(2, 1, include_half_integers=True) if e.n.denominator == 2]
    assert [(e.m_plus, e.m_minus) for e in halves] == [(1, 0)]
    assert brute_force_selection(2, 1, 20, include_half_integers=True)[0] == (1, 0)


def test_enumeration_domain():
    with pytest.raises(DomainError):
        selection_rule_enumerate(0, 2)
    with pytest.raises(DomainError):
        selection_rule_enumerate(3, 0)


def test_selection_serializers(tmp_path):
    entries = selection_rule_enumerate(137, 2)
    path = tmp_path / "sel.csv"
    write_selection_csv(entries, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "n,N,m_plus,m_minus,alpha0"
    assert lines[1] == "1,137,138,136,0.0072992700729927005"
    data = json.loads(selection_to_json(entries))
    assert data[1] == {"n": "2", "N": "548", "m_plus": 550, "m_minus": 546, "alpha0": "1/137"}


def fixed_point_oracle(sigma_u2, n, alpha):
    """Smaller root of the B = 0 dressed-mass quadratic, in mpmath."""
    with mpmath.workdps(40):
        a2 = (mpmath.mpf(alpha) / n) ** 2
        c = (1 - 2 * a2) / (1 - a2)
        s = mpmath.mpf(sigma_u2) * c * c
        return float((1 - mpmath.sqrt(1 - 4 * s)) / (2 * s))


@pytest.mark.parametrize("sigma", [0.01, 0.1, 0.2])
@pytest.mark.parametrize("alpha, n", [(1 / 137, 1), (1 / 3, 1), (1 / 137, 2)])
def test_fixed_point_matches_quadratic_oracle(sigma, alpha, n):
    fp = dressed_mass_fixed_point(params(alpha=alpha, sigma=sigma), n)
    assert fp.m_eff == pytest.approx(fixed_point_oracle(sigma, n, alpha), rel=1e-13)
    assert fp.residual <= 1e-13 * fp.m_eff
    assert fp.iterations < 20


def test_fixed_point_value_for_default_coupling():
    assert dressed_mass_fixed_point(params(), 1).m_eff == pytest.approx(1.1270, abs=1e-4)


def test_fixed_point_in_field_stays_close_to_zero_field():
    a = dressed_mass_fixed_point(params(B=1e-5), 1).m_eff
    b = dressed_mass_fixed_point(params(), 1).m_eff
    assert abs(a - b) < 1e-4


def test_fixed_point_absent_beyond_critical_coupling():
    with pytest.raises((RegimeError, ConvergenceError)):
        dressed_mass_fixed_point(params(sigma=0.3), 1)


@pytest.mark.parametrize("n", [1, 2, 3, 0.5])
@pytest.mark.parametrize("alpha", [1 / 137, 1 / 3])
def test_gamma_closed_form_exact_on_zero_field_orbits(n, alpha):
    p = params(alpha=alpha)
    orbit = solve_orbit_exact(n, p, 1.0)
    omega = internal_frequency(orbit, p).exact
    assert gamma_closed_form(orbit.E, omega, 1.0) == pytest.approx(1 / math.sqrt(1 - orbit.v**2), rel=1e-12)


def test_gamma_closed_form_domain():
    with pytest.raises(DomainError):
        gamma_closed_form(0.1, 10.0, 1.0)
    with pytest.raises(DomainError):
        gamma_closed_form(1.0, 1.0, 0.0)


def test_internal_frequency_forms_agree_to_second_order():
    p = params(B=1e-6)
    orbit = solve_orbit_exact(1, p, 1.0)
    exact, pert = internal_frequency(orbit, p)
    assert abs(exact - pert) < 1e-8


def test_lagrangian_equals_momentum_times_velocity_minus_energy():
    for B in (0.0, 1e-5, -1e-5):
        p = params(B=B)
        orbit = solve_orbit_exact(1, p, 1.0)
        assert lagrangian_value(orbit, p) == pytest.approx(orbit.P * orbit.v - orbit.E, abs=1e-15)


@pytest.mark.parametrize("alpha, pair_orders", [(1 / 3, (4, 2)), (1 / 137, (138, 136)), (1 / 137, (550, 546))])
def test_debroglie_relations_exact_at_zero_field(alpha, pair_orders):
    p = params(alpha=alpha)
    pair, orbit = build_selection_pair(*pair_orders, p, 1.0)
    res = debroglie_consistency(orbit, pair, p)
    assert max(res.values()) < 1e-13


def test_debroglie_requires_matching_orbit():
    p = params(alpha=1 / 3)
    pair, _ = build_selection_pair(4, 2, p, 1.0)
    with pytest.raises(ConsistencyError):
        debroglie_consistency(solve_orbit_exact(2, p, 1.0), pair, p)


@given(st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=200))
def test_unwrap_recovers_smooth_phase(increments):
    steps = np.clip(np.array(increments) / 1e3 * 3.0, -3.0, 3.0)
    phase = np.concatenate(([0.0], np.cumsum(steps)))
    wrapped = np.angle(np.exp(1j * phase))
    assert np.allclose(unwrap_phase(wrapped), phase - phase[0] + wrapped[0], atol=1e-9)


def test_unwrap_has_no_drift_over_long_ramps():
    t = np.arange(2_000_000) * 0.9
    wrapped = np.angle(np.exp(1j * t))
    assert np.max(np.abs(unwrap_phase(wrapped) - t)) < 1e-9


@pytest.mark.parametrize("alpha, orders", [(1 / 3, (4, 2)), (1 / 137, (138, 136))])
def test_phase_harmony_at_zero_field(alpha, orders):
    p = params(alpha=alpha)
    pair, orbit = build_selection_pair(*orders, p, 1.0)
    result = phase_harmony_residual(orbit, pair, p)
    assert result.residual <= 1e-9
    detuned = phase_harmony_residual(orbit, pair.detuned(1.01), p)
    assert detuned.residual > 1e-3


def test_phase_harmony_undersampling_rejected():
    p = params(alpha=1 / 3)
    pair, orbit = build_selection_pair(4, 2, p, 1.0)
    with pytest.raises(SamplingError):
        phase_harmony_residual(orbit, pair, p, t_samples=3)


def test_harmony_report_round_trip():
    report = build_harmony_report(params(alpha=1 / 3), 4, 2)
    d = json.loads(json.dumps(report.to_dict()))
    assert d["gamma_closed"] == pytest.approx(d["gamma_orbit"], rel=1e-12)
    assert d["m_eff"] == pytest.approx(fixed_point_oracle(0.1, 1, 1 / 3), rel=1e-13)
    assert d["phase_residual"] < 1e-9
