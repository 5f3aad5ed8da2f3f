import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zeeman_analog.checks import count_local_maxima
from zeeman_analog.errors import ConsistencyError, DomainError
from zeeman_analog.field import (
    build_mode_pair,
    build_selection_pair,
    eval_total_field,
    field_grid,
    field_on_circle,
    field_on_orbit_closed_form,
    grid_to_csv,
    grid_to_pgm,
    group_velocity,
    mode_frequencies_zero,
    mode_profile,
    write_grid_pgm,
    zero_field_orbit,
)
from zeeman_analog.model import ModelParams, larmor_frequency


def toy(B=0.0):
    return ModelParams(alpha=1 / 3, m_p=1.0, sigma=0.1, B=B, u0=1.0)


def atom(B=0.0):
    return ModelParams(alpha=1 / 137, m_p=1.0, sigma=0.1, B=B, u0=1.0)


@pytest.fixture(scope="module")
def toy_pair():
    return build_selection_pair(4, 2, toy(), 1.0)


def coulomb_ratio_oracle(pair, which, r):
    """Profile on the equator from mpmath's regular Coulomb wave function."""
    p = pair.part(which)
    F = lambda rr: mpmath.coulombf(p["ltilde"], -pair.alpha, p["omega0"] * rr)
    return float(0.5 * pair.u0 * F(r) * pair.r_n / (F(pair.r_n) * r))


@pytest.mark.parametrize("which", ["plus", "minus"])
@pytest.mark.parametrize("r", [0.3, 1.0, 2.0, 4.5, 9.0])
def test_radial_profile_matches_coulomb_wave(toy_pair, which, r):
    pair, _ = toy_pair
    got = mode_profile(pair, which, r, 0.0)
    assert abs(got.imag) == 0.0
    assert got.real == pytest.approx(coulomb_ratio_oracle(pair, which, r), rel=1e-11)


@pytest.mark.parametrize("which", ["plus", "minus"])
def test_radial_profile_matches_coulomb_wave_high_order(which):
    pair, _ = build_selection_pair(138, 136, atom(), 1.0)
    r = 0.97 * pair.r_n
    assert mode_profile(pair, which, r, 0.0).real == pytest.approx(coulomb_ratio_oracle(pair, which, r), rel=1e-9)


def test_toy_pair_geometry(toy_pair):
    pair, orbit = toy_pair
    assert pair.n == 1 and pair.N_big == pytest.approx(3.0)
    assert pair.r_n == pytest.approx(2 * math.sqrt(2), rel=1e-15)
    assert orbit.v == pytest.approx(1 / 3, rel=1e-15)
    assert pair.A_plus == pair.A_minus == 0.5


@pytest.mark.parametrize("n, alpha", [(1, 1 / 3), (1, 1 / 137), (-2, 1 / 137), (0.5, 0.2)])
def test_zero_field_frequencies(n, alpha):
    wp, wm = mode_frequencies_zero(n, alpha, 1.0)
    a = alpha / n
    assert wp - wm == pytest.approx(2 * a / math.sqrt(1 - a * a), rel=1e-13)
    assert 0.5 * (wp + wm) == pytest.approx(math.sqrt(1 - a * a), rel=1e-14)


def test_zero_field_dispersion_is_exact_for_selection_pairs():
    for m_plus, m_minus, p in [(4, 2, toy()), (138, 136, atom()), (550, 546, atom())]:
        pair, _ = build_selection_pair(m_plus, m_minus, p, 1.0)
        assert pair.defect_plus == pytest.approx(0.0, abs=1e-14)
        assert pair.defect_minus == pytest.approx(0.0, abs=1e-14)


def test_lab_dispersion_defect_is_first_order_in_field():
    p = atom(1e-5)
    pair, _ = build_selection_pair(138, 136, p, 1.0)
    wl = larmor_frequency(p, 1.0)
    assert pair.defect_plus == pytest.approx(-wl * (138 - pair.r_n), rel=1e-6)
    assert pair.defect_minus == pytest.approx(wl * (136 - pair.r_n), rel=1e-6)


def test_pair_violating_selection_rule_is_rejected():
    orbit = zero_field_orbit(1.0, toy(), 1.0)
    with pytest.raises(ConsistencyError):
        build_mode_pair(5, 3, orbit, toy())


@pytest.mark.parametrize("kwargs", [{"l_plus": 5}, {"l_minus": 3}])
def test_equatorial_node_rejected(kwargs):
    orbit = zero_field_orbit(1.0, toy(), 1.0)
    with pytest.raises(DomainError, match="equatorial node"):
        build_mode_pair(4, 2, orbit, toy(), **kwargs)


@pytest.mark.parametrize("bad", [(-1, 2), (4, 2.5), (True, 2)])
def test_invalid_orders_rejected(bad):
    orbit = zero_field_orbit(1.0, toy(), 1.0)
    with pytest.raises(DomainError):
        build_mode_pair(*bad, orbit, toy())


def test_higher_degree_pair_builds():
    orbit = zero_field_orbit(1.0, toy(), 1.0)
    pair = build_mode_pair(4, 2, orbit, toy(), l_plus=6, l_minus=4)
    assert mode_profile(pair, "plus", pair.r_n, 0.0) == 0.5
    assert abs(mode_profile(pair, "plus", pair.r_n, 0.4)) < 0.5


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 100), st.floats(0, 2 * math.pi))
def test_on_orbit_magnitude_bounded_by_amplitude(t, phi):
    pair, _ = build_selection_pair(4, 2, toy(1e-3), 1.0)
    value = field_on_circle(pair, t, pair.r_n, np.array([phi]))[0]
    assert abs(value) <= pair.u0 * (1 + 1e-14)


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 500), st.sampled_from([1e-5, 1e-3, -2e-3]))
def test_lab_field_is_rotated_zero_field(t, B):
    lab, _ = build_selection_pair(4, 2, toy(B), 1.0)
    rest, _ = build_selection_pair(4, 2, toy(0.0), 1.0)
    phis = np.linspace(0, 2 * math.pi, 17)
    for r in (1.0, lab.r_n, 5.0):
        a = field_on_circle(lab, t, r, phis)
        b = field_on_circle(rest, t, r, phis - lab.omega_L * t)
        assert np.max(np.abs(a - b)) < 1e-10


def test_six_on_orbit_maxima_for_toy_pair(toy_pair):
    pair, _ = toy_pair
    phis = np.linspace(0, 2 * math.pi, 3600, endpoint=False)
    mags = np.abs(field_on_circle(pair, 0.0, pair.r_n, phis))
    assert count_local_maxima(mags) == 6


def test_total_field_matches_circle_evaluation(toy_pair):
    pair, _ = toy_pair
    phis = np.array([0.1, 1.3, 4.0])
    circle = field_on_circle(pair, 2.5, 2.0, phis)
    direct = [eval_total_field(2.5, (2.0, math.pi / 2, ph), pair) for ph in phis]
    assert np.allclose(circle, direct, rtol=1e-14, atol=0)


@pytest.mark.parametrize("m_plus, m_minus, params", [(4, 2, toy()), (138, 136, atom())])
def test_beat_closed_form_equals_mode_sum_at_zero_field(m_plus, m_minus, params):
    pair, orbit = build_selection_pair(m_plus, m_minus, params, 1.0)
    assert group_velocity(pair) == pytest.approx(orbit.v, rel=1e-13)
    for t in (0.0, 3.7, 250.0):
        for phi in (0.0, 0.4, 2.9):
            direct = field_on_circle(pair, t, pair.r_n, np.array([phi]))[0]
            closed = field_on_orbit_closed_form(t, phi, pair, orbit)
            assert abs(direct - closed) < 1e-12


def test_closed_form_checks_radius(toy_pair):
    pair, _ = toy_pair
    other = zero_field_orbit(2.0, toy(), 1.0)
    with pytest.raises(ConsistencyError):
        field_on_orbit_closed_form(0.0, 0.0, pair, other)


def test_grid_shape_and_centre(toy_pair):
    pair, _ = toy_pair
    grid = field_grid(pair, 0.0, 3 * pair.r_n, 21)
    assert grid.values.shape == (21, 21)
    assert grid.values[10, 10] == 0
    # reflection y -> -y conjugates nothing at t = 0: |u| is symmetric
    assert np.allclose(grid.magnitudes, grid.magnitudes[::-1], rtol=1e-12)


def test_grid_is_deterministic(toy_pair):
    pair, _ = toy_pair
    a = grid_to_csv(field_grid(pair, 1.0, 6.0, 9))
    b = grid_to_csv(field_grid(pair, 1.0, 6.0, 9))
    assert a == b
    assert len(a.strip().splitlines()) == 82


def test_pgm_output(tmp_path, toy_pair):
    pair, _ = toy_pair
    grid = field_grid(pair, 0.0, 6.0, 11)
    text = grid_to_pgm(grid)
    lines = text.splitlines()
    assert lines[:3] == ["P2", "11 11", "255"]
    levels = np.array([[int(v) for v in row.split()] for row in lines[3:]])
    assert levels.shape == (11, 11) and levels.max() == 255 and levels.min() >= 0
    path = tmp_path / "g.pgm"
    write_grid_pgm(grid, path)
    assert path.read_text() == text


@pytest.mark.parametrize("resolution", [0, 1, 4097, 2.5])
def test_grid_resolution_limits(toy_pair, resolution):
    pair, _ = toy_pair
    with pytest.raises(DomainError):
        field_grid(pair, 0.0, 6.0, resolution)


def test_profile_rejects_nonpositive_radius(toy_pair):
    pair, _ = toy_pair
    with pytest.raises(DomainError):
        mode_profile(pair, "plus", 0.0, 0.0)
    with pytest.raises(DomainError):
        pair.part("middle")
