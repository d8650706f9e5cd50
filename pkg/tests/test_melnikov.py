import math
import warnings

import numpy as np
import pytest

from fermi_ellipse.errors import ConfigError, DomainError, TruncationWarning
from fermi_ellipse.frozen import hyperbolic_data
from fermi_ellipse.melnikov import (
    Domain,
    M1_closed,
    M2_closed,
    M_series,
    MelnikovSample,
    SplittingConfig,
    dbar,
    dbar_slope,
    domain_threshold,
    fgj,
    find_zeros,
    in_domain,
    phi_minimizer,
    phi_of_t,
    sample,
)


def _h(boundary, t):
    a, _, b, _, _, _ = boundary.semi_axes(t)
    return hyperbolic_data(a, b).h


@pytest.mark.parametrize("tau", [-1.3, 0.0, 0.3, 2.2])
@pytest.mark.parametrize("t", [0.1, 0.45, 0.8])
def test_m1_closed_form_equals_orbit_sum(fig1, tau, t):
    closed = M1_closed(tau, t, 1.3, fig1)
    series = M_series(tau, t, 1.3, fig1)
    assert abs(closed - series) <= 1e-8 * max(1.0, abs(closed))


@pytest.mark.parametrize("tau,t", [(0.4, 0.0), (-0.9, 0.3), (1.7, 0.65)])
def test_m2_closed_form_equals_numeric_orbit_sum(fig1, tau, t):
    closed = M2_closed(tau, t, fig1)
    series = M_series(tau, t, 1.0, fig1, "delta")
    assert abs(closed - series) <= 1e-5 * abs(closed)


def test_m1_is_inverse_in_speed(fig1):
    assert M1_closed(0.2, 0.3, 2.0, fig1) == pytest.approx(0.5 * M1_closed(0.2, 0.3, 1.0, fig1), rel=1e-14)


def test_series_rejects_unknown_direction(fig1):
    with pytest.raises(ValueError):
        M_series(0.0, 0.0, 1.0, fig1, "gamma")


def test_short_series_warns(fig1):
    with pytest.warns(TruncationWarning):
        M_series(0.0, 0.1, 1.0, fig1, N=2)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        M_series(0.0, 0.1, 1.0, fig1, N=40)


def test_g_is_positive_and_even_j_is_odd(fig1):
    t = 0.27
    h = _h(fig1, t)
    tau = np.linspace(-h, h, 41)
    f, g, j = fgj(tau, t, fig1)
    assert np.all(g > 0)
    _, g2, j2 = fgj(-tau, t, fig1)
    assert np.allclose(g, g2, rtol=1e-12)
    assert np.allclose(j, -j2, atol=1e-10 * np.max(np.abs(j)))
    _, g3, j3 = fgj(tau + h, t, fig1)
    assert np.allclose(g, g3, rtol=1e-10)
    assert np.allclose(j, j3, atol=1e-9 * np.max(np.abs(j)))


def test_m1_vanishes_where_a_over_b_is_critical(fig1):
    # a = 5 + sin x, b = 2 - cos x with x = 2 pi t: f = 0 where 5 sin x - 2 cos x = 1
    gamma = math.atan2(2.0, 5.0)
    for x in (gamma - math.asin(1 / math.sqrt(29)), gamma + math.pi + math.asin(1 / math.sqrt(29))):
        t = (x / (2 * math.pi)) % 1.0
        f, _, _ = fgj(0.0, t, fig1)
        assert abs(f) <= 1e-12
        assert np.max(np.abs(M1_closed(np.linspace(-2, 2, 9), t, 1.0, fig1))) <= 1e-10


def test_phi_is_grid_minimum_of_g_over_j(fig1):
    for t in (0.05, 0.4, 0.9):
        h = _h(fig1, t)
        tau = np.linspace(1e-4, h - 1e-4, 20001)
        _, g, j = fgj(tau, t, fig1)
        brute = float(np.min(np.abs(g / j))) / math.sqrt(2.0)
        assert phi_of_t(t, fig1) == pytest.approx(brute, rel=1e-6)
        assert 0.0 < phi_minimizer(t, fig1) < 0.5 * h


def test_phi_is_periodic(fig1):
    assert phi_of_t(0.3, fig1) == pytest.approx(phi_of_t(1.3, fig1), rel=1e-12)


def test_zeros_are_simple_roots(fig1):
    cfg = SplittingConfig(1e-3, 0.05)
    t = 0.25
    Ecal = (domain_threshold(t, cfg.delta, fig1) + 20.0) ** 2
    v = cfg.eps * math.sqrt(2 * Ecal)
    zeros = find_zeros(t, v, cfg, fig1)
    assert len(zeros) == 2 and not zeros.indeterminate
    for root in zeros.roots:
        assert abs(float(dbar(root, t, v, cfg, fig1))) <= 1e-9
        assert abs(dbar_slope(root, t, v, cfg, fig1)) > 1e-3


def test_no_zeros_below_threshold(fig1):
    cfg = SplittingConfig(1e-3, 0.05)
    t = 0.25
    Ecal = (domain_threshold(t, cfg.delta, fig1) - 20.0) ** 2
    v = cfg.eps * math.sqrt(2 * Ecal)
    assert len(find_zeros(t, v, cfg, fig1)) == 0
    h = _h(fig1, t)
    values = dbar(np.linspace(0.0, h, 4001), t, v, cfg, fig1)
    assert np.all(values > 0) or np.all(values < 0)


def test_double_root_is_indeterminate(fig1):
    cfg = SplittingConfig(1e-3, 0.05)
    t = 0.25
    Ecal = domain_threshold(t, cfg.delta, fig1) ** 2
    zeros = find_zeros(t, cfg.eps * math.sqrt(2 * Ecal), cfg, fig1)
    assert zeros.indeterminate and len(zeros) == 0


def test_zeros_at_critical_time_are_lobe_ends(fig1):
    cfg = SplittingConfig(1e-3, 0.05)
    t = 0.5902863452945980
    roots = find_zeros(t, 1.0, cfg, fig1).roots
    # with f = 0 the splitting function is j alone, which vanishes at 0 and h/2
    half = 0.5 * _h(fig1, t)
    assert len(roots) == 2
    assert all(abs(r / half - round(r / half)) <= 1e-9 for r in roots)
    assert round(roots[1] / half) - round(roots[0] / half) == 1


def test_domain_agrees_with_root_count(fig1):
    cfg = SplittingConfig(1e-3, 0.05)
    checked = 0
    for t in np.linspace(0.0, 1.0, 12, endpoint=False):
        for root in np.linspace(10.0, 250.0, 12):
            where = in_domain(root ** 2, float(t), cfg, fig1)
            if where is Domain.INDETERMINATE:
                continue
            zeros = find_zeros(float(t), cfg.eps * root * math.sqrt(2.0), cfg, fig1)
            assert (where is Domain.INSIDE) == (len(zeros) == 2)
            checked += 1
    assert checked > 100


def test_domain_floor_and_margin(fig1):
    cfg = SplittingConfig(1e-3, 0.05)
    with pytest.raises(DomainError):
        in_domain(10.0, 0.2, cfg, fig1)
    root = domain_threshold(0.2, cfg.delta, fig1)
    assert in_domain((root + 0.5) ** 2, 0.2, cfg, fig1) is Domain.INDETERMINATE
    assert in_domain((root + 1.5) ** 2, 0.2, cfg, fig1) is Domain.INSIDE
    assert in_domain((root - 1.5) ** 2, 0.2, cfg, fig1) is Domain.OUTSIDE


def test_threshold_scales_inversely_with_delta(fig1):
    assert domain_threshold(0.3, 0.01, fig1) == pytest.approx(5 * domain_threshold(0.3, 0.05, fig1), rel=1e-14)


def test_splitting_config_validation():
    with pytest.raises(ConfigError):
        SplittingConfig(0.0, 0.05)
    with pytest.raises(ConfigError):
        SplittingConfig(0.1, 0.05)
    with pytest.raises(ConfigError):
        SplittingConfig(1e-3, 0.05, margin_k=0.0)


def test_sample(fig1):
    s = sample(0.3, 0.1, 1.0, fig1)
    assert s.m1 == pytest.approx(M1_closed(0.3, 0.1, 1.0, fig1))
    assert s.m2 == pytest.approx(M2_closed(0.3, 0.1, fig1))
    with pytest.raises(DomainError):
        MelnikovSample(0.0, 0.0, 0.0, 0.0, 0.0)
