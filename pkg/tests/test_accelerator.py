import math

import numpy as np
import pytest

from fermi_ellipse.accelerator import Band, IfsCycle, critical_times, run_ifs, switching_band
from fermi_ellipse.boundary import BoundaryModel, TrigPoly
from fermi_ellipse.errors import BandError, DegeneracyError
from fermi_ellipse.inner import CylinderState, H_in
from fermi_ellipse.melnikov import Domain, SplittingConfig, in_domain
from fermi_ellipse.scattering import flow_out


def _analytic_critical_times():
    # a b' = b a' with a = 5 + sin x, b = 2 - cos x reduces to 5 sin x - 2 cos x = 1
    gamma = math.atan2(2.0, 5.0)
    r = math.asin(1 / math.sqrt(29.0))
    return sorted(((gamma - r) / (2 * math.pi)) % 1.0 for r in (r, -r - math.pi))


def test_figure1_critical_times(fig1):
    crit = critical_times(fig1)
    expected = _analytic_critical_times()
    assert [c[0] for c in crit] == pytest.approx(expected, abs=1e-12)
    assert [c[1] for c in crit] == [-1, 1]
    assert crit[0][0] == pytest.approx(0.0308, abs=1e-4)
    assert crit[1][0] == pytest.approx(0.5903, abs=1e-4)


def test_critical_times_with_constant_major_axis():
    boundary = BoundaryModel(TrigPoly(3.0), TrigPoly(2.0, cos=(-0.5,)))
    crit = critical_times(boundary)
    assert [c[0] for c in crit] == pytest.approx([0.0, 0.5], abs=1e-12)


def test_proportional_axes_are_degenerate():
    boundary = BoundaryModel(TrigPoly(4.0, cos=(-1.0,)), TrigPoly(2.0, cos=(-0.5,)))
    with pytest.raises(DegeneracyError):
        critical_times(boundary)


def _f(boundary, t):
    a, ad = boundary.a_coeffs(t)
    b, bd = boundary.b_coeffs(t)
    return a * bd - b * ad


def test_band_properties(fig1):
    cfg = SplittingConfig(1e-3, 0.05)
    for t_star, _ in critical_times(fig1):
        band = switching_band(t_star, 1.0, cfg, fig1)
        assert band.t_star == t_star
        assert band.t1 == t_star or band.t2 == t_star
        for t in np.linspace(band.t1, band.t2, 41)[1:-1]:
            # c'/c < a'/a is the same as a b' - b a' > 0
            assert _f(fig1, t) > 0
            assert in_domain(1.0 / cfg.eps ** 2, t % 1.0, cfg, fig1) is Domain.INSIDE


def test_band_width_linear_in_delta(fig1):
    eps = 1e-3
    t_star = critical_times(fig1)[0][0]
    widths = []
    deltas = (1e-3, 2e-3, 4e-3)
    for delta in deltas:
        boundary = fig1.with_delta(delta)
        widths.append(switching_band(t_star, 1.0, SplittingConfig(eps, delta), boundary).width)
    slope = np.polyfit(np.log(deltas), np.log(widths), 1)[0]
    assert slope == pytest.approx(1.0, abs=0.15)


def test_band_saturates_at_large_delta(fig1):
    cfg = SplittingConfig(1e-3, 0.05)
    crit = [c[0] for c in critical_times(fig1)]
    band = switching_band(crit[0], 1.0, cfg, fig1)
    # at delta = 0.05 the whole window between critical times qualifies
    assert band.t1 == pytest.approx(crit[0])
    assert band.t2 == pytest.approx(crit[1], abs=1e-8)


def test_band_error_at_low_energy(fig1):
    cfg = SplittingConfig(1e-3, 1e-3)
    boundary = fig1.with_delta(1e-3)
    with pytest.raises(BandError):
        switching_band(critical_times(boundary)[0][0], 5e-4, cfg, boundary)


def test_band_contains_is_periodic():
    band = Band(0.9, 1.1, 0.9)
    assert band.contains(0.95) and band.contains(2.05) and band.contains(-0.05)
    assert not band.contains(0.5)
    assert band.width == pytest.approx(0.2)


def test_cycle_gain():
    assert IfsCycle(3, 4, 1.0, 2.5).gain == 1.5


def test_run_ifs_gains_energy(fig1):
    cfg = SplittingConfig(1e-3, 0.05)
    start = CylinderState(1.0, 0.05)
    result = run_ifs(start, 2, cfg, fig1)
    cycles = result.itinerary.cycles
    assert len(cycles) == 2
    for c in cycles:
        assert not c.aborted
        assert c.gain > 0
        assert c.n_inner + c.n_scatter <= 10 / cfg.eps
    assert result.final.E > start.E
    assert result.trace[0].tag == "start"
    assert {r.tag for r in result.trace[1:]} == {"inner", "scatter"}
    # H_in grows along scattering steps; right at t* the first-order gain vanishes and
    # the O(eps^2) step error can win, so steps near the band edges are skipped
    crit = [c[0] for c in critical_times(fig1)]
    rows = result.trace
    for prev, row in zip(rows, rows[1:]):
        if row.tag == "scatter" and crit[0] + 0.05 < prev.t % 1.0 < crit[1] - 0.05:
            assert row.H_in > prev.H_in


def test_h_in_rate_along_outer_flow(fig1):
    # d H_in / ds = 4 (a' c - c' a) along the H_out flow, positive inside the band
    crit = [c[0] for c in critical_times(fig1)]
    for t in np.linspace(crit[0], crit[1], 9)[1:-1]:
        s = CylinderState(1.0, float(t))
        a, ad, _, _, c, cd = fig1.semi_axes(float(t))
        h = 1e-5
        rate = (H_in(flow_out(s, h, fig1), fig1) - H_in(flow_out(s, -h, fig1), fig1)) / (2 * h)
        assert rate == pytest.approx(4 * (ad * c - cd * a), rel=1e-6)
        assert rate > 0


def test_run_ifs_with_narrow_bands(fig1):
    # at delta = 5e-3 the two bands are disjoint; the orbit keeps to one of them
    boundary = fig1.with_delta(5e-3)
    cfg = SplittingConfig(1e-3, 5e-3)
    result = run_ifs(CylinderState(1.0, 0.05), 4, cfg, boundary)
    assert all(c.gain > 0 and not c.aborted for c in result.itinerary.cycles)
    crit = [c[0] for c in critical_times(boundary)]
    near = {min(crit, key=lambda c: min(abs(r.t % 1.0 - c), 1 - abs(r.t % 1.0 - c)))
            for r in result.trace if r.tag == "scatter"}
    assert len(near) == 1


def test_run_ifs_rejects_low_energy(fig1):
    with pytest.raises(BandError):
        run_ifs(CylinderState(1e-5, 0.05), 1, SplittingConfig(1e-3, 0.05), fig1)
