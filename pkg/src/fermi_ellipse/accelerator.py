"""Energy growth by alternating inner and scattering maps.

Along the inner map ``H_in = 2 sqrt(2E) a(t)`` is nearly conserved, while
along the scattering map it changes at the rate

    d H_in / ds = 4 (a' c - c' a) = 4 b (a b' - b a') / c.

That rate is positive wherever ``f = a b' - b a' > 0``, which is bounded by
critical times of ``a/b``. An orbit that jumps onto the scattering map
whenever it sits in such a window (and the scattering map is defined
there) gains ``H_in`` on every pass, hence energy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import BandError, DegeneracyError, DomainError, NumericError
from .inner import CylinderState, H_in, step_inner
from .melnikov import Domain, domain_threshold, in_domain
from .scattering import H_out, S_truncated

_GRID = 4096
_SCAN = 1.0 / 1024


def _f(boundary, t):
    a, ad = boundary.a_coeffs(t)
    b, bd = boundary.b_coeffs(t)
    return a * bd - b * ad


def critical_times(boundary, tol=1e-8):
    """Critical points of ``a/b`` in ``[0, 1)`` with the sign of ``(a/b)''``.

    Raises :class:`DegeneracyError` if ``a/b`` is constant or a critical
    point has ``|(a/b)''| <= tol``.
    """
    t = np.arange(_GRID) / _GRID
    f = _f(boundary, t)
    a, _ = boundary.a_coeffs(t)
    b, _ = boundary.b_coeffs(t)
    scale = float(np.max(a * a))
    if np.max(np.abs(f)) <= 1e-12 * scale:
        raise DegeneracyError("a/b is constant in time")
    roots = []
    nxt = np.roll(f, -1)
    for i in range(_GRID):
        if f[i] == 0.0:
            roots.append(float(t[i]))
        elif f[i] * nxt[i] < 0.0:
            hi = t[i] + 1.0 / _GRID
            roots.append(brentq(lambda x: float(_f(boundary, x)), float(t[i]), float(hi), xtol=1e-15) % 1.0)
    out = []
    for r in sorted(roots):
        a, _ = boundary.a_coeffs(r)
        b, _ = boundary.b_coeffs(r)
        # at a zero of f, (a/b)'' = -f'/b^2 with f' = a b'' - b a''
        fprime = a * float(boundary.b_coeffs.second_derivative(r)) - b * float(boundary.a_coeffs.second_derivative(r))
        second = -fprime / (b * b)
        if abs(second) <= tol:
            raise DegeneracyError(f"degenerate critical point at t={r}")
        out.append((r, int(np.sign(second))))
    # a double zero of f that touches without changing sign is degenerate too
    touching = np.abs(f) <= 1e-9 * scale
    if np.count_nonzero(touching) > len(out):
        raise DegeneracyError("a/b has a degenerate critical point")
    return out


@dataclass(frozen=True)
class Band:
    """Time window ``[t1, t2]`` (not wrapped) next to a critical time."""

    t1: float
    t2: float
    t_star: float

    @property
    def width(self):
        return self.t2 - self.t1

    def contains(self, t):
        # shift t by whole periods to the copy nearest the band
        base = t - math.floor(t - self.t1)
        return self.t1 <= base <= self.t2


def _inside_gap(t, Ecal, cfg, boundary):
    return math.sqrt(Ecal) - domain_threshold(t % 1.0, cfg.delta, boundary) - cfg.margin_k


def switching_band(t_star, E, cfg, boundary):
    """Largest window next to ``t_star`` where switching raises ``H_in``.

    The window lies on the side of ``t_star`` where ``f > 0`` (equivalently
    ``c'/c < a'/a``) and ends where either ``f`` vanishes again or the
    physical energy ``E/eps^2`` leaves the scattering domain.
    """
    Ecal = E / cfg.eps ** 2
    try:
        where = in_domain(Ecal, t_star % 1.0, cfg, boundary)
    except DomainError as exc:
        raise BandError(f"energy too low: {exc}") from None
    if where is not Domain.INSIDE:
        raise BandError("energy too low: the critical time is outside the domain")
    step = 1e-6
    direction = 1.0 if _f(boundary, t_star + step) > 0.0 else -1.0

    def ok(t):
        return _f(boundary, t) > 0.0 and _inside_gap(t, Ecal, cfg, boundary) > 0.0

    t = t_star + direction * step
    if not ok(t):
        raise BandError("empty switching band")
    while True:
        nxt = t + direction * _SCAN
        if abs(nxt - t_star) >= 1.0 or not ok(nxt):
            break
        t = nxt
    if abs(nxt - t_star) < 1.0:
        fa, fb = float(_f(boundary, t)), float(_f(boundary, nxt))
        if fb <= 0.0 and fa > 0.0:
            edge = brentq(lambda x: float(_f(boundary, x)), t, nxt, xtol=1e-14)
            if _inside_gap(edge, Ecal, cfg, boundary) <= 0.0:
                edge = brentq(lambda x: _inside_gap(x, Ecal, cfg, boundary), t, edge, xtol=1e-14)
        else:
            edge = brentq(lambda x: _inside_gap(x, Ecal, cfg, boundary), t, nxt, xtol=1e-14)
        t = edge - direction * 1e-9
    if direction > 0:
        return Band(t_star, t, t_star)
    return Band(t, t_star, t_star)


@dataclass(frozen=True)
class IfsCycle:
    n_inner: int
    n_scatter: int
    H_in_before: float
    H_in_after: float
    aborted: bool = False

    @property
    def gain(self):
        return self.H_in_after - self.H_in_before


@dataclass
class IfsItinerary:
    cycles: list = field(default_factory=list)

    @property
    def gains(self):
        return [c.gain for c in self.cycles]


@dataclass(frozen=True)
class TraceRow:
    step: int
    tag: str
    E: float
    t: float
    H_in: float
    H_out: float
    Ecal: float


@dataclass
class IfsResult:
    itinerary: IfsItinerary
    trace: list
    final: CylinderState


def _widest_critical_time(E, cfg, boundary):
    best = None
    for t_star, _ in critical_times(boundary):
        try:
            band = switching_band(t_star, E, cfg, boundary)
        except BandError:
            continue
        if best is None or band.width > best.width:
            best = band
    if best is None:
        raise BandError(f"no switching band at E={E}")
    return best.t_star


class _Reach:
    """Membership test for the switching band next to ``t_star`` at any energy.

    The band is the stretch of the ``f > 0`` window, starting at
    ``t_star``, along which the scattering domain is entered without a
    gap. A time belongs to it when the current ``sqrt(Ecal)`` clears the
    running maximum of the domain threshold between ``t_star`` and that
    time (tabulated on a fine grid) and the state itself is inside.
    """

    def __init__(self, t_star, cfg, boundary, n=1024):
        times = [t for t, _ in critical_times(boundary)]
        step = 1e-6
        if _f(boundary, t_star + step) > 0.0:
            later = [t for t in times if t > t_star + step]
            self.window = Band(t_star, later[0] if later else times[0] + 1.0, t_star)
            grid = np.linspace(t_star, self.window.t2, n + 1)
        else:
            earlier = [t for t in times if t < t_star - step]
            self.window = Band(earlier[-1] if earlier else times[-1] - 1.0, t_star, t_star)
            grid = np.linspace(t_star, self.window.t1, n + 1)
        thresholds = [domain_threshold(t % 1.0, cfg.delta, boundary) for t in grid]
        self.running_max = np.maximum.accumulate(thresholds)
        self.t_star, self.n, self.cfg, self.boundary = t_star, n, cfg, boundary

    def __call__(self, s):
        if not self.window.contains(s.t):
            return False
        cfg = self.cfg
        t = s.t - math.floor(s.t - self.window.t1)
        k = min(int(abs(t - self.t_star) / self.window.width * self.n) + 1, self.n)
        if math.sqrt(s.E) / cfg.eps - cfg.margin_k <= self.running_max[k]:
            return False
        try:
            return in_domain(s.E / cfg.eps ** 2, s.t % 1.0, cfg, self.boundary) is Domain.INSIDE
        except DomainError:
            return False


def run_ifs(start, cycles, cfg, boundary, max_steps=None, t_star=None):
    """Iterate the inner/scattering system for a number of cycles.

    All cycles use the switching band next to one critical time ``t_star``
    (by default the one with the widest band at the starting energy). The
    band depends on the energy, so membership is decided at the current
    state (see :class:`_Reach`).

    Each cycle applies the inner map until the state enters the band
    (``n_inner`` steps), then the scattering map while it stays there
    (``n_scatter`` steps). If the scattering map cannot be applied on entry,
    the orbit goes round once more; a second failure ends the cycle as
    aborted.
    """
    eps = cfg.eps
    if t_star is None:
        t_star = _widest_critical_time(start.E, cfg, boundary)
    in_band = _Reach(t_star, cfg, boundary)
    max_steps = int(10.0 / eps) if max_steps is None else max_steps

    s = start
    trace = [_row(0, "start", s, eps, boundary)]
    itinerary = IfsItinerary()
    count = 0
    for _ in range(cycles):
        before = H_in(s, boundary)
        n_inner = n_scatter = 0
        aborted = True
        for _attempt in range(2):
            while not in_band(s):
                if n_inner + n_scatter >= max_steps:
                    raise NumericError("switching band not reached within the step budget")
                s = step_inner(s, eps, boundary)
                n_inner += 1
                count += 1
                trace.append(_row(count, "inner", s, eps, boundary))
            while in_band(s):
                try:
                    nxt = S_truncated(s, eps, boundary, cfg)
                except DomainError:
                    break
                s = nxt
                n_scatter += 1
                count += 1
                trace.append(_row(count, "scatter", s, eps, boundary))
            if n_scatter:
                aborted = False
                break
            # leave the band before trying again
            while in_band.window.contains(s.t):
                s = step_inner(s, eps, boundary)
                n_inner += 1
                count += 1
                trace.append(_row(count, "inner", s, eps, boundary))
        itinerary.cycles.append(IfsCycle(n_inner, n_scatter, before, H_in(s, boundary), aborted))
    return IfsResult(itinerary, trace, s)


def _row(step, tag, s, eps, boundary):
    return TraceRow(step, tag, s.E, s.t, H_in(s, boundary), H_out(s, boundary), s.E / eps ** 2)
