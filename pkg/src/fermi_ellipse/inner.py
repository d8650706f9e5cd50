"""Motion along the major axis: the inner map and its Hamiltonian.

A particle bouncing along the major axis stays there. Its state is the
rescaled energy ``E`` and the time ``t`` of a collision; one step is

    t' = t + eps (a(t) + a(t')) / sqrt(2E),
    E' = E - 2 eps sqrt(2E) a'(t') + 2 eps^2 a'(t')^2.

To first order this is the time-``eps`` shift along level curves of
``H_in = 2 sqrt(2E) a(t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SolverError

SQRT2 = math.sqrt(2.0)
E_FLOOR = 1e-3


@dataclass(frozen=True)
class CylinderState:
    """Point ``(E, t)`` on the cylinder of major-axis motions.

    ``t`` is not wrapped, so that the time elapsed along an orbit can be
    read off directly.
    """

    E: float
    t: float

    def __post_init__(self):
        if not self.E > 0.0:
            raise DomainError("E must be positive")

    @property
    def v(self):
        return math.sqrt(2.0 * self.E)

    def physical_energy(self, eps):
        return self.E / eps ** 2


def step_inner(s, eps, boundary, tol=1e-13, e_floor=E_FLOOR):
    """One collision of the major-axis motion."""
    if s.E <= e_floor:
        raise DomainError(f"E={s.E} is below the floor {e_floor}")
    poly = boundary.a_coeffs
    v = math.sqrt(2.0 * s.E)
    a0 = poly(s.t)[0]
    k = eps / v
    t1 = s.t + 2.0 * k * a0
    scale = max(1.0, abs(s.t))
    for _ in range(100):
        new = s.t + k * (a0 + poly(t1)[0])
        done = abs(new - t1) <= tol * scale
        t1 = new
        if done:
            break
    else:
        # Newton fallback on G(t') = t' - t - k (a(t) + a(t'))
        for _ in range(50):
            a1, ad1 = poly(t1)
            step = (t1 - s.t - k * (a0 + a1)) / (1.0 - k * ad1)
            t1 -= step
            if abs(step) <= tol * scale:
                break
        else:
            raise SolverError("inner-map time equation did not converge")
    ad1 = poly(t1)[1]
    E1 = s.E - 2.0 * eps * v * ad1 + 2.0 * eps * eps * ad1 * ad1
    return CylinderState(E1, t1)


def inner_orbit(s, eps, boundary, steps):
    """Arrays ``E`` and ``t`` of ``steps`` iterates, starting with ``s``."""
    E = np.empty(steps + 1)
    t = np.empty(steps + 1)
    E[0], t[0] = s.E, s.t
    for n in range(1, steps + 1):
        s = step_inner(s, eps, boundary)
        E[n], t[n] = s.E, s.t
    return E, t


def H_in(s, boundary):
    return 2.0 * math.sqrt(2.0 * s.E) * boundary.a_coeffs(s.t)[0]


def rk4(field, E, t, duration, steps):
    h = duration / steps
    for _ in range(steps):
        k1 = field(E, t)
        k2 = field(E + 0.5 * h * k1[0], t + 0.5 * h * k1[1])
        k3 = field(E + 0.5 * h * k2[0], t + 0.5 * h * k2[1])
        k4 = field(E + h * k3[0], t + h * k3[1])
        E += h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        t += h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
    return E, t


def default_steps(duration, steps, max_step=1e-4):
    if steps is not None:
        return steps
    return max(16, math.ceil(abs(duration) / max_step))


def flow_in(s, duration, boundary, steps=None):
    """Follow the Hamiltonian vector field of ``H_in`` for ``duration``.

    Fixed-step classical Runge-Kutta; by default at least 16 steps and no
    step longer than ``1e-4``.
    """
    poly = boundary.a_coeffs

    def field(E, t):
        a, ad = poly(t)
        return -2.0 * math.sqrt(2.0 * E) * ad, SQRT2 * a / math.sqrt(E)

    return CylinderState(*rk4(field, s.E, s.t, duration, default_steps(duration, steps)))


def level_curve_in(H, t, boundary):
    """Energies ``E(t)`` on the level set ``H_in = H``."""
    a, _ = boundary.a_coeffs(np.asarray(t, dtype=float))
    return (H / (2.0 * SQRT2 * a)) ** 2


def _t_after_period(E, t, eps, boundary, p):
    s = CylinderState(E, t)
    for _ in range(p):
        s = step_inner(s, eps, boundary)
    return s.t


def twist_diagnostic(s, eps, boundary, dE=None):
    """Estimate of ``d tbar / dE`` for ``tbar`` the time after ``floor(1/eps)`` steps.

    A central difference in ``E`` with step ``dE`` (default ``1e-3 E``) is
    refined by Richardson extrapolation against the half step.
    """
    p = math.floor(1.0 / eps)
    dE = 1e-3 * s.E if dE is None else dE

    def central(d):
        return (_t_after_period(s.E + d, s.t, eps, boundary, p) - _t_after_period(s.E - d, s.t, eps, boundary, p)) / (2 * d)

    coarse, fine = central(dE), central(0.5 * dE)
    return (4.0 * fine - coarse) / 3.0
