"""The time-dependent billiard map in slow-fast variables.

With physical speed ``w`` and a large reference speed ``w*``, set
``eps = 1/w*`` and ``E = eps^2 w^2 / 2``. Writing ``sigma = (t' - t)/eps``
for the rescaled flight time, the next collision solves

    Q(phi', t + eps sigma) = Q(phi, t) + v sigma (cos beta, sin beta),

with ``v = sqrt(2E)`` and ``beta`` the direction of motion. At the new
point the velocity is reflected off a wall moving with normal speed ``u``:

    v' cos theta' = v cos theta*,
    v' sin theta' = v sin theta* - 2 eps u,

where ``theta*`` is the incidence angle measured from the tangent. The
formulation stays regular at ``eps = 0``, where it reduces to the static
map, so finite differences in ``eps`` may be centred at zero.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import CollisionError, ConditioningWarning, DomainError, LowEnergyError, SolverError

PI = math.pi
TWO_PI = 2.0 * math.pi
MAX_NEWTON = 50
RESPONSE_STEPS = (1e-4, 5e-5)


@dataclass(frozen=True)
class PhaseState:
    """Point ``(phi, theta, E, t)`` of the full map at scaling ``epsilon``.

    ``t`` is kept unwrapped; the boundary is periodic so only ``t mod 1``
    matters for the geometry. ``epsilon = 0`` is the static limit.
    """

    phi: float
    theta: float
    E: float
    t: float
    epsilon: float

    def __post_init__(self):
        if not self.E > 0.0:
            raise DomainError("E must be positive")
        if not 0.0 < self.theta < PI:
            raise DomainError("theta must lie in (0, pi)")
        if not self.epsilon >= 0.0:
            raise DomainError("epsilon must be non-negative")

    @property
    def v(self):
        return math.sqrt(2.0 * self.E)

    @property
    def physical_energy(self):
        return self.E / self.epsilon ** 2 if self.epsilon else math.inf


@dataclass(frozen=True)
class Collision:
    """Solution of the collision equations for one flight."""

    phi: float  # image angle, not reduced mod pi
    t: float
    sigma: float
    theta_star: float
    u: float
    theta: float
    E: float
    residual: float
    history: tuple

    @property
    def crossed(self):
        """True if the chord ends in the half of the table with phi in [pi, 2 pi)."""
        return self.phi % TWO_PI >= PI


class _Table:
    """Scalar evaluation of the curve and its derivatives."""

    __slots__ = ("boundary", "delta")

    def __init__(self, boundary, delta):
        self.boundary = boundary
        self.delta = delta

    def geometry(self, phi, t):
        a, ad = self.boundary.a_coeffs(t)
        b, bd = self.boundary.b_coeffs(t)
        s, c = math.sin(phi), math.cos(phi)
        d = self.delta
        q = (a * c, b * s * (1.0 + d * s * s))
        q_phi = (-a * s, b * c * (1.0 + 3.0 * d * s * s))
        q_t = (ad * c, bd * s * (1.0 + d * s * s))
        return q, q_phi, q_t


def solve_collision(phi, theta, E, t, eps, boundary, delta=None):
    """Solve for the next collision of the particle leaving ``(phi, t)``.

    ``delta`` overrides the deformation of ``boundary``; ``eps`` may be zero
    or negative (analytic continuation used by finite differences).
    """
    delta = boundary.delta if delta is None else delta
    table = _Table(boundary, delta)
    v = math.sqrt(2.0 * E)
    if eps != 0.0 and v / abs(eps) <= 2.0 * boundary.max_normal_speed:
        raise LowEnergyError("particle speed is below twice the wall speed")

    p, tan0, _ = table.geometry(phi, t)
    beta = math.atan2(tan0[1], tan0[0]) + theta
    dx, dy = math.cos(beta), math.sin(beta)

    # far intersection of the chord with the undeformed ellipse at time t
    a, _ = boundary.a_coeffs(t)
    b, _ = boundary.b_coeffs(t)
    qa = dx * dx / (a * a) + dy * dy / (b * b)
    qb = 2.0 * (p[0] * dx / (a * a) + p[1] * dy / (b * b))
    qc = p[0] * p[0] / (a * a) + p[1] * p[1] / (b * b) - 1.0
    disc = max(qb * qb - 4.0 * qa * qc, 0.0)
    s = (-qb + math.sqrt(disc)) / (2.0 * qa)
    if s <= 0.0:
        raise CollisionError("particle leaves the table")
    psi = math.atan2((p[1] + s * dy) / b, (p[0] + s * dx) / a) % TWO_PI
    sigma = s / v

    history = []
    for _ in range(MAX_NEWTON):
        t1 = t + eps * sigma
        q, q_phi, q_t = table.geometry(psi, t1)
        fx = q[0] - p[0] - v * sigma * dx
        fy = q[1] - p[1] - v * sigma * dy
        res = math.hypot(fx, fy)
        history.append(res)
        # Jacobian columns: d/dpsi and d/dsigma
        j11, j21 = q_phi
        j12, j22 = eps * q_t[0] - v * dx, eps * q_t[1] - v * dy
        det = j11 * j22 - j12 * j21
        if det == 0.0:
            raise SolverError("singular Jacobian in the collision solve")
        dpsi = -(j22 * fx - j12 * fy) / det
        dsig = -(-j21 * fx + j11 * fy) / det
        psi += dpsi
        sigma += dsig
        if abs(dpsi) <= 1e-15 * max(1.0, abs(psi)) and abs(dsig) <= 1e-15 * max(1.0, abs(sigma)):
            break
    else:
        raise SolverError("collision solve did not converge")

    t1 = t + eps * sigma
    q, q_phi, q_t = table.geometry(psi, t1)
    residual = math.hypot(q[0] - p[0] - v * sigma * dx, q[1] - p[1] - v * sigma * dy) / a
    history.append(residual * a)
    if sigma <= 0.0:
        raise CollisionError("collision time is not in the future")

    theta_star = (math.atan2(q_phi[1], q_phi[0]) - beta) % TWO_PI
    if not 0.0 < theta_star < PI:
        raise CollisionError("particle reaches the wall from outside")
    tlen = math.hypot(*q_phi)
    u = (q_t[0] * q_phi[1] - q_t[1] * q_phi[0]) / tlen
    vc = v * math.cos(theta_star)
    vs = v * math.sin(theta_star) - 2.0 * eps * u
    theta1 = math.atan2(vs, vc)
    if not 0.0 < theta1 < PI:
        raise CollisionError("reflected velocity points out of the table")
    E1 = 0.5 * (vc * vc + vs * vs)
    return Collision(psi % TWO_PI, t1, sigma, theta_star, u, theta1, E1, residual, tuple(history))


def full_map(phi, theta, E, t, eps, boundary, delta=None):
    """One step of the full map on plain floats; ``phi'`` reduced mod pi."""
    col = solve_collision(phi, theta, E, t, eps, boundary, delta)
    return np.array([col.phi % PI, col.theta, col.E, col.t])


def step_full(state, boundary):
    """Apply the full billiard map to a :class:`PhaseState`."""
    col = solve_collision(state.phi, state.theta, state.E, state.t, state.epsilon, boundary)
    return PhaseState(col.phi % PI, col.theta, col.E, col.t, state.epsilon)


def iterate_full(state, boundary, steps):
    """Return the list ``[state, B(state), ..., B^steps(state)]``."""
    orbit = [state]
    for _ in range(steps):
        state = step_full(state, boundary)
        orbit.append(state)
    return orbit


def wrap_phi(dphi):
    """Map a difference of mod-pi angles to ``[-pi/2, pi/2)``."""
    return (np.asarray(dphi) + PI / 2) % PI - PI / 2


def linear_response(state, boundary, direction, steps=RESPONSE_STEPS):
    """Derivative of the map in ``eps`` or ``delta`` at ``state``.

    Central differences at the two step sizes are combined by Richardson
    extrapolation. A :class:`ConditioningWarning` is issued if the two
    differences disagree by more than ``1e-4`` (relative).
    """
    x = (state.phi, state.theta, state.E, state.t)
    eps0, delta0 = state.epsilon, boundary.delta
    if direction == "eps":
        def g(p):
            return full_map(*x, eps0 + p, boundary, delta0)
    elif direction == "delta":
        def g(p):
            return full_map(*x, eps0, boundary, delta0 + p)
    else:
        raise ValueError(f"direction must be 'eps' or 'delta', not {direction!r}")

    def central(h):
        d = g(h) - g(-h)
        d[0] = wrap_phi(d[0])
        return d / (2.0 * h)

    coarse, fine = central(steps[0]), central(steps[1])
    ratio = (steps[0] / steps[1]) ** 2
    gap = np.max(np.abs(coarse - fine)) / max(1.0, np.max(np.abs(fine)))
    if gap > 1e-4:
        warnings.warn(f"finite differences disagree by {gap:.2e}", ConditioningWarning, stacklevel=2)
    return (ratio * fine - coarse) / (ratio - 1.0)
