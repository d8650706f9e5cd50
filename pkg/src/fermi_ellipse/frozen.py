"""The static elliptic billiard map and its separatrix.

A state is the boundary angle ``phi`` (taken mod pi, since the ellipse is
centrally symmetric) and the reflection angle ``theta`` in ``(0, pi)``
measured from the counter-clockwise tangent. The map is integrable with
first integral

    I = b^2 cos^2 theta - c^2 sin^2 theta sin^2 phi,   c^2 = a^2 - b^2.

The major axis ``(0, pi/2)`` is a hyperbolic saddle with multiplier
``lambda = (a + c)/(a - c)``. Its separatrix ``I = 0`` has two branches; on
the branch called W2 the coordinate ``xi = tan(phi/2)`` evolves as
``xi -> xi/lambda`` and ``tan theta = b (1 + xi^2) / (2 c xi)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BranchError, DomainError

PI = math.pi
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class FrozenState:
    """Point ``(phi, theta)`` of the static map; fields may be arrays."""

    phi: float
    theta: float

    def __post_init__(self):
        phi = np.asarray(self.phi)
        theta = np.asarray(self.theta)
        if not np.all((phi >= 0.0) & (phi < PI)):
            raise DomainError("phi must lie in [0, pi)")
        if not np.all((theta > 0.0) & (theta < PI)):
            raise DomainError("theta must lie in (0, pi)")


@dataclass(frozen=True)
class HyperbolicData:
    lam: float
    h: float
    c: float


def frozen_image(phi, theta, a, b, reduce=True):
    """Image of ``(phi, theta)`` under the static map.

    With ``reduce=False`` the new boundary angle is returned in
    ``[0, 2 pi)``, i.e. the actual far end of the chord rather than its
    representative mod pi. ``theta`` is unaffected by that choice.
    """
    phi = np.asarray(phi, dtype=float)
    theta = np.asarray(theta, dtype=float)
    sp, cp = np.sin(phi), np.cos(phi)
    st, ct = np.sin(theta), np.cos(theta)
    # far intersection of the chord with the ellipse, in eccentric-angle form
    num = b * (a * sp * ct + b * st * cp)
    den = a * (b * cp * ct - a * sp * st)
    phi1 = (2.0 * np.arctan2(num, den) - phi) % TWO_PI
    # new angle = tangent direction at the image minus the chord direction
    alpha0 = np.arctan2(b * cp, -a * sp)
    alpha1 = np.arctan2(b * np.cos(phi1), -a * np.sin(phi1))
    theta1 = (alpha1 - alpha0 - theta) % PI
    if np.any(theta1 <= 0.0):
        raise BranchError("reflection angle left (0, pi)")
    if reduce:
        phi1 = phi1 % PI
    if phi1.ndim == 0:
        return float(phi1), float(theta1)
    return phi1, theta1


def step_frozen(state, a, b):
    """Apply the static billiard map to a :class:`FrozenState`."""
    return FrozenState(*frozen_image(state.phi, state.theta, a, b))


def integral_I(phi, theta, a, b):
    """First integral ``b^2 cos^2 theta - c^2 sin^2 theta sin^2 phi``."""
    c2 = a * a - b * b
    return b * b * np.cos(theta) ** 2 - c2 * np.sin(theta) ** 2 * np.sin(phi) ** 2


def grad_I(phi, theta, a, b, adot=0.0, bdot=0.0):
    """Gradient of ``I`` in the variables ``(phi, theta, E, t)``.

    The time component accounts for the motion of the semi-axes; ``I`` does
    not depend on the energy.
    """
    c2 = a * a - b * b
    sp, cp = np.sin(phi), np.cos(phi)
    st, ct = np.sin(theta), np.cos(theta)
    d_phi = -2.0 * c2 * st * st * sp * cp
    d_theta = -2.0 * st * ct * (b * b + c2 * sp * sp)
    # c c' = a a' - b b'
    d_t = 2.0 * b * bdot * ct * ct - 2.0 * (a * adot - b * bdot) * st * st * sp * sp
    return np.array([d_phi, d_theta, np.zeros_like(d_phi), d_t])


def hyperbolic_data(a, b):
    """Saddle multiplier data for the semi-axes ``a > b > 0``."""
    if not (0.0 < b < a):
        raise DomainError("need 0 < b < a")
    c = math.sqrt(a * a - b * b)
    lam = (a + c) ** 2 / (b * b)
    return HyperbolicData(lam, math.log(lam), c)


def separatrix_theta(phi, a, b, branch="W2"):
    """Reflection angle on the separatrix branch through boundary angle ``phi``."""
    phi = np.asarray(phi, dtype=float)
    sp = np.sin(phi)
    if np.any((sp <= 0.0) | (phi <= 0.0) | (phi >= PI)):
        raise DomainError("separatrix graph needs phi in (0, pi)")
    c = math.sqrt(a * a - b * b)
    theta = np.arctan2(b, c * sp)
    if branch == "W2":
        pass
    elif branch == "W1":
        theta = PI - theta
    else:
        raise ValueError(f"unknown branch {branch!r}")
    return float(theta) if theta.ndim == 0 else theta


def tau_coord(phi):
    """``tau = log tan(phi/2)`` for ``phi`` in ``(0, pi)``."""
    phi = np.asarray(phi, dtype=float)
    if np.any((phi <= 0.0) | (phi >= PI)):
        raise DomainError("tau is defined for phi in (0, pi)")
    tau = np.log(np.tan(0.5 * phi))
    return float(tau) if tau.ndim == 0 else tau


def phi_of_tau(tau):
    """Inverse of :func:`tau_coord`."""
    phi = 2.0 * np.arctan(np.exp(tau))
    return float(phi) if np.ndim(phi) == 0 else phi


def w2_point(xi, a, b):
    """Point ``(phi, theta)`` of the W2 branch with ``xi = tan(phi/2)``."""
    xi = np.asarray(xi, dtype=float)
    c = math.sqrt(a * a - b * b)
    phi = 2.0 * np.arctan(xi)
    theta = np.arctan2(b * (xi + 1.0 / xi), 2.0 * c)
    if phi.ndim == 0:
        return float(phi), float(theta)
    return phi, theta


def speed_factor(phi, a, b):
    """``|gamma'(phi)|``, the arclength density of the ellipse."""
    return np.sqrt((a * np.sin(phi)) ** 2 + (b * np.cos(phi)) ** 2)


def jacobian_determinant(phi, theta, a, b, step=1e-6):
    """Central-difference Jacobian determinant of the static map."""
    def image(p, t):
        return np.array(frozen_image(p, t, a, b, reduce=False))

    def wrap(d):
        return (d + PI) % TWO_PI - PI

    dp = (image(phi + step, theta) - image(phi - step, theta)) / (2 * step)
    dt = (image(phi, theta + step) - image(phi, theta - step)) / (2 * step)
    dp[0] = wrap(dp[0] * 2 * step) / (2 * step)
    dt[0] = wrap(dt[0] * 2 * step) / (2 * step)
    return dp[0] * dt[1] - dp[1] * dt[0]


def area_ratio(phi, theta, a, b, step=1e-6):
    """Ratio of the invariant area form after and before one step.

    The static map preserves ``|gamma'(phi)| sin(theta) dphi dtheta``
    (equivalently ``ds d(cos theta)``), so the returned value is one up to
    finite-difference error.
    """
    phi1, theta1 = frozen_image(phi, theta, a, b)
    det = jacobian_determinant(phi, theta, a, b, step)
    return det * speed_factor(phi1, a, b) * np.sin(theta1) / (speed_factor(phi, a, b) * np.sin(theta))
