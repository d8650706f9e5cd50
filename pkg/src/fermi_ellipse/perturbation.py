"""First-order response of the full map to slow boundary motion.

To first order in ``eps`` the full map is ``B0 + eps B1`` with
``B1 = (f1, f2, f3, f4)``: corrections to the new boundary angle, the new
reflection angle, the energy and the (rescaled) flight time. They depend on
the static image ``(phi', theta')`` of ``(phi, theta)``, the free-flight
distance ``D0`` and the wall speed ``u`` at the image point.
"""

from __future__ import annotations

import math

import numpy as np

from .frozen import frozen_image, hyperbolic_data

PI = math.pi


def D0(phi, phi_next, a, b):
    """Length of the chord between boundary angles ``phi`` and ``phi_next``."""
    return np.hypot(a * (np.cos(phi) - np.cos(phi_next)), b * (np.sin(phi) - np.sin(phi_next)))


def D0_on_W2(xi, a, b):
    """Chord length from the W2 point with ``tan(phi/2) = xi`` to its image."""
    lam = hyperbolic_data(a, b).lam
    xi = np.asarray(xi, dtype=float)
    small = np.minimum(xi, 1.0) ** 2
    large = np.minimum(1.0 / xi, 1.0) ** 2
    # for xi > 1 numerator and denominator are divided by xi^4 to avoid overflow
    out = np.where(
        xi <= 1.0,
        (lam + small) ** 2 / ((lam * lam + small) * (1.0 + small)),
        (lam * large + 1.0) ** 2 / ((lam * lam * large + 1.0) * (1.0 + large)),
    )
    return 2.0 * a * out


def ellipse_normal_speed(phi, a, b, adot, bdot):
    """Outward wall speed of the ellipse at boundary angle ``phi``."""
    s2, c2 = np.sin(phi) ** 2, np.cos(phi) ** 2
    return (adot * b * c2 + a * bdot * s2) / np.sqrt(a * a * s2 + b * b * c2)


def _chord_end(phi_next, phi, theta, a, b):
    """Pick the representative of ``phi_next`` (mod pi) the particle flies to."""
    alpha = np.arctan2(b * np.cos(phi), -a * np.sin(phi))
    beta = alpha + theta
    dx = a * (np.cos(phi_next) - np.cos(phi))
    dy = b * (np.sin(phi_next) - np.sin(phi))
    forward = dx * np.cos(beta) + dy * np.sin(beta) > 0.0
    return np.where(forward, phi_next, phi_next + PI), beta


def f_terms(phi_next, theta_next, phi, theta, E, t, boundary):
    """Components ``(f1, f2, f3, f4)`` of the first-order field ``B1``.

    ``(phi_next, theta_next)`` must be the static image of ``(phi, theta)``
    at time ``t``; ``phi_next`` may be given mod pi. Time derivatives of the
    semi-axes are taken at ``t``.
    """
    a, ad, b, bd, _, _ = boundary.semi_axes(t)
    v = np.sqrt(2.0 * E)
    psi, beta = _chord_end(phi_next, phi, theta, a, b)
    dist = D0(phi, psi, a, b)
    s, c = np.sin(psi), np.cos(psi)
    sb, cb = np.sin(beta), np.cos(beta)
    # the tan(theta + alpha) of the textbook form is cleared by cos(beta)
    f1 = dist / v * (ad * c * sb - bd * s * cb) / (a * s * sb + b * c * cb)
    u = ellipse_normal_speed(psi, a, b, ad, bd)
    metric = a * a * s * s + b * b * c * c
    f2 = -2.0 * u * np.cos(theta_next) / v + (dist * (ad * b / a - bd) * a * s * c / v + a * b * f1) / metric
    f3 = -2.0 * v * u * np.sin(theta_next)
    f4 = dist / v
    return f1, f2, f3, f4


def b1_field(phi, theta, E, t, boundary):
    """``B1`` at ``(phi, theta, E, t)`` as an array of shape ``(4, ...)``."""
    a, _, b, _, _, _ = boundary.semi_axes(t)
    phi1, theta1 = frozen_image(phi, theta, a, b, reduce=False)
    return np.array(f_terms(phi1, theta1, phi, theta, E, t, boundary))


def homoclinic_length_sum(xi0, a, b, N):
    """``sum_{|n| <= N} (2a - D0_on_W2(xi0 lambda^n))``; tends to ``2c``."""
    lam = hyperbolic_data(a, b).lam
    n = np.arange(-N, N + 1)
    return float(np.sum(2.0 * a - D0_on_W2(xi0 * lam ** n.astype(float), a, b)))
