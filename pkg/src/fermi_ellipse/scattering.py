"""The truncated scattering map and the outer Hamiltonian.

Following a homoclinic excursion along the W2 separatrix and returning to
the major axis changes the slow variables by

    E~ = E + eps 2 sqrt(2E) (b b' - a a') / c,
    t~ = t + eps 2 c / sqrt(2E),

to first order, which is the time-``eps`` shift along level curves of
``H_out = 2 sqrt(2E) c(t)``. The map only exists where the splitting
function has simple zeros, see :func:`fermi_ellipse.melnikov.in_domain`.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError
from .frozen import hyperbolic_data, w2_point
from .inner import CylinderState, rk4, default_steps
from .melnikov import Domain, SplittingConfig, in_domain
from .perturbation import D0_on_W2, ellipse_normal_speed

SQRT2 = math.sqrt(2.0)


def S_truncated(s, eps, boundary, cfg=None, override=False):
    """First-order scattering map at the cylinder point ``s``.

    The physical energy ``E/eps^2`` must lie inside the scattering domain
    for ``cfg`` (by default built from ``eps`` and ``boundary.delta``);
    otherwise a :class:`DomainError` is raised. ``override=True`` skips the
    check, for diagnostics only.
    """
    if not override:
        cfg = SplittingConfig(eps, boundary.delta) if cfg is None else cfg
        where = in_domain(s.E / eps ** 2, s.t % 1.0, cfg, boundary)
        if where is not Domain.INSIDE:
            raise DomainError(f"(E, t) = ({s.E}, {s.t}) is {where.value} the scattering domain")
    a, ad, b, bd, c, _ = boundary.semi_axes(s.t)
    v = math.sqrt(2.0 * s.E)
    return CylinderState(s.E + eps * 2.0 * v * (b * bd - a * ad) / c, s.t + eps * 2.0 * c / v)


def kernel_sum(lam, xi0=1.0, N=None):
    """``sum_n xi_n^2 / ((xi_n^2 + lam)(lam xi_n^2 + 1))`` with ``xi_n = xi0 lam^n``."""
    if N is None:
        N = _tail_terms(lam)
    r = (xi0 * lam ** np.arange(-N, N + 1, dtype=float)) ** 2
    with np.errstate(divide="ignore", over="ignore"):
        terms = 1.0 / ((1.0 + lam / r) * (lam * r + 1.0))
    return float(np.sum(terms))


def _tail_terms(lam, tol=1e-17):
    """Number of terms on each side so that ``lam^(-2N) < tol``."""
    return max(5, math.ceil(-math.log(tol) / (2.0 * math.log(lam))))


def scattering_sums(xi0, a, b, adot, bdot, E, N=None):
    """Term-by-term sums for the energy and time shifts of one excursion.

    Compares the major-axis values of the energy change and the flight time
    with their values along the W2 orbit through ``xi0``, with the slow
    variables pinned. Returns ``(dE_sum, dt_sum)``, which tend to
    ``2 sqrt(2E)(b b' - a a')/c`` and ``2c/sqrt(2E)``.
    """
    lam = hyperbolic_data(a, b).lam
    if N is None:
        N = _tail_terms(lam)
    v = math.sqrt(2.0 * E)
    xi = xi0 * lam ** np.arange(-N, N + 1, dtype=float)
    phi1, theta1 = w2_point(xi / lam, a, b)
    u = ellipse_normal_speed(phi1, a, b, adot, bdot)
    dE = np.sum(2.0 * v * (u * np.sin(theta1) - adot))
    dt = np.sum(2.0 * a - D0_on_W2(xi, a, b)) / v
    return float(dE), float(dt)


def H_out(s, boundary):
    return 2.0 * math.sqrt(2.0 * s.E) * boundary.c(s.t)


def flow_out(s, duration, boundary, steps=None):
    """Follow the Hamiltonian vector field of ``H_out`` for ``duration``."""
    def field(E, t):
        _, _, _, _, c, cd = boundary.semi_axes(t)
        return -2.0 * math.sqrt(2.0 * E) * cd, SQRT2 * c / math.sqrt(E)

    return CylinderState(*rk4(field, s.E, s.t, duration, default_steps(duration, steps)))


def level_curve_out(H, t, boundary):
    """Energies ``E(t)`` on the level set ``H_out = H``."""
    c = boundary.c(np.asarray(t, dtype=float))
    return (H / (2.0 * SQRT2 * c)) ** 2
