"""Splitting of the separatrix of the major-axis cylinder.

The signed distance between the perturbed stable and unstable manifolds,
measured along ``grad I``, is ``eps M1 + delta M2`` to first order. Along
the W2 branch, with ``tau = log tan(phi/2)`` and ``K'/K = pi/h``,

    M1 = (4b/v) (a b' - b a') X(tau),
    M2 = -8 m (a b^2/c) (2K/h)^3 sn cn dn(2K tau/h),

where ``X`` is the lattice sum from :mod:`fermi_ellipse.elliptic`. Both are
also available as brute-force sums over a separatrix orbit
(:func:`M_series`), which serve as independent checks.

Writing ``M1 = f g / v`` and ``M2 = j``, zeros of the reduced splitting
function ``dbar = eps f g/(delta v) + j`` in ``tau`` exist exactly when

    sqrt(Ecal) > |f| phi(t) / |delta|,   phi(t) = min_tau |g/j| / sqrt(2),

with ``Ecal = E/eps^2`` the physical energy. That inequality, widened by a
margin ``k``, decides where the scattering map is defined.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .dynmap import PhaseState, linear_response
from .elliptic import X_of_tau, jacobi, solve_modulus
from .errors import ConfigError, DomainError, TruncationWarning
from .frozen import frozen_image, grad_I, hyperbolic_data, w2_point
from .perturbation import b1_field

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class MelnikovSample:
    tau: float
    t: float
    v: float
    m1: float
    m2: float

    def __post_init__(self):
        if not self.v > 0.0:
            raise DomainError("v must be positive")


@dataclass(frozen=True)
class SplittingConfig:
    """Small parameters and the margins used by the domain predicate.

    ``margin_k`` is the half-width, in units of ``sqrt(Ecal)``, of the band
    around the domain boundary where no decision is made. ``floor_C`` sets
    the lowest admissible physical energy ``floor_C/|delta|``.
    """

    eps: float
    delta: float
    margin_k: float = 1.0
    floor_C: float = 1.0

    def __post_init__(self):
        if not self.eps > 0.0:
            raise ConfigError("eps must be positive")
        if abs(self.delta) < 10.0 * self.eps ** 2:
            raise ConfigError("need |delta| >= 10 eps^2")
        if not self.margin_k > 0.0:
            raise ConfigError("margin_k must be positive")
        if not self.floor_C >= 0.0:
            raise ConfigError("floor_C must be non-negative")


class Domain(enum.Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class ZeroSet:
    """Roots of ``dbar`` in ``[0, h)``; ``indeterminate`` marks a near-double root."""

    roots: tuple
    indeterminate: bool = False

    def __len__(self):
        return len(self.roots)


@lru_cache(maxsize=65536)
def _local(boundary, t):
    axes = boundary.semi_axes(float(t))
    hyp = hyperbolic_data(axes.a, axes.b)
    return axes, hyp, solve_modulus(hyp.h)


def _jacobi_tau(tau, ctx):
    scale = 2.0 * ctx.K / ctx.h
    sn, cn, dn = jacobi(scale * np.asarray(tau, dtype=float), ctx.m, ctx.mc)
    return scale, sn, cn, dn


def fgj(tau, t, boundary):
    """Return ``(f, g, j)`` with ``M1 = f g / v`` and ``M2 = j``."""
    axes, _, ctx = _local(boundary, t)
    a, ad, b, bd, c, _ = axes
    f = a * bd - b * ad
    g = 4.0 * b * X_of_tau(tau, ctx)
    scale, sn, cn, dn = _jacobi_tau(tau, ctx)
    # normalized so that j equals the orbit sum of <grad I, B2>, as M1 does for B1
    j = -8.0 * ctx.m * (a * b * b / c) * scale ** 3 * sn * cn * dn
    return f, g, j


def M1_closed(tau, t, v, boundary):
    f, g, _ = fgj(tau, t, boundary)
    return f * g / v


def M2_closed(tau, t, boundary):
    return fgj(tau, t, boundary)[2]


def _j_over_g(tau, t, boundary):
    axes, _, ctx = _local(boundary, t)
    a, _, b, _, c, _ = axes
    scale, sn, cn, dn = _jacobi_tau(tau, ctx)
    return -2.0 * ctx.m * (a * b / c) * scale * sn * cn * dn / (ctx.Epcomp / ctx.Kp - 1.0 + dn * dn)


def _series_terms_eps(xi, E, t, boundary):
    a, ad, b, bd, _, _ = boundary.semi_axes(t)
    phi, theta = w2_point(xi, a, b)
    field = b1_field(phi, theta, E, t, boundary)
    phi1, theta1 = frozen_image(phi, theta, a, b)
    return np.sum(grad_I(phi1, theta1, a, b, ad, bd) * field, axis=0)


def _series_terms_delta(xi, E, t, boundary):
    a, ad, b, bd, _, _ = boundary.semi_axes(t)
    base = boundary.with_delta(0.0)
    out = np.empty(len(xi))
    for i, x in enumerate(xi):
        phi, theta = w2_point(x, a, b)
        field = linear_response(PhaseState(phi % math.pi, theta, E, t, 0.0), base, "delta")
        phi1, theta1 = frozen_image(phi, theta, a, b)
        out[i] = grad_I(phi1, theta1, a, b, ad, bd) @ field
    return out


def M_series(tau, t, v, boundary, direction="eps", N=None):
    """Brute-force Melnikov sum along the W2 orbit through ``tau``.

    Sums ``<grad I(B0 x_n), B_k(x_n)>`` for ``|n| <= N`` with the slow
    variables ``(E, t)`` held fixed. ``B1`` comes from the analytic first
    order field, ``B2`` from finite differences of the full map in ``delta``
    (its closed form is not used). ``v`` is irrelevant for ``delta``.
    """
    axes, hyp, _ = _local(boundary, t)
    h = hyp.h
    explicit = N is not None
    if N is None:
        N = max(25, math.ceil((abs(tau) + 16.0) / h))
    n = np.arange(-N, N + 1)
    xi = np.exp(tau - n * h)
    E = 0.5 * v * v
    if direction == "eps":
        terms = _series_terms_eps(xi, E, t, boundary)
    elif direction == "delta":
        terms = _series_terms_delta(xi, E, t, boundary)
    else:
        raise ValueError(f"direction must be 'eps' or 'delta', not {direction!r}")
    total = float(np.sum(terms))
    tail = abs(terms[0]) + abs(terms[-1])
    if explicit and tail > 1e-12 * (1.0 + abs(total)):
        warnings.warn(f"series tail {tail:.2e} is not negligible; increase N", TruncationWarning, stacklevel=2)
    return total


@lru_cache(maxsize=65536)
def _lobe_extremum(t, boundary):
    """``(tau*, J)`` with ``J = max |j/g|`` attained at ``tau*`` in ``(0, h/2)``."""
    t = float(t)
    _, hyp, _ = _local(boundary, t)
    h = hyp.h
    sign = np.sign(_j_over_g(0.25 * h, t, boundary))

    def objective(x):
        return -sign * float(_j_over_g(x, t, boundary))

    lo, hi = 1e-6 * h, (0.5 - 1e-6) * h
    res = minimize_scalar(objective, bracket=(lo, 0.25 * h, hi), method="golden", tol=1e-11)
    return float(res.x), -float(res.fun)


def phi_of_t(t, boundary):
    """``min_tau |g/j| / sqrt(2)``; positive and one-periodic in ``t``."""
    return 1.0 / (SQRT2 * _lobe_extremum(t, boundary)[1])


def phi_minimizer(t, boundary):
    """The ``tau`` in ``(0, h/2)`` where ``|g/j|`` attains its minimum."""
    return _lobe_extremum(t, boundary)[0]


def domain_threshold(t, delta, boundary):
    """``|a b' - b a'| phi(t) / |delta|``, the critical ``sqrt(Ecal)``."""
    axes, _, _ = _local(boundary, t)
    f = axes.a * axes.bdot - axes.b * axes.adot
    return abs(f) * phi_of_t(t, boundary) / abs(delta)


def dbar(tau, t, v, cfg, boundary):
    """Reduced splitting function ``eps f g / (delta v) + j``."""
    f, g, j = fgj(tau, t, boundary)
    return cfg.eps * f * g / (cfg.delta * v) + j


def find_zeros(t, v, cfg, boundary, rel_tol=1e-9):
    """Zeros of :func:`dbar` in ``tau`` over one period ``[0, h)``.

    ``j/g`` is odd with zeros at ``0`` and ``h/2`` and a single extremum on
    each half period, so there are either two simple roots or none. A root
    pair closer than ``rel_tol`` to merging is reported as indeterminate.
    """
    axes, hyp, _ = _local(boundary, t)
    h = hyp.h
    f = axes.a * axes.bdot - axes.b * axes.adot
    if f == 0.0:
        return ZeroSet((0.0, 0.5 * h))
    tau_star, J = _lobe_extremum(t, boundary)
    # on [0, h/2] j/g has the sign of j/g(tau_star); the other half mirrors it
    r = -cfg.eps * f / (cfg.delta * v)
    lobe_sign = np.sign(_j_over_g(tau_star, t, boundary))
    if np.sign(r) != lobe_sign:
        tau_star, lo, hi = h - tau_star, 0.5 * h, h
    else:
        lo, hi = 0.0, 0.5 * h
    gap = J - abs(r)
    if abs(gap) <= rel_tol * J:
        return ZeroSet((), indeterminate=True)
    if gap < 0.0:
        return ZeroSet(())

    def d(x):
        return float(dbar(x, t, v, cfg, boundary))

    left = brentq(d, lo, tau_star, xtol=1e-14, rtol=1e-15)
    right = brentq(d, tau_star, hi, xtol=1e-14, rtol=1e-15)
    return ZeroSet((left, right))


def dbar_slope(tau, t, v, cfg, boundary, step=1e-6):
    return (float(dbar(tau + step, t, v, cfg, boundary)) - float(dbar(tau - step, t, v, cfg, boundary))) / (2 * step)


def in_domain(Ecal, t, cfg, boundary):
    """Classify the physical energy ``Ecal`` at time ``t``."""
    if Ecal < cfg.floor_C / abs(cfg.delta):
        raise DomainError(f"energy {Ecal} is below the floor {cfg.floor_C / abs(cfg.delta)}")
    gap = math.sqrt(Ecal) - domain_threshold(t, cfg.delta, boundary)
    if gap > cfg.margin_k:
        return Domain.INSIDE
    if gap < -cfg.margin_k:
        return Domain.OUTSIDE
    return Domain.INDETERMINATE


def sample(tau, t, v, boundary):
    return MelnikovSample(tau, t, v, float(M1_closed(tau, t, v, boundary)), float(M2_closed(tau, t, boundary)))
