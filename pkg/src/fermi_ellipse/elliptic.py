"""Jacobi elliptic functions and complete integrals via the AGM.

Everything here is built on the arithmetic-geometric mean, so it needs no
special-function library. The parameter convention is ``m = k**2``.

The lattice sums used by the splitting functions are

    X(tau) = (2K/h)^2 (E'/K' - 1 + dn^2(2K tau/h)) = sum_n sech^2(tau + n h),
    Y(tau) = (2K/h) m sn(2K tau/h) cd(2K tau/h),

where ``m`` is fixed by ``K'/K = pi/h``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError

_EPS = 2.0 ** -52
_MAX_AGM = 64


def _agm_sequence(m, mc):
    """AGM ladder ``(a_n, c_n)`` started from ``a_0 = 1, b_0 = sqrt(mc)``."""
    a, b, c = 1.0, math.sqrt(mc), math.sqrt(m)
    avals, cvals = [a], [c]
    for _ in range(_MAX_AGM):
        if abs(c) <= _EPS * a and len(avals) > 1:
            break
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        avals.append(a)
        cvals.append(c)
    return avals, cvals


def complete_integrals(m, mc=None):
    """Return ``(K(m), E(m))``.

    ``mc`` is the complementary parameter ``1 - m``. Passing it explicitly
    keeps full relative accuracy when ``m`` is close to one.
    """
    m = float(m)
    mc = 1.0 - m if mc is None else float(mc)
    if not (0.0 <= m <= 1.0) or not (mc > 0.0):
        raise DomainError(f"complete integrals need 0 <= m < 1, got m={m}")
    avals, cvals = _agm_sequence(m, mc)
    K = math.pi / (2.0 * avals[-1])
    s = sum(2.0 ** (n - 1) * c * c for n, c in enumerate(cvals))
    return K, K * (1.0 - s)


@dataclass(frozen=True)
class EllipticContext:
    """Parameter ``m`` with its complete integrals, tied to one ``h``."""

    m: float
    mc: float
    K: float
    Kp: float
    Ecomp: float
    Epcomp: float
    h: float

    @classmethod
    def from_parameter(cls, m, mc=None, h=None):
        mc = 1.0 - m if mc is None else mc
        K, E = complete_integrals(m, mc)
        Kp, Ep = complete_integrals(mc, m)
        if h is None:
            h = math.pi * K / Kp
        return cls(m, mc, K, Kp, E, Ep, h)

    @property
    def legendre_residual(self):
        return self.Ecomp * self.Kp + self.Epcomp * self.K - self.K * self.Kp - math.pi / 2


def _parameter_pair(x):
    """Map the logit ``x = log(m/mc)`` to an accurate pair ``(m, mc)``."""
    if x >= 0:
        e = math.exp(-x)
        return 1.0 / (1.0 + e), e / (1.0 + e)
    e = math.exp(x)
    return e / (1.0 + e), 1.0 / (1.0 + e)


def _log_period_ratio(x):
    m, mc = _parameter_pair(x)
    # K'/K = AGM(1, sqrt(mc)) / AGM(1, sqrt(m))
    return math.log(_agm_sequence(m, mc)[0][-1]) - math.log(_agm_sequence(mc, m)[0][-1])


@lru_cache(maxsize=4096)
def solve_modulus(h):
    """Find the parameter ``m`` with ``K'(m)/K(m) = pi/h``.

    The ratio is strictly decreasing in ``m``, so a bracketed root search in
    the logit of ``m`` always converges.
    """
    h = float(h)
    if not (h > 0.0) or not math.isfinite(h):
        raise DomainError(f"h must be positive, got {h}")
    target = math.log(math.pi / h)
    lo, hi = -700.0, 700.0
    flo, fhi = _log_period_ratio(lo) - target, _log_period_ratio(hi) - target
    if flo * fhi > 0:
        raise DomainError(f"h={h} is outside the representable range")
    x = brentq(lambda y: _log_period_ratio(y) - target, lo, hi, xtol=1e-15, rtol=4 * _EPS, maxiter=500)
    m, mc = _parameter_pair(x)
    return EllipticContext.from_parameter(m, mc, h)


def jacobi(u, m, mc=None):
    """Return ``(sn, cn, dn)`` of argument ``u`` and parameter ``0 <= m <= 1``.

    Uses the descending Landen (AGM) scheme. ``u`` may be an array; ``mc``
    optionally gives ``1 - m`` to full precision.
    """
    m = float(m)
    mc = 1.0 - m if mc is None else float(mc)
    if not (0.0 <= m <= 1.0):
        raise DomainError(f"jacobi needs 0 <= m <= 1, got {m}")
    u = np.asarray(u, dtype=float)
    if m == 0.0:
        return np.sin(u), np.cos(u), np.ones_like(u)
    if m == 1.0:
        sech = 1.0 / np.cosh(u)
        return np.tanh(u), sech, sech
    K, _ = complete_integrals(m, mc)
    period = 4.0 * K
    u = u - period * np.round(u / period)
    avals, cvals = _agm_sequence(m, mc)
    n = len(avals) - 1
    phi = (2.0 ** n) * avals[-1] * u
    for k in range(n, 0, -1):
        phi = 0.5 * (phi + np.arcsin(cvals[k] * np.sin(phi) / avals[k]))
    sn, cn = np.sin(phi), np.cos(phi)
    # dn^2 = mc + m cn^2 is a sum of non-negative terms, so no cancellation;
    # the textbook cn/cos(phi_1 - phi_0) is 0/0 at odd multiples of K
    dn = np.sqrt(mc + m * cn * cn)
    return sn, cn, dn


def X_of_tau(tau, ctx):
    """Lattice sum ``sum_n sech^2(tau + n h)`` in closed form."""
    scale = 2.0 * ctx.K / ctx.h
    _, _, dn = jacobi(scale * np.asarray(tau, dtype=float), ctx.m, ctx.mc)
    return scale * scale * (ctx.Epcomp / ctx.Kp - 1.0 + dn * dn)


def Y_of_tau(tau, ctx):
    """Odd companion ``(2K/h) m sn cd`` evaluated at ``2K tau/h``."""
    scale = 2.0 * ctx.K / ctx.h
    sn, cn, dn = jacobi(scale * np.asarray(tau, dtype=float), ctx.m, ctx.mc)
    return scale * ctx.m * sn * cn / dn
