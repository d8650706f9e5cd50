"""Quick cross-checks of the library against independent computations.

Each check compares two routes to the same number (closed form against
quadrature, series, finite differences or another map) and returns the
observed discrepancy together with its tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .boundary import BoundaryModel
from .dynmap import PhaseState, linear_response, solve_collision
from .elliptic import X_of_tau, complete_integrals, solve_modulus
from .frozen import area_ratio, frozen_image, integral_I, w2_point
from .inner import CylinderState, step_inner
from .melnikov import Domain, M1_closed, M2_closed, M_series, SplittingConfig, find_zeros, in_domain
from .perturbation import b1_field, homoclinic_length_sum
from .scattering import kernel_sum, scattering_sums


@dataclass(frozen=True)
class CheckResult:
    name: str
    error: float
    tolerance: float

    @property
    def passed(self):
        return bool(self.error <= self.tolerance)


def _complete_integrals():
    K, E = complete_integrals(0.5)
    Kq = quad(lambda x: 1.0 / math.sqrt(1.0 - 0.5 * math.sin(x) ** 2), 0.0, math.pi / 2, epsabs=1e-14)[0]
    Eq = quad(lambda x: math.sqrt(1.0 - 0.5 * math.sin(x) ** 2), 0.0, math.pi / 2, epsabs=1e-14)[0]
    return max(abs(K - Kq), abs(E - Eq)), 1e-12


def _modulus():
    return abs(solve_modulus(math.pi).m - 0.5), 1e-12


def _lattice_sum():
    ctx = solve_modulus(2.0)
    tau = np.linspace(-1.0, 1.0, 33)
    n = np.arange(-40, 41)[:, None]
    direct = np.sum(1.0 / np.cosh(tau[None, :] + n * 2.0) ** 2, axis=0)
    return float(np.max(np.abs(X_of_tau(tau, ctx) - direct))), 1e-10


def _frozen_integral():
    rng = np.random.default_rng(1)
    a, b = 2.0, 1.0
    phi = rng.uniform(0.0, math.pi, 200)
    theta = rng.uniform(0.05, math.pi - 0.05, 200)
    I0 = integral_I(phi, theta, a, b)
    for _ in range(100):
        phi, theta = frozen_image(phi, theta, a, b)
    return float(np.max(np.abs(integral_I(phi, theta, a, b) - I0))) / (b * b + a * a - b * b), 1e-10


def _area_form():
    rng = np.random.default_rng(2)
    phi = rng.uniform(0.0, math.pi, 100)
    theta = rng.uniform(0.1, math.pi - 0.1, 100)
    return float(np.max(np.abs(area_ratio(phi, theta, 2.0, 1.0) - 1.0))), 1e-6


def _f_terms():
    boundary = BoundaryModel.figure1(0.0)
    a, _, b, _, _, _ = boundary.semi_axes(0.1)
    phi, theta = w2_point(1.0, a, b)
    exact = b1_field(phi, theta, 0.5, 0.1, boundary)
    numeric = linear_response(PhaseState(phi, theta, 0.5, 0.1, 0.0), boundary, "eps")
    return float(np.max(np.abs(exact - numeric) / np.maximum(1.0, np.abs(numeric)))), 1e-5


def _m1_series():
    boundary = BoundaryModel.figure1(0.05)
    closed = M1_closed(0.3, 0.1, 1.0, boundary)
    return abs(closed - M_series(0.3, 0.1, 1.0, boundary)) / (1.0 + abs(closed)), 1e-8


def _m2_series():
    boundary = BoundaryModel.figure1(0.05)
    closed = M2_closed(0.4, 0.0, boundary)
    return abs(closed - M_series(0.4, 0.0, 1.0, boundary, "delta")) / abs(closed), 1e-5


def _length_sum():
    return abs(homoclinic_length_sum(1.0, 2.0, 1.0, 40) - 2.0 * math.sqrt(3.0)), 1e-10


def _kernel():
    return max(abs(kernel_sum(lam) - 1.0 / (lam * lam - 1.0)) for lam in (1.5, 2.0, 5.0)), 1e-10


def _energy_shift():
    a, ad, b, bd, E = 5.0, 2.0 * math.pi, 1.0, 0.0, 0.5
    c = math.sqrt(a * a - b * b)
    dE, dt = scattering_sums(1.0, a, b, ad, bd, E)
    v = math.sqrt(2 * E)
    return max(abs(dE - 2 * v * (b * bd - a * ad) / c), abs(dt - 2 * c / v)), 1e-8


def _inner_vs_full():
    boundary = BoundaryModel.figure1(0.05)
    col = solve_collision(0.0, math.pi / 2, 1.0, 0.2, 1e-3, boundary)
    s = step_inner(CylinderState(1.0, 0.2), 1e-3, boundary)
    return max(abs(col.E - s.E), abs(col.t - s.t)), 1e-10


def _domain_vs_roots():
    boundary = BoundaryModel.figure1(0.05)
    cfg = SplittingConfig(1e-3, 0.05)
    mismatches = 0
    for t in np.linspace(0.0, 1.0, 8, endpoint=False):
        for root_E in np.linspace(20.0, 300.0, 8):
            where = in_domain(root_E ** 2, float(t), cfg, boundary)
            if where is Domain.INDETERMINATE:
                continue
            v = cfg.eps * root_E * math.sqrt(2.0)
            zeros = find_zeros(float(t), v, cfg, boundary)
            mismatches += (where is Domain.INSIDE) != (len(zeros) == 2)
    return float(mismatches), 0.0


CHECKS = [
    ("complete integrals vs quadrature", _complete_integrals),
    ("modulus at h = pi", _modulus),
    ("lattice-sum identity", _lattice_sum),
    ("static map integral", _frozen_integral),
    ("static map area form", _area_form),
    ("f-terms vs finite differences", _f_terms),
    ("M1 closed form vs series", _m1_series),
    ("M2 closed form vs numeric series", _m2_series),
    ("homoclinic length sum", _length_sum),
    ("kernel sum", _kernel),
    ("scattering shifts vs series", _energy_shift),
    ("inner map vs full map", _inner_vs_full),
    ("domain predicate vs root count", _domain_vs_roots),
]


def run_checks():
    return [CheckResult(name, *fn()) for name, fn in CHECKS]


def format_table(results):
    width = max(len(r.name) for r in results)
    lines = []
    for r in results:
        status = "pass" if r.passed else "FAIL"
        lines.append(f"{r.name:<{width}}  {status}  error={r.error:.3e}  tol={r.tolerance:.1e}")
    return "\n".join(lines)
