"""Time-periodic elliptic boundary with a small quartic deformation.

The billiard table at time ``t`` is the curve

    Q(phi, t) = (a(t) cos phi, b(t) sin phi (1 + delta sin^2 phi)),

where the semi-axes ``a`` and ``b`` are trigonometric polynomials of period
one in ``t``. Only first-order terms in ``delta`` are kept, so ``delta = 0``
gives the plain ellipse x^2/a^2 + y^2/b^2 = 1.

A configuration file holds one ``key = value`` pair per line::

    # a = 5 + sin(2 pi t), b = 2 - cos(2 pi t)
    a.const  = 5
    a.sin[1] = 1
    b.const  = 2
    b.cos[1] = -1
    delta    = 0.05

``a.cos[k]`` multiplies ``cos(2 pi k t)`` and ``a.sin[k]`` multiplies
``sin(2 pi k t)``; the same keys exist for ``b``. Blank lines and text
after ``#`` are ignored.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .errors import ConfigError

TWO_PI = 2.0 * math.pi
MAX_DELTA = 0.2
_GRID = 4096


def _trim(coeffs):
    """Coefficients as floats without trailing zeros, so equal polynomials compare equal."""
    out = [float(x) for x in coeffs]
    while out and out[-1] == 0.0:
        out.pop()
    return tuple(out)


@dataclass(frozen=True)
class TrigPoly:
    """Real trigonometric polynomial of period one.

    ``p(t) = const + sum_k cos[k] cos(2 pi k t) + sin[k] sin(2 pi k t)``,
    with ``cos`` and ``sin`` indexed from ``k = 1``.
    """

    const: float
    cos: tuple[float, ...] = ()
    sin: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "const", float(self.const))
        object.__setattr__(self, "cos", _trim(self.cos))
        object.__setattr__(self, "sin", _trim(self.sin))

    @property
    def is_constant(self):
        return not any(self.cos) and not any(self.sin)

    def __call__(self, t):
        """Return ``(p(t), p'(t))``; works on floats and arrays."""
        if isinstance(t, (float, int)):
            val, der = self.const, 0.0
            for k, ck in enumerate(self.cos, start=1):
                w = TWO_PI * k
                val += ck * math.cos(w * t)
                der -= w * ck * math.sin(w * t)
            for k, sk in enumerate(self.sin, start=1):
                w = TWO_PI * k
                val += sk * math.sin(w * t)
                der += w * sk * math.cos(w * t)
            return val, der
        t = np.asarray(t, dtype=float)
        val = np.full_like(t, self.const)
        der = np.zeros_like(t)
        for k, ck in enumerate(self.cos, start=1):
            w = TWO_PI * k
            val = val + ck * np.cos(w * t)
            der = der - w * ck * np.sin(w * t)
        for k, sk in enumerate(self.sin, start=1):
            w = TWO_PI * k
            val = val + sk * np.sin(w * t)
            der = der + w * sk * np.cos(w * t)
        return val, der

    def second_derivative(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for k, ck in enumerate(self.cos, start=1):
            w = TWO_PI * k
            out = out - w * w * ck * np.cos(w * t)
        for k, sk in enumerate(self.sin, start=1):
            w = TWO_PI * k
            out = out - w * w * sk * np.sin(w * t)
        return out


class SemiAxes(NamedTuple):
    a: float
    adot: float
    b: float
    bdot: float
    c: float
    cdot: float


@dataclass(frozen=True)
class BoundaryModel:
    """Semi-axes ``a(t)``, ``b(t)`` and the quartic deformation strength.

    Construction checks ``0 < b(t) < a(t)`` on a dense grid of times and
    ``|delta| < 0.2``; a :class:`ConfigError` is raised otherwise.
    """

    a_coeffs: TrigPoly
    b_coeffs: TrigPoly
    delta: float = 0.0
    config_text: str = field(default="", compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "delta", float(self.delta))
        if not math.isfinite(self.delta) or abs(self.delta) >= MAX_DELTA:
            raise ConfigError(f"|delta| must be below {MAX_DELTA}, got {self.delta}")
        t = np.arange(_GRID) / _GRID
        a, _ = self.a_coeffs(t)
        b, _ = self.b_coeffs(t)
        if not np.all(np.isfinite(a)) or not np.all(np.isfinite(b)):
            raise ConfigError("semi-axes must be finite")
        if np.min(b) <= 0.0:
            raise ConfigError("b(t) must stay positive")
        if np.min(a - b) <= 0.0:
            raise ConfigError("b(t) < a(t) must hold for all t")

    # construction helpers

    @classmethod
    def constant(cls, a, b, delta=0.0):
        return cls(TrigPoly(a), TrigPoly(b), delta)

    @classmethod
    def figure1(cls, delta=0.05):
        """The table ``a = 5 + sin(2 pi t)``, ``b = 2 - cos(2 pi t)``."""
        return cls(TrigPoly(5.0, sin=(1.0,)), TrigPoly(2.0, cos=(-1.0,)), delta)

    def with_delta(self, delta):
        return replace(self, delta=delta)

    # geometry

    def semi_axes(self, t):
        """Return ``(a, adot, b, bdot, c, cdot)`` at time ``t``."""
        a, ad = self.a_coeffs(t)
        b, bd = self.b_coeffs(t)
        if isinstance(a, float):
            c = math.sqrt(a * a - b * b)
        else:
            c = np.sqrt(a * a - b * b)
        return SemiAxes(a, ad, b, bd, c, (a * ad - b * bd) / c)

    def c(self, t):
        return self.semi_axes(t).c

    def curve_point(self, phi, t, with_delta=True):
        a, _ = self.a_coeffs(t)
        b, _ = self.b_coeffs(t)
        d = self.delta if with_delta else 0.0
        s = np.sin(phi)
        return a * np.cos(phi), b * s * (1.0 + d * s * s)

    def tangent(self, phi, t, with_delta=True):
        """Derivative of the curve point with respect to ``phi``."""
        a, _ = self.a_coeffs(t)
        b, _ = self.b_coeffs(t)
        d = self.delta if with_delta else 0.0
        s = np.sin(phi)
        return -a * s, b * np.cos(phi) * (1.0 + 3.0 * d * s * s)

    def curve_velocity(self, phi, t, with_delta=True):
        """Derivative of the curve point with respect to ``t``."""
        _, ad = self.a_coeffs(t)
        _, bd = self.b_coeffs(t)
        d = self.delta if with_delta else 0.0
        s = np.sin(phi)
        return ad * np.cos(phi), bd * s * (1.0 + d * s * s)

    def normal_speed(self, phi, t, with_delta=True):
        """Speed of the wall along its outward normal (positive = outward)."""
        tx, ty = self.tangent(phi, t, with_delta)
        qx, qy = self.curve_velocity(phi, t, with_delta)
        return (qx * ty - qy * tx) / np.hypot(tx, ty)

    @cached_property
    def max_normal_speed(self):
        """Grid estimate of ``max |u|`` over the boundary and one period."""
        t = (np.arange(256) / 256)[:, None]
        phi = (np.arange(256) * (TWO_PI / 256))[None, :]
        return float(np.max(np.abs(self.normal_speed(phi, t))))

    # serialization

    def to_config_text(self):
        lines = []
        for name, poly in (("a", self.a_coeffs), ("b", self.b_coeffs)):
            lines.append(f"{name}.const = {poly.const!r}")
            for k, v in enumerate(poly.cos, start=1):
                if v:
                    lines.append(f"{name}.cos[{k}] = {v!r}")
            for k, v in enumerate(poly.sin, start=1):
                if v:
                    lines.append(f"{name}.sin[{k}] = {v!r}")
        lines.append(f"delta = {self.delta!r}")
        return "\n".join(lines) + "\n"


_KEY = re.compile(r"^(a|b)\.(const|cos\[(\d+)\]|sin\[(\d+)\])$")


def parse_config(text):
    """Build a :class:`BoundaryModel` from configuration text."""
    parts = {"a": [None, {}, {}], "b": [None, {}, {}]}
    delta = 0.0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        try:
            number = float(value)
        except ValueError:
            raise ConfigError(f"line {lineno}: bad number {value!r}") from None
        if key == "delta":
            delta = number
            continue
        match = _KEY.match(key)
        if not match:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        entry = parts[match.group(1)]
        if match.group(2) == "const":
            entry[0] = number
        else:
            k = int(match.group(3) or match.group(4))
            if k < 1:
                raise ConfigError(f"line {lineno}: harmonic index must be >= 1")
            slot = 1 if match.group(3) else 2
            entry[slot][k] = number
    polys = {}
    for name, (const, cos, sin) in parts.items():
        if const is None:
            raise ConfigError(f"missing {name}.const")
        n = max([0, *cos, *sin])
        polys[name] = TrigPoly(
            const,
            tuple(cos.get(k, 0.0) for k in range(1, n + 1)),
            tuple(sin.get(k, 0.0) for k in range(1, n + 1)),
        )
    return BoundaryModel(polys["a"], polys["b"], delta, config_text=text)


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
