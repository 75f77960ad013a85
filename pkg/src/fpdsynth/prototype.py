"""Chebyshev lowpass prototype element values."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PrototypeSpec",
    "GValues",
    "PRESETS",
    "ripple_from_return_loss",
    "return_loss_from_ripple",
    "compute_g_values",
    "preset",
    "ladder_s11",
]


@dataclass(frozen=True)
class PrototypeSpec:
    order: int
    ripple_db: float

    def __post_init__(self):
        if int(self.order) != self.order or self.order < 1:
            raise ValueError(f"order must be a positive integer, got {self.order!r}")
        if not (math.isfinite(self.ripple_db) and self.ripple_db > 0):
            raise ValueError(f"ripple_db must be finite and > 0, got {self.ripple_db!r}")


@dataclass(frozen=True)
class GValues:
    """Prototype element values ``g[0] .. g[n+1]``."""

    g: tuple[float, ...]

    def __post_init__(self):
        g = tuple(float(v) for v in self.g)
        object.__setattr__(self, "g", g)
        if len(g) < 3:
            raise ValueError("need at least g0, g1, g2")
        if g[0] != 1.0:
            raise ValueError(f"g0 must be exactly 1, got {g[0]!r}")
        if any(not (math.isfinite(v) and v > 0) for v in g):
            raise ValueError(f"all g-values must be positive and finite: {g}")

    @property
    def order(self) -> int:
        return len(self.g) - 2

    def __getitem__(self, i):
        return self.g[i]

    def __len__(self):
        return len(self.g)

    def __iter__(self):
        return iter(self.g)


# Rounded values as printed for the third-order 20 dB return-loss design.
PRESETS = {
    "paper-3rd-order-20dB": GValues((1.0, 0.8516, 1.1032, 0.8516, 1.0)),
}


def preset(name: str) -> GValues:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown g-value preset {name!r}; known: {sorted(PRESETS)}") from None


def _check_db(value, name):
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise ValueError(f"{name} must be finite and > 0, got {value!r}")


def ripple_from_return_loss(rl_db: float) -> float:
    """Passband ripple (dB) of a lossless network whose worst return loss is ``rl_db``."""
    _check_db(rl_db, "rl_db")
    return -10.0 * math.log10(-math.expm1(-rl_db / 10.0 * math.log(10.0)))


def return_loss_from_ripple(ripple_db: float) -> float:
    """Inverse of :func:`ripple_from_return_loss`."""
    _check_db(ripple_db, "ripple_db")
    return -10.0 * math.log10(-math.expm1(-ripple_db / 10.0 * math.log(10.0)))


def compute_g_values(spec: PrototypeSpec) -> GValues:
    """Element values of the equiripple lowpass ladder.

    For even orders the load value ``g[n+1]`` is the mismatched termination
    ``coth^2(beta/4)``; no further correction is attempted.
    """
    n = spec.order
    # 40/ln(10) is the unrounded form of the familiar 17.37
    beta = math.log(1.0 / math.tanh(spec.ripple_db * math.log(10.0) / 40.0))
    gamma = math.sinh(beta / (2 * n))
    a = [math.sin((2 * i - 1) * math.pi / (2 * n)) for i in range(1, n + 1)]
    b = [gamma**2 + math.sin(i * math.pi / n) ** 2 for i in range(1, n + 1)]

    g = [1.0, 2.0 * a[0] / gamma]
    for i in range(2, n + 1):
        g.append(4.0 * a[i - 2] * a[i - 1] / (b[i - 2] * g[-1]))
    g.append(1.0 if n % 2 else 1.0 / math.tanh(beta / 4.0) ** 2)
    return GValues(tuple(g))


def ladder_s11(g: GValues, omega):
    """Reflection coefficient of the lowpass ladder built from ``g``.

    Shunt capacitor ``g1`` sits next to the source conductance ``g0``;
    elements alternate shunt-C / series-L, and ``g[n+1]`` is a load
    resistance (odd n) or conductance (even n). ``omega`` is the
    normalized radian frequency, scalar or array.
    """
    s = 1j * np.asarray(omega, dtype=float)
    n = g.order
    load = g[n + 1]
    y = np.full(s.shape, 1.0 / load if n % 2 else load, dtype=complex)
    for k in range(n, 0, -1):
        if k % 2:
            y = y + s * g[k]
        else:
            y = 1.0 / (1.0 / y + s * g[k])
    return (g[0] - y) / (g[0] + y)
