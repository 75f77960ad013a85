"""Quasi-static microstrip estimates (Hammerstad-Jensen, zero strip thickness, no dispersion)."""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.constants import c as C0
from scipy.constants import epsilon_0, mu_0
from scipy.optimize import bisect

__all__ = [
    "Substrate",
    "LineGeometry",
    "PAPER_SUBSTRATE",
    "FOOTPRINT_RATIOS",
    "WidthRangeError",
    "analyze",
    "synthesize_width",
    "guided_wavelength",
    "footprint",
]

ETA0 = math.sqrt(mu_0 / epsilon_0)
U_BRACKET = (0.05, 20.0)

# Board size in guided wavelengths (x, y).
FOOTPRINT_RATIOS = (0.31, 0.18)


class WidthRangeError(ValueError):
    pass


@dataclass(frozen=True)
class Substrate:
    eps_r: float
    h: float  # m
    tan_delta: float = 0.0

    def __post_init__(self):
        if not self.eps_r >= 1:
            raise ValueError(f"eps_r must be >= 1, got {self.eps_r!r}")
        if not self.h > 0:
            raise ValueError(f"h must be > 0, got {self.h!r}")
        if not self.tan_delta >= 0:
            raise ValueError(f"tan_delta must be >= 0, got {self.tan_delta!r}")


PAPER_SUBSTRATE = Substrate(eps_r=10.7, h=1.27e-3, tan_delta=0.0023)


@dataclass(frozen=True)
class LineGeometry:
    w: float
    eps_eff: float
    z0: float
    lambda_g: float | None = None
    frequency: float | None = None
    regime: str = ""  # "w/h<1" or "w/h>=1", informational only

    def __post_init__(self):
        if not self.eps_eff >= 1:
            raise ValueError(f"eps_eff below 1: {self.eps_eff!r}")


def _eps_eff(u: float, er: float) -> float:
    a = 1 + math.log((u**4 + (u / 52) ** 2) / (u**4 + 0.432)) / 49 + math.log(1 + (u / 18.1) ** 3) / 18.7
    b = 0.564 * ((er - 0.9) / (er + 3)) ** 0.053
    return (er + 1) / 2 + (er - 1) / 2 * (1 + 10 / u) ** (-a * b)


def _z0_air(u: float) -> float:
    f = 6 + (2 * math.pi - 6) * math.exp(-((30.666 / u) ** 0.7528))
    return ETA0 / (2 * math.pi) * math.log(f / u + math.sqrt(1 + (2 / u) ** 2))


def analyze(w: float, substrate: Substrate, f: float | None = None) -> LineGeometry:
    """Effective permittivity and characteristic impedance of a strip of width ``w`` (m).

    Pass ``f`` (Hz) to also get the guided wavelength.
    """
    if not w > 0:
        raise ValueError(f"width must be > 0, got {w!r}")
    u = w / substrate.h
    ee = _eps_eff(u, substrate.eps_r)
    z0 = _z0_air(u) / math.sqrt(ee)
    lam = None
    if f is not None:
        lam = C0 / (f * math.sqrt(ee))
    return LineGeometry(w, ee, z0, lam, f, "w/h<1" if u < 1 else "w/h>=1")


def synthesize_width(z0_target: float, substrate: Substrate, rtol: float = 1e-6) -> float:
    """Strip width (m) for ``z0_target`` by bisection on ``w/h`` in [0.05, 20]."""
    lo, hi = U_BRACKET
    z_narrow = analyze(lo * substrate.h, substrate).z0
    z_wide = analyze(hi * substrate.h, substrate).z0
    if not z_wide <= z0_target <= z_narrow:
        raise WidthRangeError(
            f"{z0_target} ohm is outside [{z_wide:.3f}, {z_narrow:.3f}] ohm reachable for w/h in {U_BRACKET}"
        )
    u = bisect(lambda u: analyze(u * substrate.h, substrate).z0 - z0_target, lo, hi, xtol=1e-14, rtol=rtol)
    return u * substrate.h


def guided_wavelength(f: float, line: LineGeometry) -> float:
    if not f > 0:
        raise ValueError(f"frequency must be > 0, got {f!r}")
    return C0 / (f * math.sqrt(line.eps_eff))


def footprint(lambda_g: float, ratio_x: float = FOOTPRINT_RATIOS[0], ratio_y: float = FOOTPRINT_RATIOS[1]):
    """Board size ``(x, y)`` in mm for a guided wavelength in metres."""
    return ratio_x * lambda_g * 1e3, ratio_y * lambda_g * 1e3
