"""Touchstone v1 reader/writer.

Writer layout: option line ``# Hz S RI R <z0>``; one-port and two-port
records sit on one line per frequency (two-port order S11 S21 S12 S22);
three or more ports put one matrix row per line, row-major, with the
frequency only on the first row.
"""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .cmatrix import SweepResult

__all__ = ["TouchstoneParseError", "format_touchstone", "write_touchstone", "read_touchstone", "parse_touchstone"]

_UNITS = {"HZ": 1.0, "KHZ": 1e3, "MHZ": 1e6, "GHZ": 1e9}


class TouchstoneParseError(ValueError):
    pass


def _num(x: float) -> str:
    return f"{x: .8e}"


def _pair(z: complex) -> str:
    return f"{_num(z.real)} {_num(z.imag)}"


def format_touchstone(result: SweepResult, z0: float | None = None) -> str:
    z0 = result.z0 if z0 is None else z0
    p = result.n_ports
    lines = [f"! {p}-port S-parameters", f"# Hz S RI R {z0:g}"]
    for f, s in zip(result.freqs, result.s):
        fs = f"{f:.10e}"
        if p == 1:
            lines.append(f"{fs} {_pair(s[0, 0])}")
        elif p == 2:
            lines.append(" ".join([fs] + [_pair(s[i, j]) for j in range(2) for i in range(2)]))
        else:
            for i in range(p):
                row = " ".join(_pair(s[i, j]) for j in range(p))
                lines.append(f"{fs} {row}" if i == 0 else f"{' ' * len(fs)} {row}")
    return "\n".join(lines) + "\n"


def write_touchstone(result: SweepResult, path) -> Path:
    path = Path(path)
    if path.suffix.lower() != f".s{result.n_ports}p":
        path = path.with_suffix(f".s{result.n_ports}p")
    path.write_text(format_touchstone(result))
    return path


def _ports_from_name(path: Path) -> int:
    m = re.fullmatch(r"\.s(\d+)p", path.suffix.lower())
    if not m:
        raise TouchstoneParseError(f"cannot infer port count from {path.name!r}; pass n_ports")
    return int(m.group(1))


def parse_touchstone(text: str, n_ports: int) -> SweepResult:
    unit, fmt, z0 = 1e9, "MA", 50.0
    seen_option = False
    values: list[float] = []
    starts: list[int] = []  # line number for each value, for error messages
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("!", 1)[0].strip()
        if not line:
            continue
        if line.startswith("#"):
            if seen_option:
                raise TouchstoneParseError(f"line {lineno}: second option line")
            seen_option = True
            tok = line[1:].upper().split()
            i = 0
            while i < len(tok):
                t = tok[i]
                if t in _UNITS:
                    unit = _UNITS[t]
                elif t in ("RI", "MA", "DB"):
                    fmt = t
                elif t == "S":
                    pass
                elif t == "R" and i + 1 < len(tok):
                    try:
                        z0 = float(tok[i + 1])
                    except ValueError:
                        raise TouchstoneParseError(f"line {lineno}: bad reference impedance {tok[i + 1]!r}") from None
                    i += 1
                else:
                    raise TouchstoneParseError(f"line {lineno}: unsupported option {t!r}")
                i += 1
            continue
        for tok in line.split():
            try:
                values.append(float(tok))
            except ValueError:
                raise TouchstoneParseError(f"line {lineno}: not a number: {tok!r}") from None
            starts.append(lineno)

    rec = 1 + 2 * n_ports * n_ports
    if not values:
        raise TouchstoneParseError("no data")
    if len(values) % rec:
        raise TouchstoneParseError(
            f"line {starts[-1]}: {len(values)} numbers is not a multiple of {rec} for a {n_ports}-port file"
        )
    data = np.array(values).reshape(-1, rec)
    freqs = data[:, 0] * unit
    a, b = data[:, 1::2], data[:, 2::2]
    if fmt == "RI":
        z = a + 1j * b
    elif fmt == "MA":
        z = a * np.exp(1j * np.deg2rad(b))
    else:
        z = 10.0 ** (a / 20.0) * np.exp(1j * np.deg2rad(b))
    s = z.reshape(-1, n_ports, n_ports)
    if n_ports == 2:
        s = np.swapaxes(s, 1, 2)
    if np.any(np.diff(freqs) <= 0):
        bad = int(np.argmax(np.diff(freqs) <= 0)) + 1
        raise TouchstoneParseError(f"line {starts[bad * rec]}: frequencies must increase")
    return SweepResult(freqs, s, None, z0=z0)


def read_touchstone(path, n_ports: int | None = None) -> SweepResult:
    path = Path(path)
    n = n_ports if n_ports is not None else _ports_from_name(path)
    return parse_touchstone(path.read_text(), n)
