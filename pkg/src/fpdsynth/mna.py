"""Lumped-element nodal analysis used as an independent check on the coupling matrix.

Ideal admittance inverter stamp
-------------------------------
An inverter of value ``J`` between nodes ``a`` and ``b`` (both referenced to
ground) is the two-port with ABCD matrix ``[[0, -j/J], [-jJ, 0]]``, i.e.
``Y = [[0, -jJ], [-jJ, 0]]``. It adds ``-jJ`` to ``Y[a, b]`` and ``Y[b, a]``
and nothing to the diagonal. With this sign the nodal matrix of the
synthesized divider, divided by ``b*FBW``, is exactly the coupling-matrix
system ``Q + jpI - jm``.

Netlist text format
-------------------
One element per line, node 0 is ground, ``#`` or ``*`` starts a comment::

    C n1 n2 farads
    L n1 n2 henries
    R n1 n2 ohms
    J n1 n2 siemens
    P n z0

Ports are numbered in order of appearance.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .cmatrix import SweepResult
from .errors import NumericError
from .synthesis import CouplingPlan, DividerSpec

__all__ = [
    "Element",
    "Netlist",
    "CircuitConstants",
    "PAPER_CIRCUIT",
    "SynthesizedCircuit",
    "NetlistParseError",
    "ExtractionError",
    "parse_netlist",
    "format_netlist",
    "build_divider_netlist",
    "ac_sparams",
    "coupled_pair_netlist",
    "loaded_tank_netlist",
    "extract_k",
    "extract_qe",
    "group_delay_s11",
]

KINDS = ("C", "L", "R", "J", "P")
CHUNK = 256


class NetlistParseError(ValueError):
    pass


class ExtractionError(ValueError):
    pass


@dataclass(frozen=True)
class Element:
    kind: str
    n1: int
    n2: int
    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "n1", int(self.n1))
        object.__setattr__(self, "n2", int(self.n2))
        if self.kind not in KINDS:
            raise ValueError(f"unknown element kind {self.kind!r}")
        if not math.isfinite(self.value) or self.value == 0:
            raise ValueError(f"{self.kind} value must be finite and non-zero, got {self.value!r}")
        # L and C may be negative: the inductive-pi inverter keeps a -L at port nodes
        if self.kind in "RJP" and self.value < 0:
            raise ValueError(f"{self.kind} value must be positive, got {self.value!r}")
        if self.n1 < 0 or self.n2 < 0:
            raise ValueError("node numbers must be >= 0")
        if self.kind == "P" and (self.n1 == 0 or self.n2 != 0):
            raise ValueError("a port sits between a non-ground node and ground")
        if self.kind != "P" and self.n1 == self.n2:
            raise ValueError(f"{self.kind} element shorted on node {self.n1}")


@dataclass(frozen=True)
class Netlist:
    n_nodes: int  # excluding ground
    elements: tuple[Element, ...]

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        for e in self.elements:
            if max(e.n1, e.n2) > self.n_nodes:
                raise ValueError(f"element {e} references a node beyond {self.n_nodes}")
        if not self.ports:
            raise ValueError("netlist has no ports")

    @property
    def ports(self) -> tuple[Element, ...]:
        return tuple(e for e in self.elements if e.kind == "P")

    def __str__(self):
        return format_netlist(self)


def format_netlist(net: Netlist) -> str:
    lines = []
    for e in net.elements:
        if e.kind == "P":
            lines.append(f"P {e.n1} {e.value!r}")
        else:
            lines.append(f"{e.kind} {e.n1} {e.n2} {e.value!r}")
    return "\n".join(lines) + "\n"


def parse_netlist(text: str) -> Netlist:
    elements = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line or line.startswith("*"):
            continue
        tok = line.split()
        kind = tok[0].upper()
        try:
            if kind == "P":
                if len(tok) != 3:
                    raise ValueError("expected 'P node z0'")
                elements.append(Element("P", int(tok[1]), 0, float(tok[2])))
            elif kind in KINDS:
                if len(tok) != 4:
                    raise ValueError(f"expected '{kind} n1 n2 value'")
                elements.append(Element(kind, int(tok[1]), int(tok[2]), float(tok[3])))
            else:
                raise ValueError(f"unknown element {tok[0]!r}")
        except ValueError as exc:
            raise NetlistParseError(f"line {lineno}: {exc}") from None
    if not elements:
        raise NetlistParseError("empty netlist")
    n_nodes = max(max(e.n1, e.n2) for e in elements)
    try:
        return Netlist(n_nodes, tuple(elements))
    except ValueError as exc:
        raise NetlistParseError(str(exc)) from None


@dataclass(frozen=True)
class CircuitConstants:
    """Inductor values printed alongside the published circuit arrangement."""

    l01: float = 3.0607e-9
    l12: float = 3.4836e-9
    le: float = 6.0337e-9
    z0: float = 50.0


PAPER_CIRCUIT = CircuitConstants()


@dataclass(frozen=True)
class SynthesizedCircuit:
    netlist: Netlist
    b: float  # susceptance slope, S
    c: float  # tank capacitance, F
    l_r: float  # tank inductance, H
    # (label, J in S, equivalent inductance 1/(w0 J) in H); labels "port<k>" or "r<i>-r<j>"
    inverters: tuple[tuple[str, float, float], ...]
    realization: str = "ideal"

    def inverter(self, label: str) -> tuple[float, float]:
        for name, j, l_eq in self.inverters:
            if name == label:
                return j, l_eq
        raise KeyError(label)

    @property
    def l01(self) -> float:
        return self.inverter("port1")[1]


def build_divider_netlist(plan: CouplingPlan, spec: DividerSpec, realization: str = "ideal") -> SynthesizedCircuit:
    """Lumped circuit of the divider: identical shunt tanks joined by inverters.

    The input inverter is fixed at ``J01 = 1/Z0``, which sets the slope
    ``b = Qe_in / Z0``. Each coupling ``M`` becomes ``J = M*b``; output
    ports use ``J = sqrt(b / (Qe_out*Z0))``.

    ``realization="pi"`` replaces every inverter by a series ``L = 1/(w0 J)``
    with ``-L`` shunts; those next to tanks are absorbed into the tank
    inductor, those on port nodes are kept as negative inductors.
    """
    if realization not in ("ideal", "pi"):
        raise ValueError(f"realization must be 'ideal' or 'pi', got {realization!r}")
    if plan.n_way != spec.n_way or plan.order != spec.order:
        raise ValueError("plan topology does not match the divider spec")
    w0 = 2.0 * math.pi * spec.f0
    z0 = spec.z0
    j01 = 1.0 / z0
    b = plan.qe_in * j01**2 * z0
    c = b / w0
    l_r = 1.0 / (w0**2 * c)
    graph = plan.graph
    n_res = graph.n_resonators

    # (label, node a, node b, J)
    invs = []
    for k, r, qe in graph.ports:
        j = j01 if k == 1 else math.sqrt(b / (qe * z0))
        invs.append((f"port{k}", n_res + k, r + 1, j))
    for i, jj, m in graph.edges:
        invs.append((f"r{i}-r{jj}", i + 1, jj + 1, m * b))

    elements = []
    inv_l = np.zeros(n_res + len(graph.ports) + 1)  # extra shunt 1/L per node from pi sections
    for _, na, nb, j in invs:
        if realization == "ideal":
            elements.append(Element("J", na, nb, j))
        else:
            l_ser = 1.0 / (w0 * j)
            elements.append(Element("L", na, nb, l_ser))
            inv_l[na] -= 1.0 / l_ser
            inv_l[nb] -= 1.0 / l_ser
    for r in range(n_res):
        node = r + 1
        elements.append(Element("C", node, 0, c))
        elements.append(Element("L", node, 0, 1.0 / (1.0 / l_r + inv_l[node])))
    for k, _, _ in graph.ports:
        node = n_res + k
        if realization == "pi":
            elements.append(Element("L", node, 0, 1.0 / inv_l[node]))
        elements.append(Element("P", node, 0, z0))

    net = Netlist(n_res + len(graph.ports), tuple(elements))
    inverters = tuple((label, j, 1.0 / (w0 * j)) for label, _, _, j in invs)
    return SynthesizedCircuit(net, b, c, l_r, inverters, realization)


def _stamp_static(net: Netlist):
    """Split the nodal matrix into ``G + jw*C + 1/(jw)*Gamma + J`` parts."""
    n = net.n_nodes
    g = np.zeros((n, n))
    cap = np.zeros((n, n))
    gam = np.zeros((n, n))
    jmat = np.zeros((n, n), dtype=complex)

    def two_term(mat, a, b, val):
        if a:
            mat[a - 1, a - 1] += val
        if b:
            mat[b - 1, b - 1] += val
        if a and b:
            mat[a - 1, b - 1] -= val
            mat[b - 1, a - 1] -= val

    for e in net.elements:
        if e.kind == "C":
            two_term(cap, e.n1, e.n2, e.value)
        elif e.kind == "L":
            two_term(gam, e.n1, e.n2, 1.0 / e.value)
        elif e.kind == "R":
            two_term(g, e.n1, e.n2, 1.0 / e.value)
        elif e.kind == "P":
            g[e.n1 - 1, e.n1 - 1] += 1.0 / e.value
        elif e.kind == "J":
            if e.n1 == 0 or e.n2 == 0:
                raise ValueError("inverter terminals must both be non-ground nodes")
            jmat[e.n1 - 1, e.n2 - 1] += -1j * e.value
            jmat[e.n2 - 1, e.n1 - 1] += -1j * e.value
    return g, cap, gam, jmat


def _solve_chunk(parts, net: Netlist, freqs: np.ndarray) -> np.ndarray:
    g, cap, gam, jmat = parts
    ports = net.ports
    w = 2.0 * math.pi * freqs
    y = (g + jmat)[None, :, :] + 1j * w[:, None, None] * cap[None] + gam[None] / (1j * w[:, None, None])
    n_p = len(ports)
    rhs = np.zeros((net.n_nodes, n_p), dtype=complex)
    zref = np.array([p.value for p in ports])
    for l, p in enumerate(ports):
        rhs[p.n1 - 1, l] = 2.0 / math.sqrt(p.value)
    try:
        v = np.linalg.solve(y, np.broadcast_to(rhs, (freqs.size, *rhs.shape)))
    except np.linalg.LinAlgError:
        for k in range(freqs.size):
            try:
                np.linalg.solve(y[k], rhs)
            except np.linalg.LinAlgError:
                raise NumericError(f"singular nodal matrix at f={freqs[k]} Hz", float(freqs[k])) from None
        raise
    rows = [p.n1 - 1 for p in ports]
    s = v[:, rows, :] / np.sqrt(zref)[None, :, None]
    s[:, np.arange(n_p), np.arange(n_p)] -= 1.0
    return s


def ac_sparams(net: Netlist, freqs: Sequence[float], workers: int = 1) -> SweepResult:
    """Port S-parameters by AC nodal analysis.

    Port ``l`` is driven by a source of internal impedance ``z0_l`` carrying
    a unit incident wave; every other port is terminated in its reference
    impedance. Then ``S_kl = V_k / sqrt(z0_k) - delta_kl``.
    """
    freqs = np.asarray(freqs, dtype=float)
    if freqs.ndim != 1 or freqs.size == 0:
        raise ValueError("frequency set must be a non-empty 1-D sequence")
    if np.any(freqs <= 0) or not np.all(np.isfinite(freqs)):
        raise ValueError("frequencies must be positive and finite")
    parts = _stamp_static(net)
    n_p = len(net.ports)
    out = np.empty((freqs.size, n_p, n_p), dtype=complex)
    chunks = [slice(i, min(i + CHUNK, freqs.size)) for i in range(0, freqs.size, CHUNK)]

    def work(sl):
        out[sl] = _solve_chunk(parts, net, freqs[sl])

    if workers <= 1:
        for sl in chunks:
            work(sl)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(work, chunks))
    z0s = {p.value for p in net.ports}
    return SweepResult(freqs, out, net, z0=z0s.pop() if len(z0s) == 1 else float("nan"))


# --- extraction utilities -------------------------------------------------


def _tank_frequencies(net: Netlist) -> list[float]:
    """Resonant frequency of every node carrying both shunt C and shunt L."""
    cap = {}
    inv_l = {}
    for e in net.elements:
        if e.kind in "CL" and e.n2 == 0 and e.n1:
            if e.kind == "C":
                cap[e.n1] = cap.get(e.n1, 0.0) + e.value
            else:
                inv_l[e.n1] = inv_l.get(e.n1, 0.0) + 1.0 / e.value
    out = []
    for node in sorted(cap):
        if inv_l.get(node, 0.0) > 0 and cap[node] > 0:
            out.append(1.0 / (2.0 * math.pi * math.sqrt(cap[node] / inv_l[node])))
    return out


def coupled_pair_netlist(m: float, f0: float, b: float, z0: float = 50.0, weak: float = 100.0) -> Netlist:
    """Two identical tanks of slope ``b`` joined by ``J = m*b``.

    Each tank is probed through ``J = 1/(weak*z0)``; ``m = 0`` leaves them
    uncoupled.
    """
    w0 = 2.0 * math.pi * f0
    c = b / w0
    l_r = 1.0 / (w0 * b)
    j_probe = 1.0 / (weak * z0)
    els = [
        Element("C", 1, 0, c),
        Element("L", 1, 0, l_r),
        Element("C", 2, 0, c),
        Element("L", 2, 0, l_r),
        Element("J", 3, 1, j_probe),
        Element("J", 4, 2, j_probe),
        Element("P", 3, 0, z0),
        Element("P", 4, 0, z0),
    ]
    if m > 0:
        els.append(Element("J", 1, 2, m * b))
    return Netlist(4, tuple(els))


def loaded_tank_netlist(f0: float, b: float, j01: float, z0: float = 50.0) -> Netlist:
    """One tank of slope ``b`` fed from a port through inverter ``j01``."""
    w0 = 2.0 * math.pi * f0
    els = (
        Element("C", 1, 0, b / w0),
        Element("L", 1, 0, 1.0 / (w0 * b)),
        Element("J", 2, 1, j01),
        Element("P", 2, 0, z0),
    )
    return Netlist(2, els)


def _s21_mag(net: Netlist, f: float) -> float:
    return float(abs(ac_sparams(net, [f]).s[0, 1, 0]))


def extract_k(net: Netlist, span: float = 0.3, points: int = 20001) -> float:
    """Coupling coefficient from the split resonance peaks of a weakly probed pair.

    ``k = (fh^2 - fl^2) / (fh^2 + fl^2)``. The search covers
    ``f_tank * (1 +/- span)``; grid maxima are polished with a bounded
    scalar search.
    """
    tanks = _tank_frequencies(net)
    if len(tanks) != 2 or len(net.ports) != 2:
        raise ExtractionError("extract_k needs exactly two tanks and two ports")
    fr = math.sqrt(tanks[0] * tanks[1])
    grid = np.linspace(fr * (1 - span), fr * (1 + span), points)
    mag = np.abs(ac_sparams(net, grid).s[:, 1, 0])
    if not mag.max() > 0:
        raise ExtractionError("no transmission between the probes: tanks are uncoupled")
    # peaks are far narrower than the grid step, but the tails rise monotonically
    # toward each one, so the nearest grid sample is still a local maximum
    peaks = [i for i in range(1, points - 1) if mag[i] >= mag[i - 1] and mag[i] > mag[i + 1]]
    if len(peaks) != 2:
        raise ExtractionError(f"expected two resonance peaks, found {len(peaks)} (degenerate or overloaded pair)")
    found = []
    for i in peaks:
        res = minimize_scalar(
            lambda f: -_s21_mag(net, f),
            bounds=(grid[i - 1], grid[i + 1]),
            method="bounded",
            options={"xatol": 1e-4},
        )
        found.append(res.x)
    fl, fh = sorted(found)
    return (fh**2 - fl**2) / (fh**2 + fl**2)


def group_delay_s11(net: Netlist, freqs, rel_step: float = 1e-7) -> np.ndarray:
    """Reflection group delay ``-d(arg S11)/d(omega)`` by central differences."""
    freqs = np.atleast_1d(np.asarray(freqs, dtype=float))
    h = freqs * rel_step
    s_hi = ac_sparams(net, freqs + h).s[:, 0, 0]
    s_lo = ac_sparams(net, freqs - h).s[:, 0, 0]
    dphi = np.angle(s_hi / s_lo)
    return -dphi / (2.0 * math.pi * 2.0 * h)


def extract_qe(net: Netlist) -> float:
    """External Q of a singly loaded tank, ``Qe = w0 * tau_S11(w0) / 4``."""
    tanks = _tank_frequencies(net)
    if len(tanks) != 1 or len(net.ports) != 1:
        raise ExtractionError("extract_qe needs exactly one tank and one port")
    f0 = tanks[0]
    tau = float(group_delay_s11(net, [f0])[0])
    return 2.0 * math.pi * f0 * tau / 4.0
