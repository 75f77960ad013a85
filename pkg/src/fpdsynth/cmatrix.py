"""Normalized coupling matrix: assembly, frequency sweep and response metrics."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Sequence

import numpy as np
from scipy.optimize import bisect

from .errors import NumericError
from .synthesis import CouplingPlan, DividerSpec

__all__ = [
    "NormalizedCouplingMatrix",
    "EvaluationPoint",
    "SweepResult",
    "ResponseMetrics",
    "lowpass_p",
    "ripple_band",
    "normalize",
    "evaluate",
    "sweep",
    "default_grid",
    "fold_equivalent_filter",
    "apply_uniform_loss",
    "excess_il_at_f0",
    "fit_unloaded_q",
    "analytic_unloaded_q",
    "metrics",
    "s11_evaluator",
]

CHUNK = 256


def lowpass_p(f, f0: float, fbw: float):
    """Normalized lowpass frequency ``(f/f0 - f0/f) / FBW``."""
    f = np.asarray(f, dtype=float)
    return (f / f0 - f0 / f) / fbw


def ripple_band(f0: float, fbw: float) -> tuple[float, float]:
    """Frequencies where ``p = -1`` and ``p = +1``."""
    root = math.sqrt(1.0 + (fbw / 2.0) ** 2)
    return f0 * (root - fbw / 2.0), f0 * (root + fbw / 2.0)


@dataclass(frozen=True)
class EvaluationPoint:
    f: float
    p: float

    @classmethod
    def at(cls, f: float, f0: float, fbw: float) -> "EvaluationPoint":
        if not f > 0:
            raise ValueError(f"frequency must be > 0, got {f!r}")
        return cls(float(f), float(lowpass_p(f, f0, fbw)))


@dataclass(frozen=True)
class NormalizedCouplingMatrix:
    """Symmetric coupling matrix ``M/FBW`` with port loading ``q_e = Qe*FBW``.

    ``loading`` is ``((port, resonator, q_e), ...)`` in port order.
    ``loss`` is the real term ``1/(FBW*Qu)`` added to every diagonal entry.
    """

    m: np.ndarray
    loading: tuple[tuple[int, int, float], ...]
    f0: float
    fbw: float
    loss: float = 0.0

    def __post_init__(self):
        m = np.array(self.m, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("coupling matrix must be square")
        if not np.array_equal(m, m.T):
            raise ValueError("coupling matrix must be symmetric")
        if np.any(np.diag(m) != 0):
            raise ValueError("coupling matrix diagonal must be zero (synchronous tuning)")
        res = [r for _, r, _ in self.loading]
        if len(set(res)) != len(res):
            raise ValueError("port resonator indices must be distinct")
        if any(not q > 0 for _, _, q in self.loading):
            raise ValueError("normalized external q must be > 0")
        m.setflags(write=False)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "loading", tuple((int(k), int(r), float(q)) for k, r, q in self.loading))

    @property
    def n_res(self) -> int:
        return self.m.shape[0]

    @property
    def n_ports(self) -> int:
        return len(self.loading)


@dataclass(frozen=True)
class SweepResult:
    freqs: np.ndarray
    s: np.ndarray  # (F, P, P) complex
    source: Any = field(default=None, compare=False, repr=False)
    z0: float = 50.0

    @property
    def n_ports(self) -> int:
        return self.s.shape[1]

    def sij(self, i: int, j: int) -> np.ndarray:
        """``S_ij`` trace with 1-based port numbers."""
        return self.s[:, i - 1, j - 1]

    def db(self, i: int, j: int) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return 20.0 * np.log10(np.abs(self.sij(i, j)))

    def reciprocity_defect(self) -> float:
        return float(np.abs(self.s - np.swapaxes(self.s, 1, 2)).max())

    def unitarity_defect(self) -> float:
        eye = np.eye(self.n_ports)
        sh_s = np.conj(np.swapaxes(self.s, 1, 2)) @ self.s
        return float(np.abs(sh_s - eye).max())


def normalize(plan: CouplingPlan, spec: DividerSpec) -> NormalizedCouplingMatrix:
    if plan.n_way != spec.n_way or plan.order != spec.order:
        raise ValueError("plan topology does not match the divider spec")
    graph = plan.graph
    m = np.zeros((graph.n_resonators, graph.n_resonators))
    for i, j, val in graph.edges:
        m[i, j] = m[j, i] = val / spec.fbw
    loading = tuple((k, r, qe * spec.fbw) for k, r, qe in graph.ports)
    return NormalizedCouplingMatrix(m, loading, spec.f0, spec.fbw)


def _system(ncm: NormalizedCouplingMatrix, p: np.ndarray) -> np.ndarray:
    r = ncm.n_res
    base = -1j * ncm.m.astype(complex)
    base[np.diag_indices(r)] += ncm.loss
    for _, res, q in ncm.loading:
        base[res, res] += 1.0 / q
    a = np.broadcast_to(base, (p.size, r, r)).copy()
    idx = np.arange(r)
    a[:, idx, idx] += 1j * p[:, None]
    return a


def _s_from_p(ncm: NormalizedCouplingMatrix, p: np.ndarray, freqs=None) -> np.ndarray:
    p = np.atleast_1d(np.asarray(p, dtype=float))
    a = _system(ncm, p)
    res = [r for _, r, _ in ncm.loading]
    rhs = np.zeros((ncm.n_res, len(res)), dtype=complex)
    rhs[res, np.arange(len(res))] = 1.0
    try:
        x = np.linalg.solve(a, np.broadcast_to(rhs, (p.size, *rhs.shape)))
    except np.linalg.LinAlgError as exc:
        # locate the first singular point for the message
        for k in range(p.size):
            try:
                np.linalg.solve(a[k], rhs)
            except np.linalg.LinAlgError:
                f = None if freqs is None else float(np.atleast_1d(freqs)[k])
                raise NumericError(f"singular coupling system at f={f} Hz (p={p[k]})", f) from exc
        raise
    kvec = 1.0 / np.sqrt([q for _, _, q in ncm.loading])
    x_ports = x[:, res, :]
    # S = I - 2 K A^-1 K restricted to the loaded resonators
    s = -2.0 * kvec[None, :, None] * x_ports * kvec[None, None, :]
    s[:, np.arange(len(res)), np.arange(len(res))] += 1.0
    return s


def evaluate(ncm: NormalizedCouplingMatrix, point: EvaluationPoint) -> np.ndarray:
    """P x P scattering matrix at one evaluation point."""
    if not math.isfinite(point.p):
        raise ValueError(f"p must be finite, got {point.p!r}")
    return _s_from_p(ncm, np.array([point.p]), [point.f])[0]


def sweep(ncm: NormalizedCouplingMatrix, freqs: Sequence[float], workers: int = 1) -> SweepResult:
    """S-matrices over ``freqs``.

    Work is cut into fixed-size chunks written into pre-indexed slots, so
    the output is bitwise identical for any ``workers``.
    """
    freqs = np.asarray(freqs, dtype=float)
    if freqs.ndim != 1 or freqs.size == 0:
        raise ValueError("frequency set must be a non-empty 1-D sequence")
    if np.any(freqs <= 0) or not np.all(np.isfinite(freqs)):
        raise ValueError("frequencies must be positive and finite")
    if np.any(np.diff(freqs) <= 0):
        raise ValueError("frequencies must be strictly increasing")
    p = lowpass_p(freqs, ncm.f0, ncm.fbw)
    out = np.empty((freqs.size, ncm.n_ports, ncm.n_ports), dtype=complex)
    chunks = [slice(i, min(i + CHUNK, freqs.size)) for i in range(0, freqs.size, CHUNK)]

    def work(sl):
        out[sl] = _s_from_p(ncm, p[sl], freqs[sl])

    if workers <= 1:
        for sl in chunks:
            work(sl)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(work, chunks))
    return SweepResult(freqs, out, ncm)


def default_grid(start: float = 2.4e9, stop: float = 2.8e9, points: int = 2001) -> np.ndarray:
    return np.linspace(start, stop, points)


def fold_equivalent_filter(plan: CouplingPlan) -> CouplingPlan:
    """Single-path filter seen by the symmetric excitation of the divider.

    The trunk coupling scaled by ``sqrt(n_way)`` becomes ``M12``; the divider
    then has ``S11`` equal to the filter's and ``S_k1 = S21 / sqrt(n_way)``.
    """
    m12 = plan.m_trunk * math.sqrt(plan.n_way)
    return CouplingPlan(
        m_chain=(m12, *plan.m_chain[1:]),
        m_trunk=m12,
        qe_in=plan.qe_in,
        qe_out=plan.qe_out,
        n_way=1,
    )


def apply_uniform_loss(ncm: NormalizedCouplingMatrix, qu: float) -> NormalizedCouplingMatrix:
    """Add finite unloaded Q ``qu`` to every resonator (``inf`` is lossless)."""
    if not qu > 0:
        raise ValueError(f"unloaded Q must be > 0, got {qu!r}")
    return replace(ncm, loss=0.0 if math.isinf(qu) else 1.0 / (ncm.fbw * qu))


def _il_at_f0(ncm: NormalizedCouplingMatrix, port: int = 2) -> float:
    s = _s_from_p(ncm, np.array([0.0]))[0]
    return -20.0 * math.log10(abs(s[port - 1, 0]))


def excess_il_at_f0(ncm: NormalizedCouplingMatrix, qu: float, port: int = 2) -> float:
    """Insertion loss at f0 added by unloaded Q ``qu`` (dB)."""
    lossless = replace(ncm, loss=0.0)
    return _il_at_f0(apply_uniform_loss(lossless, qu), port) - _il_at_f0(lossless, port)


def fit_unloaded_q(
    ncm: NormalizedCouplingMatrix,
    excess_db: float,
    q_bounds: tuple[float, float] = (10.0, 1e7),
    xtol: float = 1e-12,
) -> float:
    """Unloaded Q giving ``excess_db`` of extra insertion loss at f0 (bisection in log Q)."""
    if not excess_db > 0:
        raise ValueError("excess loss must be > 0")

    def resid(log_q):
        return excess_il_at_f0(ncm, 10.0**log_q) - excess_db

    lo, hi = math.log10(q_bounds[0]), math.log10(q_bounds[1])
    if resid(lo) * resid(hi) > 0:
        raise ValueError(f"excess loss {excess_db} dB not bracketed by Qu in {q_bounds}")
    return 10.0 ** bisect(resid, lo, hi, xtol=xtol, maxiter=200)


def analytic_unloaded_q(g, fbw: float, excess_db: float) -> float:
    """Classical midband estimate ``dIL = 4.343 * sum(g_i) / (FBW * Qu)`` solved for Qu."""
    n = len(g) - 2
    return 4.343 * sum(g[1 : n + 1]) / (fbw * excess_db)


@dataclass(frozen=True)
class ResponseMetrics:
    il_at_f0_db: tuple[float, ...]
    worst_in_band_rl_db: float
    band_edges: tuple[float, float]
    measured_fbw: float
    reflection_zeros: tuple[float, ...]
    worst_isolation_db: float
    ripple_level_db: float


def _interp_db_at(freqs, s_abs, f):
    i = int(np.searchsorted(freqs, f))
    if i < freqs.size and freqs[i] == f:
        return -20.0 * math.log10(s_abs[i])
    if i == 0 or i == freqs.size:
        raise ValueError(f"f0={f} lies outside the sweep")
    db = -20.0 * np.log10(s_abs[i - 1 : i + 1])
    t = (f - freqs[i - 1]) / (freqs[i] - freqs[i - 1])
    return float(db[0] + t * (db[1] - db[0]))


def _reflection_zeros(freqs, s11, threshold_db=-40.0):
    mag2 = np.abs(s11) ** 2
    lim = 10.0 ** (threshold_db / 10.0)
    zeros = []
    for i in range(1, freqs.size - 1):
        if mag2[i] <= mag2[i - 1] and mag2[i] < mag2[i + 1] and mag2[i] < lim:
            # |S11|^2 is locally quadratic about a zero; take the parabola vertex
            y0, y1, y2 = mag2[i - 1 : i + 2]
            h = freqs[i + 1] - freqs[i]
            denom = y0 - 2 * y1 + y2
            shift = 0.5 * h * (y0 - y2) / denom if denom > 0 else 0.0
            zeros.append(float(freqs[i] + np.clip(shift, -h, h)))
    return tuple(zeros)


def _crossing(freqs, y, i, j, level):
    """Linear interpolation of where ``y`` hits ``level`` between samples i and j."""
    t = (level - y[i]) / (y[j] - y[i])
    return float(freqs[i] + t * (freqs[j] - freqs[i]))


def metrics(result: SweepResult, spec: DividerSpec) -> ResponseMetrics:
    freqs = result.freqs
    f_lo, f_hi = ripple_band(spec.f0, spec.fbw)
    if freqs[0] > f_lo or freqs[-1] < f_hi:
        raise ValueError("sweep does not cover the ripple band")
    s11 = np.abs(result.sij(1, 1))
    p = lowpass_p(freqs, spec.f0, spec.fbw)
    inband = np.abs(p) <= 1.0
    worst_rl = -20.0 * math.log10(s11[inband].max())

    il = tuple(_interp_db_at(freqs, np.abs(result.sij(k, 1)), spec.f0) for k in range(2, result.n_ports + 1))

    zeros = _reflection_zeros(freqs, result.sij(1, 1))
    if len(zeros) >= 2:
        between = (freqs >= zeros[0]) & (freqs <= zeros[-1])
        level = float(s11[between].max())
    else:
        level = float(s11[inband].max())
    centre = int(np.argmin(np.abs(freqs - spec.f0)))
    lo = centre
    while lo > 0 and s11[lo - 1] <= level:
        lo -= 1
    hi = centre
    while hi < freqs.size - 1 and s11[hi + 1] <= level:
        hi += 1
    if lo == 0 or hi == freqs.size - 1:
        raise ValueError("ripple band edges fall outside the sweep")
    edge_lo = _crossing(freqs, s11, lo - 1, lo, level)
    edge_hi = _crossing(freqs, s11, hi, hi + 1, level)

    worst_iso = -math.inf
    for k in range(2, result.n_ports + 1):
        for j in range(k + 1, result.n_ports + 1):
            with np.errstate(divide="ignore"):
                worst_iso = max(worst_iso, float(result.db(k, j).max()))

    return ResponseMetrics(
        il_at_f0_db=il,
        worst_in_band_rl_db=worst_rl,
        band_edges=(edge_lo, edge_hi),
        measured_fbw=(edge_hi - edge_lo) / spec.f0,
        reflection_zeros=zeros,
        worst_isolation_db=worst_iso,
        ripple_level_db=20.0 * math.log10(level),
    )


def s11_evaluator(spec: DividerSpec):
    """Evaluator for :func:`fpdsynth.synthesis.refine_couplings`."""

    def evaluator(plan: CouplingPlan, freqs):
        ncm = normalize(plan, spec)
        return _s_from_p(ncm, lowpass_p(freqs, spec.f0, spec.fbw), freqs)[:, 0, 0]

    return evaluator
