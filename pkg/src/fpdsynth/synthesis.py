"""Coupling coefficients, external Q and divider topology."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize

from .prototype import GValues

log = logging.getLogger(__name__)

__all__ = [
    "DividerSpec",
    "ResonatorGraph",
    "CouplingPlan",
    "UnsupportedTopologyError",
    "inter_resonator_couplings",
    "branch_coupling",
    "external_q",
    "build_coupling_plan",
    "refine_couplings",
    "PAPER_SPEC",
]


class UnsupportedTopologyError(ValueError):
    pass


@dataclass(frozen=True)
class DividerSpec:
    f0: float = 2.6e9
    fbw: float = 0.03
    n_way: int = 3
    order: int = 3
    z0: float = 50.0
    ripple_db: float = 0.04321

    def __post_init__(self):
        if not self.f0 > 0:
            raise ValueError(f"f0 must be > 0, got {self.f0!r}")
        if not 0 < self.fbw < 1:
            raise ValueError(f"fbw must lie in (0, 1), got {self.fbw!r}")
        if int(self.n_way) != self.n_way or self.n_way < 1:
            raise ValueError(f"n_way must be an integer >= 1, got {self.n_way!r}")
        if int(self.order) != self.order or self.order < 1:
            raise ValueError(f"order must be a positive integer, got {self.order!r}")
        if not self.z0 > 0:
            raise ValueError(f"z0 must be > 0, got {self.z0!r}")
        if not self.ripple_db > 0:
            raise ValueError(f"ripple_db must be > 0, got {self.ripple_db!r}")

    @property
    def n_ports(self) -> int:
        return self.n_way + 1


PAPER_SPEC = DividerSpec()


@dataclass(frozen=True)
class ResonatorGraph:
    """Resonators ``0..R-1`` (0 is the common resonator), coupling edges and ports.

    ``edges`` holds ``(i, j, M)`` with ``i < j``; ``ports`` holds
    ``(port_number, resonator, Qe)`` with port 1 on the common resonator.
    """

    n_resonators: int
    edges: tuple[tuple[int, int, float], ...]
    ports: tuple[tuple[int, int, float], ...]

    def neighbors(self, r: int) -> list[int]:
        out = []
        for i, j, _ in self.edges:
            if i == r:
                out.append(j)
            elif j == r:
                out.append(i)
        return out

    def is_connected(self) -> bool:
        seen = {0}
        stack = [0]
        while stack:
            r = stack.pop()
            for q in self.neighbors(r):
                if q not in seen:
                    seen.add(q)
                    stack.append(q)
        return len(seen) == self.n_resonators


@dataclass(frozen=True)
class CouplingPlan:
    m_chain: tuple[float, ...]
    m_trunk: float
    qe_in: float
    qe_out: float
    n_way: int
    graph: ResonatorGraph = field(init=False, repr=False, compare=False)
    flags: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "m_chain", tuple(float(m) for m in self.m_chain))
        if not self.m_chain:
            raise UnsupportedTopologyError("m_chain must hold at least M12")
        for name, v in [("m_trunk", self.m_trunk), ("qe_in", self.qe_in), ("qe_out", self.qe_out)]:
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive and finite, got {v!r}")
        if any(not (math.isfinite(m) and m > 0) for m in self.m_chain):
            raise ValueError(f"couplings must be positive and finite: {self.m_chain}")
        object.__setattr__(self, "graph", _make_graph(self))

    @property
    def order(self) -> int:
        return len(self.m_chain) + 1

    @property
    def n_resonators(self) -> int:
        return 1 + self.n_way * (self.order - 1)

    def with_couplings(self, m_chain: Sequence[float], qe_in: float, qe_out: float) -> "CouplingPlan":
        """Same topology with new values; the trunk stays tied to ``m_chain[0]``."""
        m_chain = tuple(m_chain)
        return CouplingPlan(
            m_chain=m_chain,
            m_trunk=branch_coupling(m_chain[0], self.n_way),
            qe_in=qe_in,
            qe_out=qe_out,
            n_way=self.n_way,
        )


def _make_graph(plan: CouplingPlan) -> ResonatorGraph:
    per_branch = plan.order - 1
    edges = []
    ports = [(1, 0, plan.qe_in)]
    for k in range(plan.n_way):
        first = 1 + k * per_branch
        edges.append((0, first, plan.m_trunk))
        for step, m in enumerate(plan.m_chain[1:]):
            edges.append((first + step, first + step + 1, m))
        ports.append((k + 2, first + per_branch - 1, plan.qe_out))
    return ResonatorGraph(1 + plan.n_way * per_branch, tuple(edges), tuple(ports))


def inter_resonator_couplings(fbw: float, g: GValues) -> tuple[float, ...]:
    """``M(i, i+1) = FBW / sqrt(g_i g_(i+1))`` for ``i = 1 .. n-1``."""
    if not 0 < fbw < 1:
        raise ValueError(f"fbw must lie in (0, 1), got {fbw!r}")
    n = g.order
    return tuple(fbw / math.sqrt(g[i] * g[i + 1]) for i in range(1, n))


def branch_coupling(m_first: float, n_way: int) -> float:
    """Coupling from the common resonator to each of ``n_way`` branches."""
    if not m_first > 0:
        raise ValueError(f"m_first must be > 0, got {m_first!r}")
    if n_way < 1:
        raise ValueError(f"n_way must be >= 1, got {n_way!r}")
    return m_first / math.sqrt(n_way)


def external_q(g0: float, g1: float, fbw: float) -> float:
    if not (g0 > 0 and g1 > 0 and fbw > 0):
        raise ValueError("g0, g1 and fbw must all be positive")
    return g0 * g1 / fbw


def build_coupling_plan(spec: DividerSpec, g: GValues) -> CouplingPlan:
    if spec.order < 2:
        raise UnsupportedTopologyError(
            f"order {spec.order} leaves no branch resonators; the divider needs order >= 2"
        )
    if g.order != spec.order:
        raise ValueError(f"g-values are order {g.order}, spec asks for order {spec.order}")
    chain = inter_resonator_couplings(spec.fbw, g)
    n = g.order
    return CouplingPlan(
        m_chain=chain,
        m_trunk=branch_coupling(chain[0], spec.n_way),
        qe_in=external_q(g[0], g[1], spec.fbw),
        qe_out=external_q(g[n], g[n + 1], spec.fbw),
        n_way=spec.n_way,
    )


Evaluator = Callable[[CouplingPlan, np.ndarray], np.ndarray]


class _Stop(Exception):
    pass


def refine_couplings(
    plan: CouplingPlan,
    target_rl_db: float,
    band: tuple[float, float],
    evaluator: Evaluator,
    max_iter: int = 400,
    n_points: int = 201,
    simplex_scale: float = 0.02,
) -> CouplingPlan:
    """Nelder-Mead polish of the chain couplings and external Qs.

    Minimizes the worst in-band ``|S11|`` (dB) sampled on ``n_points``
    across ``band``. ``evaluator(plan, freqs)`` returns complex S11.
    The search runs in log space from a fixed simplex, so it is
    deterministic. Stops once ``target_rl_db`` is met. The returned plan is
    never worse than the input; a non-finite objective aborts the run and
    returns the input plan flagged ``"refine-aborted"``.

    A target above what the prototype can reach in ``band`` is not a
    no-op: the search trades bandwidth for match and can move the
    couplings well away from the synthesized values.
    """
    freqs = np.linspace(band[0], band[1], n_points)

    def worst_s11_db(p: CouplingPlan) -> float:
        s11 = np.abs(np.asarray(evaluator(p, freqs)))
        return 20.0 * math.log10(max(float(s11.max()), 1e-300))

    def unpack(x):
        v = np.exp(x)
        return plan.with_couplings(v[:-2], v[-2], v[-1])

    f_start = worst_s11_db(plan)
    if not math.isfinite(f_start):
        log.warning("refinement aborted: initial objective is not finite")
        return replace(plan, flags=plan.flags + ("refine-aborted",))
    if max_iter <= 0 or -f_start >= target_rl_db:
        return plan

    x0 = np.log(np.array([*plan.m_chain, plan.qe_in, plan.qe_out]))
    simplex = np.vstack([x0, x0 + simplex_scale * np.eye(x0.size)])
    bad = []

    def objective(x):
        val = worst_s11_db(unpack(x))
        if not math.isfinite(val):
            bad.append(x.copy())
            raise _Stop
        return val

    def callback(intermediate_result):
        if -intermediate_result.fun >= target_rl_db:
            raise StopIteration

    try:
        res = minimize(
            objective,
            x0,
            method="Nelder-Mead",
            callback=callback,
            options={"initial_simplex": simplex, "maxiter": max_iter, "xatol": 1e-7, "fatol": 1e-6},
        )
    except _Stop:
        log.warning("refinement aborted: non-finite objective at %s", np.exp(bad[-1]))
        return replace(plan, flags=plan.flags + ("refine-aborted",))

    best = unpack(res.x)
    f_best = worst_s11_db(best)
    log.debug("refine: worst RL %.4f dB -> %.4f dB in %d iterations", -f_start, -f_best, res.nit)
    if f_best <= f_start:
        return best
    return plan
