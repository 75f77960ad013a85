"""Comparison of a simulated response against the published figures."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .cmatrix import ResponseMetrics, SweepResult, metrics
from .synthesis import DividerSpec

__all__ = ["PaperTargets", "PAPER_TARGETS", "Row", "Report", "report"]


@dataclass(frozen=True)
class PaperTargets:
    # theory: reproduced by simulation
    rl_db: float = 20.0
    rl_tol_db: float = 0.1
    il_floor_db: float = 10.0 * math.log10(3.0)
    il_tol_db: float = 0.01
    fbw: float = 0.03
    fbw_rel_tol: float = 0.05
    f0: float = 2.6e9
    f0_rel_tol: float = 1e-3
    # measured on hardware: reference only
    rl_measured_db: float = 15.5
    il_excess_measured_db: float = 0.34
    size_lambda2: float = 0.0558
    footprint_ratios: tuple[float, float] = (0.31, 0.18)
    provenance: dict = field(
        default_factory=lambda: {
            "rl_db": "theoretical return loss of the ideal response",
            "il_floor_db": "inherent 3-way split loss 10*log10(3)",
            "fbw": "design fractional bandwidth",
            "f0": "design centre frequency",
            "rl_measured_db": "measured prototype return loss",
            "il_excess_measured_db": "measured insertion loss above the split loss",
            "size_lambda2": "performance-comparison table, board area in guided wavelengths squared",
        },
        compare=False,
    )


PAPER_TARGETS = PaperTargets()

THEORY = "theory: reproduced"
MEASURED = "measured: reference-only"


@dataclass(frozen=True)
class Row:
    label: str
    kind: str
    target: str
    achieved: str
    passed: bool | None  # None for reference-only rows


@dataclass
class Report:
    rows: list[Row]
    notes: list[str]
    metrics: ResponseMetrics | None = None

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows if r.passed is not None)

    def text(self) -> str:
        w_label = max(len(r.label) for r in self.rows)
        w_target = max(len(r.target) for r in self.rows)
        w_ach = max(len(r.achieved) for r in self.rows)
        out = []
        for r in self.rows:
            status = "PASS" if r.passed else "FAIL" if r.passed is not None else "----"
            out.append(
                f"{status}  {r.label:<{w_label}}  target {r.target:<{w_target}}  got {r.achieved:<{w_ach}}  [{r.kind}]"
            )
        out += [f"note: {n}" for n in self.notes]
        return "\n".join(out) + "\n"


def report(
    result: SweepResult,
    spec: DividerSpec,
    targets: PaperTargets = PAPER_TARGETS,
    qu_fit: float | None = None,
    footprint_mm: tuple[float, float] | None = None,
) -> Report:
    """Pass/fail table. Theory rows are checked; measured rows are only listed."""
    m = metrics(result, spec)
    t = targets
    rows = [
        Row(
            "worst in-band return loss",
            THEORY,
            f">= {t.rl_db:.1f} dB (-{t.rl_tol_db} dB)",
            f"{m.worst_in_band_rl_db:.3f} dB",
            m.worst_in_band_rl_db >= t.rl_db - t.rl_tol_db,
        )
    ]
    for k, il in enumerate(m.il_at_f0_db, start=2):
        rows.append(
            Row(
                f"insertion loss S{k}1 at f0",
                THEORY,
                f"{t.il_floor_db:.3f} +/- {t.il_tol_db} dB",
                f"{il:.4f} dB",
                abs(il - t.il_floor_db) <= t.il_tol_db,
            )
        )
    rows.append(
        Row(
            "ripple fractional bandwidth",
            THEORY,
            f"{t.fbw:.3f} +/- {t.fbw_rel_tol:.0%}",
            f"{m.measured_fbw:.5f}",
            abs(m.measured_fbw - t.fbw) <= t.fbw_rel_tol * t.fbw,
        )
    )
    centre = math.sqrt(m.band_edges[0] * m.band_edges[1])
    rows.append(
        Row(
            "band centre",
            THEORY,
            f"{t.f0 / 1e9:.3f} GHz +/- {t.f0_rel_tol:.1%}",
            f"{centre / 1e9:.5f} GHz",
            abs(centre - t.f0) <= t.f0_rel_tol * t.f0,
        )
    )
    rows.append(
        Row(
            "reflection zeros",
            THEORY,
            f"{spec.order}",
            f"{len(m.reflection_zeros)}",
            len(m.reflection_zeros) == spec.order,
        )
    )
    rows.append(Row("return loss (hardware)", MEASURED, f"{t.rl_measured_db} dB", "not simulated", None))
    rows.append(
        Row(
            "excess insertion loss (hardware)",
            MEASURED,
            f"{t.il_excess_measured_db} dB",
            "-" if qu_fit is None else f"fitted Qu = {qu_fit:.1f}",
            None,
        )
    )
    rx, ry = t.footprint_ratios
    size = "-" if footprint_mm is None else f"{footprint_mm[0]:.2f} x {footprint_mm[1]:.2f} mm"
    rows.append(Row("board size", MEASURED, f"{rx} x {ry} = {t.size_lambda2} lambda_g^2", size, None))
    notes = [
        "in-band region taken as the ripple band |p| <= 1; the source does not define it",
        f"worst output-to-output coupling {m.worst_isolation_db:.2f} dB (no isolation target)",
    ]
    if footprint_mm is not None:
        notes.append("lambda_g uses the effective permittivity of the 50 ohm line (quasi-static estimate)")
    return Report(rows, notes, m)
