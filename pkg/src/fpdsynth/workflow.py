"""End-to-end runs driven by a :class:`~fpdsynth.config.RunConfig`; each writes its artifacts to a directory."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import cmatrix, microstrip
from .config import RunConfig, dump_config
from .export import write_csv, write_svg
from .mna import SynthesizedCircuit, ac_sparams, build_divider_netlist, format_netlist, parse_netlist
from .prototype import GValues, PrototypeSpec, compute_g_values, preset
from .report import PAPER_TARGETS, Report, report
from .synthesis import CouplingPlan, build_coupling_plan, refine_couplings
from .touchstone import read_touchstone, write_touchstone

log = logging.getLogger(__name__)

__all__ = [
    "Design",
    "design",
    "run_synth",
    "run_sweep",
    "run_mna",
    "run_microstrip",
    "run_report",
    "run_export",
]


@dataclass
class Design:
    cfg: RunConfig
    g: GValues
    plan: CouplingPlan
    ncm: cmatrix.NormalizedCouplingMatrix
    circuit: SynthesizedCircuit


def design(cfg: RunConfig) -> Design:
    spec = cfg.spec
    g = preset(cfg.g_preset) if cfg.g_preset else compute_g_values(PrototypeSpec(spec.order, spec.ripple_db))
    plan = build_coupling_plan(spec, g)
    if cfg.refine:
        plan = refine_couplings(
            plan,
            cfg.target_rl_db,
            cmatrix.ripple_band(spec.f0, spec.fbw),
            cmatrix.s11_evaluator(spec),
            max_iter=cfg.max_iter,
        )
    ncm = cmatrix.normalize(plan, spec)
    if cfg.qu is not None:
        ncm = cmatrix.apply_uniform_loss(ncm, cfg.qu)
    return Design(cfg, g, plan, ncm, build_divider_netlist(plan, spec))


def _grid(cfg: RunConfig) -> np.ndarray:
    sw = cfg.sweep
    return np.linspace(sw.start, sw.stop, sw.points)


def _write_json(path: Path, data) -> Path:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    return path


def _prep(out) -> Path:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def run_synth(cfg: RunConfig, out) -> list[Path]:
    out = _prep(out)
    d = design(cfg)
    data = {
        "g_values": list(d.g),
        "g_source": cfg.g_preset or f"chebyshev ripple {cfg.ripple_db} dB",
        "m_chain": list(d.plan.m_chain),
        "m_trunk": d.plan.m_trunk,
        "qe_in": d.plan.qe_in,
        "qe_out": d.plan.qe_out,
        "n_resonators": d.plan.n_resonators,
        "edges": [list(e) for e in d.plan.graph.edges],
        "ports": [list(p) for p in d.plan.graph.ports],
        "normalized_m": d.ncm.m.tolist(),
        "normalized_qe": [q for _, _, q in d.ncm.loading],
        "circuit": {
            "b_siemens": d.circuit.b,
            "tank_c_farad": d.circuit.c,
            "tank_l_henry": d.circuit.l_r,
            "inverters": [{"edge": lab, "J_siemens": j, "L_equiv_henry": l} for lab, j, l in d.circuit.inverters],
        },
        "flags": list(d.plan.flags),
    }
    cfg_path = out / "config.yaml"
    cfg_path.write_text(dump_config(cfg))
    paths = [_write_json(out / "synth.json", data), cfg_path]
    if "netlist" in cfg.outputs:
        p = out / "divider.net"
        p.write_text(format_netlist(d.circuit.netlist))
        paths.append(p)
    return paths


def run_sweep(cfg: RunConfig, out, workers: int = 1) -> list[Path]:
    """Coupling-matrix sweep; with no sweep grid only the synthesis files are written."""
    paths = run_synth(cfg, out)
    if cfg.sweep is None:
        return paths
    out = Path(out)
    d = design(cfg)
    res = cmatrix.sweep(d.ncm, _grid(cfg), workers=workers)
    paths += _emit(res, cfg, out, "divider")
    return paths


def _emit(res, cfg: RunConfig, out: Path, stem: str, overlay=None) -> list[Path]:
    paths = []
    if "touchstone" in cfg.outputs:
        paths.append(write_touchstone(res, out / f"{stem}.s{res.n_ports}p"))
    if "csv" in cfg.outputs:
        paths.append(write_csv(res, out / f"{stem}.csv"))
    if "svg" in cfg.outputs:
        paths.append(write_svg(res, out / f"{stem}.svg", title=stem, overlay=overlay))
    return paths


def run_mna(cfg: RunConfig, out, netlist_path=None, realization: str = "ideal", workers: int = 1) -> list[Path]:
    """Nodal-analysis sweep of the synthesized (or a supplied) netlist, checked against the coupling matrix."""
    out = _prep(out)
    d = design(cfg)
    if netlist_path is not None:
        net = parse_netlist(Path(netlist_path).read_text())
    else:
        net = build_divider_netlist(d.plan, cfg.spec, realization).netlist
    net_path = out / "mna.net"
    net_path.write_text(format_netlist(net))
    paths = [net_path]
    if cfg.sweep is None:
        return paths
    freqs = _grid(cfg)
    res = ac_sparams(net, freqs, workers=workers)
    ref = cmatrix.sweep(d.ncm, freqs, workers=workers)
    check = {"realization": realization if netlist_path is None else "file", "n_ports": res.n_ports}
    if res.n_ports == ref.n_ports:
        check["max_abs_dS_vs_coupling_matrix"] = float(np.abs(res.s - ref.s).max())
        check["max_abs_d_mag_dB_S21"] = float(np.abs(res.db(2, 1) - ref.db(2, 1)).max()) if res.n_ports > 1 else 0.0
    check["unitarity_defect"] = res.unitarity_defect()
    check["reciprocity_defect"] = res.reciprocity_defect()
    paths.append(_write_json(out / "mna_check.json", check))
    paths += _emit(res, cfg, out, "mna", overlay=ref)
    return paths


def microstrip_summary(cfg: RunConfig) -> dict:
    sub = microstrip.Substrate(cfg.eps_r, cfg.h, cfg.tan_delta)
    w = microstrip.synthesize_width(cfg.line_z0, sub)
    line = microstrip.analyze(w, sub, cfg.f0)
    fx, fy = microstrip.footprint(line.lambda_g)
    return {
        "estimate": "quasi-static Hammerstad-Jensen, no dispersion, zero strip thickness",
        "substrate": {"eps_r": sub.eps_r, "h_m": sub.h, "tan_delta": sub.tan_delta},
        "z0_target_ohm": cfg.line_z0,
        "width_m": w,
        "z0_ohm": line.z0,
        "eps_eff": line.eps_eff,
        "regime": line.regime,
        "f_hz": cfg.f0,
        "lambda_g_m": line.lambda_g,
        "footprint_mm": [fx, fy],
        "footprint_ratios": list(microstrip.FOOTPRINT_RATIOS),
        "footprint_lambda_g2": microstrip.FOOTPRINT_RATIOS[0] * microstrip.FOOTPRINT_RATIOS[1],
        "note": "lambda_g taken on the line of the stated impedance",
    }


def run_microstrip(cfg: RunConfig, out) -> list[Path]:
    out = _prep(out)
    return [_write_json(out / "microstrip.json", microstrip_summary(cfg))]


def build_report(cfg: RunConfig, workers: int = 1) -> Report:
    d = design(cfg)
    grid = _grid(cfg) if cfg.sweep is not None else cmatrix.default_grid()
    res = cmatrix.sweep(d.ncm, grid, workers=workers)
    lossless = cmatrix.normalize(d.plan, cfg.spec)
    qu = cmatrix.fit_unloaded_q(lossless, PAPER_TARGETS.il_excess_measured_db)
    fp = tuple(microstrip_summary(cfg)["footprint_mm"])
    return report(res, cfg.spec, qu_fit=qu, footprint_mm=fp)


def run_report(cfg: RunConfig, out, workers: int = 1) -> tuple[Report, list[Path]]:
    out = _prep(out)
    rep = build_report(cfg, workers)
    p = out / "report.txt"
    p.write_text(rep.text())
    return rep, [p]


def run_export(path, out, formats=("csv", "svg")) -> list[Path]:
    """Convert an existing Touchstone file to CSV and/or SVG."""
    out = _prep(out)
    res = read_touchstone(path)
    stem = Path(path).stem
    paths = []
    if "csv" in formats:
        paths.append(write_csv(res, out / f"{stem}.csv"))
    if "svg" in formats:
        paths.append(write_svg(res, out / f"{stem}.svg", title=stem))
    return paths
