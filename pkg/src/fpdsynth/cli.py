"""Command line entry point: ``fpdsynth {synth,sweep,mna,microstrip,report,export}``.

Exit codes: 0 success, 1 I/O error, 2 configuration error, 3 numeric
failure, 4 theory target missed under ``report --strict``.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys

from . import workflow
from .config import ConfigError, RunConfig, SweepGrid, load_config
from .errors import NumericError
from .mna import NetlistParseError
from .touchstone import TouchstoneParseError

OUTPUT_ENV = "FPDSYNTH_OUTPUT_DIR"

EXIT_OK, EXIT_IO, EXIT_CONFIG, EXIT_NUMERIC, EXIT_TARGET = 0, 1, 2, 3, 4


def _common(p: argparse.ArgumentParser):
    p.add_argument("-c", "--config", help="YAML or JSON run configuration")
    p.add_argument("-o", "--out", help=f"output directory (default ${OUTPUT_ENV} or ./fpd_out)")
    p.add_argument("--start", type=float, help="sweep start, Hz")
    p.add_argument("--stop", type=float, help="sweep stop, Hz")
    p.add_argument("--points", type=int, help="sweep points")
    p.add_argument("--ports", type=int, dest="n_way", help="number of output ports")
    p.add_argument("--qu", type=float, help="unloaded Q of every resonator")
    p.add_argument("--refine", action="store_true", help="polish couplings for worst in-band return loss")
    p.add_argument("--workers", type=int, default=1, help="threads for frequency sweeps")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fpdsynth", description="N-way coupled-resonator filtering power divider CAD")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in [
        ("synth", "prototype values, couplings, circuit constants"),
        ("sweep", "coupling-matrix S-parameter sweep"),
        ("mna", "lumped-circuit nodal-analysis sweep and cross-check"),
        ("microstrip", "line width, guided wavelength and footprint"),
        ("report", "pass/fail table against the published figures"),
    ]:
        p = sub.add_parser(name, help=help_)
        _common(p)
        if name == "mna":
            p.add_argument("--netlist", help="simulate this netlist file instead of the synthesized one")
            p.add_argument("--realization", choices=("ideal", "pi"), default="ideal")
        if name == "microstrip":
            p.add_argument("--z0", type=float, dest="line_z0", help="line impedance, ohm")
        if name == "report":
            p.add_argument("--strict", action="store_true", help="exit 4 if any theory row fails")
    p = sub.add_parser("export", help="convert a Touchstone file to CSV/SVG")
    p.add_argument("touchstone")
    p.add_argument("-o", "--out")
    p.add_argument("--format", choices=("csv", "svg"), action="append", dest="formats")
    p.add_argument("-v", "--verbose", action="store_true")
    return parser


def _config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    changes = {}
    for key in ("n_way", "qu", "line_z0"):
        val = getattr(args, key, None)
        if val is not None:
            changes[key] = val
    if args.refine:
        changes["refine"] = True
    if any(getattr(args, k) is not None for k in ("start", "stop", "points")):
        base = cfg.sweep or SweepGrid()
        changes["sweep"] = SweepGrid(
            args.start if args.start is not None else base.start,
            args.stop if args.stop is not None else base.stop,
            args.points if args.points is not None else base.points,
        )
    try:
        cfg = dataclasses.replace(cfg, **changes)
        cfg.spec
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if cfg.qu is not None and not cfg.qu > 0:
        raise ConfigError(f"--qu must be > 0, got {cfg.qu}")
    return cfg


def _out(args) -> str:
    return args.out or os.environ.get(OUTPUT_ENV) or "fpd_out"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "export":
            paths = workflow.run_export(args.touchstone, _out(args), tuple(args.formats or ("csv", "svg")))
            print("\n".join(str(p) for p in paths))
            return EXIT_OK
        cfg = _config(args)
        out = _out(args)
        if args.command == "synth":
            paths = workflow.run_synth(cfg, out)
        elif args.command == "sweep":
            paths = workflow.run_sweep(cfg, out, workers=args.workers)
        elif args.command == "mna":
            paths = workflow.run_mna(cfg, out, args.netlist, args.realization, workers=args.workers)
        elif args.command == "microstrip":
            paths = workflow.run_microstrip(cfg, out)
        else:
            rep, paths = workflow.run_report(cfg, out, workers=args.workers)
            sys.stdout.write(rep.text())
            if args.strict and not rep.passed:
                return EXIT_TARGET
            return EXIT_OK
        print("\n".join(str(p) for p in paths))
        return EXIT_OK
    except (ConfigError, NetlistParseError, TouchstoneParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericError, ArithmeticError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
