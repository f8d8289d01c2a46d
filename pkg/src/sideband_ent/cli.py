"""
Command-line front end.

    sideband-ent params   --config lab.cfg
    sideband-ent sweep    --r 1.00000025 --nbar 0,1e5,5e6,1e7 --points 500
    sideband-ent epr      --nbar 1e5
    sideband-ent validate --r 1.5 --nbar 0,10 --points 200

Exit status: 0 success, 1 validation failure, 2 config error, 3 physics
domain error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import math
import sys
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import __version__
from .config import parse_config
from .errors import ConfigError, DomainError, OracleError
from .model import Couplings, PhysicalParams, couplings_from_physical
from .oracle import crosscheck
from .sweep import OUTPUTS, SweepSpec, format_value, run_sweep, write_csv

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG, EXIT_DOMAIN, EXIT_IO = 0, 1, 2, 3, 4

# Order-of-magnitude bands around the reference operating point
# (10 W, 2e15 rad/s laser, 5e8 rad/s mirror mode, 1e-10 kg).
ANCHORS = {
    "chi": (2e5, 8e5),
    "theta": (2e5, 8e5),
    "r_minus_1": (2.25e-7, 2.75e-7),
    "big_theta": (1e2, 3e3),
}

# Oracle tolerance per conditioning regime, keyed on r - 1.
WELL_CONDITIONED_GAP = 1e-3
TOL_WELL_CONDITIONED = 1e-8
TOL_NEAR_DEGENERATE = 1e-6


@dataclass
class RunReport:
    inputs: PhysicalParams
    couplings: Couplings
    warnings: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "inputs": asdict(self.inputs),
            "couplings": asdict(self.couplings),
            "warnings": list(self.warnings),
        }


def anchor_warnings(c: Couplings) -> list[str]:
    derived = {
        "chi": c.chi,
        "theta": c.theta,
        "r_minus_1": c.r - 1,
        "big_theta": c.big_theta,
    }
    out = []
    for name, (lo, hi) in ANCHORS.items():
        if not lo <= derived[name] <= hi:
            out.append(f"{name} = {derived[name]:.4g} outside reference band [{lo:g}, {hi:g}]")
    return out


def run_report(params: PhysicalParams) -> RunReport:
    couplings = couplings_from_physical(params)
    return RunReport(params, couplings, anchor_warnings(couplings))


def oracle_tolerance(r: float) -> float:
    return TOL_WELL_CONDITIONED if r - 1 >= WELL_CONDITIONED_GAP else TOL_NEAR_DEGENERATE


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(s) for s in text.split(",") if s.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers: {text!r}") from exc


def _name_list(text: str) -> tuple[str, ...]:
    names = tuple(s.strip() for s in text.split(",") if s.strip())
    unknown = [n for n in names if n not in OUTPUTS]
    if unknown:
        raise argparse.ArgumentTypeError(f"unknown outputs {unknown}; choose from {list(OUTPUTS)}")
    return names


@contextlib.contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def cmd_params(args) -> int:
    report = run_report(parse_config(args.config, "physical"))
    with _output(args.out) as fh:
        if args.format == "json":
            json.dump(report.to_dict(), fh, indent=2)
            fh.write("\n")
        else:
            row = {**asdict(report.couplings), "warnings": "; ".join(report.warnings)}
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(row)
            writer.writerow([v if isinstance(v, str) else format_value(v) for v in row.values()])
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK


def _sweep_spec(args, default_outputs, default_nbar) -> SweepSpec:
    spec = parse_config(args.config, "sweep") if args.config else SweepSpec(
        nbar_list=default_nbar, outputs=default_outputs
    )
    overrides = {
        "r": args.r,
        "points": args.points,
        "tau_min": args.tau_min,
        "tau_max": args.tau_max,
        "nbar_list": args.nbar,
        "outputs": args.outputs,
    }
    spec = replace(spec, **{k: v for k, v in overrides.items() if v is not None})
    spec.validate()
    return spec


def _emit_sweep(spec, args) -> int:
    columns, rows = run_sweep(spec)
    with _output(args.out) as fh:
        if args.format == "csv":
            write_csv(columns, rows, fh)
        else:
            json.dump({"spec": asdict(spec), "rows": [dict(zip(columns, r)) for r in rows]}, fh, indent=1)
            fh.write("\n")
    return EXIT_OK


def cmd_sweep(args) -> int:
    return _emit_sweep(_sweep_spec(args, OUTPUTS, (0.0, 1e5, 5e6, 1e7)), args)


def cmd_epr(args) -> int:
    return _emit_sweep(_sweep_spec(args, ("delta_minus", "delta_plus"), (1e5,)), args)


def cmd_validate(args) -> int:
    tol = oracle_tolerance(args.r)
    grid = np.linspace(0.0, 2 * math.pi, args.points)
    runs, failures = [], []
    for nbar in args.nbar:
        rep = crosscheck(args.r, nbar, grid)
        runs.append(rep.to_dict())
        if rep.max_rel_dev > tol:
            failures.append({
                "nbar": nbar,
                "tau": rep.worst_tau,
                "coefficient": rep.worst_coefficient,
                "rel_dev": rep.max_rel_dev,
            })
    result = {"r": args.r, "tolerance": tol, "passed": not failures, "runs": runs, "failures": failures}
    with _output(args.out) as fh:
        json.dump(result, fh, indent=2)
        fh.write("\n")
    for f in failures:
        print(
            f"oracle mismatch: nbar={f['nbar']:g} tau={f['tau']:.17g} coefficient {f['coefficient']} "
            f"rel_dev={f['rel_dev']:.3g} > {tol:g}",
            file=sys.stderr,
        )
    return EXIT_VALIDATION if failures else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sideband-ent",
        description="Entangled optical sidebands from radiation pressure on a vibrating mirror.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, formats=("csv", "json"), default="csv"):
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--format", choices=formats, default=default)

    p = sub.add_parser("params", help="couplings from laboratory parameters")
    p.add_argument("--config", required=True, help="key = value file ('-' for stdin)")
    common(p, default="json")
    p.set_defaults(func=cmd_params)

    for name, func, help_ in (
        ("sweep", cmd_sweep, "marker / EPR / coefficient dataset over scaled time"),
        ("epr", cmd_epr, "EPR variances over scaled time"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="sweep spec file; flags override its values")
        p.add_argument("--r", type=float)
        p.add_argument("--nbar", type=_float_list, help="comma-separated thermal occupations")
        p.add_argument("--points", type=int)
        p.add_argument("--tau-min", type=float)
        p.add_argument("--tau-max", type=float)
        p.add_argument("--outputs", type=_name_list, help=f"subset of {','.join(OUTPUTS)}")
        common(p)
        p.set_defaults(func=func)

    p = sub.add_parser("validate", help="cross-check closed forms against moment propagation")
    p.add_argument("--r", type=float, default=1.5)
    p.add_argument("--nbar", type=_float_list, default=(0.0,))
    p.add_argument("--points", type=int, default=200)
    common(p, formats=("json",), default="json")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OracleError as exc:
        print(f"oracle failure: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
