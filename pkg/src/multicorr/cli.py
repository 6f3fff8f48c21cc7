"""Command-line interface.

Subcommands: ``measures``, ``povm``, ``scan``, ``surface``, ``representatives`` and
``repro-appendix``. Exit codes: 0 success, 1 validation failure,
2 reproduction mismatch.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from multicorr import __version__, _backend
from multicorr.appendix import TABLE_TOL, EXACT_TOL, appendix_checks
from multicorr.families import StateFamily, format_ket, make_family, parse_ket_expression
from multicorr.figures import ems_surface, representative_scan, second_level_scan
from multicorr.measures import AVERAGE_RESIDUAL, TOTAL_RESIDUAL, measure_report, residual_measure, xi_measures
from multicorr.povm import Axis, GridSpec, apply_povm, make_diag_povm, scan_deltas, scan_minimum
from multicorr.qcr import pinned_measure
from multicorr.state import PureState, ValidationError, normalize, random_pure_state

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_MISMATCH = 2
OUTPUT_DIR_ENV = "MULTICORR_OUTPUT_DIR"


class CliError(Exception):
    def __init__(self, message, code=EXIT_INVALID):
        super().__init__(message)
        self.code = code


def fmt(x):
    """CSV float formatting: 10 significant digits."""
    return f"{x:.10g}"


# ------------------------------------------------------------- state files


def load_state_file(path) -> PureState:
    """Read ``{"n_qubits": N, "amplitudes": [[re, im], ...], "normalize": true}``."""
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise CliError(f"cannot read state file {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"state file {path} is not valid JSON: {exc}") from None
    return state_from_json(doc)


def state_from_json(doc) -> PureState:
    if not isinstance(doc, dict) or "n_qubits" not in doc or "amplitudes" not in doc:
        raise ValidationError("state file needs 'n_qubits' and 'amplitudes'")
    n = doc["n_qubits"]
    amps = doc["amplitudes"]
    if not isinstance(amps, list) or not all(isinstance(p, list) and len(p) == 2 for p in amps):
        raise ValidationError("amplitudes must be a list of [re, im] pairs")
    try:
        vec = np.array([complex(float(re_), float(im)) for re_, im in amps])
    except (TypeError, ValueError):
        raise ValidationError("amplitudes must be numbers") from None
    state = PureState(n, vec)
    if state.norm == 0.0:
        raise ValidationError("state file holds the null vector")
    if doc.get("normalize", True):
        return normalize(state)
    if not state.is_normalized:
        raise ValidationError("state is not normalized and 'normalize' is false")
    return state


def state_to_json(state: PureState, normalize_flag=True):
    return {
        "n_qubits": state.n_qubits,
        "amplitudes": [[float(z.real), float(z.imag)] for z in state.amplitudes],
        "normalize": normalize_flag,
    }


# ------------------------------------------------------------- config


@dataclass
class RunConfig:
    seed: int = 0
    grid: GridSpec = field(default_factory=GridSpec)
    tolerances: dict = field(default_factory=dict)
    out: Path | None = None
    fmt: str = "csv"
    workers: int | None = None

    def __post_init__(self):
        for key, val in self.tolerances.items():
            if not val > 0:
                raise ValidationError(f"tolerance {key} must be positive, got {val}")

    def header(self, command, **extra):
        items = {"command": command, "seed": self.seed, **extra}
        return "# " + " ".join(f"{k}={v}" for k, v in items.items())


def _resolve_out(out, default_name):
    base = os.environ.get(OUTPUT_DIR_ENV)
    if out is None:
        return Path(base) / default_name if base else None
    out = Path(out)
    if base and not out.is_absolute():
        out = Path(base) / out
    return out


def _open_out(path):
    if path is None:
        return sys.stdout
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        return open(path, "w", newline="")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror}") from None


# ------------------------------------------------------------- measure ids

_T3_ID = re.compile(r"^t3:([1-4])@(t4|t3_[1-4])=(.+)$")
_T4_ID = re.compile(r"^t4@(t3_[1-4])=(.+)$")


def measure_from_id(text, state: PureState, pivot=0):
    """Resolve ``M``, ``ems``, ``M_A``.., ``xi1``..``xi3``, ``t3:i@<pin>=v``, ``t4@t3_i=v``."""
    key = text.strip()
    if key == "M":
        return TOTAL_RESIDUAL
    if key.lower() == "ems":
        return AVERAGE_RESIDUAL
    if key.startswith("M_"):
        return residual_measure(state.qubit_index(key[2:]))
    if key in ("xi1", "xi2", "xi3"):
        return xi_measures(state.qubit_index(pivot))[int(key[2]) - 1]
    m = _T3_ID.match(key)
    if m:
        return pinned_measure(f"t3_{m.group(1)}", (m.group(2), _number(m.group(3))))
    m = _T4_ID.match(key)
    if m:
        return pinned_measure("t4", (m.group(1), _number(m.group(2))))
    raise ValidationError(f"unknown measure {text!r}")


def _number(text):
    try:
        return float(text)
    except ValueError:
        raise ValidationError(f"not a number: {text!r}") from None


# ------------------------------------------------------------- state spec


def _parse_params(text):
    if text is None or text == "":
        return ()
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        try:
            out.append(complex(tok.replace("i", "j")) if re.search(r"[ij]", tok) else float(tok))
        except ValueError:
            raise ValidationError(f"bad parameter {tok!r}") from None
    return tuple(out)


def resolve_state(args) -> PureState:
    given = [x for x in (args.family, args.ket, args.state_file, args.random) if x is not None]
    if len(given) != 1:
        raise ValidationError("give exactly one of --family, --ket, --state-file, --random")
    if args.ket is not None:
        return parse_ket_expression(args.ket)
    if args.state_file is not None:
        return load_state_file(args.state_file)
    if args.random is not None:
        return random_pure_state(args.random, args.seed)
    name, _, inline = args.family.partition(":")
    params = _parse_params(inline) + _parse_params(args.params)
    if name.lower().replace("_", "") in ("ghz", "ghzn"):
        params = tuple(int(p.real if isinstance(p, complex) else p) for p in params) or (4,)
    return make_family(StateFamily(name, params))


def _add_state_args(p):
    g = p.add_argument_group("state")
    g.add_argument("--family", help="family name, optionally with inline params, e.g. ghz:4 or Gabcd:1,0.5,1,0.5")
    g.add_argument("--params", help="comma-separated family parameters")
    g.add_argument("--ket", help='ket expression, e.g. "(|0000>+|1111>)/sqrt(2)"')
    g.add_argument("--state-file", help="JSON state file")
    g.add_argument("--random", type=int, metavar="N", help="Haar-random N-qubit state drawn with --seed")


def _add_common(p):
    p.add_argument("--seed", type=int, default=0, help="seed recorded in outputs and used by --random")


def _grid_from_args(args):
    if args.grid:
        axis = Axis.parse(args.grid)
        alpha = beta = axis
    else:
        alpha = beta = Axis()
    if getattr(args, "alpha_grid", None):
        alpha = Axis.parse(args.alpha_grid)
    if getattr(args, "beta_grid", None):
        beta = Axis.parse(args.beta_grid)
    return GridSpec(alpha, beta)


# ------------------------------------------------------------- commands


def cmd_measures(args):
    state = resolve_state(args)
    report = measure_report(state)
    if args.format == "json":
        doc = {"seed": args.seed, "state": format_ket(state, cutoff=1e-15), **report.to_dict()}
        print(json.dumps(doc, indent=2))
        return EXIT_OK
    labels = report.labels
    print(f"# seed={args.seed}")
    print(f"{'qubit':>6} {'tau':>12} {'S^2':>12} {'M_k':>12} {'qcr_resid':>12}")
    for k, lab in enumerate(labels):
        print(f"{lab:>6} {report.tau[k]:12.6f} {report.s2[k]:12.6f} {report.m_k[k]:12.6f} "
              f"{report.qcr_residuals[k]:12.3e}")
    print("C^2:")
    for i in range(len(labels)):
        for j in range(i + 1, len(labels)):
            print(f"  {labels[i]}{labels[j]} {report.c2[i, j]:12.6f}")
    print(f"M = {report.m_total:.6f}")
    print(f"E_ms = {report.e_ms:.6f}")
    return EXIT_OK


def cmd_povm(args):
    state = resolve_state(args)
    q = state.qubit_index(args.qubit)
    measure = measure_from_id(args.measure, state, q)
    povm = make_diag_povm(args.alpha, args.beta, q)
    outcomes = apply_povm(state, povm)
    before = measure(state)
    branches = []
    avg = 0.0
    for o in outcomes:
        val = None if o.is_null else measure(o.state)
        if val is not None:
            avg += o.probability * val
        branches.append({"branch": o.branch, "probability": o.probability, "value": val})
    delta = before - avg
    if args.format == "json":
        print(json.dumps({"seed": args.seed, "measure": args.measure, "qubit": state.labels[q],
                          "alpha": args.alpha, "beta": args.beta, "value": before,
                          "branches": branches, "delta": delta}, indent=2))
        return EXIT_OK
    print(f"# seed={args.seed} measure={args.measure} qubit={state.labels[q]} alpha={args.alpha} beta={args.beta}")
    print(f"value(psi) = {before:.10g}")
    for b in branches:
        val = "null" if b["value"] is None else f"{b['value']:.10g}"
        print(f"p{b['branch']} = {b['probability']:.10g}  value(phi{b['branch']}) = {val}")
    print(f"delta = {delta:.10g}")
    return EXIT_OK


def cmd_scan(args):
    state = resolve_state(args)
    q = state.qubit_index(args.qubit)
    measure = measure_from_id(args.measure, state, q)
    cfg = RunConfig(seed=args.seed, grid=_grid_from_args(args), out=_resolve_out(args.out, "scan.csv"),
                    fmt=args.format, workers=args.workers)
    a, b, d = scan_deltas(state, q, cfg.grid, measure, cfg.workers)
    lo, (amin, bmin) = scan_minimum(d, a, b)
    summary = f"min delta = {lo:.10g} at alpha={fmt(amin)} beta={fmt(bmin)} ({len(d)} cells)"
    fh = _open_out(cfg.out)
    try:
        if cfg.fmt == "json":
            json.dump({"seed": cfg.seed, "measure": args.measure, "qubit": state.labels[q],
                       "records": [{"alpha": float(x), "beta": float(y), "delta": float(z)}
                                   for x, y, z in zip(a, b, d)],
                       "min_delta": lo, "argmin": [amin, bmin]}, fh)
            fh.write("\n")
        else:
            fh.write(cfg.header("scan", measure=args.measure, qubit=state.labels[q]) + "\n")
            fh.write("alpha,beta,delta\n")
            fh.writelines(f"{fmt(x)},{fmt(y)},{fmt(z)}\n" for x, y, z in zip(a, b, d))
    finally:
        if fh is not sys.stdout:
            fh.close()
    print(summary, file=sys.stdout if cfg.out else sys.stderr)
    return EXIT_OK


def cmd_surface(args):
    if args.family.lower() != "gabcd":
        raise ValidationError("surface is defined for the Gabcd family only")
    a_axis = Axis.parse(args.a_range)
    d_axis = Axis.parse(args.d_range)
    out = _resolve_out(args.out, "surface.csv")
    a, d, ems = ems_surface(args.b, args.c, a_axis, d_axis)
    fh = _open_out(out)
    try:
        if args.format == "json":
            json.dump({"seed": args.seed, "b": args.b, "c": args.c,
                       "records": [{"a": float(x), "d": float(y), "ems": None if math.isnan(z) else float(z)}
                                   for x, y, z in zip(a, d, ems)]}, fh)
            fh.write("\n")
        else:
            fh.write(f"# command=surface seed={args.seed} family=Gabcd b={args.b} c={args.c}\n")
            fh.write("a,d,ems\n")
            fh.writelines(f"{fmt(x)},{fmt(y)},{'null' if math.isnan(z) else fmt(z)}\n" for x, y, z in zip(a, d, ems))
    finally:
        if fh is not sys.stdout:
            fh.close()
    live = ems[~np.isnan(ems)]
    if out is not None:
        print(f"{len(a)} cells, max E_ms = {live.max() if live.size else float('nan'):.10g}")
    return EXIT_OK


def cmd_representatives(args):
    grid = _grid_from_args(args)
    tol = args.tol
    ok = True
    print(f"# seed={args.seed} grid={grid.shape[0]}x{grid.shape[1]}")
    print(f"{'family':<16} {'qubit':>5} {'branch':>6} {'p':>8} {'min dM':>14}  argmin")
    rows = representative_scan(grid, workers=args.workers)
    if not args.skip_second_level:
        rows += second_level_scan(grid, workers=args.workers)
    names = "ABCD"
    for r in rows:
        ok &= r.min_delta >= -tol
        branch = "-" if r.branch == 0 else str(r.branch)
        print(f"{r.family:<16} {names[r.target]:>5} {branch:>6} {r.branch_probability:8.4f} "
              f"{r.min_delta:14.6e}  ({fmt(r.argmin[0])}, {fmt(r.argmin[1])})")
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_repro_appendix(args):
    table_tol = args.tol if args.tol is not None else TABLE_TOL
    checks = appendix_checks()
    bad = []
    print(f"# seed={args.seed}")
    print(f"{'table':<5} {'quantity':<22} {'expected':>12} {'computed':>14} {'error':>10}  status")
    for c in checks:
        tol = c.tol if c.tol == EXACT_TOL else table_tol
        status = "ok" if c.error <= tol else "MISMATCH"
        if status != "ok":
            bad.append(c)
        print(f"{c.table:<5} {c.quantity:<22} {c.expected:12.6g} {c.computed:14.8g} {c.error:10.2e}  {status}")
    print(f"{len(checks) - len(bad)}/{len(checks)} entries within tolerance")
    if bad:
        print("mismatched: " + ", ".join(f"{c.table}:{c.quantity}" for c in bad), file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


# ------------------------------------------------------------- entry point


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INVALID)


def build_parser():
    parser = _Parser(prog="multicorr", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__} ({_backend.BACKEND} kernels)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("measures", help="all correlation measures of one state")
    _add_state_args(p)
    _add_common(p)
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.set_defaults(func=cmd_measures)

    p = sub.add_parser("povm", help="apply one diagonal POVM and report the average change")
    _add_state_args(p)
    _add_common(p)
    p.add_argument("--qubit", default="A")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--measure", default="M")
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.set_defaults(func=cmd_povm)

    p = sub.add_parser("scan", help="grid of average changes over diagonal POVMs")
    _add_state_args(p)
    _add_common(p)
    p.add_argument("--qubit", default="A")
    p.add_argument("--measure", default="M")
    p.add_argument("--grid", help="start:end:step for both axes (default 0.05:0.95:0.01)")
    p.add_argument("--alpha-grid")
    p.add_argument("--beta-grid")
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("surface", help="E_ms of Gabcd over an a x d grid")
    _add_common(p)
    p.add_argument("--family", default="gabcd")
    p.add_argument("--b", type=float, default=0.0)
    p.add_argument("--c", type=float, default=0.5)
    p.add_argument("--a-range", default="0:5:0.05")
    p.add_argument("--d-range", default="0:5:0.05")
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_surface)

    p = sub.add_parser("representatives", help="monotonicity scans of the nine representative states")
    _add_common(p)
    p.add_argument("--grid")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--workers", type=int)
    p.add_argument("--skip-second-level", action="store_true")
    p.set_defaults(func=cmd_representatives)

    p = sub.add_parser("repro-appendix", help="recompute the worked-example tables")
    _add_common(p)
    p.add_argument("--tol", type=float, help="override the printed-entry tolerance")
    p.set_defaults(func=cmd_repro_appendix)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "tol", None) is not None and not args.tol > 0:
        print("multicorr: error: --tol must be positive", file=sys.stderr)
        return EXIT_INVALID
    try:
        return args.func(args)
    except CliError as exc:
        print(f"multicorr: error: {exc}", file=sys.stderr)
        return exc.code
    except (ValueError, IndexError) as exc:
        print(f"multicorr: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
