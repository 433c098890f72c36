"""Command-line front end.

Usage: ``zenolike <command> [options]``. Every command prints JSON or CSV to
standard output, or writes it atomically to ``--out``. Options may also come
from a flat ``key = value`` file given with ``--config``; flags on the
command line win over the file.

Exit codes: 0 success, 1 numerical failure, 2 usage or configuration error.
"""
import argparse
from dataclasses import dataclass, field
import math
import sys
from typing import Optional

import numpy as np

from . import export
from .errors import ContractViolation, NotCompletelyPositive, NumericalFailure, ZenoError
from .fixedpoint import (ScanGrid, SearchConfig, brouwer_fixed_point, detector_sweep, freeze_design,
                         zeno_scan)
from .measurement import (bloch_of_effect, channel_from_kraus, kraus_from_channel, outcome_probabilities,
                          povm_from_kraus)
from .model import ModelParams, QubitState, analytic_superop, cycle_channel, cycle_channel_algebraic
from .spectra import evolve_n, spectral_decompose, validate_cptp

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2
COMMANDS = ("spectrum", "scan", "sweep-detector", "design", "trajectory", "kraus", "reconcile")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _vector(text):
    try:
        v = [float(x) for x in str(text).split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y,z, got {text!r}")
    if len(v) != 3 or not all(math.isfinite(x) for x in v):
        raise argparse.ArgumentTypeError(f"expected three finite numbers, got {text!r}")
    return tuple(v)


def _common(p, params=True):
    p.add_argument("--config", help="flat key=value file; command-line flags take precedence")
    p.add_argument("--out", help="output file (default: standard output)")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--eps", type=float, default=1e-2, help="Zeno-like flag threshold on |lambda - 1|")
    p.add_argument("--detector", type=_vector, default="0,0,1", help="detector Bloch vector x,y,z")
    if params:
        p.add_argument("--g", type=float, help="coupling g/omega")
        p.add_argument("--dtf", type=float, help="free-evolution phase omega*dt_f")
        p.add_argument("--dtm", type=float, help="measurement duration omega*dt_m")


def build_parser():
    parser = _Parser(prog="zenolike", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("spectrum", help="eigen-analysis of one cycle channel")
    _common(p)

    p = sub.add_parser("scan", help="grid scan for Zeno-like points (CSV)")
    _common(p, params=False)
    p.add_argument("--grid", default="", help="g=lo:hi:n,dtf=lo:hi:n,dtm=lo:hi:n (omitted axes use defaults)")
    p.add_argument("--flagged-only", action="store_true")

    p = sub.add_parser("sweep-detector", help="Brouwer fixed points over detector states (CSV)")
    _common(p)
    p.add_argument("--n-dirs", type=int, default=64)
    p.add_argument("--n-radii", type=int, default=4)

    p = sub.add_parser("design", help="find parameters and detector state that freeze a target")
    _common(p, params=False)
    p.set_defaults(detector=None)
    p.add_argument("--target", type=_vector, required=False, help="target Bloch vector x,y,z")
    p.add_argument("--budget", type=int, default=20000)
    p.add_argument("--tol", type=float, default=1e-6)

    p = sub.add_parser("trajectory", help="repeated application of the channel (CSV)")
    _common(p)
    p.add_argument("--rho0", type=_vector, default="1,0,0", help="initial Bloch vector")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--method", choices=("iterate", "spectral"), default="iterate")

    p = sub.add_parser("kraus", help="canonical Kraus operators and POVM of one channel")
    _common(p)
    p.add_argument("--rho", type=_vector, default=None, help="state for outcome probabilities")

    p = sub.add_parser("reconcile", help="closed forms and reference values against the brute-force channel")
    _common(p, params=False)
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--no-refine", action="store_true")
    return parser


def read_config(path):
    """Parse a flat ``key = value`` file; ``#`` starts a comment, dashes in keys become underscores."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path!r}: {exc.strerror}")
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise UsageError(f"{path}:{lineno}: expected key = value")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


@dataclass
class RunConfig:
    """Validated settings for one command."""
    command: str
    params: Optional[ModelParams]
    detector: Optional[QubitState]
    out: Optional[str]
    seed: int
    workers: int
    eps: float
    options: dict = field(default_factory=dict)


_BOOL_TRUE = {"1", "true", "yes", "on"}


def parse_config(argv):
    """argv -> :class:`RunConfig`; raises :class:`UsageError` or :class:`ContractViolation`."""
    parser = build_parser()
    ns = parser.parse_args(argv)
    if ns.config:
        cfg = read_config(ns.config)
        sub = parser._subparsers._group_actions[0].choices[ns.command]
        known = {a.dest for a in sub._actions}
        unknown = sorted(set(cfg) - known - {"config"})
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        switches = {a.dest for a in sub._actions if isinstance(a, argparse._StoreTrueAction)}
        sub.set_defaults(**{k: (v.lower() in _BOOL_TRUE if k in switches else v)
                            for k, v in cfg.items() if k != "config"})
        ns = parser.parse_args(argv)

    params = None
    if hasattr(ns, "g"):
        missing = [k for k in ("g", "dtf", "dtm") if getattr(ns, k) is None]
        if missing:
            raise UsageError(f"missing parameters: {', '.join('--' + m for m in missing)}")
        params = ModelParams(ns.g, ns.dtf, ns.dtm)
    detector = QubitState.from_bloch(np.array(ns.detector)) if ns.detector is not None else None
    if ns.workers < 1:
        raise ContractViolation("--workers must be at least 1")
    if not (ns.eps > 0):
        raise ContractViolation("--eps must be positive")
    skip = {"command", "config", "out", "seed", "workers", "eps", "detector", "g", "dtf", "dtm"}
    options = {k: v for k, v in vars(ns).items() if k not in skip}
    rc = RunConfig(ns.command, params, detector, ns.out, ns.seed, ns.workers, ns.eps, options)
    _validate_options(rc)
    return rc


def _validate_options(rc):
    o = rc.options
    if rc.command == "scan":
        o["grid"] = ScanGrid.parse(o.get("grid") or "", detector=rc.detector.bloch)
    elif rc.command == "sweep-detector":
        if o["n_dirs"] < 1 or o["n_radii"] < 1:
            raise ContractViolation("--n-dirs and --n-radii must be positive")
    elif rc.command == "design":
        if o.get("target") is None:
            raise UsageError("design needs --target x,y,z")
        o["target"] = QubitState.from_bloch(np.array(o["target"]))
        # for this command --detector pins the detector; leaving it out lets the search move it
        o["detector_pinned"] = None if rc.detector is None else tuple(rc.detector.bloch)
        if o["budget"] < 1 or not (o["tol"] > 0):
            raise ContractViolation("--budget and --tol must be positive")
    elif rc.command == "trajectory":
        if o["n"] < 0:
            raise ContractViolation("--n must be non-negative")
        o["rho0"] = QubitState.from_bloch(np.array(o["rho0"]))
    elif rc.command == "kraus":
        if o.get("rho") is not None:
            o["rho"] = QubitState.from_bloch(np.array(o["rho"]))
    elif rc.command == "reconcile":
        if o["points"] < 1:
            raise ContractViolation("--points must be positive")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _is_ground(detector):
    return np.allclose(detector.bloch, [0, 0, 1], atol=1e-12)


def cmd_spectrum(rc):
    m = cycle_channel(rc.params, rc.detector)
    sd = spectral_decompose(m, eps_almost=rc.eps)
    second = np.sort(np.abs(np.abs(sd.eigenvalues) - 1))[1]
    report = {
        "params": rc.params,
        "detector": rc.detector.bloch,
        "eigenvalues": sd.eigenvalues,
        "moduli": np.abs(sd.eigenvalues),
        "classes": list(sd.classes),
        "residuals": sd.residuals,
        "condition": sd.condition,
        "defective": sd.defective,
        "eigen_ops": sd.eigen_ops,
        "second_unit_modulus_gap": float(second),
        "brouwer_fixed_point": brouwer_fixed_point(m).bloch,
        "cptp": validate_cptp(m).__dict__,
        "dual_path_max_dev": float(np.max(np.abs(m - cycle_channel_algebraic(rc.params, rc.detector)))),
    }
    if _is_ground(rc.detector):
        report["closed_form_max_dev"] = float(np.max(np.abs(analytic_superop(rc.params) - m)))
    return export.json_text(report)


def cmd_scan(rc):
    res = zeno_scan(rc.options["grid"], eps=rc.eps, workers=rc.workers)
    return export.scan_csv(res, flagged_only=rc.options["flagged_only"])


def cmd_sweep(rc):
    res = detector_sweep(rc.params, rc.options["n_dirs"], rc.options["n_radii"], eps=rc.eps)
    return export.scan_csv(res)


def cmd_design(rc):
    o = rc.options
    cfg = SearchConfig(detector=o["detector_pinned"], budget=o["budget"], tol=o["tol"], seed=rc.seed)
    r = freeze_design(o["target"], cfg)
    return export.json_text({
        "target": r.target.bloch,
        "params": r.params,
        "detector": r.detector.bloch,
        "residual": r.residual,
        "converged": r.converged,
        "evaluations": r.evaluations,
        "fixed_point": r.fixed_point.bloch,
        "fixed_point_distance": r.fixed_point_distance,
        "eigenvalues": r.eigenvalues,
        "attractivity": r.attractivity,
        "stable": r.stable,
    })


def cmd_trajectory(rc):
    m = cycle_channel(rc.params, rc.detector)
    rho0 = rc.options["rho0"]
    traj = evolve_n(m, rho0, rc.options["n"], method=rc.options["method"])
    return export.trajectory_csv(traj, rho0)


def cmd_kraus(rc):
    m = cycle_channel(rc.params, rc.detector)
    ks = kraus_from_channel(m)
    povm = povm_from_kraus(ks)
    report = {
        "params": rc.params,
        "detector": rc.detector.bloch,
        "kraus": ks.operators,
        "completeness_error": ks.completeness_error(),
        "reconstruction_error": float(np.max(np.abs(channel_from_kraus(ks) - m))),
        "povm": povm.elements,
        "povm_bloch": [{"a": a, "n": n} for a, n in map(bloch_of_effect, povm)],
    }
    if rc.options.get("rho") is not None:
        report["probabilities"] = outcome_probabilities(povm, rc.options["rho"])
    return export.json_text(report)


def cmd_reconcile(rc):
    from .reconcile import full_report
    return export.json_text(full_report(rc.options["points"], rc.seed, refine=not rc.options["no_refine"]))


HANDLERS = {
    "spectrum": cmd_spectrum, "scan": cmd_scan, "sweep-detector": cmd_sweep, "design": cmd_design,
    "trajectory": cmd_trajectory, "kraus": cmd_kraus, "reconcile": cmd_reconcile,
}


def run(argv=None, stdout=None, stderr=None):
    """Entry point; returns the process exit code instead of exiting."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        rc = parse_config(argv)
    except UsageError as exc:
        print(str(exc), file=stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    except (ContractViolation, ValueError) as exc:
        print(f"zenolike: invalid configuration: {exc}", file=stderr)
        return EXIT_USAGE
    try:
        text = HANDLERS[rc.command](rc)
    except (NumericalFailure, NotCompletelyPositive, np.linalg.LinAlgError) as exc:
        print(f"zenolike: numerical failure: {exc}", file=stderr)
        return EXIT_NUMERIC
    except ZenoError as exc:
        print(f"zenolike: {exc}", file=stderr)
        return EXIT_NUMERIC
    if rc.out:
        try:
            export.write_atomic(rc.out, text)
        except OSError as exc:
            print(f"zenolike: cannot write {rc.out}: {exc.strerror}", file=stderr)
            return EXIT_USAGE
    else:
        stdout.write(text)
    return EXIT_OK


def main():
    sys.exit(run())
