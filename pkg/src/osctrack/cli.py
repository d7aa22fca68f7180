"""Command-line front end for tracking runs, certification, and parameter sweeps.

Subcommands
-----------
run             simulate one scenario and write trajectory.csv plus JSON reports
certify         evaluate the sampling-period certificate and write certificate.json
sweep           Cartesian (alpha, epsilon) grid of runs, one summary row per run
list-scenarios  print the scenario registry
list-curves     print the reference-curve registry

Configuration is a JSON document mirroring ``RunConfig``; command-line flags
override file values.  All numeric CSV output uses 17 significant digits so
identical configurations reproduce byte-identical files.  The default output
directory comes from ``OSCTRACK_OUTPUT_DIR`` when set, else the working
directory.

Exit codes: 0 success, 1 validation error, 2 simulation failure,
3 certification failure.
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .certify import CertificateInputs, bound_constants, estimate_sup_bounds
from .controller import ControllerParams
from .curves import CURVE_REGISTRY, ReferenceCurve, get_curve
from .errors import (
    CertificationError,
    DegenerateCurveError,
    DimensionMismatchError,
    DomainError,
    OscTrackError,
    RankConditionError,
    SimulationError,
    UnsupportedSchemeError,
    UsageError,
)
from .expressions import curve_from_expression
from .integrator import SamplerGrid, Trajectory, classic_solution_simulate, simulate
from .metrics import stability_report
from .scenarios import SCENARIO_REGISTRY, Scenario, get_scenario

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_SIMULATION = 2
EXIT_CERTIFICATION = 3

_SEMANTICS = ("sampled", "classic")


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved inputs for one tracking run.

    ``curve`` is either a registry name or a comma-separated component
    expression in the variable ``t``.  ``x0``, ``horizon``, ``alpha``,
    ``epsilon``, and ``substeps`` fall back to the scenario defaults when
    left unset.
    """

    scenario: str
    curve: str | None = None
    alpha: float | None = None
    epsilon: float | None = None
    x0: tuple[float, ...] | None = None
    horizon: float | None = None
    substeps: int | None = None
    rho: float = 0.5
    seed: int = 0
    output_dir: str | None = None
    semantics: str = "sampled"

    def __post_init__(self) -> None:
        if self.alpha is not None and self.alpha <= 0.0:
            raise UsageError("alpha must be positive")
        if self.epsilon is not None and self.epsilon <= 0.0:
            raise UsageError("epsilon must be positive")
        if self.rho <= 0.0:
            raise UsageError("rho must be positive")
        if self.horizon is not None and self.horizon <= 0.0:
            raise UsageError("horizon must be positive")
        if self.substeps is not None and self.substeps < 1:
            raise UsageError("substeps must be a positive integer")
        if self.seed < 0:
            raise UsageError("seed must be a nonnegative integer")
        if self.semantics not in _SEMANTICS:
            raise UsageError(
                f"unknown semantics {self.semantics!r}; choose from {_SEMANTICS}")


def load_config_file(path: str) -> dict:
    """Read a JSON config document and reject keys RunConfig does not have."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config file {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file {path!r} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("config file must contain a JSON object")
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    return data


def build_run_config(args: argparse.Namespace) -> RunConfig:
    """Merge config file values with command-line flags; flags win."""
    values: dict = {}
    if getattr(args, "config", None):
        values.update(load_config_file(args.config))
    for name in ("scenario", "curve", "alpha", "epsilon", "horizon",
                 "substeps", "rho", "seed", "output_dir", "semantics"):
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    if getattr(args, "x0", None) is not None:
        values["x0"] = _parse_floats(args.x0, "x0")
    elif "x0" in values and values["x0"] is not None:
        values["x0"] = tuple(float(v) for v in values["x0"])
    if "scenario" not in values or values["scenario"] is None:
        raise UsageError("a scenario name is required (flag --scenario or config file)")
    values.setdefault("rho", 0.5)
    values.setdefault("seed", 0)
    values.setdefault("semantics", "sampled")
    return RunConfig(**values)


def _parse_floats(text: str, label: str) -> tuple[float, ...]:
    try:
        parts = tuple(float(p) for p in text.split(",") if p.strip() != "")
    except ValueError as exc:
        raise UsageError(f"{label} must be a comma-separated list of numbers") from exc
    if not parts:
        raise UsageError(f"{label} must contain at least one number")
    return parts


def resolve_curve(spec: str, horizon: float) -> ReferenceCurve:
    """Registry names take priority; anything else is parsed as an expression."""
    if spec in CURVE_REGISTRY:
        return get_curve(spec, horizon=horizon)
    return curve_from_expression(spec, horizon=horizon)


def resolve_run(config: RunConfig) -> tuple[Scenario, ReferenceCurve,
                                            ControllerParams, np.ndarray, SamplerGrid]:
    scenario = get_scenario(config.scenario)
    horizon = config.horizon if config.horizon is not None else scenario.horizon
    curve_spec = config.curve if config.curve is not None else scenario.default_curve
    curve = resolve_curve(curve_spec, horizon)
    if curve.dim != scenario.system.n:
        raise DimensionMismatchError(
            f"curve {curve.name!r} has dimension {curve.dim}, "
            f"scenario {scenario.name!r} needs {scenario.system.n}")
    alpha = config.alpha if config.alpha is not None else scenario.default_params.alpha
    epsilon = (config.epsilon if config.epsilon is not None
               else scenario.default_params.epsilon)
    params = ControllerParams(alpha=alpha, epsilon=epsilon)
    x0 = (np.asarray(config.x0, dtype=float) if config.x0 is not None
          else np.asarray(scenario.default_x0, dtype=float))
    if x0.shape != (scenario.system.n,):
        raise DimensionMismatchError(
            f"x0 has {x0.size} components, scenario {scenario.name!r} "
            f"needs {scenario.system.n}")
    grid = SamplerGrid(epsilon=epsilon, horizon=horizon, substeps=config.substeps)
    return scenario, curve, params, x0, grid


def resolved_config_dict(config: RunConfig, scenario: Scenario,
                         curve: ReferenceCurve, params: ControllerParams,
                         x0: np.ndarray, grid: SamplerGrid) -> dict:
    out = asdict(config)
    out.update(
        curve=curve.name,
        alpha=params.alpha,
        epsilon=params.epsilon,
        x0=[float(v) for v in x0],
        horizon=grid.horizon,
    )
    return out


def output_directory(config: RunConfig) -> Path:
    if config.output_dir is not None:
        base = Path(config.output_dir)
    elif os.environ.get("OSCTRACK_OUTPUT_DIR"):
        base = Path(os.environ["OSCTRACK_OUTPUT_DIR"])
    else:
        base = Path.cwd()
    base.mkdir(parents=True, exist_ok=True)
    return base


def write_trajectory_csv(path: Path, traj: Trajectory) -> None:
    """Write the full trace with 17 significant digits per value."""
    n = traj.states.shape[1]
    m = traj.controls.shape[1]
    header = (["t"]
              + [f"x_{i + 1}" for i in range(n)]
              + [f"gamma_{i + 1}" for i in range(n)]
              + [f"u_{i + 1}" for i in range(m)]
              + ["dist"])
    block = np.column_stack([traj.times, traj.states, traj.reference,
                             traj.controls, traj.dist])
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in block:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def _json_value(value):
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


def write_json(path: Path, payload: dict) -> None:
    cleaned = {k: _json_value(v) for k, v in payload.items()}
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(cleaned, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _metadata(resolved: dict, traj: Trajectory | None, status: str,
              partial: bool) -> dict:
    out = {
        "config": resolved,
        "status": status,
        "partial_output": partial,
        "versions": {
            "osctrack": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
    }
    if traj is not None:
        out["n_intervals"] = traj.n_intervals
        out["coefficient_evals"] = traj.coefficient_evals
        out["substeps"] = traj.substeps
        out["semantics"] = traj.semantics
    return out


def cmd_run(args: argparse.Namespace) -> int:
    config = build_run_config(args)
    scenario, curve, params, x0, grid = resolve_run(config)
    out_dir = output_directory(config)
    resolved = resolved_config_dict(config, scenario, curve, params, x0, grid)
    integrate = simulate if config.semantics == "sampled" else classic_solution_simulate
    try:
        traj = integrate(scenario.system, scenario.scheme, params, curve, x0, grid)
    except SimulationError as exc:
        if exc.partial is not None:
            write_trajectory_csv(out_dir / "trajectory.csv", exc.partial)
        meta = _metadata(resolved, exc.partial, f"failed: {exc.reason} at t={exc.time}",
                         partial=exc.partial is not None)
        write_json(out_dir / "run_metadata.json", meta)
        print(f"simulation failed: {exc}", file=sys.stderr)
        return EXIT_SIMULATION
    write_trajectory_csv(out_dir / "trajectory.csv", traj)
    report = stability_report(traj, config.rho)
    write_json(out_dir / "stability_report.json", asdict(report))
    write_json(out_dir / "run_metadata.json",
               _metadata(resolved, traj, "completed", partial=False))
    print(f"wrote {out_dir / 'trajectory.csv'} ({traj.times.size} rows), "
          f"stability_report.json, run_metadata.json")
    return EXIT_OK


def cmd_certify(args: argparse.Namespace) -> int:
    config = build_run_config(args)
    scenario, curve, params, x0, grid = resolve_run(config)
    out_dir = output_directory(config)

    nu = args.nu if args.nu is not None else curve.nu
    analytic = [args.m1, args.m2, args.m3, args.lipschitz, args.mu]
    if args.empirical:
        sup = estimate_sup_bounds(scenario.system, scenario.scheme, curve,
                                  delta_prime=args.delta_prime,
                                  horizon=grid.horizon,
                                  n_samples=args.bound_samples,
                                  seed=config.seed)
        m1, m2, m3, lip, mu = sup.M1, sup.M2, sup.M3, sup.L, sup.mu
        provenance = "empirical"
    elif all(v is not None for v in analytic):
        m1, m2, m3, lip, mu = analytic
        provenance = "analytic"
    else:
        raise UsageError(
            "supply all of --m1 --m2 --m3 --lipschitz --mu, or pass --empirical "
            "to estimate them by sampling the tracking tube")

    inputs = CertificateInputs(
        r=args.r, rho=config.rho, rho_prime=args.rho_prime,
        delta=args.delta, delta_prime=args.delta_prime,
        mu=mu, nu=nu, M1=m1, M2=m2, M3=m3, L=lip, lam=args.lam,
        provenance=provenance)
    report = bound_constants(scenario.system, scenario.scheme, params, inputs)

    payload = {
        "ok": report.ok,
        "detail": report.detail,
        "scenario": scenario.name,
        "curve": curve.name,
        "alpha": params.alpha,
        "epsilon": params.epsilon,
        "inputs": asdict(inputs),
        "certificate": report.certificate.as_dict() if report.certificate else None,
    }
    write_json(out_dir / "certificate.json", payload)
    if not report.ok:
        print(f"certification failed: {report.detail}", file=sys.stderr)
        return EXIT_CERTIFICATION
    print(f"wrote {out_dir / 'certificate.json'} "
          f"(eps_hat={report.certificate.eps_hat:.6g})")
    return EXIT_OK


def _sweep_row(task: tuple) -> dict:
    """Worker for one sweep cell.  Takes primitives only so it pickles cleanly."""
    (scenario_name, curve_spec, alpha, epsilon, horizon,
     substeps, rho, semantics, x0) = task
    row = {"alpha": alpha, "epsilon": epsilon, "status": "ok",
           "steady_amplitude": "", "entry_time": "", "fitted_lambda": "", "flag": ""}
    try:
        scenario = get_scenario(scenario_name)
        hor = horizon if horizon is not None else scenario.horizon
        curve = resolve_curve(
            curve_spec if curve_spec is not None else scenario.default_curve, hor)
        params = ControllerParams(alpha=alpha, epsilon=epsilon)
        start = (np.asarray(x0, dtype=float) if x0 is not None
                 else np.asarray(scenario.default_x0, dtype=float))
        grid = SamplerGrid(epsilon=epsilon, horizon=hor, substeps=substeps)
        integrate = simulate if semantics == "sampled" else classic_solution_simulate
        traj = integrate(scenario.system, scenario.scheme, params, curve, start, grid)
        rep = stability_report(traj, rho)
        row["steady_amplitude"] = f"{rep.steady_amplitude:.17g}"
        row["entry_time"] = ("" if rep.entry_time is None or not math.isfinite(rep.entry_time)
                             else f"{rep.entry_time:.17g}")
        row["fitted_lambda"] = ("" if rep.fitted_lambda is None
                                else f"{rep.fitted_lambda:.17g}")
        if alpha <= curve.nu / rho:
            row["flag"] = "alpha<=nu/rho"
    except OscTrackError as exc:
        row["status"] = f"error: {exc}"
    return row


def cmd_sweep(args: argparse.Namespace) -> int:
    config = build_run_config(args)
    scenario, curve, _, x0, _ = resolve_run(config)
    out_dir = output_directory(config)
    alphas = _parse_floats(args.alphas, "alphas") if args.alphas else ()
    epsilons = _parse_floats(args.epsilons, "epsilons") if args.epsilons else ()
    if not alphas or not epsilons:
        raise UsageError("sweep needs nonempty --alphas and --epsilons lists")

    tasks = [(config.scenario, curve.name if config.curve is None else config.curve,
              a, e, config.horizon, config.substeps, config.rho,
              config.semantics, tuple(float(v) for v in x0))
             for a, e in itertools.product(alphas, epsilons)]
    jobs = args.jobs if args.jobs else min(len(tasks), os.cpu_count() or 1)
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        rows = list(pool.map(_sweep_row, tasks))

    path = out_dir / "sweep_summary.csv"
    columns = ["alpha", "epsilon", "status", "steady_amplitude",
               "entry_time", "fitted_lambda", "flag"]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_sweep_cell(row[c]) for c in columns) + "\n")
    n_failed = sum(1 for row in rows if row["status"] != "ok")
    print(f"wrote {path} ({len(rows)} rows, {n_failed} failed)")
    return EXIT_OK


def _sweep_cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    text = str(value)
    if "," in text or '"' in text:
        return '"' + text.replace('"', '""') + '"'
    return text


def cmd_list_scenarios(_: argparse.Namespace) -> int:
    for name in SCENARIO_REGISTRY:
        sc = get_scenario(name)
        print(f"{name}: n={sc.system.n} m={len(sc.system.fields)} "
              f"curve={sc.default_curve} alpha={sc.default_params.alpha:g} "
              f"epsilon={sc.default_params.epsilon:g} horizon={sc.horizon:g}")
    return EXIT_OK


def cmd_list_curves(_: argparse.Namespace) -> int:
    for name in CURVE_REGISTRY:
        curve = get_curve(name)
        print(f"{name}: dim={curve.dim} nu={curve.nu:.6g} horizon={curve.t_max:g}")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad flags; remap to a validation error."""

    def error(self, message: str):
        raise UsageError(message)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file; flags override its values")
    parser.add_argument("--scenario", help="scenario registry name")
    parser.add_argument("--curve",
                        help="curve registry name or component expression in t")
    parser.add_argument("--alpha", type=float, help="feedback gain")
    parser.add_argument("--epsilon", type=float, help="sampling period")
    parser.add_argument("--x0", help="initial state, comma separated")
    parser.add_argument("--horizon", type=float, help="simulation end time")
    parser.add_argument("--substeps", type=int,
                        help="integration substeps per sampling interval")
    parser.add_argument("--rho", type=float, help="tube radius for reports")
    parser.add_argument("--seed", type=int, help="seed for randomized checks")
    parser.add_argument("--output-dir", dest="output_dir",
                        help="directory for output files "
                             "(default: $OSCTRACK_OUTPUT_DIR or the working directory)")
    parser.add_argument("--semantics", choices=_SEMANTICS,
                        help="sampled (coefficients frozen per interval) or classic")


def build_parser() -> _Parser:
    parser = _Parser(prog="osctrack",
                     description="Oscillating-feedback tracking for driftless systems")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate one configuration")
    _add_common(p_run)
    p_run.set_defaults(func=cmd_run)

    p_cert = sub.add_parser("certify", help="evaluate the sampling-period certificate")
    _add_common(p_cert)
    p_cert.add_argument("--r", type=float, default=3.0, help="outer working radius")
    p_cert.add_argument("--rho-prime", dest="rho_prime", type=float, default=0.25)
    p_cert.add_argument("--delta", type=float, default=2.0)
    p_cert.add_argument("--delta-prime", dest="delta_prime", type=float, default=2.5)
    p_cert.add_argument("--lam", type=float, default=1.0,
                        help="decay rate the certificate must support")
    p_cert.add_argument("--nu", type=float,
                        help="curve velocity bound (default: from the curve)")
    p_cert.add_argument("--m1", type=float, help="sup of the field norms")
    p_cert.add_argument("--m2", type=float, help="sup over first-order field products")
    p_cert.add_argument("--m3", type=float, help="sup over second-order field products")
    p_cert.add_argument("--lipschitz", type=float, help="field Jacobian bound")
    p_cert.add_argument("--mu", type=float, help="gain-matrix inverse singular bound")
    p_cert.add_argument("--empirical", action="store_true",
                        help="estimate bounds by sampling the tube instead")
    p_cert.add_argument("--bound-samples", dest="bound_samples", type=int,
                        default=10_000, help="samples for --empirical")
    p_cert.set_defaults(func=cmd_certify)

    p_sweep = sub.add_parser("sweep", help="grid of runs over alpha and epsilon")
    _add_common(p_sweep)
    p_sweep.add_argument("--alphas", help="comma-separated gain list")
    p_sweep.add_argument("--epsilons", help="comma-separated sampling-period list")
    p_sweep.add_argument("--jobs", type=int, help="worker processes")
    p_sweep.set_defaults(func=cmd_sweep)

    sub.add_parser("list-scenarios").set_defaults(func=cmd_list_scenarios)
    sub.add_parser("list-curves").set_defaults(func=cmd_list_curves)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (UsageError, DomainError, DimensionMismatchError,
            DegenerateCurveError, RankConditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SimulationError as exc:
        print(f"simulation failed: {exc}", file=sys.stderr)
        return EXIT_SIMULATION
    except (CertificationError, UnsupportedSchemeError) as exc:
        print(f"certification failed: {exc}", file=sys.stderr)
        return EXIT_CERTIFICATION


if __name__ == "__main__":
    sys.exit(main())
