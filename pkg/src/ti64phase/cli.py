"""Command-line entry point: ``ti64phase {simulate,ttt,cct,calibrate,field}``.

Exit codes: 0 success, 2 bad input (parse, config or data errors), 3 failed
integration or objective evaluation, 4 calibration finished without converging.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import calibrate as cal
from .config import RunConfig, load_config, with_cli_overrides
from .diagrams import (cct_refiner, critical_rates, generate_cct, generate_ttt, write_isolines,
                       write_terminals)
from .errors import CalibrationError, ConfigError, DomainError, IntegrationError, ParseError
from .field import evaluate_field, integrate_history, load_points, write_field, write_trajectory
from .paths import load_path_csv

log = logging.getLogger("ti64phase")

EXIT_OK, EXIT_INPUT, EXIT_RUN, EXIT_NOT_CONVERGED = 0, 2, 3, 4


class InputError(Exception):
    """Raised for calibration problems detected before the solver starts."""


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--out", help="output directory (default: config run.out or .)")
    p.add_argument("--threads", type=int, help="worker processes for sweeps and fields")
    p.add_argument("--dt", type=float, help="time step in s")
    p.add_argument("--scheme", choices=("euler", "cn"), help="time integration scheme")
    p.add_argument("-v", "--verbose", action="count", default=0)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="ti64phase", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="integrate one temperature history")
    p.add_argument("path", help="CSV with time_s,temp_K")
    p.add_argument("--output", default="trajectory.csv", help="file name inside --out")

    sub.add_parser("ttt", parents=[common], help="isothermal transformation diagram")

    p = sub.add_parser("cct", parents=[common], help="continuous cooling diagram")
    p.add_argument("--no-refine", action="store_true",
                   help="report critical rates on the sweep grid without bisection")

    p = sub.add_parser("calibrate", parents=[common], help="fit parameters with Levenberg-Marquardt")
    p.add_argument("kind", choices=("ttt", "heating", "cooling"))
    p.add_argument("data", help="observation CSV")
    p.add_argument("--start", help="comma-separated start values (default: configured values)")

    p = sub.add_parser("field", parents=[common], help="terminal states for a set of points")
    p.add_argument("points", help="CSV with point_id,x_mm,y_mm,z_mm")
    p.add_argument("histories", help="directory with one <point_id>.csv per point")
    p.add_argument("--trajectories", action="store_true",
                   help="also write per-point trajectories to <out>/trajectories/")
    return parser


def _config(args) -> RunConfig:
    cfg = load_config(args.config)
    cfg = with_cli_overrides(cfg, args.dt, args.scheme, args.threads, args.out)
    if cfg.threads < 1:
        raise ConfigError("--threads must be at least 1")
    cfg.out.mkdir(parents=True, exist_ok=True)
    return cfg


def cmd_simulate(args, cfg: RunConfig) -> int:
    path = load_path_csv(args.path)
    traj = integrate_history(path, cfg.params, cfg.step, cfg.initial_state)
    out = cfg.out / args.output
    with open(out, "w", newline="", encoding="utf-8") as fh:
        write_trajectory(fh, traj)
    log.info("wrote %s (%d rows)", out, len(traj))
    return EXIT_OK


def cmd_ttt(args, cfg: RunConfig) -> int:
    diagram = generate_ttt(cfg.params, config=cfg.step, workers=cfg.threads)
    out = cfg.out / "ttt_isolines.csv"
    with open(out, "w", newline="", encoding="utf-8") as fh:
        n = write_isolines(fh, diagram.isolines)
    log.info("wrote %s (%d crossings over %d holds)", out, n, len(diagram.rows))
    return EXIT_OK


def cmd_cct(args, cfg: RunConfig) -> int:
    diagram = generate_cct(cfg.params, config=cfg.step, workers=cfg.threads, sib=cfg.sib)
    with open(cfg.out / "cct_isolines.csv", "w", newline="", encoding="utf-8") as fh:
        write_isolines(fh, diagram.isolines)
    with open(cfg.out / "cct_terminal.csv", "w", newline="", encoding="utf-8") as fh:
        write_terminals(fh, diagram.curves)
    refine = None if args.no_refine else cct_refiner(cfg.params, cfg.step, cfg.sib)
    r_mart, r_diff = critical_rates(diagram.curves, refine)
    report = {"rate_pure_martensite": r_mart, "rate_pure_diffusional": r_diff,
              "level": 0.01, "refined": refine is not None}
    with open(cfg.out / "critical_rates.json", "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    log.info("critical rates: martensite %s K/s, diffusional %s K/s", r_mart, r_diff)
    return EXIT_OK


def _objective(kind: str, data: str, cfg: RunConfig):
    if kind == "ttt":
        return cal.TTTObjective(cal.load_ttt_csv(data), cfg.params, cfg.step, workers=cfg.threads)
    if kind == "heating":
        return cal.HeatingObjective(cal.load_heating_csv(data), cfg.params, cfg.step,
                                    workers=cfg.threads)
    return cal.CoolingObjective(cal.load_cooling_csv(data), cfg.sib)


def _default_start(kind: str, cfg: RunConfig) -> list:
    d, s = cfg.params.diffusion, cfg.sib
    return {"ttt": [d.c_alpha_s, d.k1, d.k2, d.k3],
            "heating": [d.c_beta, d.f],
            "cooling": [s.a_g, s.b_g, s.c_g]}[kind]


def cmd_calibrate(args, cfg: RunConfig) -> int:
    try:
        objective = _objective(args.kind, args.data, cfg)
    except CalibrationError as exc:
        raise InputError(str(exc)) from None
    if args.start:
        try:
            theta0 = [float(v) for v in args.start.split(",")]
        except ValueError:
            raise ConfigError(f"--start must be comma-separated numbers, got {args.start!r}") from None
    else:
        theta0 = _default_start(args.kind, cfg)
    if len(theta0) != len(objective.names):
        raise ConfigError(f"--start needs {len(objective.names)} values "
                          f"({', '.join(objective.names)})")
    if objective.bounds is not None:
        lo, hi = (np.asarray(b) for b in objective.bounds)
        if np.any(np.asarray(theta0) < lo) or np.any(np.asarray(theta0) > hi):
            raise ConfigError("start values outside the parameter bounds")
    result = cal.calibrate(objective, theta0, cfg.lm)
    out = cfg.out / f"calibration_{args.kind}.json"
    cal.write_report(out, result, args.kind)
    log.info("%s: %s after %d iterations, cost %.3g", args.kind, result.message,
             result.iterations, result.cost)
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def cmd_field(args, cfg: RunConfig) -> int:
    points = load_points(args.points)
    traj_dir = cfg.out / "trajectories" if args.trajectories else None
    result = evaluate_field(points, args.histories, cfg.params, cfg.step, cfg.initial_state,
                            cfg.threads, traj_dir)
    out = cfg.out / "field.csv"
    with open(out, "w", newline="", encoding="utf-8") as fh:
        write_field(fh, result)
    log.info("wrote %s (%d points)", out, len(result))
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "ttt": cmd_ttt, "cct": cmd_cct,
            "calibrate": cmd_calibrate, "field": cmd_field}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _config(args)
        return COMMANDS[args.command](args, cfg)
    except (ParseError, ConfigError, DomainError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (IntegrationError, CalibrationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUN
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
