"""Pointwise microstructure evaluation of externally computed temperature fields.

A points file lists ``point_id,x_mm,y_mm,z_mm``; the histories directory holds
one ``<point_id>.csv`` with ``time_s,temp_K`` per point. Every point is
integrated independently along its own history (one-way coupling: the
microstructure never feeds back into the temperatures).
"""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .diagrams import _map, fmt
from .errors import IntegrationError, ParseError
from .integrator import StepConfig, Trajectory, integrate, uniform_times
from .params import DEFAULT_PARAMS, ModelParams
from .paths import SampledPath, load_path_csv
from .phase_model import PhaseState

log = logging.getLogger(__name__)

POINT_COLUMNS = ("point_id", "x_mm", "y_mm", "z_mm")
FIELD_COLUMNS = POINT_COLUMNS + ("x_beta", "x_alpha_s", "x_alpha_m")
TRAJECTORY_COLUMNS = ("time_s", "temp_K", "x_beta", "x_alpha_s", "x_alpha_m", "x_liq")


@dataclass(frozen=True)
class FieldPoint:
    point_id: str
    x_mm: float
    y_mm: float
    z_mm: float


@dataclass(frozen=True)
class FieldRecord:
    point: FieldPoint
    terminal: PhaseState
    trajectory: Optional[str] = None      # file written for this point, if any


@dataclass(frozen=True)
class FieldResult:
    records: tuple

    def __len__(self):
        return len(self.records)

    def by_id(self) -> dict:
        return {r.point.point_id: r for r in self.records}


def load_points(file) -> list:
    """Read the points table; ids must be unique and usable as file names."""
    path = Path(file)
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot open points file: {exc.strerror}", str(path)) from None
    points, seen = [], set()
    with fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ParseError("empty file", str(path), 1) from None
        missing = [c for c in POINT_COLUMNS if c not in header]
        if missing:
            raise ParseError(f"missing column(s) {', '.join(missing)}", str(path), 1)
        idx = [header.index(c) for c in POINT_COLUMNS]
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < len(header):
                raise ParseError("missing column value", str(path), lineno)
            pid = row[idx[0]].strip()
            if not pid or "/" in pid or "\\" in pid or pid in (".", ".."):
                raise ParseError(f"invalid point id {pid!r}", str(path), lineno)
            if pid in seen:
                raise ParseError(f"duplicate point id {pid!r}", str(path), lineno)
            try:
                xyz = [float(row[i]) for i in idx[1:]]
            except ValueError:
                raise ParseError("non-numeric coordinate", str(path), lineno) from None
            if not all(math.isfinite(v) for v in xyz):
                raise ParseError("non-finite coordinate", str(path), lineno)
            seen.add(pid)
            points.append(FieldPoint(pid, *xyz))
    if not points:
        raise ParseError("no points listed", str(path), 2)
    return points


def history_file(histories_dir, point_id: str) -> Path:
    return Path(histories_dir) / f"{point_id}.csv"


def integrate_history(path: SampledPath, params: ModelParams = DEFAULT_PARAMS,
                      config: StepConfig = StepConfig(),
                      initial: PhaseState = PhaseState.pure_beta()) -> Trajectory:
    """Integrate over the full span of a sampled history.

    The grid is the uniform ``config.dt`` grid merged with the history's own
    sample times, so every kink of the piecewise-linear record is a step end.
    """
    t0, t1 = float(path.times[0]), float(path.times[-1])
    times = np.union1d(uniform_times(t0, t1, config.dt), path.times)
    return integrate(initial, path, (t0, t1), config, params, times=times)


def _point_job(args):
    point, hist, params, config, initial, traj_dir = args
    path = load_path_csv(hist)
    try:
        traj = integrate_history(path, params, config, initial)
    except IntegrationError as exc:
        raise IntegrationError(f"point {point.point_id!r}: {exc}") from None
    written = None
    if traj_dir is not None:
        written = str(Path(traj_dir) / f"{point.point_id}.csv")
        with open(written, "w", newline="", encoding="utf-8") as fh:
            write_trajectory(fh, traj)
    return FieldRecord(point, traj.final_state(), written)


def evaluate_field(points: Sequence[FieldPoint], histories_dir, params: ModelParams = DEFAULT_PARAMS,
                   config: StepConfig = StepConfig(), initial: PhaseState = PhaseState.pure_beta(),
                   workers: int = 1, trajectory_dir=None) -> FieldResult:
    """Integrate every point along its history; records keep the input order.

    All history files are checked for existence before any work starts.
    """
    hists = []
    for p in points:
        h = history_file(histories_dir, p.point_id)
        if not h.is_file():
            raise ParseError(f"no temperature history for point {p.point_id!r}", str(h))
        hists.append(h)
    if trajectory_dir is not None:
        Path(trajectory_dir).mkdir(parents=True, exist_ok=True)
    jobs = [(p, h, params, config, initial, trajectory_dir) for p, h in zip(points, hists)]
    return FieldResult(tuple(_map(_point_job, jobs, workers)))


def write_trajectory(fh, traj: Trajectory) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(TRAJECTORY_COLUMNS)
    for i in range(len(traj)):
        w.writerow([fmt(traj.t[i]), fmt(traj.T[i]), fmt(traj.x_beta[i]), fmt(traj.x_alpha_s[i]),
                    fmt(traj.x_alpha_m[i]), fmt(traj.x_liq[i])])


def write_field(fh, result: FieldResult) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(FIELD_COLUMNS)
    for r in result.records:
        p, s = r.point, r.terminal
        w.writerow([p.point_id, fmt(p.x_mm), fmt(p.y_mm), fmt(p.z_mm),
                    fmt(s.x_beta), fmt(s.x_alpha_s), fmt(s.x_alpha_m)])
