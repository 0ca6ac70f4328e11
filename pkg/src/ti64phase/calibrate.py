"""Levenberg-Marquardt parameter identification.

Three objectives are provided, each a callable mapping a parameter vector to a
residual vector:

* :class:`TTTObjective` fits ``[c_alpha_s, k1, k2, k3]`` to normalized stable
  alpha fractions observed at (temperature, log10 time) points of isothermal
  holds;
* :class:`HeatingObjective` fits ``[c_beta, f]`` to beta fractions measured
  along heating/cooling temperature records;
* :class:`CoolingObjective` fits ``[a_g, b_g, c_g]`` to semi-infinite-body
  cooling curves at known depths.

:func:`levenberg_marquardt` minimizes ``0.5 * sum(r**2)`` for any of them.
"""
from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from .diagrams import TTT_HORIZON, _map, _ttt_row, ttt_times
from .errors import CalibrationError, DomainError, IntegrationError, ParseError
from .integrator import StepConfig, integrate
from .params import DEFAULT_PARAMS, ModelParams
from .paths import SampledPath, SibParams, sib_temperature, ttt_path
from .phase_model import PhaseState, alpha_equilibrium

log = logging.getLogger(__name__)

TTT_NAMES = ("c_alpha_s", "k1", "k2", "k3")
HEATING_NAMES = ("c_beta", "f")
COOLING_NAMES = ("a_g", "b_g", "c_g")

# lower bounds of open intervals are nudged inside
TTT_BOUNDS = ((1.0 + 1e-6, 1e-12, 300.0, 1e-12), (50.0, 10.0, 2000.0, 1.0))
HEATING_BOUNDS = ((1.0 + 1e-6, 1e-12), (50.0, 100.0))
COOLING_BOUNDS = None

TTT_T_RANGE = (350.0, 1300.0)
# TTT hold steps are sized for diffusion this many times faster than the
# grid parameters, so one fixed grid serves the whole optimization
TTT_GRID_MARGIN = 4.0

#: Depth in mm of the lettered quench-experiment thermocouples.
COOLING_DEPTHS = {"a": 3.2, "b": 9.5, "c": 12.0, "d": 15.2}


# --------------------------------------------------------------------------
# engine


@dataclass(frozen=True)
class LMConfig:
    initial_damping: float = 1e-3
    damping_up: float = 10.0
    damping_down: float = 0.1
    max_iters: int = 200
    grad_tol: float = 1e-8
    step_tol: float = 1e-10
    fd_rel_step: float = 1e-6

    def __post_init__(self):
        for name in ("initial_damping", "damping_up", "damping_down", "grad_tol",
                     "step_tol", "fd_rel_step"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        if self.max_iters < 1:
            raise DomainError("max_iters must be at least 1")
        if not (self.damping_up > 1 and self.damping_down < 1):
            raise DomainError("damping_up must exceed 1 and damping_down be below 1")


@dataclass(frozen=True)
class LMResult:
    theta: np.ndarray
    cost: float
    iterations: int
    converged: bool
    message: str
    names: tuple = ()
    history: tuple = ()             # cost after every accepted iteration

    def as_dict(self) -> dict:
        names = self.names or tuple(f"theta{i}" for i in range(len(self.theta)))
        return {
            "parameters": {n: float(v) for n, v in zip(names, self.theta)},
            "final_cost": float(self.cost),
            "iterations": int(self.iterations),
            "converged": bool(self.converged),
            "message": self.message,
        }


# damping beyond this means no step along the gradient reduces the cost
_MAX_DAMPING = 1e16


def _evaluate(fun, theta, names):
    try:
        r = np.asarray(fun(theta), dtype=float).ravel()
    except IntegrationError as exc:
        raise CalibrationError(f"simulation failed at {_fmt_theta(theta, names)}: {exc}") from None
    if not np.all(np.isfinite(r)):
        raise CalibrationError(f"non-finite residual at {_fmt_theta(theta, names)}")
    return r


def _fmt_theta(theta, names):
    if names:
        return "theta=[" + ", ".join(f"{n}={v:.9g}" for n, v in zip(names, theta)) + "]"
    return "theta=[" + ", ".join(f"{v:.9g}" for v in theta) + "]"


def fd_jacobian(fun, theta, r0, rel_step, lower=None, upper=None, names=()):
    """Forward-difference Jacobian; steps that would leave the bounds go backward."""
    n = theta.size
    J = np.empty((r0.size, n))
    for j in range(n):
        h = rel_step * max(abs(theta[j]), 1.0)
        if upper is not None and theta[j] + h > upper[j]:
            h = -h
        tj = theta.copy()
        tj[j] += h
        if lower is not None and tj[j] < lower[j]:
            raise CalibrationError(f"bounds too tight for a difference step in parameter {j}")
        J[:, j] = (_evaluate(fun, tj, names) - r0) / (tj[j] - theta[j])
    return J


def levenberg_marquardt(fun: Callable, theta0, bounds=None, config: LMConfig = LMConfig(),
                        names: Sequence[str] = ()) -> LMResult:
    """Minimize ``0.5 * ||fun(theta)||**2``.

    Parameters
    ----------
    fun : callable
        Residual function ``theta -> r``.
    theta0 : array_like
        Starting point; must lie within ``bounds``.
    bounds : (lower, upper), optional
        Box constraints. Trial steps leaving the box are rejected like steps
        that increase the cost.
    config : LMConfig
        Damping schedule and tolerances.
    names : sequence of str
        Parameter names used in messages and reports.

    Returns
    -------
    LMResult
        ``converged`` is False when ``max_iters`` ran out first.

    Notes
    -----
    The damping is Marquardt's: ``lam * diag(J^T J)``. Each iteration first
    tries the undamped Gauss-Newton step and keeps it when the actual cost
    decrease is at least 3/4 of the predicted one; otherwise the damped step is
    retried with growing ``lam`` until the cost decreases. Convergence is
    declared when the cosine between the residual and every Jacobian column
    drops below ``grad_tol``, when the accepted step is below ``step_tol``
    relative to ``theta``, or when the cost is exactly zero.
    """
    names = tuple(names)
    theta = np.array(theta0, dtype=float).ravel()
    lower = upper = None
    if bounds is not None:
        lower = np.broadcast_to(np.asarray(bounds[0], dtype=float), theta.shape).copy()
        upper = np.broadcast_to(np.asarray(bounds[1], dtype=float), theta.shape).copy()
        if np.any(theta < lower) or np.any(theta > upper):
            raise CalibrationError(f"start point outside bounds: {_fmt_theta(theta, names)}")

    def inside(t):
        return lower is None or (np.all(t >= lower) and np.all(t <= upper))

    r = _evaluate(fun, theta, names)
    cost = 0.5 * float(r @ r)
    lam = config.initial_damping
    history = [cost]
    converged, message, it = False, "maximum number of iterations reached", 0
    for it in range(1, config.max_iters + 1):
        if cost == 0.0:
            converged, message, it = True, "zero residual", it - 1
            break
        J = fd_jacobian(fun, theta, r, config.fd_rel_step, lower, upper, names)
        g = J.T @ r
        col = np.sqrt(np.sum(J * J, axis=0))
        rn = math.sqrt(2.0 * cost)
        with np.errstate(divide="ignore", invalid="ignore"):
            cosines = np.where(col > 0, np.abs(g) / (col * rn), 0.0)
        if np.max(cosines) <= config.grad_tol:
            converged, message, it = True, "gradient tolerance satisfied", it - 1
            break
        D = col * col
        D = np.where(D > 0, D, max(float(np.max(D)), 1.0) * 1e-12)

        step = _gauss_newton(J, r)
        accepted = False
        if step is not None:
            trial = theta + step
            if inside(trial):
                r_new = _evaluate(fun, trial, names)
                c_new = 0.5 * float(r_new @ r_new)
                pred = cost - 0.5 * float(np.sum((r + J @ step) ** 2))
                if pred > 0 and (cost - c_new) >= 0.75 * pred:
                    accepted = True
                    lam = max(lam * config.damping_down, 1e-300)
        while not accepted:
            step = _damped_step(J, r, lam, D)
            trial = theta + step
            if inside(trial):
                r_new = _evaluate(fun, trial, names)
                c_new = 0.5 * float(r_new @ r_new)
                if c_new < cost:
                    accepted = True
                    lam = max(lam * config.damping_down, 1e-300)
                    break
            lam *= config.damping_up
            if lam > _MAX_DAMPING:
                break
        if not accepted:
            message = "no cost decrease along the damped direction"
            # a stalled search at the noise floor of the residuals counts as converged
            converged = bool(np.max(cosines) <= math.sqrt(config.grad_tol))
            break
        small = np.linalg.norm(step) <= config.step_tol * (np.linalg.norm(theta) + config.step_tol)
        theta, r, cost = trial, r_new, c_new
        history.append(cost)
        log.debug("LM iteration %d: cost=%.6e lambda=%.3e", it, cost, lam)
        if small:
            converged, message = True, "step tolerance satisfied"
            break
    return LMResult(theta, cost, it, converged, message, names, tuple(history))


def _gauss_newton(J, r):
    step, *_ = np.linalg.lstsq(J, -r, rcond=None)
    return step if np.all(np.isfinite(step)) else None


def _damped_step(J, r, lam, D):
    A = np.vstack([J, np.diag(np.sqrt(lam * D))])
    b = np.concatenate([-r, np.zeros(J.shape[1])])
    step, *_ = np.linalg.lstsq(A, b, rcond=None)
    return step


# --------------------------------------------------------------------------
# observations


@dataclass(frozen=True)
class TTTObservations:
    """Normalized stable alpha fractions at (temperature, log10 time) points."""

    temp_K: np.ndarray
    log10_time_s: np.ndarray
    frac_norm: np.ndarray

    def __post_init__(self):
        arrs = [np.asarray(getattr(self, n), dtype=float).ravel()
                for n in ("temp_K", "log10_time_s", "frac_norm")]
        if not arrs[0].size or len({a.size for a in arrs}) != 1:
            raise CalibrationError("TTT observations must be nonempty columns of equal length")
        if not all(np.all(np.isfinite(a)) for a in arrs):
            raise CalibrationError("TTT observations must be finite")
        for name, a in zip(("temp_K", "log10_time_s", "frac_norm"), arrs):
            object.__setattr__(self, name, a)

    def __len__(self):
        return self.temp_K.size


@dataclass(frozen=True)
class Series:
    """One measured record: times, temperatures and an optional observed fraction."""

    label: str
    time_s: np.ndarray
    temp_K: np.ndarray
    x_beta: Optional[np.ndarray] = None

    def __post_init__(self):
        t = np.asarray(self.time_s, dtype=float).ravel()
        T = np.asarray(self.temp_K, dtype=float).ravel()
        if not t.size or t.size != T.size:
            raise CalibrationError(f"series {self.label!r}: empty or ragged columns")
        if np.any(np.diff(t) <= 0):
            raise CalibrationError(f"series {self.label!r}: times must be strictly increasing")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(T))):
            raise CalibrationError(f"series {self.label!r}: non-finite values")
        object.__setattr__(self, "time_s", t)
        object.__setattr__(self, "temp_K", T)
        if self.x_beta is not None:
            x = np.asarray(self.x_beta, dtype=float).ravel()
            if x.size != t.size or not np.all(np.isfinite(x)):
                raise CalibrationError(f"series {self.label!r}: bad x_beta column")
            object.__setattr__(self, "x_beta", x)


def _read_table(file, columns):
    path = Path(file)
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot open: {exc.strerror}", str(path)) from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ParseError("empty file", str(path), 1) from None
        missing = [c for c in columns if c not in header]
        if missing:
            raise ParseError(f"missing column(s) {', '.join(missing)}", str(path), 1)
        idx = [header.index(c) for c in columns]
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < len(header):
                raise ParseError("missing column value", str(path), lineno)
            rows.append((lineno, [row[i].strip() for i in idx]))
    if not rows:
        raise ParseError("no data rows", str(path), 2)
    return str(path), rows


def _num(cell, source, lineno):
    try:
        v = float(cell)
    except ValueError:
        raise ParseError(f"non-numeric cell {cell!r}", source, lineno) from None
    if not math.isfinite(v):
        raise ParseError("non-finite value", source, lineno)
    return v


def load_ttt_csv(file) -> TTTObservations:
    """Read ``temp_K,log10_time_s,frac_norm``."""
    source, rows = _read_table(file, ("temp_K", "log10_time_s", "frac_norm"))
    vals = np.array([[_num(c, source, ln) for c in cells] for ln, cells in rows])
    return TTTObservations(vals[:, 0], vals[:, 1], vals[:, 2])


def _load_series(file, columns):
    source, rows = _read_table(file, columns)
    grouped: dict = {}
    for ln, cells in rows:
        label = cells[0]
        if not label:
            raise ParseError("empty series label", source, ln)
        vals = [_num(c, source, ln) for c in cells[1:]]
        prev = grouped.get(label)
        if prev and vals[0] <= prev[-1][0]:
            raise ParseError(f"series {label!r}: time not strictly increasing", source, ln)
        grouped.setdefault(label, []).append(vals)
    return {k: np.array(v) for k, v in grouped.items()}


def load_heating_csv(file) -> list:
    """Read ``series,time_s,temp_K,x_beta`` into one :class:`Series` per label."""
    groups = _load_series(file, ("series", "time_s", "temp_K", "x_beta"))
    return [Series(k, v[:, 0], v[:, 1], v[:, 2]) for k, v in sorted(groups.items())]


def load_cooling_csv(file) -> list:
    """Read ``series,time_s,temp_K`` into one :class:`Series` per label."""
    groups = _load_series(file, ("series", "time_s", "temp_K"))
    return [Series(k, v[:, 0], v[:, 1]) for k, v in sorted(groups.items())]


def write_ttt_csv(file, obs: TTTObservations) -> None:
    with open(file, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("temp_K", "log10_time_s", "frac_norm"))
        for row in zip(obs.temp_K, obs.log10_time_s, obs.frac_norm):
            w.writerow([repr(float(v)) for v in row])


def write_series_csv(file, series: Sequence[Series], with_beta: bool) -> None:
    with open(file, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("series", "time_s", "temp_K") + (("x_beta",) if with_beta else ()))
        for s in series:
            for i in range(s.time_s.size):
                row = [s.label, repr(float(s.time_s[i])), repr(float(s.temp_K[i]))]
                if with_beta:
                    row.append(repr(float(s.x_beta[i])))
                w.writerow(row)


def series_depth(label: str) -> float:
    """Depth in mm for a cooling series label: a letter a-d or a number."""
    key = label.strip().lower()
    if key in COOLING_DEPTHS:
        return COOLING_DEPTHS[key]
    try:
        x = float(key)
    except ValueError:
        raise CalibrationError(f"unknown cooling series {label!r}; use a-d or a depth in mm") from None
    if not (math.isfinite(x) and x >= 0):
        raise CalibrationError(f"invalid depth for cooling series {label!r}")
    return x


# --------------------------------------------------------------------------
# objectives


def _ttt_series(args):
    T, times, obs_idx, params, config = args
    x_eq = alpha_equilibrium(T, params.equilibrium, params.temps)
    if x_eq <= 0:
        return np.zeros(obs_idx.size)
    traj = integrate(PhaseState.pure_beta(), ttt_path(T), (0.0, times[-1]), config, params,
                     times=times)
    return traj.x_alpha_s[obs_idx] / x_eq


class TTTObjective:
    """Normalized stable alpha residuals ``simulated - observed`` on isothermal holds.

    One integration per distinct observation temperature. Observation times
    are ``10**log10_time_s`` seconds from the start of the quench from 1400 K;
    they are inserted into a step schedule that is built once, from
    ``grid_params``, and then kept fixed so that residuals vary smoothly with
    the parameters.
    """

    names = TTT_NAMES
    bounds = TTT_BOUNDS

    def __init__(self, obs: TTTObservations, params: ModelParams = DEFAULT_PARAMS,
                 config: StepConfig = StepConfig(), grid_params: Optional[ModelParams] = None,
                 workers: int = 1):
        lo, hi = TTT_T_RANGE
        bad = obs.temp_K[(obs.temp_K < lo) | (obs.temp_K > hi)]
        if bad.size:
            raise CalibrationError(f"observation temperature {bad[0]:g} K outside the "
                                   f"{lo:g}-{hi:g} K TTT grid")
        self.obs = obs
        self.params = params
        self.config = config
        self.workers = workers
        gp = grid_params or params
        gp = gp.with_diffusion(k1=gp.diffusion.k1 * TTT_GRID_MARGIN)
        t_obs = 10.0 ** obs.log10_time_s
        self._groups = []
        for T in np.unique(obs.temp_K):
            sel = np.flatnonzero(obs.temp_K == T)
            ts = t_obs[sel]
            grid = ttt_times(float(T), gp, horizon=float(ts.max()), ramp_dt=config.dt)
            times = np.union1d(grid, ts)
            self._groups.append((float(T), sel, times, np.searchsorted(times, ts)))

    def model_params(self, theta) -> ModelParams:
        c, k1, k2, k3 = (float(v) for v in theta)
        try:
            return self.params.with_diffusion(c_alpha_s=c, k1=k1, k2=k2, k3=k3)
        except DomainError as exc:
            raise CalibrationError(f"{exc} at {_fmt_theta(theta, self.names)}") from None

    def simulate(self, theta) -> np.ndarray:
        """Simulated normalized fractions at the observation points."""
        params = self.model_params(theta)
        jobs = [(T, times, idx, params, self.config) for T, _, times, idx in self._groups]
        out = np.empty(len(self.obs))
        for (_, sel, _, _), vals in zip(self._groups, _map(_ttt_series, jobs, self.workers)):
            out[sel] = vals
        return out

    def __call__(self, theta) -> np.ndarray:
        return self.simulate(theta) - self.obs.frac_norm


def _refined_times(t_obs, dt):
    """Observation times with uniform substeps of at most ``dt`` in between.

    Returns the refined grid and the positions of the observations in it.
    """
    counts = np.maximum(1, np.ceil(np.diff(t_obs) / dt - 1e-9).astype(int))
    pieces = [t_obs[:1]] + [a + (b - a) * np.arange(1, n + 1) / n
                            for a, b, n in zip(t_obs[:-1], t_obs[1:], counts)]
    return np.concatenate(pieces), np.concatenate([[0], np.cumsum(counts)])


def trapezoid_weights(t: np.ndarray) -> np.ndarray:
    """Weights ``w`` with ``sum(w * y)`` the trapezoidal integral of samples ``y``."""
    w = np.zeros_like(t)
    if t.size > 1:
        d = np.diff(t)
        w[:-1] += 0.5 * d
        w[1:] += 0.5 * d
    else:
        w[:] = 1.0
    return w


def _heating_series(args):
    s, params, config, initial = args
    times, idx = _refined_times(s.time_s, config.dt)
    path = SampledPath(s.time_s, s.temp_K)
    traj = integrate(initial, path, (times[0], times[-1]), config, params, times=times)
    return traj.x_beta[idx]


class HeatingObjective:
    """Beta fraction residuals ``observed - simulated`` along measured temperature records.

    Each series is integrated along its own temperature record (linear
    interpolation, substeps of at most ``config.dt``), starting from the
    lamellar state ``x_alpha_s = 0.9``. Residuals carry the square root of the
    trapezoidal weights, so the cost approximates the time integral of the
    squared mismatch summed over series.
    """

    names = HEATING_NAMES
    bounds = HEATING_BOUNDS

    def __init__(self, series: Sequence[Series], params: ModelParams = DEFAULT_PARAMS,
                 config: StepConfig = StepConfig(),
                 initial: PhaseState = PhaseState.solid(0.9, 0.0), workers: int = 1):
        if not series:
            raise CalibrationError("no heating series given")
        for s in series:
            if s.x_beta is None:
                raise CalibrationError(f"heating series {s.label!r} has no x_beta column")
        self.series = tuple(series)
        self.params = params
        self.config = config
        self.initial = initial
        self.workers = workers
        self._sqrt_w = [np.sqrt(trapezoid_weights(s.time_s)) for s in self.series]

    def model_params(self, theta) -> ModelParams:
        c, f = (float(v) for v in theta)
        try:
            return self.params.with_diffusion(c_beta=c, f=f)
        except DomainError as exc:
            raise CalibrationError(f"{exc} at {_fmt_theta(theta, self.names)}") from None

    def simulate(self, theta) -> list:
        params = self.model_params(theta)
        jobs = [(s, params, self.config, self.initial) for s in self.series]
        return _map(_heating_series, jobs, self.workers)

    def __call__(self, theta) -> np.ndarray:
        sims = self.simulate(theta)
        return np.concatenate([(s.x_beta - x) * w
                               for s, x, w in zip(self.series, sims, self._sqrt_w)])


class CoolingObjective:
    """Temperature residuals ``observed - T_sib(depth, t)`` with ``s_g = 1``."""

    names = COOLING_NAMES
    bounds = COOLING_BOUNDS

    def __init__(self, series: Sequence[Series], base: SibParams = SibParams()):
        if not series:
            raise CalibrationError("no cooling series given")
        self.series = tuple(series)
        self.base = replace(base, s_g=1.0)
        self._depths = [series_depth(s.label) for s in self.series]

    def simulate(self, theta) -> list:
        a, b, c = (float(v) for v in theta)
        out = []
        for s, x in zip(self.series, self._depths):
            p = replace(self.base, a_g=a, b_g=b, c_g=c, x=x)
            out.append(np.atleast_1d(sib_temperature(s.time_s, p)))
        return out

    def __call__(self, theta) -> np.ndarray:
        return np.concatenate([s.temp_K - T for s, T in zip(self.series, self.simulate(theta))])


def ttt_objective(theta, obs: TTTObservations, config: StepConfig = StepConfig(),
                  params: ModelParams = DEFAULT_PARAMS) -> np.ndarray:
    return TTTObjective(obs, params, config)(theta)


def heating_objective(theta, series: Sequence[Series], params: ModelParams = DEFAULT_PARAMS,
                      config: StepConfig = StepConfig()) -> np.ndarray:
    return HeatingObjective(series, params, config)(theta)


def cooling_objective(theta, series: Sequence[Series], base: SibParams = SibParams()) -> np.ndarray:
    return CoolingObjective(series, base)(theta)


def calibrate(objective, theta0, config: LMConfig = LMConfig()) -> LMResult:
    """Run :func:`levenberg_marquardt` on one of the objectives above."""
    return levenberg_marquardt(objective, theta0, objective.bounds, config, objective.names)


def write_report(file, result: LMResult, kind: str) -> None:
    report = {"kind": kind, **result.as_dict()}
    with open(file, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=False)
        fh.write("\n")


# --------------------------------------------------------------------------
# synthetic data


SYNTH_TTT_TEMPS = tuple(float(T) for T in np.arange(700.0, 1201.0, 50.0))
SYNTH_TTT_LEVELS = (0.05, 0.25, 0.5, 0.75, 0.95)


def synthetic_ttt(params: ModelParams = DEFAULT_PARAMS, temps: Sequence[float] = SYNTH_TTT_TEMPS,
                  levels: Sequence[float] = SYNTH_TTT_LEVELS,
                  config: StepConfig = StepConfig()) -> TTTObservations:
    """Noiseless TTT observations generated by the forward model.

    Sample times are the crossing times of ``levels`` rounded to 4 decimals in
    log10; fractions are then evaluated at exactly those times with the same
    machinery as :class:`TTTObjective`.
    """
    rows_T, rows_lt = [], []
    for T in temps:
        row = _ttt_row((float(T), params, config, tuple(levels), TTT_HORIZON))
        for phase, c in row.crossings:
            if phase == "alpha_s" and c.direction == "up":
                rows_T.append(float(T))
                rows_lt.append(round(math.log10(c.t), 4))
    provisional = TTTObservations(rows_T, rows_lt, np.zeros(len(rows_T)))
    obj = TTTObjective(provisional, params, config)
    d = params.diffusion
    frac = obj.simulate([d.c_alpha_s, d.k1, d.k2, d.k3])
    return TTTObservations(provisional.temp_K, provisional.log10_time_s, frac)


#: Heating records of the synthetic suite: label -> (peak rise in K, time to peak in s).
SYNTH_HEATING = {"4.5": (1450.0, 20.0), "5.0": (1250.0, 22.0), "5.5": (1100.0, 24.0)}


def heating_pulse(t, rise: float, t_peak: float, T0: float = 293.15):
    """Smooth heat-up and cool-down ``T0 + rise * (t/t_peak) * exp(1 - t/t_peak)``."""
    t = np.asarray(t, dtype=float)
    return T0 + rise * (t / t_peak) * np.exp(1.0 - t / t_peak)


def synthetic_heating(params: ModelParams = DEFAULT_PARAMS, t_end: float = 120.0,
                      spacing: float = 1.0, config: StepConfig = StepConfig()) -> list:
    """Noiseless beta-fraction records along three heating pulses."""
    t = np.arange(0.0, t_end + 0.5 * spacing, spacing)
    series = [Series(label, t, heating_pulse(t, rise, tp), np.zeros_like(t))
              for label, (rise, tp) in SYNTH_HEATING.items()]
    obj = HeatingObjective(series, params, config)
    d = params.diffusion
    sims = obj.simulate([d.c_beta, d.f])
    return [replace(s, x_beta=x) for s, x in zip(series, sims)]


def synthetic_cooling(base: SibParams = SibParams(), t_end: float = 200.0,
                      spacing: float = 2.0) -> list:
    """Noiseless cooling curves at the four thermocouple depths."""
    t = np.arange(0.0, t_end + 0.5 * spacing, spacing)
    base = replace(base, s_g=1.0)
    return [Series(label, t, np.atleast_1d(sib_temperature(t, replace(base, x=x))))
            for label, x in COOLING_DEPTHS.items()]


def data_file(name: str) -> Path:
    """Path of a dataset shipped with the package."""
    return Path(__file__).with_name("data") / name
