"""TTT and CCT diagram synthesis from batches of single-point integrations.

Each row (TTT target temperature or CCT cooling rate) is simulated
independently; isolines are the per-row threshold crossings, ordered by
temperature (TTT) or by cooling rate (CCT). Rows may run in worker processes;
results are always sorted by row key so the output does not depend on the
number of workers.
"""
from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DomainError, IntegrationError
from .integrator import StepConfig, Trajectory, integrate, uniform_times
from .kinetics import k_alpha_s
from .params import DEFAULT_PARAMS, ModelParams
from .paths import (TTT_QUENCH_RATE, TTT_START_T, SibParams, SibPath, sib_path_for_rate,
                    ttt_path)
from .phase_model import (PhaseState, alpha_equilibrium, martensite_pseudo_eq)

log = logging.getLogger(__name__)

THRESHOLDS = (0.01, 0.05, 0.45, 0.55, 0.95, 0.99)
TTT_TARGETS = tuple(float(T) for T in np.arange(350.0, 1300.0, 10.0))   # 95 rows
CCT_RATES = tuple(float(r) for r in np.linspace(-1.0, -600.0, 150))
PHASES = ("alpha_s", "alpha_m", "beta")

# TTT step schedule
RAMP_DT = 1e-3
HOLD_GROWTH = 1.05
HOLD_DT_MAX = 10.0
TTT_HORIZON = 1e6
TTT_SETTLE_TOL = 1e-4
STABILITY = 0.2          # max dt * k_alpha_s * max(1, f) on holds

# CCT step schedule
CCT_MAX_DT_STEP = 0.5    # K per step
CCT_DT_MAX = 1.0
CCT_STOP_T = 400.0       # diffusion is frozen below, see cct_terminal_state
CCT_LEVEL = 0.01


@dataclass(frozen=True)
class Crossing:
    level: float
    t: float
    T: float
    direction: str       # "up" or "down"
    key: float = math.nan


@dataclass(frozen=True)
class IsolineSet:
    """Threshold crossings of one phase over all rows of a diagram."""

    phase: str
    normalization: str   # "normalized_by_alpha_eq" or "absolute"
    levels: tuple
    points: tuple = ()

    def curve(self, level: float, direction: Optional[str] = None, by: str = "T"):
        """Points of one isoline sorted by ``by`` (``"T"`` or ``"key"``)."""
        pts = [p for p in self.points if p.level == level
               and (direction is None or p.direction == direction)]
        return sorted(pts, key=lambda p: (getattr(p, by), p.t))

    def first_up(self, level: float) -> dict:
        """``{row key: time}`` of the first upward crossing of ``level``."""
        out = {}
        for p in self.points:
            if p.level == level and p.direction == "up" and p.key not in out:
                out[p.key] = p.t
        return out


def extract_crossings(traj: Trajectory, value_fn: Callable, thresholds: Sequence[float],
                      key: float = math.nan) -> list:
    """All crossings of ``value_fn(traj)`` through each threshold.

    An upward crossing is a sample pair with ``v0 < level <= v1``, a downward one
    ``v0 >= level > v1``; time and temperature are interpolated linearly.
    """
    v = np.asarray(value_fn(traj), dtype=float)
    t, T = traj.t, traj.T
    out = []
    if v.size < 2:
        return out
    v0, v1 = v[:-1], v[1:]
    for level in thresholds:
        up = np.nonzero((v0 < level) & (v1 >= level))[0]
        down = np.nonzero((v0 >= level) & (v1 < level))[0]
        for idx, direction in ((up, "up"), (down, "down")):
            for i in idx:
                w = (level - v[i]) / (v[i + 1] - v[i])
                out.append(Crossing(float(level), float(t[i] + w * (t[i + 1] - t[i])),
                                    float(T[i] + w * (T[i + 1] - T[i])), direction, key))
    out.sort(key=lambda c: (c.level, c.t))
    return out


def _map(fn, items, workers: int):
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# --------------------------------------------------------------------------
# TTT


def hold_dt_cap(T: float, params: ModelParams) -> float:
    k = k_alpha_s(T, params.diffusion) * max(1.0, params.diffusion.f)
    return HOLD_DT_MAX if k <= 0 else min(HOLD_DT_MAX, STABILITY / k)


def ttt_times(T_target: float, params: ModelParams = DEFAULT_PARAMS,
              horizon: float = TTT_HORIZON, ramp_dt: float = RAMP_DT) -> np.ndarray:
    """Step schedule: fixed ``ramp_dt`` on the quench, geometric growth on the hold."""
    t_ramp = (TTT_START_T - T_target) / -TTT_QUENCH_RATE
    ramp = uniform_times(0.0, t_ramp, ramp_dt) if t_ramp > 0 else np.array([0.0])
    cap = hold_dt_cap(T_target, params)
    n_grow = max(0, int(math.ceil(math.log(max(cap / ramp_dt, 1.0)) / math.log(HOLD_GROWTH))))
    grow = np.minimum(ramp_dt * HOLD_GROWTH ** np.arange(1, n_grow + 1), cap)
    t_grow = ramp[-1] + np.cumsum(grow)
    t_grow = t_grow[t_grow < horizon]
    start = t_grow[-1] if t_grow.size else ramp[-1]
    n_flat = int(math.ceil((horizon - start) / cap))
    t_flat = start + cap * np.arange(1, n_flat + 1)
    t_flat[-1:] = np.minimum(t_flat[-1:], horizon)
    return np.concatenate((ramp, t_grow, t_flat[t_flat <= horizon]))


@dataclass(frozen=True)
class TTTRow:
    T_target: float
    x_alpha_eq: float
    crossings: tuple
    final: PhaseState
    t_final: float


def _ttt_row(args) -> TTTRow:
    T_target, params, config, thresholds, horizon = args
    x_eq = alpha_equilibrium(T_target, params.equilibrium, params.temps)
    times = ttt_times(T_target, params, horizon, config.dt)
    t_ramp = (TTT_START_T - T_target) / -TTT_QUENCH_RATE
    if x_eq > 0:
        lo, hi = (1.0 - TTT_SETTLE_TOL) * x_eq, TTT_SETTLE_TOL * x_eq

        def settled(t, T, xs, xm, xb):
            return t >= t_ramp and xs >= lo and xm <= hi
    else:
        def settled(t, T, xs, xm, xb):
            return t >= t_ramp
    try:
        traj = integrate(PhaseState.pure_beta(), ttt_path(T_target), (0.0, times[-1]),
                         config, params, times=times, stop_when=settled)
    except IntegrationError as exc:
        raise IntegrationError(f"TTT row T={T_target:g} K: {exc}") from None
    crossings = []
    if x_eq > 0:
        crossings += [_tag(c, "alpha_s") for c in
                      extract_crossings(traj, lambda tr: tr.x_alpha_s / x_eq, thresholds, T_target)]
        crossings += [_tag(c, "alpha_m") for c in
                      extract_crossings(traj, lambda tr: tr.x_alpha_m / x_eq, thresholds, T_target)]
    return TTTRow(T_target, x_eq, tuple(crossings), traj.final_state(), float(traj.t[-1]))


def _tag(c: Crossing, phase: str):
    return phase, c


@dataclass(frozen=True)
class TTTDiagram:
    rows: tuple
    isolines: dict = field(default_factory=dict)    # phase -> IsolineSet


def generate_ttt(params: ModelParams = DEFAULT_PARAMS, T_targets: Sequence[float] = TTT_TARGETS,
                 thresholds: Sequence[float] = THRESHOLDS, config: StepConfig = StepConfig(),
                 workers: int = 1, horizon: float = TTT_HORIZON) -> TTTDiagram:
    """Isothermal-hold sweep; fractions normalized by the alpha equilibrium at the hold."""
    targets = sorted(float(T) for T in T_targets)
    if not targets:
        raise DomainError("no TTT target temperatures given")
    thresholds = tuple(float(x) for x in thresholds)
    jobs = [(T, params, config, thresholds, horizon) for T in targets]
    rows = _map(_ttt_row, jobs, workers)
    isolines = {}
    for phase in ("alpha_s", "alpha_m"):
        pts = tuple(c for row in rows for ph, c in row.crossings if ph == phase)
        isolines[phase] = IsolineSet(phase, "normalized_by_alpha_eq", thresholds, pts)
    return TTTDiagram(tuple(rows), isolines)


# --------------------------------------------------------------------------
# CCT


def cct_times(path, params: ModelParams = DEFAULT_PARAMS, T_stop: float = CCT_STOP_T,
              max_dT: float = CCT_MAX_DT_STEP, dt_max: float = CCT_DT_MAX) -> np.ndarray:
    """Step schedule along a cooling curve.

    Each step changes T by at most ``max_dT`` (estimated from a dense tabulation of
    the curve) and respects ``dt_max`` and the explicit stability cap.
    """
    t_stop = path.first_crossing(T_stop)
    tab_t = np.concatenate(([0.0], np.geomspace(1e-6, t_stop, 20000)))
    tab_T = np.asarray(path.temperature(tab_t), dtype=float)
    slope = np.abs(np.diff(tab_T) / np.diff(tab_t))
    d = params.diffusion
    out = [0.0]
    t = 0.0
    while t < t_stop:
        i = min(int(np.searchsorted(tab_t, t, side="right")), slope.size) - 1
        T = tab_T[i]
        k = k_alpha_s(T, d) * max(1.0, d.f)
        dt = dt_max
        if slope[i] > 0:
            dt = min(dt, max_dT / slope[i])
        if k > 0:
            dt = min(dt, STABILITY / k)
        t = min(t + dt, t_stop)
        out.append(t)
    return np.asarray(out)


def cct_terminal_state(state: PhaseState, params: ModelParams = DEFAULT_PARAMS) -> PhaseState:
    """Room-temperature state once diffusion is frozen: only martensite still forms."""
    T_room = params.temps.T_room
    xm = max(state.x_alpha_m, martensite_pseudo_eq(T_room, state.x_alpha_s,
                                                   params.equilibrium, params.temps))
    return PhaseState.solid(state.x_alpha_s, xm)


@dataclass(frozen=True)
class CCTCurve:
    rate: float
    s_g: float
    terminal: PhaseState
    crossings: tuple = ()


def simulate_cct_curve(rate: float, params: ModelParams = DEFAULT_PARAMS,
                       config: StepConfig = StepConfig(), sib: SibParams = SibParams(),
                       thresholds: Sequence[float] = (), record_every: int = 1,
                       uniform: bool = False):
    """One CCT curve from pure beta at T0; returns (CCTCurve, Trajectory).

    The step schedule is :func:`cct_times` unless ``uniform`` is set, in which
    case fixed steps of ``config.dt`` are taken down to the stop temperature.
    """
    path = sib_path_for_rate(rate, sib)
    if uniform:
        times = uniform_times(0.0, path.first_crossing(CCT_STOP_T), config.dt)
    else:
        times = cct_times(path, params)
    cfg = StepConfig(config.dt, config.scheme, config.cn_tolerance, config.cn_max_iters,
                     config.cn_damping, record_every)
    try:
        traj = integrate(PhaseState.pure_beta(), path, (0.0, times[-1]), cfg, params, times=times)
    except IntegrationError as exc:
        raise IntegrationError(f"CCT curve {rate:g} K/s: {exc}") from None
    crossings = []
    if thresholds:
        for phase in PHASES:
            col = "x_" + phase
            crossings += [(phase, c) for c in
                          extract_crossings(traj, lambda tr, col=col: getattr(tr, col),
                                            thresholds, rate)]
    curve = CCTCurve(float(rate), path.params.s_g, cct_terminal_state(traj.final_state(), params),
                     tuple(crossings))
    return curve, traj


def _cct_row(args) -> CCTCurve:
    rate, params, config, sib, thresholds = args
    return simulate_cct_curve(rate, params, config, sib, thresholds)[0]


@dataclass(frozen=True)
class CCTDiagram:
    curves: tuple                                   # sorted by |rate|
    isolines: dict = field(default_factory=dict)    # phase -> IsolineSet


def generate_cct(params: ModelParams = DEFAULT_PARAMS, rate_targets: Sequence[float] = CCT_RATES,
                 thresholds: Sequence[float] = THRESHOLDS, config: StepConfig = StepConfig(),
                 workers: int = 1, sib: SibParams = SibParams()) -> CCTDiagram:
    """Continuous-cooling sweep over semi-infinite-body curves; absolute fractions."""
    rates = sorted((float(r) for r in rate_targets), key=abs)
    if not rates or any(r >= 0 for r in rates):
        raise DomainError("CCT rates must be negative")
    thresholds = tuple(float(x) for x in thresholds)
    curves = _map(_cct_row, [(r, params, config, sib, thresholds) for r in rates], workers)
    isolines = {}
    for phase in PHASES:
        pts = tuple(c for cv in curves for ph, c in cv.crossings if ph == phase)
        isolines[phase] = IsolineSet(phase, "absolute", thresholds, pts)
    return CCTDiagram(tuple(curves), isolines)


def critical_rates(curves: Sequence[CCTCurve], refine: Optional[Callable] = None,
                   level: float = CCT_LEVEL, rate_tol: float = 0.5):
    """Critical cooling rates from per-curve terminal fractions.

    Returns ``(rate_pure_martensite, rate_pure_diffusional)``: the slowest rate
    whose terminal stable alpha stays below ``level`` and the fastest rate whose
    terminal martensite stays below ``level``. With ``refine(rate) -> PhaseState``
    the transition between grid neighbours is bisected to ``rate_tol``. Either
    value is None when no curve of the family qualifies.
    """
    curves = sorted(curves, key=lambda c: abs(c.rate))
    rates = [c.rate for c in curves]
    no_as = [c.terminal.x_alpha_s < level for c in curves]
    no_am = [c.terminal.x_alpha_m < level for c in curves]

    def locate(flags, pred, slowest):
        # slowest=True: last qualifying rate when scanning fast -> slow
        order = range(len(flags) - 1, -1, -1) if slowest else range(len(flags))
        best = None
        prev = None
        for i in order:
            if flags[i]:
                best = i
                prev = i
                continue
            if prev is not None:
                break
        if best is None:
            return None
        nxt = best - 1 if slowest else best + 1
        if refine is None or not 0 <= nxt < len(flags) or flags[nxt]:
            return rates[best]
        good, bad = rates[best], rates[nxt]
        while abs(good - bad) > rate_tol:
            mid = 0.5 * (good + bad)
            if pred(refine(mid)):
                good = mid
            else:
                bad = mid
        return good

    r_mart = locate(no_as, lambda s: s.x_alpha_s < level, slowest=True)
    r_diff = locate(no_am, lambda s: s.x_alpha_m < level, slowest=False)
    return r_mart, r_diff


def cct_refiner(params: ModelParams = DEFAULT_PARAMS, config: StepConfig = StepConfig(),
                sib: SibParams = SibParams()) -> Callable:
    def refine(rate):
        return simulate_cct_curve(rate, params, config, sib)[0].terminal
    return refine


# --------------------------------------------------------------------------
# CSV output


DIAGRAM_COLUMNS = ("phase", "level", "time_s", "temp_K", "direction")
TERMINAL_COLUMNS = ("rate_K_per_s", "x_alpha_s", "x_alpha_m", "x_beta")


def fmt(x: float) -> str:
    """Fixed 9-significant-digit formatting used by every CSV writer."""
    return f"{x:.9g}"


def write_isolines(fh, isolines: dict) -> int:
    """Write ``phase,level,time_s,temp_K,direction`` rows; returns the row count."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(DIAGRAM_COLUMNS)
    n = 0
    for phase in PHASES:
        if phase not in isolines:
            continue
        iso = isolines[phase]
        for level in iso.levels:
            for p in iso.curve(level, by="key"):
                w.writerow((phase, fmt(level), fmt(p.t), fmt(p.T), p.direction))
                n += 1
    return n


def write_terminals(fh, curves: Sequence[CCTCurve]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(TERMINAL_COLUMNS)
    for c in sorted(curves, key=lambda c: abs(c.rate)):
        s = c.terminal
        w.writerow((fmt(c.rate), fmt(s.x_alpha_s), fmt(s.x_alpha_m), fmt(s.x_beta)))
