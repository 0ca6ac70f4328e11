"""Temperature histories: TTT quench paths, semi-infinite-body cooling curves, CSV tables.

Every path exposes ``temperature(t)`` and ``rate(t)``; both accept scalars or
numpy arrays of times in seconds and return kelvin (resp. K/s).
"""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from scipy.optimize import brentq
from scipy.special import erfcx

from .errors import DescriptorError, DomainError, ParseError

log = logging.getLogger(__name__)

#: Temperature at which the CCT cooling-rate descriptor is read (900 degC).
CCT_REFERENCE_T = 1173.15
FD_STEP = 1e-4

TTT_START_T = 1400.0
TTT_QUENCH_RATE = -500.0


class TemperaturePath:
    """Base class; subclasses implement :meth:`temperature`."""

    t_end = math.inf

    def temperature(self, t):
        raise NotImplementedError

    def rate(self, t, h: float = FD_STEP):
        """Central finite difference of :meth:`temperature` (one-sided at t=0)."""
        t = np.asarray(t, dtype=float)
        lo = np.maximum(t - h, 0.0)
        hi = t + h
        out = (self.temperature(hi) - self.temperature(lo)) / (hi - lo)
        return float(out) if out.ndim == 0 else out

    def first_crossing(self, level: float, t_max: float = 1e7) -> float:
        """Time of the first downward crossing of ``level``.

        Scans a logarithmic time grid, then refines with Brent's method.
        """
        T_start = float(self.temperature(0.0))
        if T_start < level:
            raise DescriptorError(f"path starts below {level} K")
        t_hi = min(t_max, self.t_end)
        grid = np.concatenate(([0.0], np.geomspace(1e-6, t_hi, 4000)))
        T = np.asarray(self.temperature(grid))
        below = np.nonzero(T < level)[0]
        if below.size == 0:
            raise DescriptorError(f"path never cools below {level} K")
        i = below[0]
        return brentq(lambda s: float(self.temperature(s)) - level, grid[i - 1], grid[i],
                      xtol=1e-13, rtol=1e-14)


class SampledPath(TemperaturePath):
    """Piecewise-linear path through ``(times, temps)``, constant outside the table."""

    def __init__(self, times, temps):
        times = np.asarray(times, dtype=float).ravel()
        temps = np.asarray(temps, dtype=float).ravel()
        if times.size == 0 or times.size != temps.size:
            raise DomainError("sampled path needs equally many times and temperatures")
        if not (np.all(np.isfinite(times)) and np.all(np.isfinite(temps))):
            raise DomainError("sampled path values must be finite")
        if np.any(np.diff(times) <= 0):
            raise DomainError("sampled path times must be strictly increasing")
        self.times = times
        self.temps = temps
        self.times.setflags(write=False)
        self.temps.setflags(write=False)
        self.t_end = float(times[-1])

    def temperature(self, t):
        out = np.interp(t, self.times, self.temps)
        return float(out) if np.ndim(out) == 0 else out

    def rate(self, t, h: float = 0.0):
        """Slope of the segment containing ``t`` (right-continuous, 0 outside)."""
        if self.times.size == 1:
            return 0.0 if np.ndim(t) == 0 else np.zeros(np.shape(t))
        slopes = np.diff(self.temps) / np.diff(self.times)
        t_arr = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.times, t_arr, side="right") - 1
        inside = (idx >= 0) & (idx < slopes.size)
        out = np.where(inside, slopes[np.clip(idx, 0, slopes.size - 1)], 0.0)
        return float(out) if out.ndim == 0 else out

    def first_crossing(self, level: float, t_max: float = math.inf) -> float:
        T = self.temps
        for i in range(T.size - 1):
            if T[i] >= level > T[i + 1]:
                return float(self.times[i] + (T[i] - level) / (T[i] - T[i + 1])
                             * (self.times[i + 1] - self.times[i]))
        raise DescriptorError(f"path never cools below {level} K")


def constant_path(T: float) -> SampledPath:
    return SampledPath([0.0], [T])


def linear_ramp(T_start: float, rate: float, T_end: float) -> SampledPath:
    """Constant-rate ramp from ``T_start`` to ``T_end`` followed by a hold."""
    if T_start == T_end:
        return constant_path(T_start)
    if rate == 0 or (T_end - T_start) / rate <= 0:
        raise DomainError("ramp rate has the wrong sign for the requested end temperature")
    return SampledPath([0.0, (T_end - T_start) / rate], [T_start, T_end])


def ttt_path(T_target: float, T_start: float = TTT_START_T,
             quench_rate: float = TTT_QUENCH_RATE) -> SampledPath:
    """Quench from 1400 K at -500 K/s to ``T_target`` and hold there."""
    if not math.isfinite(T_target):
        raise DomainError("target temperature must be finite")
    if not 350.0 <= T_target <= 1300.0 and T_target != T_start:
        log.warning("TTT target %.1f K lies outside the calibrated 350-1300 K range", T_target)
    if T_target > T_start:
        raise DomainError("TTT target must not exceed the start temperature")
    return linear_ramp(T_start, quench_rate, T_target)


# --------------------------------------------------------------------------
# semi-infinite body under surface convection


@dataclass(frozen=True)
class SibParams:
    """Semi-infinite body cooling parameters.

    ``a_g``, ``b_g``, ``c_g`` are in 1/m, ``diffusivity`` in mm^2/s, ``x`` in mm.
    """

    T0: float = 1323.0
    T_inf: float = 293.15
    diffusivity: float = 10.0
    a_g: float = 73.8
    b_g: float = -39.3
    c_g: float = 6.3
    s_g: float = 1.0
    x: float = 3.2

    def __post_init__(self):
        if not self.diffusivity > 0:
            raise DomainError("diffusivity must be positive")
        if not self.x >= 0:
            raise DomainError("evaluation depth must be nonnegative")
        if not self.T0 > self.T_inf:
            raise DomainError("T0 must exceed T_inf")


def g_of_T(T, p: SibParams):
    """Heat-transfer ratio h/k in 1/m, quadratic in the reduced temperature."""
    th = (np.asarray(T, dtype=float) - p.T_inf) / p.T_inf
    out = p.s_g * (p.a_g + p.b_g * th + p.c_g * th * th)
    return float(out) if np.ndim(out) == 0 else out


def _dg_dT(T, p: SibParams):
    th = (T - p.T_inf) / p.T_inf
    return p.s_g * (p.b_g + 2.0 * p.c_g * th) / p.T_inf


def sib_constant_g(t, x_mm: float, g_per_m, p: SibParams):
    """Analytic semi-infinite-body temperature for a fixed ``g``.

    The product ``exp(g x + g^2 a t) * erfc(u + g sqrt(a t))`` is evaluated as
    ``exp(-u^2) * erfcx(u + g sqrt(a t))`` which cannot overflow.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("time must be nonnegative")
    g = np.asarray(g_per_m, dtype=float) * 1e-3   # 1/mm
    # a negative g (trial parameters) overflows erfcx; the result is then -inf
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        st = np.sqrt(p.diffusivity * t)
        u = np.where(t > 0, x_mm / (2.0 * st), np.inf)
        v = u + g * st
        eu = np.exp(-u * u)
        bracket = np.where(t > 0, eu * (erfcx(u) - erfcx(v)), 0.0)
        out = (p.T_inf - p.T0) * bracket + p.T0
    return float(out) if out.ndim == 0 else out


def _sib_dT_dg(t, x_mm, g_per_m, p: SibParams):
    # derivative of sib_constant_g w.r.t. g (per 1/m)
    g = g_per_m * 1e-3
    st = np.sqrt(p.diffusivity * t)
    u = x_mm / (2.0 * st)
    v = u + g * st
    with np.errstate(over="ignore", invalid="ignore"):
        d = np.exp(-u * u) * ((x_mm + 2.0 * g * p.diffusivity * t) * erfcx(v)
                              - 2.0 * st / math.sqrt(math.pi))
    return (p.T0 - p.T_inf) * d * 1e-3


def sib_temperature(t, p: SibParams, tol: float = 1e-10, max_iter: int = 60):
    """Cooling curve with the temperature-dependent ``g(T)``.

    ``g`` is taken at the local temperature itself, i.e. ``T`` solves
    ``T = T_sib(x, t; g(T))``. This is the zero-lag limit of evaluating ``g`` at
    the previous time of a fine grid (see :func:`sib_temperature_lagged`). The
    root is unique because ``dT_sib/dT < 1`` over the whole range.
    """
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < 0) or not np.all(np.isfinite(t_arr)):
        raise DomainError("time must be finite and nonnegative")
    T = np.full(t_arr.shape, float(p.T0))
    pos = t_arr > 0
    if np.any(pos):
        tp = t_arr[pos]
        Tk = np.asarray(sib_constant_g(tp, p.x, g_of_T(p.T0, p), p), dtype=float)
        for _ in range(max_iter):
            g = g_of_T(Tk, p)
            F = sib_constant_g(tp, p.x, g, p)
            G = Tk - F
            dG = 1.0 - _sib_dT_dg(tp, p.x, g, p) * _dg_dT(Tk, p)
            step = G / np.maximum(dG, 0.05)
            Tk = np.clip(Tk - step, p.T_inf, p.T0)
            if np.max(np.abs(step)) < tol:
                break
        T[pos] = Tk
    return float(T[0]) if np.ndim(t) == 0 else T.reshape(np.shape(t))


def sib_temperature_lagged(t_grid, p: SibParams):
    """Sequential evaluation with ``g`` frozen at the previous grid temperature.

    Kept as an independent check of :func:`sib_temperature`; cost is linear in
    the grid length.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    out = np.empty_like(t_grid)
    T_prev = p.T0
    for i, ti in enumerate(t_grid):
        T_prev = sib_constant_g(ti, p.x, g_of_T(T_prev, p), p)
        out[i] = T_prev
    return out


class SibPath(TemperaturePath):
    """Semi-infinite-body cooling curve at depth ``params.x``."""

    def __init__(self, params: SibParams = SibParams()):
        self.params = params

    def temperature(self, t):
        return sib_temperature(t, self.params)

    def first_crossing(self, level: float, t_max: float = 1e7) -> float:
        p = self.params
        if not p.T_inf < level < p.T0:
            raise DescriptorError(f"sib curve never crosses {level} K")
        # at the crossing g is known exactly, so the curve is a fixed-g solution there
        g_c = g_of_T(level, p)
        t_hi = 1e-3
        while sib_constant_g(t_hi, p.x, g_c, p) > level:
            t_hi *= 2.0
            if t_hi > t_max:
                raise DescriptorError(f"sib curve does not reach {level} K before {t_max} s")
        return brentq(lambda s: sib_constant_g(s, p.x, g_c, p) - level, 0.0, t_hi,
                      xtol=1e-14, rtol=1e-15)


def cct_rate_of(path: TemperaturePath, level: float = CCT_REFERENCE_T, h: float = FD_STEP) -> float:
    """Cooling rate (K/s, negative) at the first downward crossing of 1173.15 K."""
    tc = path.first_crossing(level)
    lo = max(tc - h, 0.0)
    hi = tc + h
    return float((path.temperature(hi) - path.temperature(lo)) / (hi - lo))


def sib_path_for_rate(target_rate: float, base: SibParams = SibParams(),
                      s_bounds=(1e-2, 1e4)) -> SibPath:
    """Sib curve whose CCT descriptor equals ``target_rate``, found by bracketing s_g.

    The descriptor is monotone in ``s_g``; the root is located on log(s_g).
    """
    if target_rate >= 0:
        raise DomainError("target cooling rate must be negative")

    def resid(log_s):
        return cct_rate_of(SibPath(replace(base, s_g=math.exp(log_s)))) - target_rate

    lo, hi = math.log(s_bounds[0]), math.log(s_bounds[1])
    r_lo, r_hi = resid(lo), resid(hi)
    if not (r_lo > 0 > r_hi):
        raise DescriptorError(
            f"rate {target_rate} K/s not reachable for s_g in {s_bounds} at x={base.x} mm")
    log_s = brentq(resid, lo, hi, xtol=1e-12, rtol=1e-12)
    return SibPath(replace(base, s_g=math.exp(log_s)))


# --------------------------------------------------------------------------
# CSV


PATH_COLUMNS = ("time_s", "temp_K")


def read_path_rows(fh, source="<stream>"):
    """Parse a ``time_s,temp_K`` table from an open text stream."""
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty file", source, 1) from None
    header = [h.strip() for h in header]
    missing = [c for c in PATH_COLUMNS if c not in header]
    if missing:
        raise ParseError(f"missing column(s) {', '.join(missing)}", source, 1)
    it, iT = header.index("time_s"), header.index("temp_K")
    times, temps = [], []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) < len(header):
            raise ParseError("missing column value", source, lineno)
        try:
            t, T = float(row[it]), float(row[iT])
        except ValueError:
            raise ParseError("non-numeric cell", source, lineno) from None
        if not (math.isfinite(t) and math.isfinite(T)):
            raise ParseError("non-finite value", source, lineno)
        if times and t <= times[-1]:
            raise ParseError("time column not strictly increasing", source, lineno)
        times.append(t)
        temps.append(T)
    if not times:
        raise ParseError("no data rows", source, 2)
    return times, temps


def load_path_csv(file) -> SampledPath:
    """Load a temperature history CSV (header ``time_s,temp_K``)."""
    path = Path(file)
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot open temperature history: {exc.strerror}", str(path)) from None
    with fh:
        times, temps = read_path_rows(fh, str(path))
    return SampledPath(times, temps)
