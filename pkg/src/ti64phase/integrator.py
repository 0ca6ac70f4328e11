"""Time-discrete evolution of the phase fractions along a temperature history.

One step from ``t_n`` to ``t_{n+1}``:

1. diffusional update of stable alpha and martensite with the rates of the
   previous step (forward Euler) or with the trapezoidal average of old and new
   rates (Crank-Nicolson), followed by clipping to ``[0, x_max]``, ratio
   preserving rescaling of the total alpha, and beta as the complement;
2. nucleation: stable alpha is seeded at the first step of a cooling episode
   where the alpha equilibrium becomes positive, and new beta once alpha
   exceeds its equilibrium with no beta beyond ``1 - x_max``; both use the
   closed-form isothermal solution from zero, and a nucleating step is always
   taken explicitly;
3. instantaneous martensite formation (beta -> martensite) up to the
   pseudo-equilibrium;
4. instantaneous martensite dissolution (martensite -> beta) up to the beta
   equilibrium;
5. evaluation of the diffusional rates at the new state.

Above the solidus the state follows the solid fraction directly: melting
erases the solid-state history, and resolidification restarts from pure beta.

The functions operating on :class:`PhaseState` are the readable reference;
:func:`integrate` runs an equivalent float-only kernel for speed.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, IntegrationError
from .kinetics import (DiffusionParams, TransformationRates, ZERO_RATES, k_alpha_s, k_beta,
                       transformation_rates)
from .params import DEFAULT_PARAMS, ModelParams
from .paths import TemperaturePath
from .phase_model import (PhaseState, alpha_equilibrium, beta_equilibrium,
                          martensite_pseudo_eq, solid_fraction)


# Smallest beta nucleus that is applied. ``x_beta`` is stored as
# ``1 - x_alpha``, so a smaller nucleus and its first growth increments fall
# below the float resolution of ``x_alpha``; below this level the new beta is
# treated as not yet nucleated and the nucleation clock keeps running.
BETA_SEED_FLOOR = 1e-8

# Crank-Nicolson iterations stop when every rate has settled to the relative
# tolerance or its contribution to the step is below this absolute level.
CN_ABS_FLOOR = 1e-16

# The relaxation factor of the Crank-Nicolson iteration starts at
# ``cn_damping`` and is then adapted by Aitken's rule, kept within these bounds.
# Stiff steps need strong damping; near-zero stable alpha the growth law is
# non-Lipschitz and the plain iteration contracts too slowly.
RELAX_BOUNDS = (1e-3, 10.0)


class Scheme(str, enum.Enum):
    EULER = "euler"
    CRANK_NICOLSON = "cn"


@dataclass(frozen=True)
class StepConfig:
    dt: float = 1e-3
    scheme: Scheme = Scheme.EULER
    cn_tolerance: float = 1e-10
    cn_max_iters: int = 50
    cn_damping: float = 0.5
    record_every: int = 1

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        if not self.dt > 0:
            raise DomainError("dt must be positive")
        if not self.cn_tolerance > 0:
            raise DomainError("cn_tolerance must be positive")
        if self.cn_max_iters < 1 or self.record_every < 1:
            raise DomainError("cn_max_iters and record_every must be at least 1")
        if not 0 < self.cn_damping <= 1:
            raise DomainError("cn_damping must lie in (0, 1]")


@dataclass(frozen=True)
class PointRecord:
    """Material-point state carried from one step to the next.

    ``armed`` marks that the stable alpha seed is still pending for the
    current cooling episode. ``beta_clock`` is the reduced time
    ``sum(k_beta * (x_alpha - x_alpha_eq) * dt)`` accumulated while alpha
    exceeds its equilibrium but no new beta has nucleated; the beta seed is
    the closed-form nucleus at this reduced time.
    """

    state: PhaseState = field(default_factory=PhaseState.pure_beta)
    rates: TransformationRates = ZERO_RATES
    armed: bool = True
    beta_clock: float = 0.0


# --------------------------------------------------------------------------
# reference operations


def diffusional_update(state: PhaseState, rates_prev: TransformationRates, dt: float,
                       x_max: float = 0.9) -> PhaseState:
    """Explicit update with clipping and ratio-preserving rescaling."""
    xs = state.x_alpha_s + dt * (rates_prev.beta_to_as + rates_prev.am_to_as
                                 - rates_prev.as_to_beta)
    xm = state.x_alpha_m - dt * rates_prev.am_to_as
    xs, xm = clip_alpha(xs, xm, x_max)
    return PhaseState(xs, xm, 1.0 - xs - xm, 0.0)


def clip_alpha(xs: float, xm: float, x_max: float = 0.9):
    xs = min(max(xs, 0.0), x_max)
    xm = min(max(xm, 0.0), x_max)
    tot = xs + xm
    if tot > x_max:
        scale = x_max / tot
        xs *= scale
        xm *= scale
    return xs, xm


def project_martensite_formation(state: PhaseState, T: float,
                                 params: ModelParams = DEFAULT_PARAMS) -> PhaseState:
    """Instantaneous beta -> martensite up to the pseudo-equilibrium (no-op above it)."""
    xm_eq = martensite_pseudo_eq(T, state.x_alpha_s, params.equilibrium, params.temps)
    if state.x_alpha_m >= xm_eq:
        return state
    transfer = min(xm_eq - state.x_alpha_m, state.x_beta)
    xm = state.x_alpha_m + transfer
    return PhaseState(state.x_alpha_s, xm, 1.0 - state.x_alpha_s - xm - state.x_liq, state.x_liq)


def project_martensite_dissolution(state: PhaseState, T: float,
                                   params: ModelParams = DEFAULT_PARAMS) -> PhaseState:
    """Instantaneous martensite -> beta when beta lags its equilibrium."""
    xb_eq = beta_equilibrium(T, params.equilibrium, params.temps)
    if state.x_beta >= xb_eq or state.x_alpha_m <= 0.0:
        return state
    transfer = min(xb_eq - state.x_beta, state.x_alpha_m)
    xm = state.x_alpha_m - transfer
    return PhaseState(state.x_alpha_s, xm, 1.0 - state.x_alpha_s - xm - state.x_liq, state.x_liq)


def closed_form_seed(k: float, x_eq: float, dt: float, c: float) -> float:
    """Isothermal solution of the logistic law from zero, after one step ``dt``.

    ``x_eq / (1 + (c / (k x_eq dt))**c)``, the nontrivial branch that an
    explicit step from exactly zero cannot leave the origin for.
    """
    return reduced_time_seed(x_eq, k * x_eq * dt, c)


def reduced_time_seed(x_eq: float, kt: float, c: float) -> float:
    """``x_eq / (1 + (c / kt)**c)`` for the reduced time ``kt = integral of k x_eq dt``."""
    if kt <= 0.0:
        return 0.0
    # (c/kt)**c in log space; overflow means the seed is zero
    log_ratio = c * (math.log(c) - math.log(kt))
    if log_ratio > 700.0:
        return 0.0
    return x_eq / (1.0 + math.exp(log_ratio))


def initialize_alpha_s(T: float, dt: float, p: DiffusionParams, x_alpha_eq: float) -> float:
    """Stable-alpha seed with ``k~ = k_alpha_s(T) * x_alpha_eq``."""
    if not dt > 0:
        raise DomainError("dt must be positive")
    return closed_form_seed(k_alpha_s(T, p), x_alpha_eq, dt, p.c_alpha_s)


def initialize_beta(T: float, dt: float, p: DiffusionParams, excess_alpha: float) -> float:
    """Seed of the corrected beta fraction when dissolution starts from ``x_beta = 1 - x_max``.

    Same construction as :func:`initialize_alpha_s` for the dissolution law, with
    the excess ``x_alpha - x_alpha_eq`` playing the role of the equilibrium.
    """
    if not dt > 0:
        raise DomainError("dt must be positive")
    return closed_form_seed(k_beta(T, p), excess_alpha, dt, p.c_beta)


def _melt_record(T: float, params: ModelParams) -> PointRecord:
    xsol = solid_fraction(T, params.temps)
    return PointRecord(PhaseState(0.0, 0.0, xsol, 1.0 - xsol), ZERO_RATES, True)


def _seed(state: PhaseState, T: float, dt: float, params: ModelParams, armed: bool,
          clock: float):
    """Nucleate stable alpha or beta where the rate laws cannot leave zero.

    Returns ``(state, armed, clock)``.
    """
    x_eq = alpha_equilibrium(T, params.equilibrium, params.temps)
    if x_eq > 0.0:
        if armed and state.x_alpha_s <= 0.0:
            room = x_eq - state.x_alpha_m
            if room > 0.0:
                xs = min(initialize_alpha_s(T, dt, params.diffusion, x_eq), room)
                state = PhaseState(xs, state.x_alpha_m, 1.0 - xs - state.x_alpha_m, 0.0)
        armed = False
    else:
        armed = True
    excess = state.x_alpha - x_eq
    new_beta = state.x_beta - (1.0 - params.x_max)
    if excess > 0.0 and state.x_alpha_s > 0.0 and new_beta < BETA_SEED_FLOOR:
        clock += k_beta(T, params.diffusion) * excess * dt
        target = reduced_time_seed(excess, clock, params.diffusion.c_beta)
        if target >= BETA_SEED_FLOOR and target > new_beta:
            xs = state.x_alpha_s - min(target - new_beta, state.x_alpha_s)
            state = PhaseState(xs, state.x_alpha_m, 1.0 - xs - state.x_alpha_m, 0.0)
    else:
        clock = 0.0
    return state, armed, clock


def _solid_projection(state: PhaseState, T: float, params: ModelParams):
    """Formation and dissolution projections, then the rates at the result."""
    state = project_martensite_formation(state, T, params)
    state = project_martensite_dissolution(state, T, params)
    x_eq = alpha_equilibrium(T, params.equilibrium, params.temps)
    return state, transformation_rates(state, T, params.diffusion, x_eq, params.x_max)


def advance(record: PointRecord, T: float, dt: float, params: ModelParams = DEFAULT_PARAMS,
            config: StepConfig = StepConfig()) -> PointRecord:
    """Advance one material point by ``dt`` to temperature ``T`` (reference path)."""
    if not math.isfinite(T):
        raise DomainError(f"temperature must be finite, got {T!r}")
    if T > params.temps.T_sol:
        return _melt_record(T, params)
    if record.state.x_liq > 0.0:
        record = PointRecord()
    s, r0 = record.state, record.rates
    xm_max = params.x_max
    probe, armed, clock = _seed(s, T, dt, params, record.armed, record.beta_clock)
    # steps that nucleate a phase are explicit: the closed-form seed is the
    # value at the end of the step
    if config.scheme is Scheme.EULER or probe != s:
        raw = diffusional_update(s, r0, dt, xm_max)
        raw, armed, clock = _seed(raw, T, dt, params, record.armed, record.beta_clock)
        state, rates = _solid_projection(raw, T, params)
        return PointRecord(state, rates, armed, clock)

    half = 0.5 * dt
    # first iterate: rates of the old state at the new temperature
    _, R = _solid_projection(s, T, params)
    w, prev = config.cn_damping, None
    for _ in range(config.cn_max_iters):
        trial = TransformationRates(*(0.5 * (a + b) for a, b in
                                      zip(_as_tuple(r0), _as_tuple(R))))
        raw = diffusional_update(s, trial, dt, xm_max)
        state, F = _solid_projection(raw, T, params)
        if _settled(_as_tuple(F), _as_tuple(R), half, config.cn_tolerance):
            return PointRecord(state, F, armed, clock)
        res = tuple(b - a for a, b in zip(_as_tuple(R), _as_tuple(F)))
        w = aitken_relaxation(w, prev, res)
        prev = res
        R = TransformationRates(*(a + w * d for a, d in zip(_as_tuple(R), res)))
    raise IntegrationError(f"Crank-Nicolson iteration did not converge at T={T:.6g} K")


def aitken_relaxation(w: float, prev, res) -> float:
    """Aitken update of the relaxation factor from two successive residuals."""
    if prev is None:
        return w
    dr = [b - a for a, b in zip(prev, res)]
    den = sum(d * d for d in dr)
    if den == 0.0:
        return w
    w = -w * sum(a * d for a, d in zip(prev, dr)) / den
    if not w > 0.0:
        # residual grew along itself: the secant model is useless, take a plain step
        return 1.0
    return min(max(w, RELAX_BOUNDS[0]), RELAX_BOUNDS[1])


def _settled(new, old, half, rtol):
    return all(abs(a - b) <= rtol * abs(a) or half * abs(a - b) <= CN_ABS_FLOOR
               for a, b in zip(new, old))


def _as_tuple(r: TransformationRates):
    return (r.beta_to_as, r.am_to_as, r.as_to_beta)


def step(record: PointRecord, t: float, config: StepConfig, path: TemperaturePath,
         params: ModelParams = DEFAULT_PARAMS) -> PointRecord:
    """One step from ``t`` to ``t + config.dt`` along ``path``."""
    return advance(record, float(path.temperature(t + config.dt)), config.dt, params, config)


def initial_record(state: PhaseState, T: float, params: ModelParams = DEFAULT_PARAMS) -> PointRecord:
    """Record for an initial state, with rates evaluated at ``T``."""
    if T > params.temps.T_sol:
        return _melt_record(T, params)
    x_eq = alpha_equilibrium(T, params.equilibrium, params.temps)
    return PointRecord(state, transformation_rates(state, T, params.diffusion, x_eq, params.x_max))


# --------------------------------------------------------------------------
# fast kernel


class Kernel:
    """Float-only implementation of :func:`advance` for long integrations.

    ``martensite=False`` disables the instantaneous martensite projections; it
    exists for isothermal closed-form comparisons.
    """

    def __init__(self, params: ModelParams = DEFAULT_PARAMS, config: StepConfig = StepConfig(),
                 martensite: bool = True):
        self.params = params
        self.config = config
        self.martensite = martensite
        tp, eq, d = params.temps, params.equilibrium, params.diffusion
        self.T_sol, self.T_liq = tp.T_sol, tp.T_liq
        self.T_as_sta, self.T_am_sta, self.T_room = tp.T_as_sta, tp.T_am_sta, tp.T_room
        self.T_as_end = tp.T_as_end
        self.k_aeq, self.k_meq, self.x_max = eq.k_alpha_eq, eq.k_alpham_eq, eq.x_max
        self.k1, self.k2, self.k3, self.f = d.k1, d.k2, d.k3, d.f
        self.ca, self.cb = d.c_alpha_s, d.c_beta
        self.ea1, self.ea2 = (self.ca - 1.0) / self.ca, (self.ca + 1.0) / self.ca
        self.eb1, self.eb2 = (self.cb - 1.0) / self.cb, (self.cb + 1.0) / self.cb

    # equilibria and rates -------------------------------------------------

    def alpha_eq(self, T):
        if T > self.T_as_sta:
            return 0.0
        if T <= self.T_as_end:
            return self.x_max
        v = 1.0 - math.exp(-self.k_aeq * (self.T_as_sta - T))
        return v if v < self.x_max else self.x_max

    def am_eq(self, T, xs):
        if T > self.T_am_sta or not self.martensite:
            return 0.0
        if T < self.T_room:
            base = self.x_max
        else:
            base = 1.0 - math.exp(-self.k_meq * (self.T_am_sta - T))
            if base > self.x_max:
                base = self.x_max
        scale = (self.x_max - xs) / self.x_max
        return base * scale if scale > 0.0 else 0.0

    def k_as(self, T):
        z = self.k3 * (T - self.k2)
        if z >= 0.0:
            return self.k1 / (1.0 + math.exp(-z))
        e = math.exp(z)
        return self.k1 * e / (1.0 + e)

    def rates(self, xs, xm, xb, T, aeq):
        k = self.k_as(T)
        r1 = r2 = r3 = 0.0
        if k > 0.0 and xs > 0.0:
            fac = k * xs ** self.ea1
            drive = aeq - xs - xm       # = xb - xb_eq
            if drive > 0.0:
                r1 = fac * drive ** self.ea2
            if xm > 0.0:
                r2 = fac * xm ** self.ea2
        if k > 0.0:
            nuc = xb - (1.0 - self.x_max)
            drive = xs + xm - aeq
            if nuc > 0.0 and drive > 0.0 and self.f > 0.0:
                r3 = self.f * k * nuc ** self.eb1 * drive ** self.eb2
        return r1, r2, r3

    def clip(self, xs, xm):
        x_max = self.x_max
        if xs < 0.0:
            xs = 0.0
        elif xs > x_max:
            xs = x_max
        if xm < 0.0:
            xm = 0.0
        elif xm > x_max:
            xm = x_max
        tot = xs + xm
        if tot > x_max:
            sc = x_max / tot
            xs *= sc
            xm *= sc
        return xs, xm

    def seed(self, xs, xm, T, dt, armed, clock):
        """Alpha and beta nucleation; returns ``(xs, armed, clock)``."""
        aeq = self.alpha_eq(T)
        if aeq > 0.0:
            if armed and xs <= 0.0 and aeq - xm > 0.0:
                xs = min(closed_form_seed(self.k_as(T), aeq, dt, self.ca), aeq - xm)
            armed = False
        else:
            armed = True
        excess = xs + xm - aeq
        new_beta = (1.0 - xs - xm) - (1.0 - self.x_max)
        if excess > 0.0 and xs > 0.0 and new_beta < BETA_SEED_FLOOR:
            clock += self.f * self.k_as(T) * excess * dt
            target = reduced_time_seed(excess, clock, self.cb)
            if target >= BETA_SEED_FLOOR and target > new_beta:
                xs -= min(target - new_beta, xs)
        else:
            clock = 0.0
        return xs, armed, clock

    def project(self, xs, xm, T):
        """Martensite formation then dissolution; returns ``(xs, xm, xb, aeq)``."""
        aeq = self.alpha_eq(T)
        xb = 1.0 - xs - xm
        meq = self.am_eq(T, xs)
        if xm < meq:
            xm += min(meq - xm, xb)
            xb = 1.0 - xs - xm
        if self.martensite:
            beq = 1.0 - aeq
            if xb < beq and xm > 0.0:
                xm -= min(beq - xb, xm)
                xb = 1.0 - xs - xm
        return xs, xm, xb, aeq

    # stepping ---------------------------------------------------------------

    def advance(self, xs, xm, xb, xl, r1, r2, r3, armed, clock, T, dt):
        """One step; returns the new ``(xs, xm, xb, xl, r1, r2, r3, armed, clock)``."""
        if T > self.T_sol:
            if T >= self.T_liq:
                xsol = 0.0
            else:
                xsol = 1.0 - (T - self.T_sol) / (self.T_liq - self.T_sol)
            return 0.0, 0.0, xsol, 1.0 - xsol, 0.0, 0.0, 0.0, True, 0.0
        if xl > 0.0:
            xs = xm = 0.0
            r1 = r2 = r3 = 0.0
            armed = True
            clock = 0.0
        explicit = self.config.scheme is Scheme.EULER
        if not explicit:
            # steps that nucleate a phase are explicit: the closed-form seed
            # is the value at the end of the step
            probe, p_armed, p_clock = self.seed(xs, xm, T, dt, armed, clock)
            explicit = probe != xs
        if explicit:
            xs, xm = self.clip(xs + dt * (r1 + r2 - r3), xm - dt * r2)
            xs, armed, clock = self.seed(xs, xm, T, dt, armed, clock)
            xs, xm, xb, aeq = self.project(xs, xm, T)
            r1, r2, r3 = self.rates(xs, xm, xb, T, aeq)
            return xs, xm, xb, 0.0, r1, r2, r3, armed, clock
        xs, xm, xb, r1, r2, r3 = self._advance_cn(xs, xm, r1, r2, r3, T, dt)
        return xs, xm, xb, 0.0, r1, r2, r3, p_armed, p_clock

    def _advance_cn(self, xs0, xm0, r1, r2, r3, T, dt):
        half = 0.5 * dt
        # first iterate: rates of the old state at the new temperature
        s_xs, s_xm, s_xb, s_aeq = self.project(xs0, xm0, T)
        q1, q2, q3 = self.rates(s_xs, s_xm, s_xb, T, s_aeq)
        rtol = self.config.cn_tolerance
        atol = CN_ABS_FLOOR / half
        w, prev = self.config.cn_damping, None
        for _ in range(self.config.cn_max_iters):
            xs, xm = self.clip(xs0 + half * (r1 + r2 - r3 + q1 + q2 - q3), xm0 - half * (r2 + q2))
            xs, xm, xb, aeq = self.project(xs, xm, T)
            f1, f2, f3 = self.rates(xs, xm, xb, T, aeq)
            d1, d2, d3 = abs(f1 - q1), abs(f2 - q2), abs(f3 - q3)
            if (d1 <= atol or d1 <= rtol * f1) and (d2 <= atol or d2 <= rtol * f2) and \
                    (d3 <= atol or d3 <= rtol * f3):
                return xs, xm, xb, f1, f2, f3
            res = (f1 - q1, f2 - q2, f3 - q3)
            w = aitken_relaxation(w, prev, res)
            prev = res
            q1 += w * res[0]
            q2 += w * res[1]
            q3 += w * res[2]
        raise IntegrationError(f"Crank-Nicolson iteration did not converge at T={T:.6g} K")


# --------------------------------------------------------------------------
# trajectories


TRAJECTORY_FIELDS = ("t", "T", "x_alpha_s", "x_alpha_m", "x_beta", "x_liq",
                     "beta_to_as", "am_to_as", "as_to_beta")


@dataclass(frozen=True)
class Trajectory:
    """Recorded samples of an integration; arrays are read-only."""

    t: np.ndarray
    T: np.ndarray
    x_alpha_s: np.ndarray
    x_alpha_m: np.ndarray
    x_beta: np.ndarray
    x_liq: np.ndarray
    beta_to_as: np.ndarray
    am_to_as: np.ndarray
    as_to_beta: np.ndarray

    def __post_init__(self):
        for name in TRAJECTORY_FIELDS:
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self):
        return self.t.size

    def state(self, i: int) -> PhaseState:
        return PhaseState(float(self.x_alpha_s[i]), float(self.x_alpha_m[i]),
                          float(self.x_beta[i]), float(self.x_liq[i]))

    def final_state(self) -> PhaseState:
        return self.state(-1)

    def rates(self, i: int) -> TransformationRates:
        return TransformationRates(float(self.beta_to_as[i]), float(self.am_to_as[i]),
                                   float(self.as_to_beta[i]))


def uniform_times(t0: float, t1: float, dt: float) -> np.ndarray:
    """``t0, t0+dt, ...`` up to ``t1``; the last step is shortened to land on ``t1``."""
    if t1 < t0:
        raise DomainError("t_span must be increasing")
    n = int(math.floor((t1 - t0) / dt * (1 + 1e-12)))
    times = t0 + dt * np.arange(n + 1)
    if t1 - times[-1] > 1e-9 * dt:
        times = np.append(times, t1)
    else:
        times[-1] = t1 if n else t0
    return times


def integrate(initial: PhaseState, path: TemperaturePath, t_span, config: StepConfig = StepConfig(),
              params: ModelParams = DEFAULT_PARAMS, times: Optional[np.ndarray] = None,
              stop_when: Optional[Callable] = None, martensite: bool = True) -> Trajectory:
    """Integrate one material point along ``path``.

    Parameters
    ----------
    initial : PhaseState
        State at ``t_span[0]``.
    path : TemperaturePath
        Temperature history.
    t_span : (float, float)
        Start and end time in seconds.
    config : StepConfig
        Scheme, step size and recording interval.
    times : array, optional
        Explicit, strictly increasing time grid replacing the uniform ``dt``
        grid (used for predetermined step schedules).
    stop_when : callable, optional
        ``stop_when(t, T, xs, xm, xb)`` evaluated at every step; integration
        ends after the first step for which it returns True.
    """
    initial.validate(params.x_max, tol=1e-9)
    if times is None:
        times = uniform_times(float(t_span[0]), float(t_span[1]), config.dt)
    else:
        times = np.asarray(times, dtype=float)
        if times.ndim != 1 or times.size == 0 or np.any(np.diff(times) <= 0):
            raise DomainError("time grid must be a non-empty increasing 1-D array")
    temps = np.asarray(path.temperature(times), dtype=float).reshape(times.shape)
    if not np.all(np.isfinite(temps)):
        raise DomainError("temperature path returned non-finite values")

    kernel = Kernel(params, config, martensite)
    rec0 = initial_record(initial, float(temps[0]), params)
    xs, xm, xb, xl = rec0.state.as_tuple()
    r1, r2, r3 = _as_tuple(rec0.rates)
    armed = True
    clock = 0.0
    every = config.record_every
    out = [[times[0], temps[0], xs, xm, xb, xl, r1, r2, r3]]
    adv = kernel.advance
    t_list = times.tolist()
    T_list = temps.tolist()
    n = len(t_list)
    for i in range(1, n):
        dt = t_list[i] - t_list[i - 1]
        T = T_list[i]
        try:
            xs, xm, xb, xl, r1, r2, r3, armed, clock = adv(xs, xm, xb, xl, r1, r2, r3, armed, clock,
                                                         T, dt)
        except IntegrationError as exc:
            raise IntegrationError(f"step {i} (t={t_list[i]:.6g} s): {exc}") from None
        done = stop_when is not None and stop_when(t_list[i], T, xs, xm, xb)
        if i % every == 0 or i == n - 1 or done:
            out.append([t_list[i], T, xs, xm, xb, xl, r1, r2, r3])
        if done:
            break
    cols = np.array(out, dtype=float).T
    return Trajectory(*cols)
