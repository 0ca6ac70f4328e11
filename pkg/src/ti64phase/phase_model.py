"""Characteristic temperatures and (pseudo-)equilibrium phase fractions of Ti-6Al-4V.

All functions here are algebraic and stateless. Temperatures are in kelvin,
fractions are dimensionless volume fractions in [0, 1].
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

#: Tolerance used when checking that fractions sum to one.
SUM_TOL = 1e-12


@dataclass(frozen=True)
class CharacteristicTemperatures:
    """Transformation temperatures in kelvin.

    ``T_room`` is the ambient/room temperature below which the martensite
    fraction is capped; ``T_am_end`` is kept as a separate constant.
    """

    T_am_end: float = 293.0
    T_am_sta: float = 848.0
    T_as_end: float = 935.0
    T_as_sta: float = 1273.0
    T_sol: float = 1878.0
    T_liq: float = 1928.0
    T_room: float = 293.15

    def __post_init__(self):
        chain = (self.T_am_end, self.T_am_sta, self.T_as_end, self.T_as_sta,
                 self.T_sol, self.T_liq)
        if not all(math.isfinite(v) and v > 0 for v in chain + (self.T_room,)):
            raise DomainError(f"characteristic temperatures must be finite and positive: {self}")
        if any(a >= b for a, b in zip(chain, chain[1:])):
            raise DomainError(
                "characteristic temperatures must satisfy "
                "T_am_end < T_am_sta < T_as_end < T_as_sta < T_sol < T_liq")


@dataclass(frozen=True)
class EquilibriumParams:
    """Exponents of the exponential equilibrium laws (1/K) and the alpha cap."""

    k_alpha_eq: float = 0.0068
    k_alpham_eq: float = 0.00415
    x_max: float = 0.9

    def __post_init__(self):
        if not (self.k_alpha_eq > 0 and self.k_alpham_eq > 0):
            raise DomainError("equilibrium exponents must be positive")
        if not 0 < self.x_max <= 1:
            raise DomainError("x_max must lie in (0, 1]")


DEFAULT_TEMPS = CharacteristicTemperatures()
DEFAULT_EQ = EquilibriumParams()


@dataclass(frozen=True)
class PhaseState:
    """Volume fractions of stable alpha, martensite, beta and liquid at one point."""

    x_alpha_s: float = 0.0
    x_alpha_m: float = 0.0
    x_beta: float = 1.0
    x_liq: float = 0.0

    @classmethod
    def pure_beta(cls) -> "PhaseState":
        return cls(0.0, 0.0, 1.0, 0.0)

    @classmethod
    def solid(cls, x_alpha_s: float, x_alpha_m: float) -> "PhaseState":
        """Solid state with beta taken as the complement of the alpha fractions."""
        return cls(x_alpha_s, x_alpha_m, 1.0 - x_alpha_s - x_alpha_m, 0.0)

    @property
    def x_alpha(self) -> float:
        return self.x_alpha_s + self.x_alpha_m

    def total(self) -> float:
        return self.x_alpha_s + self.x_alpha_m + self.x_beta + self.x_liq

    def validate(self, x_max: float = 0.9, tol: float = SUM_TOL) -> None:
        """Raise :class:`DomainError` unless all state invariants hold."""
        fr = (self.x_alpha_s, self.x_alpha_m, self.x_beta, self.x_liq)
        if not all(math.isfinite(v) and -tol <= v <= 1 + tol for v in fr):
            raise DomainError(f"fractions outside [0, 1]: {self}")
        if self.x_alpha_s > x_max + tol or self.x_alpha_m > x_max + tol:
            raise DomainError(f"alpha fraction above {x_max}: {self}")
        if self.x_alpha > x_max + tol:
            raise DomainError(f"total alpha above {x_max}: {self}")
        if abs(self.total() - 1.0) > tol:
            raise DomainError(f"fractions do not sum to one: {self}")

    def as_tuple(self):
        return (self.x_alpha_s, self.x_alpha_m, self.x_beta, self.x_liq)


def _check_T(T: float) -> None:
    if not math.isfinite(T):
        raise DomainError(f"temperature must be finite, got {T!r}")


def solid_fraction(T: float, temps: CharacteristicTemperatures = DEFAULT_TEMPS) -> float:
    """Solid fraction with a linear ramp between solidus and liquidus."""
    _check_T(T)
    if T <= 0:
        raise DomainError(f"temperature must be positive, got {T!r}")
    if T <= temps.T_sol:
        return 1.0
    if T >= temps.T_liq:
        return 0.0
    return 1.0 - (T - temps.T_sol) / (temps.T_liq - temps.T_sol)


def liquid_fraction(T: float, temps: CharacteristicTemperatures = DEFAULT_TEMPS) -> float:
    return 1.0 - solid_fraction(T, temps)


def alpha_equilibrium(T: float, p: EquilibriumParams = DEFAULT_EQ,
                      temps: CharacteristicTemperatures = DEFAULT_TEMPS) -> float:
    """Stable total-alpha equilibrium fraction (Koistinen-Marburger type law).

    ``p.x_max`` up to the alpha-transus end temperature, the exponential branch
    between the transus temperatures, zero above. The exponential reaches only
    about 0.8996 at ``T_as_end``, so the law jumps by 4e-4 there.
    """
    _check_T(T)
    if T > temps.T_as_sta:
        return 0.0
    if T <= temps.T_as_end:
        return p.x_max
    return min(p.x_max, 1.0 - math.exp(-p.k_alpha_eq * (temps.T_as_sta - T)))


def beta_equilibrium(T: float, p: EquilibriumParams = DEFAULT_EQ,
                     temps: CharacteristicTemperatures = DEFAULT_TEMPS) -> float:
    return 1.0 - alpha_equilibrium(T, p, temps)


def martensite_pseudo_eq_base(T: float, p: EquilibriumParams = DEFAULT_EQ,
                              temps: CharacteristicTemperatures = DEFAULT_TEMPS) -> float:
    """Martensite pseudo-equilibrium fraction in the absence of stable alpha.

    The cap at ``p.x_max`` is reached at room temperature for the default
    exponent and holds for all colder temperatures.
    """
    _check_T(T)
    if T > temps.T_am_sta:
        return 0.0
    if T < temps.T_room:
        return p.x_max
    return min(p.x_max, 1.0 - math.exp(-p.k_alpham_eq * (temps.T_am_sta - T)))


def martensite_pseudo_eq(T: float, x_alpha_s: float, p: EquilibriumParams = DEFAULT_EQ,
                         temps: CharacteristicTemperatures = DEFAULT_TEMPS) -> float:
    """Martensite pseudo-equilibrium reduced by the already formed stable alpha."""
    if not (math.isfinite(x_alpha_s) and -SUM_TOL <= x_alpha_s <= p.x_max + SUM_TOL):
        raise DomainError(f"x_alpha_s must lie in [0, {p.x_max}], got {x_alpha_s!r}")
    scale = max(0.0, (p.x_max - x_alpha_s) / p.x_max)
    return martensite_pseudo_eq_base(T, p, temps) * scale
