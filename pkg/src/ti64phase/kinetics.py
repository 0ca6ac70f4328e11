"""Temperature-dependent diffusion rates and the diffusional transformation laws.

Three diffusion-controlled transformations are modelled with modified
logistic rate laws:

* beta -> stable alpha (nucleation and growth out of excess beta),
* martensite -> stable alpha (long-term dissolution of martensite),
* stable alpha -> beta (dissolution on heating, nucleation of new beta).

Each law has the form ``k(T) * nuc**((c-1)/c) * drive**((c+1)/c)`` where
``nuc`` measures the growing interface and ``drive`` the distance from the
long-term equilibrium; the rate is zero when ``drive <= 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .phase_model import PhaseState


@dataclass(frozen=True)
class DiffusionParams:
    """Kinetic parameters.

    Attributes
    ----------
    c_alpha_s : float
        Exponent of the alpha formation laws (> 1).
    k1 : float
        Saturation diffusion rate in 1/s.
    k2 : float
        Logistic midpoint temperature in K.
    k3 : float
        Logistic steepness in 1/K.
    c_beta : float
        Exponent of the alpha -> beta dissolution law (> 1).
    f : float
        Speed-up of beta formation relative to alpha formation.
    """

    c_alpha_s: float = 2.51
    k1: float = 0.294
    k2: float = 850.0
    k3: float = 0.0337
    c_beta: float = 11.0
    f: float = 3.8

    def __post_init__(self):
        if not (self.c_alpha_s > 1 and self.c_beta > 1):
            raise DomainError("diffusion exponents must exceed 1")
        # k1 = 0 is accepted: it freezes all diffusion.
        if not (self.k1 >= 0 and self.k3 > 0 and self.f >= 0):
            raise DomainError("k1 and f must be nonnegative, k3 positive")
        if not all(math.isfinite(v) for v in (self.c_alpha_s, self.k1, self.k2,
                                              self.k3, self.c_beta, self.f)):
            raise DomainError("diffusion parameters must be finite")


DEFAULT_DIFFUSION = DiffusionParams()


@dataclass(frozen=True)
class TransformationRates:
    """Diffusional transformation rates in 1/s (all nonnegative)."""

    beta_to_as: float = 0.0
    am_to_as: float = 0.0
    as_to_beta: float = 0.0

    @property
    def d_alpha_s(self) -> float:
        return self.beta_to_as + self.am_to_as - self.as_to_beta

    @property
    def d_alpha_m(self) -> float:
        return -self.am_to_as


ZERO_RATES = TransformationRates()


def logistic(T: float, k1: float, k2: float, k3: float) -> float:
    # overflow-safe: never exponentiate a positive argument
    z = k3 * (T - k2)
    if z >= 0:
        return k1 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return k1 * e / (1.0 + e)


def k_alpha_s(T: float, p: DiffusionParams = DEFAULT_DIFFUSION) -> float:
    """Diffusion rate of stable-alpha formation, a logistic function of T."""
    return logistic(T, p.k1, p.k2, p.k3)


def k_beta(T: float, p: DiffusionParams = DEFAULT_DIFFUSION) -> float:
    """Diffusion rate of beta formation: ``f`` times :func:`k_alpha_s`."""
    return p.f * logistic(T, p.k1, p.k2, p.k3)


def logistic_rate(k: float, nuc: float, drive: float, c: float) -> float:
    """Modified logistic law ``k * nuc**((c-1)/c) * drive**((c+1)/c)``.

    Both bases are clamped at zero so round-off never feeds a negative base
    into a fractional power.
    """
    if drive <= 0.0 or nuc <= 0.0 or k <= 0.0:
        return 0.0
    return k * nuc ** ((c - 1.0) / c) * drive ** ((c + 1.0) / c)


def rate_beta_to_alpha_s(s: PhaseState, T: float, p: DiffusionParams, x_beta_eq: float) -> float:
    return logistic_rate(k_alpha_s(T, p), s.x_alpha_s, s.x_beta - x_beta_eq, p.c_alpha_s)


def rate_am_to_alpha_s(s: PhaseState, T: float, p: DiffusionParams) -> float:
    # long-term martensite equilibrium is zero
    return logistic_rate(k_alpha_s(T, p), s.x_alpha_s, s.x_alpha_m, p.c_alpha_s)


def rate_alpha_s_to_beta(s: PhaseState, T: float, p: DiffusionParams, x_alpha_eq: float,
                         x_max: float = 0.9) -> float:
    """Stable alpha dissolving into beta when total alpha exceeds equilibrium.

    The nucleation factor is the corrected beta fraction ``x_beta - (1 - x_max)``,
    i.e. the beta formed beyond the 10 % retained at low temperature.
    """
    x_beta_corr = s.x_beta - (1.0 - x_max)
    return logistic_rate(k_beta(T, p), x_beta_corr, s.x_alpha - x_alpha_eq, p.c_beta)


def transformation_rates(s: PhaseState, T: float, p: DiffusionParams, x_alpha_eq: float,
                         x_max: float = 0.9) -> TransformationRates:
    """All three diffusional rates for state ``s`` at temperature ``T``."""
    return TransformationRates(
        rate_beta_to_alpha_s(s, T, p, 1.0 - x_alpha_eq),
        rate_am_to_alpha_s(s, T, p),
        rate_alpha_s_to_beta(s, T, p, x_alpha_eq, x_max),
    )
