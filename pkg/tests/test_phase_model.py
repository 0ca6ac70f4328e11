
import mpmath
import pytest
from hypothesis import given, strategies as st

from ti64phase.errors import DomainError
from ti64phase.phase_model import (CharacteristicTemperatures, EquilibriumParams, PhaseState,
                                   alpha_equilibrium, beta_equilibrium, liquid_fraction,
                                   martensite_pseudo_eq, martensite_pseudo_eq_base,
                                   solid_fraction)

temps = st.floats(200.0, 2100.0, allow_nan=False)
fractions = st.floats(0.0, 0.9, allow_nan=False)


def mp_exp_law(k, T_ref, T):
    return float(1 - mpmath.exp(-mpmath.mpf(k) * (mpmath.mpf(T_ref) - mpmath.mpf(T))))


@pytest.mark.parametrize("T", [950.0, 1000.0, 1100.0, 1200.0, 1272.0])
def test_alpha_equilibrium_exponential_branch(T):
    assert alpha_equilibrium(T) == pytest.approx(mp_exp_law(0.0068, 1273.0, T), rel=1e-14)


@pytest.mark.parametrize("T", [293.15, 600.0, 934.5, 935.0])
def test_alpha_equilibrium_at_cap_up_to_transus_end(T):
    assert alpha_equilibrium(T) == 0.9


def test_alpha_equilibrium_exponential_just_above_transus_end():
    T = 935.0001
    assert alpha_equilibrium(T) == pytest.approx(mp_exp_law(0.0068, 1273.0, T), rel=1e-14)
    assert alpha_equilibrium(T) < 0.8997


@pytest.mark.parametrize("T", [1273.0, 1300.0, 1800.0])
def test_alpha_equilibrium_zero_above_transus(T):
    assert alpha_equilibrium(T) == pytest.approx(0.0, abs=1e-15)


def test_beta_equilibrium_is_complement():
    for T in (300.0, 1000.0, 1250.0, 1400.0):
        assert beta_equilibrium(T) == pytest.approx(1.0 - alpha_equilibrium(T))


def test_martensite_base_at_room_temperature():
    assert martensite_pseudo_eq_base(293.15) == pytest.approx(0.9, abs=1e-3)
    assert martensite_pseudo_eq_base(293.15) == pytest.approx(
        min(0.9, mp_exp_law(0.00415, 848.0, 293.15)), rel=1e-14)


@pytest.mark.parametrize("T", [400.0, 600.0, 800.0])
def test_martensite_base_exponential_branch(T):
    assert martensite_pseudo_eq_base(T) == pytest.approx(mp_exp_law(0.00415, 848.0, T), rel=1e-14)


def test_martensite_base_zero_above_start():
    assert martensite_pseudo_eq_base(848.0) == pytest.approx(0.0, abs=1e-15)
    assert martensite_pseudo_eq_base(900.0) == 0.0


def test_martensite_capped_below_room():
    assert martensite_pseudo_eq_base(250.0) == 0.9


def test_martensite_scaled_by_remaining_alpha():
    base = martensite_pseudo_eq_base(400.0)
    assert martensite_pseudo_eq(400.0, 0.45) == pytest.approx(0.5 * base)
    assert martensite_pseudo_eq(400.0, 0.9) == 0.0


def test_martensite_rejects_bad_alpha():
    with pytest.raises(DomainError):
        martensite_pseudo_eq(400.0, 0.95)
    with pytest.raises(DomainError):
        martensite_pseudo_eq(400.0, float("nan"))


def test_solid_fraction_ramp():
    assert solid_fraction(1878.0) == 1.0
    assert solid_fraction(1903.0) == pytest.approx(0.5)
    assert solid_fraction(1928.0) == 0.0
    assert liquid_fraction(1890.5) == pytest.approx(0.25)


def test_nonfinite_temperature_rejected():
    for fn in (alpha_equilibrium, martensite_pseudo_eq_base, solid_fraction):
        with pytest.raises(DomainError):
            fn(float("nan"))


def test_temperature_ordering_validated():
    with pytest.raises(DomainError):
        CharacteristicTemperatures(T_am_sta=1000.0)
    with pytest.raises(DomainError):
        EquilibriumParams(x_max=1.5)


def test_phase_state_validate():
    PhaseState.solid(0.3, 0.4).validate()
    with pytest.raises(DomainError):
        PhaseState(0.5, 0.5, 0.0, 0.0).validate()
    with pytest.raises(DomainError):
        PhaseState(0.2, 0.2, 0.5, 0.0).validate()


@given(temps, temps)
def test_alpha_equilibrium_monotone_and_bounded(T1, T2):
    lo, hi = sorted((T1, T2))
    a_lo, a_hi = alpha_equilibrium(lo), alpha_equilibrium(hi)
    assert 0.0 <= a_hi <= a_lo <= 0.9


@given(temps, fractions)
def test_martensite_pseudo_eq_bounds(T, xs):
    xm = martensite_pseudo_eq(T, xs)
    assert 0.0 <= xm <= martensite_pseudo_eq_base(T) <= 0.9
    assert xs + xm <= 0.9 + 1e-15


@given(st.floats(0.0, 1.0))
def test_solid_plus_liquid_is_one(u):
    T = 1800.0 + 200.0 * u
    assert solid_fraction(T) + liquid_fraction(T) == pytest.approx(1.0, abs=1e-15)
    assert 0.0 <= solid_fraction(T) <= 1.0


EPS = 1e-6


@pytest.mark.parametrize("T", [293.15, 848.0, 1273.0, 1878.0, 1928.0])
def test_equilibria_continuous_across_breakpoints(T):
    for f in (alpha_equilibrium, martensite_pseudo_eq_base, solid_fraction):
        assert abs(f(T + EPS) - f(T)) < 1e-5
        assert abs(f(T) - f(T - EPS)) < 1e-5


def test_alpha_equilibrium_step_at_transus_end_is_small():
    # the exponential falls short of the 0.9 plateau by exp(-0.0068 * 338)
    jump = alpha_equilibrium(935.0) - alpha_equilibrium(935.0 + EPS)
    assert jump == pytest.approx(float(mpmath.exp(-0.0068 * 338)) - 0.1, rel=1e-4)
    assert 0.0 < jump < 5e-4
