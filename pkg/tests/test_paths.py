import io
import math
from dataclasses import replace

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from ti64phase.errors import DescriptorError, DomainError, ParseError
from ti64phase.paths import (SampledPath, SibParams, SibPath, cct_rate_of, constant_path, g_of_T,
                             linear_ramp, load_path_csv, read_path_rows, sib_constant_g,
                             sib_path_for_rate, sib_temperature, sib_temperature_lagged, ttt_path)


def mp_sib(t, x_mm, g_per_m, p):
    """Direct erfc form of the convectively cooled half-space, in extended precision."""
    mpmath.mp.dps = 50
    a, g, x, t = (mpmath.mpf(v) for v in (p.diffusivity, g_per_m * 1e-3, x_mm, t))
    u = x / (2 * mpmath.sqrt(a * t))
    theta = mpmath.erfc(u) - mpmath.exp(g * x + g * g * a * t) * mpmath.erfc(u + g * mpmath.sqrt(a * t))
    return float(p.T0 + (p.T_inf - p.T0) * theta)


@pytest.mark.parametrize("t,x,g", [(0.1, 3.2, 73.8), (5.0, 3.2, 73.8), (50.0, 15.2, 40.0),
                                   (1e3, 0.0, 200.0), (2e4, 9.5, 1000.0)])
def test_sib_constant_g_matches_erfc_oracle(t, x, g):
    p = SibParams()
    assert sib_constant_g(t, x, g, p) == pytest.approx(mp_sib(t, x, g, p), rel=1e-12)


def test_sib_constant_g_at_time_zero_is_initial():
    assert sib_constant_g(0.0, 3.2, 73.8, SibParams()) == 1323.0


def test_sib_temperature_solves_fixed_point():
    p = SibParams()
    t = np.array([0.5, 2.0, 10.0, 60.0, 300.0])
    T = sib_temperature(t, p)
    again = sib_constant_g(t, p.x, g_of_T(T, p), p)
    assert np.allclose(T, again, rtol=0, atol=1e-8)


def test_lagged_evaluation_converges_to_fixed_point():
    p = SibParams()
    t = np.linspace(1e-3, 20.0, 20001)
    assert np.max(np.abs(sib_temperature_lagged(t, p) - sib_temperature(t, p))) < 0.05


def test_sib_cools_monotonically():
    T = sib_temperature(np.linspace(0.0, 500.0, 501), SibParams())
    assert T[0] == 1323.0
    assert np.all(np.diff(T) <= 1e-9)
    assert T[-1] > 293.15


def test_sib_validation():
    with pytest.raises(DomainError):
        SibParams(diffusivity=0.0)
    with pytest.raises(DomainError):
        sib_temperature(-1.0, SibParams())


@pytest.mark.parametrize("rate", [-5.0, -50.0, -410.0])
def test_sib_path_for_rate_hits_descriptor(rate):
    path = sib_path_for_rate(rate)
    assert cct_rate_of(path) == pytest.approx(rate, rel=1e-6)


def test_sib_path_for_rate_unreachable():
    with pytest.raises(DescriptorError):
        sib_path_for_rate(-1e7)
    with pytest.raises(DomainError):
        sib_path_for_rate(10.0)


def test_first_crossing_of_sib_path():
    path = SibPath()
    tc = path.first_crossing(1000.0)
    assert path.temperature(tc) == pytest.approx(1000.0, abs=1e-7)


def test_sampled_path_interpolates_and_holds():
    p = SampledPath([0.0, 2.0, 4.0], [1000.0, 800.0, 900.0])
    assert p.temperature(1.0) == 900.0
    assert p.temperature(10.0) == 900.0
    assert p.rate(1.0) == -100.0
    assert p.rate(3.0) == 50.0
    assert p.rate(5.0) == 0.0
    assert p.first_crossing(850.0) == pytest.approx(1.5)


def test_sampled_path_validation():
    with pytest.raises(DomainError):
        SampledPath([0.0, 0.0], [1.0, 2.0])
    with pytest.raises(DomainError):
        SampledPath([0.0, 1.0], [1.0])


def test_ttt_path_shape():
    p = ttt_path(800.0)
    assert p.temperature(0.0) == 1400.0
    assert p.temperature(1.2) == pytest.approx(800.0)
    assert p.temperature(100.0) == 800.0
    assert p.rate(0.5) == pytest.approx(-500.0)


def test_linear_ramp_sign_checked():
    with pytest.raises(DomainError):
        linear_ramp(300.0, -10.0, 500.0)
    assert constant_path(700.0).temperature(np.array([0.0, 5.0])).tolist() == [700.0, 700.0]


def test_read_path_rows_reports_line():
    text = "time_s,temp_K\n0,1000\n1,900\n1,800\n"
    with pytest.raises(ParseError) as err:
        read_path_rows(io.StringIO(text), "h.csv")
    assert err.value.line == 4
    assert "h.csv:4" in str(err.value)


@pytest.mark.parametrize("text,line", [("", 1), ("t,T\n0,1\n", 1), ("time_s,temp_K\n0,x\n", 2),
                                       ("time_s,temp_K\n0\n", 2), ("time_s,temp_K\n", 2),
                                       ("time_s,temp_K\n0,inf\n", 2)])
def test_read_path_rows_errors(text, line):
    with pytest.raises(ParseError) as err:
        read_path_rows(io.StringIO(text))
    assert err.value.line == line


def test_load_path_csv_missing_file(tmp_path):
    with pytest.raises(ParseError, match="cannot open"):
        load_path_csv(tmp_path / "nope.csv")


def test_load_path_csv_column_order(tmp_path):
    f = tmp_path / "h.csv"
    f.write_text("temp_K,time_s\n1000,0\n900,1\n")
    p = load_path_csv(f)
    assert p.temperature(0.5) == 950.0


@given(st.floats(0.5, 20.0), st.floats(0.0, 20.0), st.floats(1.0, 500.0))
def test_sib_between_ambient_and_initial(t, x, g):
    p = SibParams()
    T = sib_constant_g(t, x, g, p)
    assert p.T_inf - 1e-9 <= T <= p.T0 + 1e-9


@given(st.floats(0.1, 50.0), st.floats(1.0, 300.0))
def test_deeper_points_stay_hotter(t, g):
    p = SibParams()
    assert sib_constant_g(t, 2.0, g, p) <= sib_constant_g(t, 8.0, g, p) + 1e-9
