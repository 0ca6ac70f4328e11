import io
import math

import numpy as np
import pytest

from ti64phase.diagrams import (CCT_STOP_T, THRESHOLDS, CCTCurve, Crossing, IsolineSet,
                                critical_rates, cct_terminal_state, extract_crossings, fmt,
                                generate_cct, generate_ttt, simulate_cct_curve, ttt_times,
                                write_isolines, write_terminals)
from ti64phase.errors import DomainError
from ti64phase.integrator import StepConfig, Trajectory
from ti64phase.phase_model import PhaseState, martensite_pseudo_eq


def fake_traj(t, v):
    t = np.asarray(t, dtype=float)
    z = np.zeros_like(t)
    return Trajectory(t, 1000.0 - t, np.asarray(v, dtype=float), z, 1.0 - np.asarray(v), z, z, z, z)


def test_extract_crossings_interpolates_up_and_down():
    tr = fake_traj([0, 1, 2, 3], [0.0, 0.6, 0.2, 0.8])
    out = extract_crossings(tr, lambda x: x.x_alpha_s, (0.5,), key=7.0)
    assert [(c.direction, c.t) for c in out] == [("up", pytest.approx(5 / 6)),
                                                ("down", pytest.approx(1.25)),
                                                ("up", pytest.approx(2.5))]
    assert out[0].T == pytest.approx(1000.0 - 5 / 6)
    assert all(c.key == 7.0 for c in out)


def test_extract_crossings_touching_level_counts_once():
    tr = fake_traj([0, 1, 2], [0.0, 0.5, 0.5])
    out = extract_crossings(tr, lambda x: x.x_alpha_s, (0.5,))
    assert len(out) == 1 and out[0].t == 1.0


def test_isoline_curve_and_first_up():
    pts = (Crossing(0.5, 3.0, 900.0, "up", 900.0), Crossing(0.5, 1.0, 1000.0, "up", 1000.0),
           Crossing(0.5, 4.0, 900.0, "up", 900.0), Crossing(0.1, 0.5, 900.0, "up", 900.0))
    iso = IsolineSet("alpha_s", "absolute", (0.1, 0.5), pts)
    assert [p.t for p in iso.curve(0.5)] == [3.0, 4.0, 1.0]
    assert iso.first_up(0.5) == {900.0: 3.0, 1000.0: 1.0}


def test_fmt_nine_significant_digits():
    assert fmt(1.0 / 3.0) == "0.333333333"
    assert fmt(123456789012.0) == "1.23456789e+11"
    assert fmt(0.5) == "0.5"


def test_ttt_times_schedule():
    t = ttt_times(800.0, horizon=1e4)
    assert t[0] == 0.0 and t[-1] == pytest.approx(1e4)
    assert np.all(np.diff(t) > 0)
    assert np.allclose(np.diff(t[:1200]), 1e-3)   # 1.2 s quench at 1 ms


def test_small_ttt_sweep_has_all_thresholds():
    d = generate_ttt(T_targets=(800.0, 900.0, 1000.0))
    iso = d.isolines["alpha_s"]
    for level in THRESHOLDS:
        assert len(iso.curve(level, "up")) == 3
    # crossings of increasing levels come later in time
    firsts = [iso.first_up(level)[900.0] for level in THRESHOLDS]
    assert firsts == sorted(firsts)


def test_ttt_output_independent_of_workers():
    targets = (500.0, 850.0, 1200.0)
    texts = []
    for workers in (1, 2):
        buf = io.StringIO()
        write_isolines(buf, generate_ttt(T_targets=targets, workers=workers).isolines)
        texts.append(buf.getvalue())
    assert texts[0] == texts[1]
    assert texts[0].startswith("phase,level,time_s,temp_K,direction\n")


def test_ttt_rejects_empty_targets():
    with pytest.raises(DomainError):
        generate_ttt(T_targets=())


def test_cct_sweep_orders_and_is_deterministic():
    rates = (-410.0, -5.0, -50.0)
    outs = []
    for workers in (1, 2):
        d = generate_cct(rate_targets=rates, workers=workers)
        buf = io.StringIO()
        write_terminals(buf, d.curves)
        write_isolines(buf, d.isolines)
        outs.append(buf.getvalue())
    assert outs[0] == outs[1]
    assert [c.rate for c in d.curves] == [-5.0, -50.0, -410.0]
    slow, fast = d.curves[0].terminal, d.curves[-1].terminal
    assert slow.x_alpha_s > fast.x_alpha_s
    assert fast.x_alpha_m > slow.x_alpha_m


def test_cct_rejects_heating_rates():
    with pytest.raises(DomainError):
        generate_cct(rate_targets=(10.0,))


def test_cct_terminal_state_completes_martensite():
    s = cct_terminal_state(PhaseState.solid(0.3, 0.1))
    assert s.x_alpha_s == 0.3
    assert s.x_alpha_m == pytest.approx(martensite_pseudo_eq(293.15, 0.3))
    s.validate()


def test_uniform_cct_curve_uses_configured_step():
    curve, tr = simulate_cct_curve(-200.0, config=StepConfig(dt=1e-2), uniform=True)
    assert np.allclose(np.diff(tr.t)[:-1], 1e-2)
    assert tr.T[-1] == pytest.approx(CCT_STOP_T, abs=1e-6)
    curve.terminal.validate()


def curves_from(rows):
    return [CCTCurve(r, 1.0, PhaseState.solid(xs, xm)) for r, xs, xm in rows]


def test_critical_rates_on_grid():
    curves = curves_from([(-1.0, 0.9, 0.0), (-10.0, 0.6, 0.005), (-50.0, 0.2, 0.5),
                          (-100.0, 0.02, 0.8), (-200.0, 0.005, 0.85), (-300.0, 0.001, 0.89)])
    assert critical_rates(curves) == (-200.0, -10.0)


def test_critical_rates_refined_by_bisection():
    curves = curves_from([(-100.0, 0.02, 0.8), (-200.0, 0.005, 0.85),
                          (-1.0, 0.9, 0.0), (-10.0, 0.6, 0.02)])

    def refine(rate):
        # stable alpha drops below 1 % faster than -150 K/s, martensite appears beyond -4 K/s
        return PhaseState.solid(0.005 if rate < -150.0 else 0.02, 0.02 if rate < -4.0 else 0.0)

    r_mart, r_diff = critical_rates(curves, refine, rate_tol=1e-3)
    assert r_mart == pytest.approx(-150.0, abs=1e-3)
    assert r_diff == pytest.approx(-4.0, abs=1e-3)


def test_critical_rates_none_when_unreached():
    curves = curves_from([(-1.0, 0.9, 0.0), (-2.0, 0.8, 0.0)])
    assert critical_rates(curves) == (None, -2.0)
