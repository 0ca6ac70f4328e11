import io

import pytest

from ti64phase.errors import ParseError
from ti64phase.field import evaluate_field, load_points, write_field
from ti64phase.integrator import StepConfig

QUENCH = "time_s,temp_K\n0,1400\n2.2137,293.15\n10,293.15\n"
HOLD = "time_s,temp_K\n0,1400\n1,900\n60,900\n"


def make_field(tmp_path, histories):
    lines = ["point_id,x_mm,y_mm,z_mm"]
    hist = tmp_path / "hist"
    hist.mkdir()
    for i, (pid, text) in enumerate(histories.items()):
        lines.append(f"{pid},{i},0,{-i}")
        (hist / f"{pid}.csv").write_text(text)
    pts = tmp_path / "points.csv"
    pts.write_text("\n".join(lines) + "\n")
    return pts, hist


def test_identical_histories_identical_states(tmp_path):
    pts, hist = make_field(tmp_path, {"a": QUENCH, "b": QUENCH, "c": QUENCH})
    res = evaluate_field(load_points(pts), hist, config=StepConfig(dt=1e-2))
    states = [r.terminal for r in res.records]
    assert states[0] == states[1] == states[2]


def test_preheated_point_has_no_martensite(tmp_path):
    pts, hist = make_field(tmp_path, {"center": HOLD, "edge": QUENCH})
    res = evaluate_field(load_points(pts), hist, config=StepConfig(dt=1e-2)).by_id()
    assert res["center"].terminal.x_alpha_m == 0.0
    assert res["edge"].terminal.x_alpha_m > 0.85
    for r in res.values():
        r.terminal.validate()


def test_order_and_output_independent_of_workers(tmp_path):
    pts, hist = make_field(tmp_path, {"z": QUENCH, "a": HOLD})
    outs = []
    for workers in (1, 2):
        buf = io.StringIO()
        write_field(buf, evaluate_field(load_points(pts), hist, config=StepConfig(dt=1e-2),
                                        workers=workers))
        outs.append(buf.getvalue())
    assert outs[0] == outs[1]
    lines = outs[0].splitlines()
    assert lines[0] == "point_id,x_mm,y_mm,z_mm,x_beta,x_alpha_s,x_alpha_m"
    assert [l.split(",")[0] for l in lines[1:]] == ["z", "a"]


def test_missing_history_names_point(tmp_path):
    pts, hist = make_field(tmp_path, {"a": HOLD})
    (hist / "a.csv").unlink()
    with pytest.raises(ParseError, match="'a'"):
        evaluate_field(load_points(pts), hist)


def test_trajectories_written(tmp_path):
    pts, hist = make_field(tmp_path, {"p1": HOLD})
    res = evaluate_field(load_points(pts), hist, config=StepConfig(dt=0.1),
                         trajectory_dir=tmp_path / "traj")
    text = (tmp_path / "traj" / "p1.csv").read_text().splitlines()
    assert text[0] == "time_s,temp_K,x_beta,x_alpha_s,x_alpha_m,x_liq"
    assert res.records[0].trajectory.endswith("p1.csv")


@pytest.mark.parametrize("text,match", [
    ("point_id,x_mm,y_mm\n", "missing column"),
    ("point_id,x_mm,y_mm,z_mm\na,0,0,0\na,1,1,1\n", "duplicate"),
    ("point_id,x_mm,y_mm,z_mm\n../a,0,0,0\n", "invalid point id"),
    ("point_id,x_mm,y_mm,z_mm\na,0,q,0\n", "non-numeric"),
    ("point_id,x_mm,y_mm,z_mm\n", "no points"),
])
def test_points_file_errors(tmp_path, text, match):
    f = tmp_path / "p.csv"
    f.write_text(text)
    with pytest.raises(ParseError, match=match):
        load_points(f)
