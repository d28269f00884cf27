import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from swarmlead import (
    TrajectorySet,
    derive_kinematics,
    extract_window,
    read_trajectory_csv,
    unwrap_heading,
    write_trajectory_csv,
)
from swarmlead.errors import (
    AlignmentError,
    InsufficientDataError,
    SchemaError,
    TrajectoryParseError,
    WindowRangeError,
)


def test_straight_line_kinematics():
    pos = {7: [(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (3.0, 0.0)]}
    k = derive_kinematics(pos).kinematics
    np.testing.assert_array_equal(k["vx"], [[1.0, 1.0]])
    np.testing.assert_array_equal(k["vy"], [[0.0, 0.0]])
    np.testing.assert_array_equal(k["speed"], [[1.0, 1.0]])
    np.testing.assert_array_equal(k["acc"], [[0.0, 0.0]])
    np.testing.assert_array_equal(k["heading"], [[0.0, 0.0]])


def test_hand_computed_turn():
    # (0,0) -> (0,1) -> (-2,1) -> (-2,-2)
    pos = {1: [(0, 0), (0, 1), (-2, 1), (-2, -2)]}
    k = derive_kinematics(pos).kinematics
    np.testing.assert_allclose(k["vx"], [[-2.0, 0.0]])
    np.testing.assert_allclose(k["vy"], [[0.0, -3.0]])
    np.testing.assert_allclose(k["speed"], [[2.0, 3.0]])
    np.testing.assert_allclose(k["acc"], [[1.0, 1.0]])
    np.testing.assert_allclose(k["heading"], [[180.0, 270.0]])


def test_heading_carried_through_stops():
    pos = {0: [(0, 0), (0, 1), (0, 1), (0, 1), (1, 1)]}
    k = derive_kinematics(pos).kinematics
    np.testing.assert_allclose(k["heading"], [[90.0, 90.0, 0.0]])
    never = derive_kinematics({0: [(2, 2)] * 4}).kinematics
    np.testing.assert_array_equal(never["heading"], [[0.0, 0.0]])


def test_too_short_and_unequal():
    with pytest.raises(InsufficientDataError):
        derive_kinematics({0: [(0, 0), (1, 1)]})
    with pytest.raises(AlignmentError):
        derive_kinematics({0: [(0, 0)] * 4, 1: [(0, 0)] * 5})
    traj = TrajectorySet((0,), np.zeros((1, 2)), np.zeros((1, 2)))
    with pytest.raises(InsufficientDataError):
        traj.kinematics


@given(
    arrays(np.float64, st.tuples(st.integers(1, 4), st.integers(3, 30)), elements=st.floats(-1e3, 1e3)),
    arrays(np.float64, st.tuples(st.integers(1, 4), st.integers(3, 30)), elements=st.floats(-1e3, 1e3)),
)
def test_kinematic_shapes_and_ranges(x, y):
    n = min(x.shape[0], y.shape[0])
    t = min(x.shape[1], y.shape[1])
    traj = TrajectorySet(tuple(range(n)), x[:n, :t], y[:n, :t])
    k = traj.kinematics
    for v in k.values():
        assert v.shape == (n, t - 2)
        assert not v.flags.writeable
    assert (k["speed"] >= 0).all()
    assert ((k["heading"] >= 0) & (k["heading"] < 360)).all()
    np.testing.assert_allclose(k["speed"], np.hypot(k["vx"], k["vy"]))


def test_extract_window_is_readonly_view():
    s = np.arange(10.0)
    w = extract_window(s, 2, 5)
    np.testing.assert_array_equal(w, [2, 3, 4, 5, 6])
    assert not w.flags.writeable
    assert np.shares_memory(w, s)
    assert s.flags.writeable
    for t0, width in [(-1, 3), (6, 5), (0, 0), (0, 11)]:
        with pytest.raises(WindowRangeError):
            extract_window(s, t0, width)
    with pytest.raises(IndexError):
        extract_window(s, 8, 3)


def test_unwrap_examples():
    np.testing.assert_allclose(unwrap_heading([350.0, 10.0]), [350.0, 370.0])
    np.testing.assert_allclose(unwrap_heading([10.0, 350.0, 330.0]), [10.0, -10.0, -30.0])
    # ties at exactly 180 are left alone
    np.testing.assert_allclose(unwrap_heading([0.0, 180.0, 0.0]), [0.0, 180.0, 0.0])


@given(st.lists(st.floats(0, 359.999), min_size=2, max_size=60))
def test_unwrap_properties(h):
    u = unwrap_heading(h)
    assert (np.abs(np.diff(u)) <= 180 + 1e-9).all()
    # every unwrapped value differs from the raw heading by a multiple of 360
    turns = (u - np.asarray(h)) / 360.0
    np.testing.assert_allclose(turns, np.round(turns), atol=1e-9)
    assert u[0] == h[0]


def test_csv_round_trip(tmp_path):
    rng = np.random.default_rng(3)
    x = rng.uniform(0, 10, (3, 6))
    y = rng.uniform(0, 10, (3, 6))
    x[1, 4:] = y[1, 4:] = np.nan
    traj = TrajectorySet((4, 9, 2), x, y, {4: "alpha", 9: "sheep", 2: "pack"})
    p = tmp_path / "t.csv"
    rows = write_trajectory_csv(traj, p)
    assert rows == 16
    lines = p.read_text().splitlines()
    assert lines[0] == "tick,agent_id,role,x,y"
    assert [ln.split(",")[1] for ln in lines[1:4]] == ["2", "4", "9"]
    back = read_trajectory_csv(p)
    assert back.agents == (2, 4, 9)
    assert back.roles == {2: "pack", 4: "alpha", 9: "sheep"}
    for a in traj.agents:
        np.testing.assert_array_equal(back.x[back.row(a)], traj.x[traj.row(a)])
        np.testing.assert_array_equal(back.y[back.row(a)], traj.y[traj.row(a)])
    write_trajectory_csv(back, tmp_path / "u.csv")
    assert (tmp_path / "u.csv").read_bytes() == p.read_bytes()


@pytest.mark.parametrize(
    "body, err, line",
    [
        ("tick,agent_id,role,x,y\n0,1,none,a,2\n", TrajectoryParseError, 2),
        ("tick,agent_id,role,x,y\n0,1,none,1,2\n0,2,none,1\n", TrajectoryParseError, 3),
        ("tick,agent,role,x,y\n", TrajectoryParseError, 1),
        ("tick,agent_id,role,x,y\n0,1,wizard,1,2\n", TrajectoryParseError, 2),
    ],
)
def test_csv_parse_errors_carry_line(tmp_path, body, err, line):
    p = tmp_path / "bad.csv"
    p.write_text(body)
    with pytest.raises(err, match=f"line {line}"):
        read_trajectory_csv(p)


def test_csv_schema_errors(tmp_path):
    p = tmp_path / "dup.csv"
    p.write_text("tick,agent_id,role,x,y\n0,1,none,1,2\n0,1,none,1,2\n")
    with pytest.raises(SchemaError, match="duplicate"):
        read_trajectory_csv(p)
    p.write_text("tick,agent_id,role,x,y\n0,1,none,1,2\n2,1,none,1,2\n")
    with pytest.raises(SchemaError, match="contiguous"):
        read_trajectory_csv(p)
    p.write_text("tick,agent_id,role,x,y\n0,1,pack,1,2\n1,1,alpha,1,2\n")
    with pytest.raises(SchemaError, match="role"):
        read_trajectory_csv(p)


def test_select_and_roles():
    traj = TrajectorySet((0, 1, 2), np.zeros((3, 4)), np.ones((3, 4)), {0: "alpha", 1: "pack", 2: "sheep"})
    assert traj.agents_with_role("alpha", "pack") == (0, 1)
    sub = traj.select((2, 0))
    assert sub.agents == (2, 0)
    assert sub.roles == {2: "sheep", 0: "alpha"}
    with pytest.raises(SchemaError):
        TrajectorySet((0, 0), np.zeros((2, 3)), np.zeros((2, 3)))
    with pytest.raises(SchemaError):
        TrajectorySet((0,), np.zeros((1, 3)), np.zeros((1, 3)), {0: "wizard"})
