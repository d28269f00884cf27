"""Trajectory data model, kinematic derivation, windowing and CSV I/O.

Positions are stored as dense ``(n_agents, n_ticks)`` arrays. Ticks where an
agent does not exist (e.g. a sheep after it was eaten) hold NaN and are not
written to CSV.

Kinematics are derived by backward differences with a one-tick step and are
aligned on ticks ``2 .. T-1``, so every kinematic series has ``T - 2`` samples.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    AlignmentError,
    InsufficientDataError,
    SchemaError,
    TrajectoryParseError,
    WindowRangeError,
)

VARIABLES = ("vx", "vy", "speed", "acc", "heading")
ROLES = ("leader", "follower", "alpha", "pack", "independent", "sheep", "none")
CSV_HEADER = ("tick", "agent_id", "role", "x", "y")


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TrajectorySet:
    """Per-agent positions on a shared tick axis, plus derived kinematics.

    Parameters
    ----------
    agents : tuple of int
        Agent ids, one per row of ``x`` and ``y``.
    x, y : ndarray, shape (n_agents, n_ticks)
        Positions in world units; NaN where the agent is absent.
    roles : mapping, optional
        Agent id -> role label.
    """

    agents: tuple
    x: np.ndarray
    y: np.ndarray
    roles: Mapping[int, str] | None = None
    _index: dict = field(init=False, repr=False)

    def __post_init__(self):
        agents = tuple(int(a) for a in self.agents)
        x, y = _frozen(self.x), _frozen(self.y)
        if x.ndim == 1 and x.size == 0:
            x = x.reshape(len(agents), 0)
            y = y.reshape(len(agents), 0)
        if x.shape != y.shape or x.ndim != 2:
            raise AlignmentError(f"x and y must share a 2-D shape, got {x.shape} and {y.shape}")
        if x.shape[0] != len(agents):
            raise AlignmentError(f"{len(agents)} agent ids for {x.shape[0]} position rows")
        if any(a < 0 for a in agents):
            raise SchemaError("agent ids must be nonnegative")
        index = {a: i for i, a in enumerate(agents)}
        if len(index) != len(agents):
            raise SchemaError("duplicate agent ids")
        roles = None
        if self.roles is not None:
            roles = {int(a): str(r) for a, r in self.roles.items()}
            missing = set(agents) - set(roles)
            if missing:
                raise SchemaError(f"no role for agents {sorted(missing)[:5]}")
            bad = {r for r in roles.values()} - set(ROLES)
            if bad:
                raise SchemaError(f"unknown role labels {sorted(bad)}")
            roles = {a: roles[a] for a in agents}
        object.__setattr__(self, "agents", agents)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "roles", roles)
        object.__setattr__(self, "_index", index)

    @property
    def n_agents(self):
        return len(self.agents)

    @property
    def n_ticks(self):
        """Number of position ticks (T)."""
        return self.x.shape[1]

    @property
    def length(self):
        """Number of aligned kinematic samples (T - 2)."""
        return max(self.n_ticks - 2, 0)

    def row(self, agent):
        return self._index[agent]

    @cached_property
    def kinematics(self):
        """Mapping variable name -> read-only ``(n_agents, T - 2)`` array."""
        if self.n_ticks < 3:
            raise InsufficientDataError(
                f"kinematics need at least 3 position samples, got {self.n_ticks}"
            )
        out = _kinematics(self.x, self.y)
        for a in out.values():
            a.setflags(write=False)
        return out

    def series(self, variable):
        if variable not in VARIABLES:
            raise KeyError(f"unknown kinematic variable {variable!r}")
        return self.kinematics[variable]

    def agents_with_role(self, *roles):
        if self.roles is None:
            return ()
        return tuple(a for a in self.agents if self.roles[a] in roles)

    def complete_agents(self):
        """Agents present at every tick."""
        ok = np.isfinite(self.x).all(axis=1) & np.isfinite(self.y).all(axis=1)
        return tuple(a for a, keep in zip(self.agents, ok) if keep)

    def select(self, agents: Sequence[int]):
        """Sub-set restricted to ``agents`` (in the given order)."""
        rows = [self._index[a] for a in agents]
        roles = None if self.roles is None else {a: self.roles[a] for a in agents}
        return TrajectorySet(tuple(agents), self.x[rows], self.y[rows], roles)


def _kinematics(x, y):
    vx = np.diff(x, axis=1)
    vy = np.diff(y, axis=1)
    speed = np.hypot(vx, vy)
    heading = np.degrees(np.arctan2(vy, vx)) % 360.0
    heading = np.where(heading >= 360.0, 0.0, heading)
    # undefined direction at zero speed: carry the last defined heading forward
    defined = speed != 0
    cols = np.arange(speed.shape[1])
    last = np.maximum.accumulate(np.where(defined, cols, -1), axis=1)
    carried = np.take_along_axis(heading, np.maximum(last, 0), axis=1)
    heading = np.where(last >= 0, carried, 0.0)
    acc = np.diff(speed, axis=1)
    return {
        "vx": vx[:, 1:].copy(),
        "vy": vy[:, 1:].copy(),
        "speed": speed[:, 1:].copy(),
        "acc": acc,
        "heading": heading[:, 1:].copy(),
    }


def derive_kinematics(positions, roles=None):
    """Build a :class:`TrajectorySet` from raw per-agent positions.

    Parameters
    ----------
    positions : mapping
        Agent id -> sequence of ``(x, y)`` pairs, one per tick.
    roles : mapping, optional
        Agent id -> role label.

    Returns
    -------
    TrajectorySet
        With kinematics already computed.
    """
    agents = tuple(positions)
    arrays = [np.asarray(positions[a], dtype=float).reshape(-1, 2) for a in agents]
    lengths = {len(a) for a in arrays}
    if len(lengths) > 1:
        raise AlignmentError(f"agents have unequal series lengths {sorted(lengths)}")
    n_ticks = lengths.pop() if lengths else 0
    if n_ticks < 3:
        raise InsufficientDataError(f"need at least 3 position samples per agent, got {n_ticks}")
    xy = np.stack(arrays)
    traj = TrajectorySet(agents, xy[:, :, 0], xy[:, :, 1], roles)
    traj.kinematics
    return traj


def extract_window(series, t0, width):
    """Return ``width`` consecutive samples starting at ``t0`` (last axis).

    The result is a read-only view; the source is never modified.
    """
    series = np.asarray(series)
    n = series.shape[-1]
    if width < 1 or t0 < 0 or t0 + width > n:
        raise WindowRangeError(f"window [{t0}, {t0 + width}) outside series of length {n}")
    view = series[..., t0 : t0 + width].view()
    view.setflags(write=False)
    return view


def unwrap_heading(window):
    """Unwrap headings in degrees so that no step exceeds 180 in magnitude.

    A step of exactly +/-180 is left alone.
    """
    return np.unwrap(np.asarray(window, dtype=float), period=360.0, axis=-1)


def _fmt(v):
    return format(v, ".17g")


def write_trajectory_csv(traj: TrajectorySet, path):
    """Write ``traj`` as ``tick,agent_id,role,x,y`` rows sorted by tick then id.

    Returns the number of data rows written.
    """
    order = np.argsort(np.asarray(traj.agents, dtype=np.int64), kind="stable")
    roles = traj.roles or {}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for t in range(traj.n_ticks):
        for r in order:
            xv, yv = traj.x[r, t], traj.y[r, t]
            if not (np.isfinite(xv) and np.isfinite(yv)):
                continue
            a = traj.agents[r]
            w.writerow((t, a, roles.get(a, "none"), _fmt(float(xv)), _fmt(float(yv))))
    Path(path).write_text(buf.getvalue())
    return int((np.isfinite(traj.x) & np.isfinite(traj.y)).sum())


def read_trajectory_csv(path):
    """Parse a trajectory CSV written by :func:`write_trajectory_csv`.

    Raises
    ------
    TrajectoryParseError
        On a malformed header or row (the message carries the line number).
    SchemaError
        On duplicate ``(agent, tick)`` pairs, non-contiguous ticks or
        inconsistent roles.
    """
    records = {}
    roles = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != CSV_HEADER:
            raise TrajectoryParseError(f"expected header {','.join(CSV_HEADER)}", line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 5:
                raise TrajectoryParseError(f"expected 5 fields, got {len(row)}", line=lineno)
            try:
                tick, agent = int(row[0]), int(row[1])
                xv, yv = float(row[3]), float(row[4])
            except ValueError as exc:
                raise TrajectoryParseError(str(exc), line=lineno) from None
            role = row[2].strip()
            if tick < 0 or agent < 0:
                raise TrajectoryParseError("tick and agent_id must be nonnegative", line=lineno)
            if role not in ROLES:
                raise TrajectoryParseError(f"unknown role {role!r}", line=lineno)
            if roles.setdefault(agent, role) != role:
                raise SchemaError(f"line {lineno}: agent {agent} changes role")
            per_agent = records.setdefault(agent, {})
            if tick in per_agent:
                raise SchemaError(f"line {lineno}: duplicate record for agent {agent} tick {tick}")
            per_agent[tick] = (xv, yv)

    agents = tuple(sorted(records))
    n_ticks = 1 + max((max(r) for r in records.values()), default=-1)
    x = np.full((len(agents), n_ticks), np.nan)
    y = np.full((len(agents), n_ticks), np.nan)
    for i, a in enumerate(agents):
        ticks = records[a]
        if max(ticks) != len(ticks) - 1:
            raise SchemaError(f"agent {a}: ticks are not contiguous from 0")
        for t, (xv, yv) in ticks.items():
            x[i, t] = xv
            y[i, t] = yv
    role_map = None if all(r == "none" for r in roles.values()) else roles
    return TrajectorySet(agents, x, y, role_map)
