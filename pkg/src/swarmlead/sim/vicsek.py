"""Bounded Vicsek flock with informed leaders.

Leaders (ids ``0 .. n_leaders-1``) hold a noisy heading and a constant speed.
Followers align to the weighted circular mean heading of agents within the
interaction radius (leaders count ``leader_weight`` times) and relax their
speed toward the mean speed of leader neighbours. An agent that would leave
the square world turns by a random angle in ``turn_range`` and then drifts for
``drift_ticks`` steps without neighbour updates.

Updates are synchronous: every agent reads the positions and headings of the
start of the tick.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError
from ..rng import AgentStreams, agent_generator
from ..trajectory import TrajectorySet


@dataclass
class VicsekConfig:
    n_leaders: int = 5
    n_followers: int = 100
    world_size: float = 100.0
    interaction_radius: float = 3.0
    leader_weight: float = 2.0
    speed_adjust_rate: float = 0.2
    noise_half_angle: float = 10.0
    drift_ticks: int = 10
    steps: int = 1000
    seed: int = 0
    leader_noise: bool = True
    leaders_align: bool = False
    leader_speed: tuple = (0.6, 1.0)
    follower_speed: tuple = (0.3, 0.6)
    turn_range: tuple = (150.0, 210.0)

    def validate(self):
        if min(self.n_leaders, self.n_followers, self.drift_ticks, self.steps) < 0:
            raise ConfigError("vicsek counts must be >= 0")
        if self.interaction_radius <= 0:
            raise ConfigError("interaction_radius must be > 0")
        if not 0 <= self.speed_adjust_rate <= 1:
            raise ConfigError("speed_adjust_rate must lie in [0, 1]")
        if self.world_size <= 0:
            raise ConfigError("world_size must be > 0")
        return self

    @property
    def n_agents(self):
        return self.n_leaders + self.n_followers


@dataclass
class VicsekState:
    config: VicsekConfig
    x: np.ndarray
    y: np.ndarray
    heading: np.ndarray  # degrees in [0, 360)
    speed: np.ndarray
    is_leader: np.ndarray
    drift: np.ndarray  # drift ticks remaining
    tick: int = 0
    _noise: AgentStreams = field(default=None, repr=False)
    _boundary: list = field(default=None, repr=False)

    @property
    def agents(self):
        return np.arange(len(self.x))


def init(config: VicsekConfig) -> VicsekState:
    config.validate()
    n = config.n_agents
    is_leader = np.arange(n) < config.n_leaders
    draws = np.array([agent_generator(config.seed, "init", a).random(4) for a in range(n)]).reshape(n, 4)
    L = config.world_size
    lo = np.where(is_leader, config.leader_speed[0], config.follower_speed[0])
    hi = np.where(is_leader, config.leader_speed[1], config.follower_speed[1])
    return VicsekState(
        config=config,
        x=draws[:, 0] * L,
        y=draws[:, 1] * L,
        heading=draws[:, 2] * 360.0,
        speed=lo + draws[:, 3] * (hi - lo),
        is_leader=is_leader,
        drift=np.zeros(n, dtype=int),
        _noise=AgentStreams(config.seed, "noise", range(n)),
        _boundary=[agent_generator(config.seed, "boundary", a) for a in range(n)],
    )


def _aligned_heading(state, nbr, rows):
    cfg = state.config
    w = nbr[rows].astype(float)
    w[:, state.is_leader] *= cfg.leader_weight
    # self always weighs 1
    w[np.arange(len(rows)), rows] = 1.0
    rad = np.radians(state.heading)
    sx = w @ np.cos(rad)
    sy = w @ np.sin(rad)
    out = state.heading[rows].copy()
    ok = np.hypot(sx, sy) > 1e-12
    out[ok] = np.degrees(np.arctan2(sy[ok], sx[ok]))
    return out


def step(state: VicsekState) -> VicsekState:
    """Advance ``state`` by one tick in place and return it."""
    cfg = state.config
    n = len(state.x)
    L = cfg.world_size
    noise = (2.0 * state._noise.next() - 1.0) * cfg.noise_half_angle
    if n == 0:
        state.tick += 1
        return state

    dx = state.x[:, None] - state.x[None, :]
    dy = state.y[:, None] - state.y[None, :]
    nbr = dx * dx + dy * dy <= cfg.interaction_radius ** 2

    free = state.drift == 0
    heading = state.heading.copy()
    speed = state.speed.copy()

    followers = np.flatnonzero(free & ~state.is_leader)
    if followers.size:
        heading[followers] = _aligned_heading(state, nbr, followers) + noise[followers]
        lead_nbr = nbr[followers] & state.is_leader[None, :]
        lead_nbr[np.arange(followers.size), followers] = False
        count = lead_nbr.sum(axis=1)
        has = count > 0
        if has.any():
            mean_lead = (lead_nbr[has] @ state.speed) / count[has]
            f = followers[has]
            speed[f] = state.speed[f] + cfg.speed_adjust_rate * (mean_lead - state.speed[f])

    leaders = np.flatnonzero(free & state.is_leader)
    if leaders.size:
        base = _aligned_heading(state, nbr, leaders) if cfg.leaders_align else heading[leaders]
        heading[leaders] = base + noise[leaders] if cfg.leader_noise else base

    heading %= 360.0
    rad = np.radians(heading)
    nx = state.x + speed * np.cos(rad)
    ny = state.y + speed * np.sin(rad)
    out = (nx < 0) | (nx > L) | (ny < 0) | (ny > L)

    drift = np.where(free, 0, state.drift - 1)
    for i in np.flatnonzero(out):
        lo, hi = cfg.turn_range
        heading[i] = (heading[i] + lo + (hi - lo) * state._boundary[i].random()) % 360.0
        r = np.radians(heading[i])
        nx[i] = min(max(state.x[i] + speed[i] * np.cos(r), 0.0), L)
        ny[i] = min(max(state.y[i] + speed[i] * np.sin(r), 0.0), L)
        drift[i] = cfg.drift_ticks

    state.x, state.y = nx, ny
    state.heading = np.where(heading >= 360.0, 0.0, heading)
    state.speed = speed
    state.drift = drift
    state.tick += 1
    return state


def roles(config: VicsekConfig):
    return {a: ("leader" if a < config.n_leaders else "follower") for a in range(config.n_agents)}


def run(config: VicsekConfig) -> TrajectorySet:
    """Simulate ``config.steps`` ticks and record the position after each one."""
    state = init(config)
    n = config.n_agents
    xs = np.empty((n, config.steps))
    ys = np.empty((n, config.steps))
    for t in range(config.steps):
        step(state)
        xs[:, t] = state.x
        ys[:, t] = state.y
    return TrajectorySet(tuple(range(n)), xs, ys, roles(config))
