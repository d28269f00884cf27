"""Wolf-sheep predation with one alpha-led pack and independent hunters.

Agent ids: sheep ``0 .. n_sheep-1``, the alpha at ``n_sheep``, pack wolves
right after it, then the independent wolves. With default populations this is
sheep 0-99, alpha 100, pack 101-114, independents 115-129.

Per tick the agents update sequentially in the order alpha, pack (ascending
id), independents (ascending id), sheep. Each agent sees the already-updated
state of the agents before it, so a target picked by the alpha is followed by
the pack within the same tick.

While the alpha patrols, each pack wolf steers toward its own slot, a point
``pack_offset`` units behind the alpha rotated by a fixed per-wolf angle.
During a hunt the pack heads straight for the alpha's prey. The prey is only
taken when the alpha and at least one pack wolf are within ``capture_radius``
of it at the same time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError
from ..rng import AgentStreams, agent_generator
from ..trajectory import TrajectorySet


@dataclass
class WolfSheepConfig:
    n_sheep: int = 100
    n_pack: int = 14
    n_independent: int = 15
    world_size: float = 50.0
    patrol_speed: float = 0.5
    hunt_speed: float = 1.0
    pack_speed_factor: float = 1.0
    detect_radius: float = 10.0
    capture_radius: float = 1.5
    trigger_prob: float = 0.02
    sheep_speed: float = 0.3
    sheep_turn_noise: float = 20.0
    wolf_turn_noise: float = 20.0
    pack_offset: float = 2.0
    pack_spread: float = 120.0  # total angular spread of pack slots, degrees
    pack_catchup: float = 2.0  # max slot-seeking speed as a multiple of alpha speed
    steps: int = 500
    seed: int = 0

    def validate(self):
        if min(self.n_sheep, self.n_pack, self.n_independent, self.steps) < 0:
            raise ConfigError("wolfsheep counts must be >= 0")
        if not 0 <= self.trigger_prob <= 1:
            raise ConfigError("trigger_prob must lie in [0, 1]")
        if not self.capture_radius < self.detect_radius:
            raise ConfigError("capture_radius must be smaller than detect_radius")
        if self.world_size <= 0:
            raise ConfigError("world_size must be > 0")
        return self

    @property
    def alpha_id(self):
        return self.n_sheep

    @property
    def pack_ids(self):
        return tuple(range(self.n_sheep + 1, self.n_sheep + 1 + self.n_pack))

    @property
    def independent_ids(self):
        start = self.n_sheep + 1 + self.n_pack
        return tuple(range(start, start + self.n_independent))

    @property
    def n_agents(self):
        return self.n_sheep + 1 + self.n_pack + self.n_independent


@dataclass
class WolfState:
    id: int
    kind: str  # alpha | pack | independent
    x: float
    y: float
    heading: float
    speed: float
    target: int | None = None


@dataclass
class WolfSheepState:
    config: WolfSheepConfig
    wolves: list  # alpha, pack..., independents...
    sheep_x: np.ndarray
    sheep_y: np.ndarray
    sheep_heading: np.ndarray
    alive: np.ndarray
    tick: int = 0
    captures: list = field(default_factory=list)  # (tick, wolf id, sheep id)
    _noise: AgentStreams = field(default=None, repr=False)
    _trigger: AgentStreams = field(default=None, repr=False)

    @property
    def alpha(self):
        return self.wolves[0]

    @property
    def pack(self):
        return self.wolves[1 : 1 + self.config.n_pack]

    @property
    def independents(self):
        return self.wolves[1 + self.config.n_pack :]

    @property
    def n_alive(self):
        return int(self.alive.sum())


def init(config: WolfSheepConfig) -> WolfSheepState:
    config.validate()
    L = config.world_size
    draws = [agent_generator(config.seed, "init", a).random(3) for a in range(config.n_agents)]
    draws = np.array(draws).reshape(config.n_agents, 3)
    s = slice(0, config.n_sheep)
    wolves = []
    kinds = ["alpha"] + ["pack"] * config.n_pack + ["independent"] * config.n_independent
    for k, a in enumerate(range(config.n_sheep, config.n_agents)):
        d = draws[a]
        wolves.append(WolfState(a, kinds[k], d[0] * L, d[1] * L, d[2] * 360.0, config.patrol_speed))
    wolf_ids = range(config.n_sheep, config.n_agents)
    return WolfSheepState(
        config=config,
        wolves=wolves,
        sheep_x=draws[s, 0] * L,
        sheep_y=draws[s, 1] * L,
        sheep_heading=draws[s, 2] * 360.0,
        alive=np.ones(config.n_sheep, dtype=bool),
        _noise=AgentStreams(config.seed, "noise", range(config.n_agents)),
        _trigger=AgentStreams(config.seed, "trigger", wolf_ids),
    )


def _reflect(x, y, heading, L):
    if x < 0:
        x, heading = -x, 180.0 - heading
    elif x > L:
        x, heading = 2 * L - x, 180.0 - heading
    if y < 0:
        y, heading = -y, -heading
    elif y > L:
        y, heading = 2 * L - y, -heading
    return min(max(x, 0.0), L), min(max(y, 0.0), L), heading % 360.0


def _patrol(w, turn, speed, L):
    w.heading = (w.heading + turn) % 360.0
    w.speed = speed
    r = math.radians(w.heading)
    w.x, w.y, w.heading = _reflect(w.x + speed * math.cos(r), w.y + speed * math.sin(r), w.heading, L)


def _move_toward(w, tx, ty, speed, L):
    dx, dy = tx - w.x, ty - w.y
    dist = math.hypot(dx, dy)
    if dist > 0:
        w.heading = math.degrees(math.atan2(dy, dx)) % 360.0
    w.speed = speed
    travel = min(speed, dist)
    r = math.radians(w.heading)
    # targets lie inside the world; clamping only absorbs rounding overshoot
    w.x = min(max(w.x + travel * math.cos(r), 0.0), L)
    w.y = min(max(w.y + travel * math.sin(r), 0.0), L)


def _nearest_sheep(state, w):
    cfg = state.config
    if not state.alive.any():
        return None
    d = np.hypot(state.sheep_x - w.x, state.sheep_y - w.y)
    d[~state.alive] = np.inf
    j = int(np.argmin(d))
    return j if d[j] <= cfg.detect_radius else None


def _dist_to_sheep(state, w, j):
    return math.hypot(state.sheep_x[j] - w.x, state.sheep_y[j] - w.y)


def _consume(state, wolf, j):
    state.alive[j] = False
    state.captures.append((state.tick, wolf.id, j))


def pack_slot(state, k):
    """Patrol position of the ``k``-th pack wolf relative to the alpha."""
    cfg = state.config
    a = state.alpha
    n = cfg.n_pack
    offset = 0.0 if n == 1 else -cfg.pack_spread / 2 + cfg.pack_spread * k / (n - 1)
    r = math.radians(a.heading + 180.0 + offset)
    return a.x + cfg.pack_offset * math.cos(r), a.y + cfg.pack_offset * math.sin(r)


def step(state: WolfSheepState) -> WolfSheepState:
    """Advance ``state`` by one tick in place and return it."""
    cfg = state.config
    L = cfg.world_size
    noise = (2.0 * state._noise.next() - 1.0)
    trig = state._trigger.next()
    wolf_noise = noise[cfg.n_sheep :] * cfg.wolf_turn_noise

    alpha = state.alpha
    if alpha.target is not None and not state.alive[alpha.target]:
        alpha.target = None
    if alpha.target is None and trig[0] < cfg.trigger_prob:
        alpha.target = _nearest_sheep(state, alpha)
    if alpha.target is not None:
        j = alpha.target
        _move_toward(alpha, state.sheep_x[j], state.sheep_y[j], cfg.hunt_speed, L)
    else:
        _patrol(alpha, wolf_noise[0], cfg.patrol_speed, L)

    for k, w in enumerate(state.pack):
        w.target = alpha.target
        if alpha.target is not None:
            j = alpha.target
            _move_toward(w, state.sheep_x[j], state.sheep_y[j], cfg.hunt_speed * cfg.pack_speed_factor, L)
        else:
            sx, sy = pack_slot(state, k)
            sx, sy = min(max(sx, 0.0), L), min(max(sy, 0.0), L)
            cap = cfg.pack_catchup * alpha.speed * cfg.pack_speed_factor
            _move_toward(w, sx, sy, min(cap, math.hypot(sx - w.x, sy - w.y)), L)

    if alpha.target is not None:
        j = alpha.target
        if _dist_to_sheep(state, alpha, j) <= cfg.capture_radius and any(
            _dist_to_sheep(state, w, j) <= cfg.capture_radius for w in state.pack
        ):
            _consume(state, alpha, j)
            alpha.target = None
            for w in state.pack:
                w.target = None

    for k, w in enumerate(state.independents, start=1 + cfg.n_pack):
        if w.target is not None and not state.alive[w.target]:
            w.target = None
        if w.target is None and trig[k] < cfg.trigger_prob:
            w.target = _nearest_sheep(state, w)
        if w.target is not None:
            j = w.target
            _move_toward(w, state.sheep_x[j], state.sheep_y[j], cfg.hunt_speed, L)
            if _dist_to_sheep(state, w, j) <= cfg.capture_radius:
                _consume(state, w, j)
                w.target = None
        else:
            _patrol(w, wolf_noise[k], cfg.patrol_speed, L)

    if cfg.n_sheep:
        h = (state.sheep_heading + noise[: cfg.n_sheep] * cfg.sheep_turn_noise) % 360.0
        r = np.radians(h)
        sx = state.sheep_x + cfg.sheep_speed * np.cos(r)
        sy = state.sheep_y + cfg.sheep_speed * np.sin(r)
        for j in np.flatnonzero(state.alive):
            sx[j], sy[j], h[j] = _reflect(sx[j], sy[j], h[j], L)
        a = state.alive
        state.sheep_x = np.where(a, sx, state.sheep_x)
        state.sheep_y = np.where(a, sy, state.sheep_y)
        state.sheep_heading = np.where(a, h, state.sheep_heading)

    state.tick += 1
    return state


def roles(config: WolfSheepConfig):
    out = {a: "sheep" for a in range(config.n_sheep)}
    out[config.alpha_id] = "alpha"
    out.update({a: "pack" for a in config.pack_ids})
    out.update({a: "independent" for a in config.independent_ids})
    return out


def run(config: WolfSheepConfig) -> TrajectorySet:
    """Simulate ``config.steps`` ticks; eaten sheep are NaN from then on."""
    state = init(config)
    n = config.n_agents
    xs = np.full((n, config.steps), np.nan)
    ys = np.full((n, config.steps), np.nan)
    ns = config.n_sheep
    for t in range(config.steps):
        step(state)
        xs[:ns, t] = np.where(state.alive, state.sheep_x, np.nan)
        ys[:ns, t] = np.where(state.alive, state.sheep_y, np.nan)
        for w in state.wolves:
            xs[w.id, t] = w.x
            ys[w.id, t] = w.y
    return TrajectorySet(tuple(range(n)), xs, ys, roles(config))
