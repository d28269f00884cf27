import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from swarmlead.methods.netinfer import window_influence
from swarmlead.trajectory import TrajectorySet, extract_window

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def copy_pair_trajectories(n_ticks=252, n_followers=3, n_bystanders=3, noise=0.05, seed=0):
    """Agent 0 moves with iid velocities; followers repeat them one tick later.

    Velocities stay in the first quadrant so headings never wrap and every
    kinematic series of the leader is serially uncorrelated beyond lag 1.
    Bystanders move with their own iid velocities.
    """
    rng = np.random.default_rng(seed)
    n = 1 + n_followers + n_bystanders
    v = np.empty((n, n_ticks, 2))
    v[0] = rng.uniform(0.5, 1.5, size=(n_ticks, 2))
    for k in range(1, 1 + n_followers):
        v[k, 1:] = v[0, :-1] + noise * rng.standard_normal((n_ticks - 1, 2))
        v[k, 0] = rng.uniform(0.5, 1.5, size=2)
    for k in range(1 + n_followers, n):
        v[k] = rng.uniform(0.5, 1.5, size=(n_ticks, 2))
    start = rng.uniform(0, 10, size=(n, 1, 2))
    pos = start + np.cumsum(v, axis=1)
    roles = {0: "leader", **{a: "follower" for a in range(1, 1 + n_followers)}}
    roles.update({a: "none" for a in range(1 + n_followers, n)})
    return TrajectorySet(tuple(range(n)), pos[..., 0], pos[..., 1], roles)


@pytest.fixture
def copy_pair():
    return copy_pair_trajectories()


def brute_pearson(a, b):
    """Correlation from explicit covariance sums with exactly rounded totals."""
    n = len(a)
    ma = math.fsum(a) / n
    mb = math.fsum(b) / n
    cov = math.fsum((x - ma) * (y - mb) for x, y in zip(a, b))
    va = math.fsum((x - ma) ** 2 for x in a)
    vb = math.fsum((y - mb) ** 2 for y in b)
    return cov / math.sqrt(va * vb)


def naive_infer(traj, cfg):
    """Pair-by-pair, window-by-window reference of the accumulated weights."""
    span = cfg.window + cfg.lag
    n = traj.n_agents
    total = np.zeros((n, n))
    t = 0
    while t + span <= traj.length:
        for j in range(n):
            lead = {v: extract_window(traj.series(v)[j], t, span) for v in cfg.variables}
            for i in range(n):
                if i == j:
                    continue
                fol = {v: extract_window(traj.series(v)[i], t, span) for v in cfg.variables}
                total[j, i] += window_influence(lead, fol, cfg)
        t += cfg.step
    return total


# one status line per acceptance criterion, printed after the run
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])
