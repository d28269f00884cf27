"""Leader-follower inference from time-lagged Pearson correlations.

For every window ``[t, t + W + lag)`` and ordered pair ``(j, i)`` the leader
candidate's series ``s_j[t : t+W]`` is correlated with the follower's
``s_i[t+lag : t+W+lag]`` for each kinematic variable. Correlations above the
threshold are summed into a window weight, recorded at ``[j, i]`` and
accumulated over windows. Row sums of the result measure how often an agent
led.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import AlignmentError, ConfigError
from ..trajectory import VARIABLES, TrajectorySet, unwrap_heading
from .matrix import InfluenceMatrix, centrality, window_starts

__all__ = ["NetInferConfig", "lagged_pearson", "window_influence", "infer", "centrality"]


@dataclass
class NetInferConfig:
    window: int = 50
    lag: int = 1
    threshold: float = 0.85
    variables: tuple = VARIABLES
    stride: int | None = None  # None -> non-overlapping (stride = window)

    def validate(self):
        if self.window < 3:
            raise ConfigError("netinfer window must be >= 3")
        if self.lag < 1:
            raise ConfigError("netinfer lag must be >= 1")
        if not self.variables or set(self.variables) - set(VARIABLES):
            raise ConfigError(f"netinfer variables must be a nonempty subset of {VARIABLES}")
        if self.stride is not None and self.stride < 1:
            raise ConfigError("stride must be >= 1")
        return self

    @property
    def step(self):
        return self.stride or self.window


def _pearson(a, b):
    if a.max() == a.min() or b.max() == b.min():
        return math.nan
    ac = a - a.mean()
    bc = b - b.mean()
    den = np.sqrt(np.sum(ac * ac) * np.sum(bc * bc))
    if den == 0:
        return math.nan
    return float(np.sum(ac * bc) / den)


def lagged_pearson(s_j, s_i, lag):
    """Correlation of ``s_j[0 : n-lag]`` with ``s_i[lag : n]``.

    Parameters
    ----------
    s_j, s_i : array_like
        Leader-candidate and follower series over the same ticks.
    lag : int
        Follower delay in ticks.

    Returns
    -------
    float
        Pearson r, or NaN when either aligned segment is constant.
    """
    s_j = np.asarray(s_j, dtype=float)
    s_i = np.asarray(s_i, dtype=float)
    if s_j.shape != s_i.shape or s_j.ndim != 1:
        raise AlignmentError(f"series shapes {s_j.shape} and {s_i.shape} cannot be aligned")
    n = s_j.size - lag
    if lag < 0 or n < 2:
        raise AlignmentError(f"lag {lag} leaves fewer than 2 aligned samples")
    return _pearson(s_j[:n], s_i[lag:])


def window_influence(leader_window, follower_window, config: NetInferConfig):
    """Summed above-threshold correlations for one pair in one window.

    Both arguments map variable name -> series of length ``W + lag``.
    Heading series are unwrapped before correlating.
    """
    w = 0.0
    for var in config.variables:
        a, b = leader_window[var], follower_window[var]
        if var == "heading":
            a, b = unwrap_heading(a), unwrap_heading(b)
        r = lagged_pearson(a[: config.window + config.lag], b[: config.window + config.lag], config.lag)
        if r > config.threshold:
            w += r
    return w


def _window_correlations(seg, width, lag):
    """All-pairs lagged correlations ``r[j, i]`` for one window segment."""
    a = seg[:, :width]
    b = seg[:, lag : lag + width]
    ac = a - a.mean(axis=1, keepdims=True)
    bc = b - b.mean(axis=1, keepdims=True)
    num = np.sum(ac[:, None, :] * bc[None, :, :], axis=-1)
    den = np.sqrt(np.sum(ac * ac, axis=1)[:, None] * np.sum(bc * bc, axis=1)[None, :])
    with np.errstate(invalid="ignore", divide="ignore"):
        r = num / den
    flat_a = a.max(axis=1) == a.min(axis=1)
    flat_b = b.max(axis=1) == b.min(axis=1)
    r[flat_a, :] = np.nan
    r[:, flat_b] = np.nan
    r[den == 0] = np.nan
    np.fill_diagonal(r, np.nan)
    return r


def infer(trajectories: TrajectorySet, config: NetInferConfig) -> InfluenceMatrix:
    """Accumulated leader -> follower influence matrix over all windows."""
    config.validate()
    span = config.window + config.lag
    starts = window_starts(trajectories.length, span, config.step)
    out = InfluenceMatrix.zeros(trajectories.agents, method="netinfer")
    series = {v: trajectories.series(v) for v in config.variables}
    n = trajectories.n_agents
    for t in starts:
        w = np.zeros((n, n))
        for var in config.variables:
            seg = series[var][:, t : t + span]
            if var == "heading":
                seg = unwrap_heading(seg)
            r = _window_correlations(seg, config.window, config.lag)
            w += np.where(r > config.threshold, r, 0.0)
        out.add_window(w)
    return out
