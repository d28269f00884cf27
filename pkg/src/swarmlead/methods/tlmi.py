"""Time-lagged mutual information on equal-width binned series.

``I_tau(X; Y)`` pairs ``x_t`` with ``y_{t-tau}``. Each (trimmed) series is
binned into ``bins`` equal-width intervals spanning its own min-max range and
the plug-in MI of the joint histogram is reported in bits.

Direction: for a pair ``(j, i)`` the score ``m(j -> i)`` is the peak of
``I_tau(s_i; s_j)`` over positive lags, averaged across variables. An edge
``j -> i`` needs ``m(j -> i)`` above the threshold and strictly above
``m(i -> j)``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError
from ..trajectory import VARIABLES, TrajectorySet, unwrap_heading
from .matrix import InfluenceMatrix, window_starts


@dataclass
class TLMIConfig:
    bins: int = 5
    lag_min: int = -5
    lag_max: int = 5
    mi_threshold: float = 0.3
    window: int = 50
    stride: int | None = None
    variables: tuple = ("speed", "acc", "heading")

    def validate(self):
        if self.bins < 2:
            raise ConfigError("bins must be >= 2")
        if not self.lag_min <= 0 <= self.lag_max:
            raise ConfigError("lag range must contain 0")
        if self.lag_max < 1:
            raise ConfigError("lag_max must be >= 1 to assign directions")
        if self.window <= self.lag_max - self.lag_min + 2:
            raise ConfigError("tlmi window must exceed lag_max - lag_min + 2")
        if not self.variables or set(self.variables) - set(VARIABLES):
            raise ConfigError(f"tlmi variables must be a nonempty subset of {VARIABLES}")
        if self.stride is not None and self.stride < 1:
            raise ConfigError("stride must be >= 1")
        return self

    @property
    def step(self):
        return self.stride or self.window


def bin_codes(values, bins):
    """Equal-width bin index of each sample, per row of ``values``."""
    v = np.asarray(values, dtype=float)
    lo = v.min(axis=-1, keepdims=True)
    width = v.max(axis=-1, keepdims=True) - lo
    safe = np.where(width > 0, width, 1.0)
    codes = np.floor((v - lo) * bins / safe).astype(np.int64)
    return np.clip(codes, 0, bins - 1)


def _mi_from_counts(joint, n):
    """Plug-in MI in bits from joint counts with shape ``(..., bins, bins)``."""
    px = joint.sum(axis=-1, keepdims=True)
    py = joint.sum(axis=-2, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = joint / n * np.log2(joint * n / (px * py))
    return np.where(joint > 0, terms, 0.0).sum(axis=(-2, -1))


def binned_mi(x, y, bins=5):
    """Plug-in mutual information (bits) of two equally long series."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-D series of equal length")
    if x.size == 0:
        return 0.0
    joint = np.zeros((bins, bins))
    np.add.at(joint, (bin_codes(x, bins), bin_codes(y, bins)), 1.0)
    n = x.size
    px = joint.sum(axis=1, keepdims=True)
    py = joint.sum(axis=0, keepdims=True)
    nz = np.nonzero(joint)
    c = joint[nz]
    terms = c / n * np.log2(c * n / (px * py)[nz])
    # fsum is correctly rounded, so swapping x and y gives the identical value
    return max(math.fsum(terms.tolist()), 0.0)


def _shift(x, y, tau):
    n = x.shape[-1]
    if tau >= 0:
        return x[..., tau:], y[..., : n - tau]
    return x[..., : n + tau], y[..., -tau:]


def lag_scan(x, y, config: TLMIConfig | None = None):
    """MI profile ``{tau: I_tau(X; Y)}`` for ``tau`` in ``[lag_min, lag_max]``."""
    config = config or TLMIConfig()
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return {tau: binned_mi(*_shift(x, y, tau), bins=config.bins) for tau in range(config.lag_min, config.lag_max + 1)}


def pairwise_lagged_mi(segments, tau, bins):
    """``mi[i, j] = I_tau(s_i ; s_j)`` (follower present vs source past) for all pairs."""
    x, y = _shift(segments, segments, tau)
    n, m = x.shape
    eye = np.eye(bins)
    ox = eye[bin_codes(x, bins)]  # (n, m, bins)
    oy = eye[bin_codes(y, bins)]
    joint = ox.transpose(0, 2, 1).reshape(n * bins, m) @ oy.transpose(1, 0, 2).reshape(m, n * bins)
    joint = joint.reshape(n, bins, n, bins).transpose(0, 2, 1, 3)
    return np.maximum(_mi_from_counts(joint, m), 0.0)


def window_scores(segments_by_var, config: TLMIConfig):
    """Variable-averaged peak positive-lag MI, ``score[j, i] = m(j -> i)``."""
    total = None
    for seg in segments_by_var:
        peak = np.max([pairwise_lagged_mi(seg, tau, config.bins) for tau in range(1, config.lag_max + 1)], axis=0)
        total = peak.T if total is None else total + peak.T
    return total / len(segments_by_var)


def _segments(trajectories, config, t):
    out = []
    for var in config.variables:
        seg = trajectories.series(var)[:, t : t + config.window]
        out.append(unwrap_heading(seg) if var == "heading" else seg)
    return out


def tlmi_infer(trajectories: TrajectorySet, config: TLMIConfig) -> InfluenceMatrix:
    """Accumulate asymmetric lagged-MI edges over non-overlapping windows."""
    config.validate()
    starts = window_starts(trajectories.length, config.window, config.step)
    out = InfluenceMatrix.zeros(trajectories.agents, method="tlmi")
    for t in starts:
        score = window_scores(_segments(trajectories, config, t), config)
        np.fill_diagonal(score, 0.0)
        hit = (score > config.mi_threshold) & (score > score.T)
        out.add_window(np.where(hit, score, 0.0), hit)
    return out


def write_lag_profiles(trajectories: TrajectorySet, config: TLMIConfig, path):
    """Per-window, per-pair, per-variable MI profiles as long-format CSV."""
    config.validate()
    starts = window_starts(trajectories.length, config.window, config.step)
    lags = range(config.lag_min, config.lag_max + 1)
    agents = trajectories.agents
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["window_start", "variable", "source", "dest", *(f"lag{tau}" for tau in lags)])
        for t in starts:
            for var, seg in zip(config.variables, _segments(trajectories, config, t)):
                prof = [pairwise_lagged_mi(seg, tau, config.bins) for tau in lags]
                for j, src in enumerate(agents):
                    for i, dst in enumerate(agents):
                        if i != j:
                            w.writerow([t, var, src, dst, *(format(float(p[i, j]), ".6g") for p in prof)])
