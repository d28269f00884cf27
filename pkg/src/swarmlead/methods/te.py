"""Transfer entropy with a nearest-neighbour (KSG) conditional MI estimator.

With history length 1, ``TE(Y -> X) = I(X_t ; Y_{t-1} | X_{t-1})``. The
conditional MI is estimated with the Frenzel-Pompe / KSG construction under
the max-norm::

    I(X;Y|Z) = psi(k) + < psi(n_z + 1) - psi(n_xz + 1) - psi(n_yz + 1) >

where the neighbour counts exclude the point itself and only include points
strictly closer than the distance to the k-th joint-space neighbour.

All values are in nats.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy.spatial import cKDTree
from scipy.special import digamma

from ..errors import ConfigError, InsufficientDataError
from ..trajectory import VARIABLES, TrajectorySet, unwrap_heading
from .matrix import InfluenceMatrix, window_starts

JITTER = 1e-10


@dataclass
class TEConfig:
    embedding: int = 1
    k_neighbors: int = 4
    delta_threshold: float = 0.2
    window: int = 50
    stride: int | None = None
    variables: tuple = ("speed", "acc", "heading")

    def validate(self):
        if self.embedding != 1:
            raise ConfigError("only history length (embedding) 1 is supported")
        if self.k_neighbors < 1:
            raise ConfigError("k_neighbors must be >= 1")
        if self.window <= self.k_neighbors + self.embedding + 2:
            raise ConfigError("te window must exceed k_neighbors + embedding + 2")
        if not self.variables or set(self.variables) - set(VARIABLES):
            raise ConfigError(f"te variables must be a nonempty subset of {VARIABLES}")
        if self.stride is not None and self.stride < 1:
            raise ConfigError("stride must be >= 1")
        return self

    @property
    def step(self):
        return self.stride or self.window


def _column(v):
    return np.asarray(v, dtype=float).reshape(len(v), -1)


def _strict_counts(points, radii):
    tree = cKDTree(points)
    r = np.nextafter(radii, 0)
    return tree.query_ball_point(points, r, p=np.inf, return_length=True)


def ksg_cmi(x, y, z, k=4):
    """Estimate ``I(X; Y | Z)`` in nats from paired samples.

    Parameters
    ----------
    x, y, z : array_like
        Samples, shape ``(n,)`` or ``(n, d)``, all of equal length ``n``.
    k : int
        Neighbour order in the joint space.

    Returns
    -------
    float
        The (unclipped) estimate; may be slightly negative.
    """
    x, y, z = _column(x), _column(y), _column(z)
    n = len(x)
    if not (len(y) == len(z) == n):
        raise InsufficientDataError("x, y and z must have equal lengths")
    if n < k + 2:
        raise InsufficientDataError(f"ksg_cmi needs at least k + 2 = {k + 2} samples, got {n}")
    joint = np.hstack([x, y, z])
    if not np.isfinite(joint).all():
        raise ValueError("ksg_cmi inputs must be finite")
    eps = cKDTree(joint).query(joint, k=k + 1, p=np.inf)[0][:, k]
    n_xz = _strict_counts(np.hstack([x, z]), eps)
    n_yz = _strict_counts(np.hstack([y, z]), eps)
    n_z = _strict_counts(z, eps)
    # counts above include the point itself, i.e. they already are n_* + 1
    return float(digamma(k) + np.mean(digamma(n_z) - digamma(n_xz) - digamma(n_yz)))


def _data_seed(a):
    digest = hashlib.blake2b(np.ascontiguousarray(a, dtype=float).tobytes(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def jitter(series):
    """Add deterministic noise of relative size 1e-10 to break exact ties.

    The noise is seeded from the series' own bytes, so a given series always
    receives the same perturbation.
    """
    s = np.asarray(series, dtype=float)
    scale = np.ptp(s) if s.size else 0.0
    if not np.isfinite(scale) or scale == 0:
        scale = max(abs(float(s.flat[0])) if s.size else 0.0, 1.0)
    rng = np.random.default_rng(_data_seed(s))
    return s + JITTER * scale * rng.standard_normal(s.shape)


def _is_constant(s):
    return s.size == 0 or s.max() == s.min()


def transfer_entropy(source, dest, config: TEConfig | None = None):
    """``TE(source -> dest)`` in nats, history length 1, clipped at 0."""
    config = config or TEConfig()
    src = np.asarray(source, dtype=float)
    dst = np.asarray(dest, dtype=float)
    if src.shape != dst.shape or src.ndim != 1:
        raise InsufficientDataError("source and dest must be 1-D series of equal length")
    if _is_constant(src) or _is_constant(dst):
        return 0.0
    src, dst = jitter(src), jitter(dst)
    te = ksg_cmi(dst[1:], src[:-1], dst[:-1], k=config.k_neighbors)
    return max(te, 0.0)


@njit(cache=True)
def _te_kernel(jit, live, k, psi):
    """Unclipped KSG estimates ``te[j, i]`` for all ordered pairs of ``live`` rows.

    ``jit`` holds jittered window series; ``psi[c]`` is digamma(c).
    """
    n, w = jit.shape
    m = w - 1
    te = np.zeros((n, n))
    dz = np.empty((n, m, m))
    for r in range(n):
        for a in range(m):
            for b in range(m):
                dz[r, a, b] = abs(jit[r, a] - jit[r, b])
    dxz = np.empty((m, m))
    best = np.empty(k)
    for i in live:
        for a in range(m):
            for b in range(m):
                dxz[a, b] = max(abs(jit[i, a + 1] - jit[i, b + 1]), dz[i, a, b])
        for j in live:
            if j == i:
                continue
            acc = 0.0
            for a in range(m):
                for q in range(k):
                    best[q] = np.inf
                for b in range(m):
                    if b == a:
                        continue
                    d = max(dxz[a, b], dz[j, a, b])
                    if d < best[k - 1]:
                        q = k - 1
                        while q > 0 and best[q - 1] > d:
                            best[q] = best[q - 1]
                            q -= 1
                        best[q] = d
                eps = best[k - 1]
                n_xz = 0
                n_yz = 0
                n_z = 0
                for b in range(m):
                    if dxz[a, b] < eps:
                        n_xz += 1
                    dzb = dz[i, a, b]
                    if dzb < eps:
                        n_z += 1
                        if dz[j, a, b] < eps:
                            n_yz += 1
                    elif max(dz[j, a, b], dzb) < eps:
                        n_yz += 1
                # counts include b == a (distance 0), i.e. they are n_* + 1
                acc += psi[n_z] - psi[n_xz] - psi[n_yz]
            te[j, i] = psi[k] + acc / m
    return te


def pairwise_te(segments, k):
    """Matrix ``te[j, i] = TE(agent j -> agent i)`` for one window.

    ``segments`` has shape ``(n_agents, W)``; entries are clipped at 0 and
    constant series yield 0.
    """
    segments = np.asarray(segments, dtype=float)
    n = segments.shape[0]
    flat = np.array([_is_constant(s) for s in segments], dtype=bool)
    live = np.flatnonzero(~flat)
    if live.size < 2:
        return np.zeros((n, n))
    jit = segments.copy()
    for r in live:
        jit[r] = jitter(segments[r])
    psi = digamma(np.arange(segments.shape[1] + 1, dtype=float))
    te = _te_kernel(jit, live, k, psi)
    return np.maximum(te, 0.0)


def te_infer(trajectories: TrajectorySet, config: TEConfig) -> InfluenceMatrix:
    """Accumulate net transfer entropy ``TE(j->i) - TE(i->j)`` above threshold.

    Per window the per-variable TE matrices are averaged; an edge ``j -> i``
    is recorded with weight ``dTE`` when ``dTE > delta_threshold``.
    """
    config.validate()
    starts = window_starts(trajectories.length, config.window, config.step)
    out = InfluenceMatrix.zeros(trajectories.agents, method="te")
    series = {v: trajectories.series(v) for v in config.variables}
    for t in starts:
        te = np.zeros((trajectories.n_agents,) * 2)
        for var in config.variables:
            seg = series[var][:, t : t + config.window]
            if var == "heading":
                seg = unwrap_heading(seg)
            te += pairwise_te(seg, config.k_neighbors)
        te /= len(config.variables)
        delta = te - te.T
        hit = delta > config.delta_threshold
        out.add_window(np.where(hit, delta, 0.0), hit)
    return out
