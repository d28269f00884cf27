"""Accumulated directed influence matrices and their exports."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import InsufficientDataError, SchemaError


@dataclass(eq=False)
class InfluenceMatrix:
    """Directed influence accumulated over analysis windows.

    ``weights[r, c]`` is the total influence of ``agents[r]`` (leader) on
    ``agents[c]`` (follower). ``events[r, c]`` counts the windows in which
    that edge passed the method's threshold.
    """

    agents: tuple
    weights: np.ndarray
    events: np.ndarray
    n_windows: int = 0
    method: str = ""

    def __post_init__(self):
        self.agents = tuple(int(a) for a in self.agents)
        n = len(self.agents)
        self.weights = np.asarray(self.weights, dtype=float).reshape(n, n)
        self.events = np.asarray(self.events, dtype=np.int64).reshape(n, n)

    @classmethod
    def zeros(cls, agents, method=""):
        n = len(agents)
        return cls(tuple(agents), np.zeros((n, n)), np.zeros((n, n), dtype=np.int64), 0, method)

    @property
    def n(self):
        return len(self.agents)

    def out_scores(self):
        return self.weights.sum(axis=1)

    def in_scores(self):
        return self.weights.sum(axis=0)

    def add_window(self, window_weights, detected=None):
        """Add one window's matrix; ``detected`` defaults to ``weights > 0``."""
        if detected is None:
            detected = window_weights > 0
        self.weights += window_weights
        self.events += detected
        self.n_windows += 1

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["leader\\follower", *self.agents])
            for a, row in zip(self.agents, self.weights):
                w.writerow([a, *(format(float(v), ".17g") for v in row)])

    @classmethod
    def from_csv(cls, path, method=""):
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows:
            raise SchemaError(f"{path}: empty matrix file")
        agents = tuple(int(a) for a in rows[0][1:])
        body = rows[1:]
        if [int(r[0]) for r in body] != list(agents):
            raise SchemaError(f"{path}: row ids do not match column ids")
        weights = np.array([[float(v) for v in r[1:]] for r in body]).reshape(len(agents), len(agents))
        return cls(agents, weights, (weights > 0).astype(np.int64), 0, method)

    def edges(self):
        rows, cols = np.nonzero(self.weights)
        return [
            {"src": self.agents[r], "dst": self.agents[c], "weight": float(self.weights[r, c])}
            for r, c in zip(rows, cols)
        ]

    def to_edges_json(self, path):
        Path(path).write_text(json.dumps(self.edges(), indent=1) + "\n")


def centrality(matrix: InfluenceMatrix):
    """Out-degree (leadership) and in-degree (followership) per agent id."""
    out, inn = matrix.out_scores(), matrix.in_scores()
    return {a: (float(o), float(i)) for a, o, i in zip(matrix.agents, out, inn)}


def window_starts(length, span, stride):
    """Window start ticks ``0, stride, 2*stride, ...`` with ``start + span <= length``."""
    if stride < 1:
        raise ValueError("stride must be >= 1")
    if length < span:
        raise InsufficientDataError(
            f"series of {length} kinematic samples is shorter than the required {span}"
            f" ({span + 2} position ticks)"
        )
    return list(range(0, length - span + 1, stride))
