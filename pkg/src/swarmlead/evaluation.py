"""Leadership rankings, top-k hit rates, histograms and the multi-seed benchmark."""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import ConfigError, SwarmLeadError
from .methods import METHODS, InfluenceMatrix
from .sim import MODELS
from .trajectory import TrajectorySet

log = logging.getLogger(__name__)

TIE_BREAKS = ("id", "hashed")


@dataclass
class RankingReport:
    method: str
    seed: int
    order: list  # (agent id, out score), best first
    true_leader_ranks: dict
    analyzed_agents: tuple

    def rank_of(self, agent):
        for pos, (a, _) in enumerate(self.order, start=1):
            if a == agent:
                return pos
        raise KeyError(agent)


def _hashed_key(seed, agent):
    return hashlib.blake2b(f"{seed}:{agent}".encode(), digest_size=8).digest()


def rank_agents(matrix: InfluenceMatrix, subset=None, true_leaders=(), *, method=None, seed=0, tie_break="id"):
    """Order agents by out-degree (leadership score), best first.

    Parameters
    ----------
    matrix : InfluenceMatrix
    subset : iterable of int, optional
        Agents to rank; defaults to every agent in ``matrix``.
    true_leaders : iterable of int
        Agents whose 1-based ranks are reported.
    tie_break : {"id", "hashed"}
        Equal scores are ordered by ascending id, or by a per-seed hash of the
        id that carries no information about roles.
    """
    if tie_break not in TIE_BREAKS:
        raise ValueError(f"tie_break must be one of {TIE_BREAKS}")
    scores = dict(zip(matrix.agents, matrix.out_scores()))
    agents = tuple(matrix.agents if subset is None else subset)
    if not agents:
        raise ValueError("cannot rank an empty agent subset")
    if tie_break == "id":
        key = lambda a: (-scores[a], a)  # noqa: E731
    else:
        key = lambda a: (-scores[a], _hashed_key(seed, a))  # noqa: E731
    ordered = sorted(agents, key=key)
    order = [(a, float(scores[a])) for a in ordered]
    pos = {a: i for i, a in enumerate(ordered, start=1)}
    ranks = {a: pos[a] for a in true_leaders if a in pos}
    return RankingReport(method or matrix.method, seed, order, ranks, agents)


def topk_hits(reports, true_leaders, k):
    """``(hits, opportunities)``: (leader, seed) pairs ranked within ``k``."""
    if not reports:
        raise ValueError("no ranking reports")
    leaders = tuple(true_leaders)
    hits = sum(1 for r in reports for a in leaders if r.true_leader_ranks.get(a, np.inf) <= k)
    return hits, len(leaders) * len(reports)


def topk_rate(reports, true_leaders, k):
    hits, total = topk_hits(reports, true_leaders, k)
    return hits / total if total else 0.0


def leadership_histogram(matrix: InfluenceMatrix):
    """Per-agent count of thresholded out-edges over all windows."""
    return {a: int(c) for a, c in zip(matrix.agents, matrix.events.sum(axis=1))}


def write_histogram_csv(hist, path, roles=None):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["agent_id", "role", "detections"])
        for a in sorted(hist):
            w.writerow([a, (roles or {}).get(a, "none"), hist[a]])


def write_ranking_csv(report: RankingReport, path, roles=None):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["rank", "agent_id", "role", "out_score"])
        for pos, (a, s) in enumerate(report.order, start=1):
            w.writerow([pos, a, (roles or {}).get(a, "none"), format(s, ".17g")])


@dataclass
class BenchmarkConfig:
    """Everything needed to reproduce one benchmark table."""

    model: str
    sim: object
    methods: dict  # name -> method config
    ranked_roles: tuple = ()
    leader_roles: tuple = ("leader",)
    top_k: tuple = (1, 3, 5, 10)
    tie_break: str = "hashed"
    seeds: tuple = (1,)
    save_trajectories: bool = False

    def validate(self):
        if self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}; choose from {sorted(MODELS)}")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ConfigError(f"unknown methods {sorted(unknown)}")
        if self.tie_break not in TIE_BREAKS:
            raise ConfigError(f"tie_break must be one of {TIE_BREAKS}")
        return self


@dataclass
class SeedResult:
    seed: int
    trajectories: TrajectorySet
    matrices: dict
    reports: dict
    leaders: tuple
    seconds: dict = field(default_factory=dict)


def analyzed_subset(traj: TrajectorySet, ranked_roles=()):
    """Agents to analyse: the given roles (or all), restricted to complete tracks."""
    agents = traj.agents_with_role(*ranked_roles) if ranked_roles and traj.roles else traj.agents
    complete = set(traj.complete_agents())
    return tuple(a for a in agents if a in complete)


def run_seed(bench: BenchmarkConfig, seed: int) -> SeedResult:
    """Simulate one seed and run every configured method on it."""
    run_model = MODELS[bench.model][1]
    sim_cfg = replace(bench.sim, seed=seed)
    t0 = time.perf_counter()
    traj = run_model(sim_cfg)
    seconds = {"simulate": time.perf_counter() - t0}
    subset = analyzed_subset(traj, bench.ranked_roles)
    sub = traj.select(subset)
    leaders = tuple(a for a in subset if traj.roles and traj.roles[a] in bench.leader_roles)
    matrices, reports = {}, {}
    for name, mcfg in bench.methods.items():
        t0 = time.perf_counter()
        try:
            m = METHODS[name][1](sub, mcfg)
        except SwarmLeadError as exc:
            exc.args = (f"seed {seed}, method {name}: {exc}",)
            raise
        seconds[name] = time.perf_counter() - t0
        matrices[name] = m
        reports[name] = rank_agents(m, subset, leaders, method=name, seed=seed, tie_break=bench.tie_break)
    return SeedResult(seed, traj, matrices, reports, leaders, seconds)


@dataclass
class BenchmarkSummary:
    model: str
    seeds: tuple
    methods: tuple
    top_k: tuple
    hits: dict  # method -> k -> (hits, opportunities)
    ranks: dict  # method -> seed -> {leader: rank}
    histograms: dict  # method -> seed -> {agent: count}

    def rate(self, method, k):
        h, n = self.hits[method][k]
        return h / n if n else 0.0

    def to_dict(self):
        return {
            "model": self.model,
            "seeds": list(self.seeds),
            "methods": list(self.methods),
            "top_k": {
                m: {str(k): {"hits": h, "opportunities": n, "rate": h / n if n else 0.0} for k, (h, n) in kk.items()}
                for m, kk in self.hits.items()
            },
            "leader_ranks": {
                m: {str(s): {str(a): r for a, r in rr.items()} for s, rr in per.items()} for m, per in self.ranks.items()
            },
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_text(self):
        """Aligned per-seed leader ranks with top-k footer rows."""
        cols = list(self.methods)
        cells = [["seed", *cols]]
        for s in self.seeds:
            row = [str(s)]
            for m in cols:
                rr = self.ranks[m][s]
                if len(rr) == 1:
                    row.append(f"{next(iter(rr.values()))}")
                else:
                    row.append(", ".join(f"{a}: {r}" for a, r in sorted(rr.items(), key=lambda kv: kv[1])))
            cells.append(row)
        foot = []
        for k in self.top_k:
            row = [f"top {k}"]
            for m in cols:
                h, n = self.hits[m][k]
                row.append(f"{h}/{n} -> {100.0 * h / n if n else 0.0:.0f}%")
            foot.append(row)
        widths = [max(len(r[i]) for r in cells + foot) for i in range(len(cells[0]))]
        fmt = lambda r: "  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip()  # noqa: E731
        rule = "-" * (sum(widths) + 2 * (len(widths) - 1))
        lines = [f"{self.model}: leader ranks over {len(self.seeds)} seeds", fmt(cells[0]), rule]
        lines += [fmt(r) for r in cells[1:]] + [rule] + [fmt(r) for r in foot]
        return "\n".join(lines) + "\n"


def summarize(bench: BenchmarkConfig, results) -> BenchmarkSummary:
    results = sorted(results, key=lambda r: r.seed)
    methods = tuple(bench.methods)
    hits, ranks, hists = {}, {}, {}
    for m in methods:
        reps = [r.reports[m] for r in results]
        leaders = results[0].leaders if results else ()
        hits[m] = {k: topk_hits(reps, leaders, k) for k in bench.top_k}
        ranks[m] = {r.seed: dict(sorted(r.reports[m].true_leader_ranks.items())) for r in results}
        hists[m] = {r.seed: leadership_histogram(r.matrices[m]) for r in results}
    return BenchmarkSummary(bench.model, tuple(r.seed for r in results), methods, tuple(bench.top_k), hits, ranks, hists)


def write_seed_artifacts(bench: BenchmarkConfig, result: SeedResult, out_dir):
    """Write matrix, edge list, ranking and histogram files for one seed."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    roles = result.trajectories.roles
    if bench.save_trajectories:
        from .trajectory import write_trajectory_csv

        p = out_dir / f"{bench.model}_seed{result.seed}_trajectory.csv"
        write_trajectory_csv(result.trajectories, p)
        written.append(p)
    for m, mat in result.matrices.items():
        stem = out_dir / f"{bench.model}_{m}_seed{result.seed}"
        paths = [Path(f"{stem}_matrix.csv"), Path(f"{stem}_edges.json"), Path(f"{stem}_ranking.csv"), Path(f"{stem}_histogram.csv")]
        mat.to_csv(paths[0])
        mat.to_edges_json(paths[1])
        write_ranking_csv(result.reports[m], paths[2], roles)
        write_histogram_csv(leadership_histogram(mat), paths[3], roles)
        written += paths
    return written


def write_rank_table_csv(summary: BenchmarkSummary, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["method", "seed", "agent_id", "rank"])
        for m in summary.methods:
            for s in summary.seeds:
                for a, r in summary.ranks[m][s].items():
                    w.writerow([m, s, a, r])


def run_benchmark(bench: BenchmarkConfig, seeds=None, *, jobs=1, out_dir=None, on_result=None):
    """Run every seed, optionally writing per-seed artifacts under ``out_dir``.

    Seeds run in up to ``jobs`` worker processes; results are folded and
    written in seed order, so the output does not depend on ``jobs``.
    """
    bench.validate()
    seeds = tuple(bench.seeds if seeds is None else seeds)
    if jobs > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_seed, [bench] * len(seeds), seeds))
    else:
        results = [run_seed(bench, s) for s in seeds]
    for r in results:
        log.info("seed %s: %s", r.seed, ", ".join(f"{k} {v:.1f}s" for k, v in r.seconds.items()))
        if out_dir is not None:
            written = write_seed_artifacts(bench, r, out_dir)
            if on_result is not None:
                on_result(r, written)
    return summarize(bench, results)
