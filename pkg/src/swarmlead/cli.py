"""Command-line entry point: ``swarmlead {simulate,analyze,benchmark}``.

Exit codes: 0 success, 1 usage or configuration error, 2 data or I/O error,
3 internal error.
"""

from __future__ import annotations

import argparse
import hashlib
import logging
import os
import sys
import time
from dataclasses import replace
from pathlib import Path

from .config import load_config, parse_seeds
from .errors import ConfigError, DataError, SwarmLeadError
from .evaluation import (
    analyzed_subset,
    leadership_histogram,
    rank_agents,
    run_benchmark,
    write_histogram_csv,
    write_rank_table_csv,
    write_ranking_csv,
)
from .methods import METHODS
from .sim import MODELS
from .trajectory import read_trajectory_csv, write_trajectory_csv

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3
OUT_ENV = "SWARMLEAD_OUT"

log = logging.getLogger("swarmlead")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _out_dir(arg, configured=None):
    d = arg or configured or os.environ.get(OUT_ENV) or "swarmlead_out"
    d = Path(d)
    d.mkdir(parents=True, exist_ok=True)
    return d


def cmd_simulate(args):
    cfg_cls, run_model = MODELS[args.model]
    if args.config:
        bench = load_config(args.config).benchmark
        if bench.model != args.model:
            raise ConfigError(f"config {args.config} describes model {bench.model!r}, not {args.model!r}")
        cfg = bench.sim
    else:
        cfg = cfg_cls()
    changes = {"seed": args.seed}
    if args.steps is not None:
        changes["steps"] = args.steps
    cfg = replace(cfg, **changes).validate()
    if args.out:
        path = Path(args.out)
        path.parent.mkdir(parents=True, exist_ok=True)
    else:
        path = _out_dir(None) / f"{args.model}_seed{args.seed}.csv"
    t0 = time.perf_counter()
    traj = run_model(cfg)
    rows = write_trajectory_csv(traj, path)
    print(f"wrote {rows} rows to {path} in {time.perf_counter() - t0:.2f}s")
    return EXIT_OK


def _method_config(method, config_path, window):
    cfg_cls = METHODS[method][0]
    bench = None
    if config_path:
        bench = load_config(config_path).benchmark
        cfg = bench.methods.get(method) or cfg_cls()
    else:
        cfg = cfg_cls()
    if window is not None:
        cfg = replace(cfg, window=window)
    return cfg.validate(), bench


def cmd_analyze(args):
    traj = read_trajectory_csv(args.trajectory)
    cfg, bench = _method_config(args.method, args.config, args.window)
    if args.window is None and bench is None:
        # without a config, use a window of 10% of the run
        cfg = replace(cfg, window=max(traj.n_ticks // 10, 3)).validate()
    roles = bench.ranked_roles if bench else ()
    if not roles and traj.roles and any(r in ("alpha", "pack", "independent") for r in traj.roles.values()):
        roles = ("alpha", "pack", "independent")
    subset = analyzed_subset(traj, roles)
    if len(subset) < 2:
        raise DataError(f"{args.trajectory}: fewer than 2 complete agent tracks to analyse")
    sub = traj.select(subset)
    matrix = METHODS[args.method][1](sub, cfg)
    out = _out_dir(args.out)
    stem = out / f"{Path(args.trajectory).stem}_{args.method}"
    report = rank_agents(matrix, subset, method=args.method, tie_break=bench.tie_break if bench else "id")
    matrix.to_csv(f"{stem}_matrix.csv")
    matrix.to_edges_json(f"{stem}_edges.json")
    write_ranking_csv(report, f"{stem}_ranking.csv", traj.roles)
    write_histogram_csv(leadership_histogram(matrix), f"{stem}_histogram.csv", traj.roles)
    written = 4
    if args.profiles:
        if args.method != "tlmi":
            raise UsageError("--profiles is only available for tlmi")
        from .methods.tlmi import write_lag_profiles

        write_lag_profiles(sub, cfg, f"{stem}_profiles.csv")
        written += 1
    top = ", ".join(f"{a} ({s:.3g})" for a, s in report.order[:5])
    print(f"{args.method}: {matrix.n_windows} windows, {len(subset)} agents; top: {top}")
    print(f"wrote {written} files under {out}")
    return EXIT_OK


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(out, files, status, note=""):
    lines = [f"status: {status}"]
    if note:
        lines.append(f"note: {note}")
    for p in sorted({Path(f) for f in files}):
        lines.append(f"{_sha256(p)}  {p.relative_to(out).as_posix()}")
    (out / "MANIFEST").write_text("\n".join(lines) + "\n")


def cmd_benchmark(args):
    run = load_config(args.config)
    bench = run.benchmark
    seeds = bench.seeds
    if args.seeds:
        seeds = parse_seeds(args.seeds)
        if len(seeds) == 1 and "-" not in args.seeds and "," not in args.seeds:
            # a bare number is a count: the first N configured seeds (or 1..N)
            n = seeds[0]
            if n < 1:
                raise UsageError("--seeds count must be >= 1")
            seeds = bench.seeds[:n] if n <= len(bench.seeds) else tuple(range(1, n + 1))
    if args.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    out = _out_dir(args.out, run.output)
    files = []
    status, note = "incomplete", ""
    try:
        summary = run_benchmark(bench, seeds, jobs=args.jobs, out_dir=out, on_result=lambda r, w: files.extend(w))
        paths = {
            "json": out / f"{bench.model}_summary.json",
            "txt": out / f"{bench.model}_summary.txt",
            "ranks": out / f"{bench.model}_ranks.csv",
        }
        paths["json"].write_text(summary.to_json())
        paths["txt"].write_text(summary.to_text())
        write_rank_table_csv(summary, paths["ranks"])
        files += paths.values()
        status = "complete"
    except BaseException as exc:
        note = f"{type(exc).__name__}: {exc}"
        raise
    finally:
        write_manifest(out, [f for f in files if Path(f).exists()], status, note)
    print(summary.to_text(), end="")
    print(f"wrote {len(files) + 1} files under {out}")
    return EXIT_OK


def build_parser():
    p = _Parser(prog="swarmlead", description="Leader-follower inference on simulated swarms.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", help="run a simulator and write a trajectory CSV")
    s.add_argument("model", choices=sorted(MODELS))
    s.add_argument("--config", help="benchmark config whose [simulation] section to use")
    s.add_argument("--seed", type=int, default=1)
    s.add_argument("--steps", type=int)
    s.add_argument("--out", help=f"output CSV path (default: ${OUT_ENV}/<model>_seed<k>.csv)")
    s.set_defaults(func=cmd_simulate)

    a = sub.add_parser("analyze", help="run one inference method on a trajectory CSV")
    a.add_argument("method", choices=sorted(METHODS))
    a.add_argument("trajectory")
    a.add_argument("--config", help="benchmark config providing method parameters and ranked roles")
    a.add_argument("--window", type=int, help="analysis window in ticks (default: config, else 10%% of the run)")
    a.add_argument("--profiles", action="store_true", help="also write tlmi lag profiles")
    a.add_argument("--out", help=f"output directory (default: ${OUT_ENV})")
    a.set_defaults(func=cmd_analyze)

    b = sub.add_parser("benchmark", help="simulate and analyse every seed of a config")
    b.add_argument("config", help="config file, or a shipped name such as wolfsheep_paper.cfg")
    b.add_argument("--seeds", help="seed count N, or a list such as 1-10 or 2,5,9")
    b.add_argument("--jobs", type=int, default=1, help="concurrent seeds")
    b.add_argument("--out", help=f"output directory (default: config [run] output, then ${OUT_ENV})")
    b.set_defaults(func=cmd_benchmark)
    return p


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except SwarmLeadError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except KeyboardInterrupt:
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
