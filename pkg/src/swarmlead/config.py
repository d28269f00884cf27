"""INI run configuration: one section per simulation, method and evaluation setting.

Example::

    [simulation]
    model = wolfsheep
    steps = 500

    [netinfer]
    window = 50

    [evaluation]
    ranked_roles = alpha, pack, independent
    leader_roles = alpha
    top_k = 1, 3, 5

    [run]
    seeds = 1-10
    methods = netinfer, te, tlmi
    output = out/wolfsheep

Keys not given fall back to the dataclass defaults of the owning module.
"""

from __future__ import annotations

import configparser
import dataclasses
import re
import typing
from importlib import resources
from pathlib import Path

from .errors import ConfigError
from .evaluation import TIE_BREAKS, BenchmarkConfig
from .methods import METHODS
from .sim import MODELS

SHIPPED = ("wolfsheep_paper.cfg", "vicsek_paper.cfg")


def _split(text):
    return [t.strip() for t in text.replace("\n", ",").split(",") if t.strip()]


def parse_seeds(text):
    """``"1-10"``, ``"1, 4, 7"`` or a mix like ``"1-3, 8"`` -> tuple of ints."""
    seeds = []
    for tok in _split(str(text)):
        m = re.fullmatch(r"(\d+)\s*-\s*(\d+)|(\d+)", tok)
        if m is None or (m[1] and int(m[2]) < int(m[1])):
            raise ConfigError(f"bad seed list entry {tok!r}")
        seeds.extend(range(int(m[1]), int(m[2]) + 1) if m[1] else [int(m[3])])
    if not seeds:
        raise ConfigError("seed list is empty")
    if len(set(seeds)) != len(seeds):
        raise ConfigError("seed list contains duplicates")
    return tuple(seeds)


def _coerce(name, raw, default, hint):
    raw = raw.strip()
    try:
        if isinstance(default, bool):
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        if isinstance(default, tuple):
            items = _split(raw)
            if default and all(isinstance(d, (int, float)) for d in default):
                return tuple(float(v) for v in items)
            return tuple(items)
        if default is None and "int" in str(hint):
            return None if raw.lower() in ("", "none") else int(raw)
        return raw
    except ValueError:
        raise ConfigError(f"{name} = {raw!r} is not a valid {type(default).__name__}") from None


def build_dataclass(cls, section, where=""):
    """Instantiate ``cls`` from an INI section, coercing by the defaults' types."""
    fields = {f.name: f for f in dataclasses.fields(cls)}
    hints = typing.get_type_hints(cls)
    kwargs = {}
    for key, raw in section.items():
        if key not in fields:
            raise ConfigError(f"[{where}] unknown key {key!r}; expected one of {sorted(fields)}")
        f = fields[key]
        default = f.default if f.default is not dataclasses.MISSING else None
        kwargs[key] = _coerce(f"[{where}] {key}", raw, default, hints.get(key))
    try:
        obj = cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"[{where}] {exc}") from None
    if hasattr(obj, "validate"):
        obj.validate()
    return obj


@dataclasses.dataclass
class RunConfig:
    benchmark: BenchmarkConfig
    output: str | None = None
    source: str | None = None


def _section(cp, name):
    return dict(cp.items(name)) if cp.has_section(name) else {}


def parse_config(text, source=None) -> RunConfig:
    cp = configparser.ConfigParser(interpolation=None, default_section="__none__")
    try:
        cp.read_string(text, source=source or "<config>")
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from None
    known = {"simulation", "evaluation", "run", *METHODS}
    extra = set(cp.sections()) - known
    if extra:
        raise ConfigError(f"unknown config sections {sorted(extra)}")

    sim = _section(cp, "simulation")
    model = sim.pop("model", None)
    if model is None:
        raise ConfigError("[simulation] needs a 'model' key")
    if model not in MODELS:
        raise ConfigError(f"unknown model {model!r}; choose from {sorted(MODELS)}")
    sim_cfg = build_dataclass(MODELS[model][0], sim, "simulation")

    run = _section(cp, "run")
    names = _split(run.pop("methods", ",".join(m for m in METHODS if cp.has_section(m)) or ",".join(METHODS)))
    bad = [m for m in names if m not in METHODS]
    if bad:
        raise ConfigError(f"unknown methods {bad}; choose from {sorted(METHODS)}")
    methods = {m: build_dataclass(METHODS[m][0], _section(cp, m), m) for m in names}
    seeds = parse_seeds(run.pop("seeds", "1"))
    output = run.pop("output", None)
    if run:
        raise ConfigError(f"[run] unknown keys {sorted(run)}")

    ev = _section(cp, "evaluation")
    default_leaders = "alpha" if model == "wolfsheep" else "leader"
    try:
        bench = BenchmarkConfig(
            model=model,
            sim=sim_cfg,
            methods=methods,
            ranked_roles=tuple(_split(ev.pop("ranked_roles", ""))),
            leader_roles=tuple(_split(ev.pop("leader_roles", default_leaders))),
            top_k=tuple(int(k) for k in _split(ev.pop("top_k", "1, 3, 5, 10"))),
            tie_break=ev.pop("tie_break", "hashed"),
            seeds=seeds,
            save_trajectories=_coerce("[evaluation] save_trajectories", ev.pop("save_trajectories", "false"), False, bool),
        )
    except ValueError:
        raise ConfigError("[evaluation] top_k must be a list of integers") from None
    if ev:
        raise ConfigError(f"[evaluation] unknown keys {sorted(ev)}")
    if bench.tie_break not in TIE_BREAKS:
        raise ConfigError(f"[evaluation] tie_break must be one of {TIE_BREAKS}")
    if not bench.top_k or min(bench.top_k) < 1:
        raise ConfigError("[evaluation] top_k values must be >= 1")
    bench.validate()
    return RunConfig(bench, output, source)


def load_config(path) -> RunConfig:
    """Read a config file; bare shipped names such as ``wolfsheep_paper.cfg`` also resolve."""
    p = Path(path)
    if not p.exists() and p.name == str(path) and p.name in SHIPPED:
        return parse_config(shipped_config(p.name), source=p.name)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from None
    return parse_config(text, source=str(p))


def shipped_config(name):
    return resources.files("swarmlead.configs").joinpath(name).read_text()
