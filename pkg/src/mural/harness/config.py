"""Experiment configuration: parsing and validation with line-anchored errors."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

ALGORITHMS = ("agnostic", "group_realizable", "approximation", "passive")


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None, source: str = "<config>"):
        self.line = line
        self.source = source
        where = f"{source}:{line}" if line is not None else source
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str
    scenario_params: dict
    algorithms: tuple
    eps: tuple
    delta: float
    seeds: tuple
    constant_scale: float = 1.0
    out_dir: str | None = None
    source: str = "<config>"
    line_of: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def scenario_key(self) -> str:
        return scenario_key(self.scenario, self.scenario_params)

    def echo(self) -> dict:
        return {
            "scenario": {"name": self.scenario, "params": self.scenario_params},
            "algorithms": list(self.algorithms),
            "eps": list(self.eps),
            "delta": self.delta,
            "constant_scale": self.constant_scale,
            "seeds": list(self.seeds),
        }


def scenario_key(name: str, params: dict) -> str:
    return f"{name}:{json.dumps(params, sort_keys=True, separators=(',', ':'))}"


def _key_line(text: str, key: str) -> int | None:
    m = re.search(rf'"{re.escape(key)}"\s*:', text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def parse_config(text: str, source: str = "<config>") -> ExperimentConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg} (column {exc.colno})", exc.lineno, source) from None

    def fail(msg, key=None):
        raise ConfigError(msg, _key_line(text, key) if key else 1, source)

    if not isinstance(data, dict):
        fail("top level must be a JSON object")
    known = {"scenario", "algorithm", "algorithms", "eps", "delta", "constant_scale", "seeds", "output"}
    for k in data:
        if k not in known:
            fail(f"unknown key {k!r}", k)

    scen = data.get("scenario")
    if isinstance(scen, str):
        name, params = scen, {}
    elif isinstance(scen, dict) and isinstance(scen.get("name"), str):
        name, params = scen["name"], scen.get("params", {}) or {}
        if not isinstance(params, dict):
            fail("scenario.params must be an object", "params")
    else:
        fail("'scenario' must be a name or {name, params}", "scenario" if "scenario" in data else None)

    algos = data.get("algorithms", data.get("algorithm"))
    algo_key = "algorithms" if "algorithms" in data else "algorithm"
    if isinstance(algos, str):
        algos = [algos]
    if not algos or not isinstance(algos, list):
        fail("'algorithms' must name at least one algorithm", algo_key if algo_key in data else None)
    for a in algos:
        if a not in ALGORITHMS:
            fail(f"unknown algorithm {a!r}; choose from {list(ALGORITHMS)}", algo_key)

    eps = data.get("eps")
    eps = [eps] if isinstance(eps, (int, float)) and not isinstance(eps, bool) else eps
    if not isinstance(eps, list) or not eps or not all(isinstance(e, (int, float)) and e > 0 for e in eps):
        fail("'eps' must be a positive number or a non-empty list of them", "eps" if "eps" in data else None)

    delta = data.get("delta", 0.1)
    if not isinstance(delta, (int, float)) or not 0 < delta < 1:
        fail("'delta' must lie in (0, 1)", "delta")

    c = data.get("constant_scale", 1.0)
    if not isinstance(c, (int, float)) or not 0 < c <= 1:
        fail("'constant_scale' must lie in (0, 1]", "constant_scale")

    seeds = data.get("seeds")
    if isinstance(seeds, int) and not isinstance(seeds, bool):
        seeds = list(range(seeds))
    if not isinstance(seeds, list) or not seeds or not all(isinstance(s, int) and s >= 0 for s in seeds):
        fail("'seeds' must be a non-empty list of non-negative integers (or a count)",
             "seeds" if "seeds" in data else None)
    if len(set(seeds)) != len(seeds):
        fail("'seeds' contains duplicates", "seeds")

    out = data.get("output")
    out_dir = None
    if out is not None:
        out_dir = out.get("dir") if isinstance(out, dict) else out
        if not isinstance(out_dir, str):
            fail("'output' must be a directory path or {dir: path}", "output")

    return ExperimentConfig(
        scenario=name, scenario_params=params, algorithms=tuple(algos),
        eps=tuple(float(e) for e in eps), delta=float(delta), seeds=tuple(seeds),
        constant_scale=float(c), out_dir=out_dir, source=source,
        line_of={k: _key_line(text, k) for k in ("scenario", "algorithms", "algorithm", "eps")},
    )


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", None, str(path)) from None
    return parse_config(text, str(path))
