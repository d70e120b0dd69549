"""Scenario configuration: a documented JSON file with four sections.

::

    {
      "model":  {"zoo": "<name>", "params": {...}}            # or
                {"table": {"dim":1, "beta":[...], "a":[...],
                           "s":[...], "rates":[[...]]}},
      "sim":    {"T": 1.0, "dt": 0.001, "K": null, "seed": 123456789,
                 "scheme": "event_driven_exact", "replicas": 10000,
                 "threads": 1},
      "task":   {... subcommand-specific keys ...},
      "output": {"dir": "out", "reports": "reports.jsonl",
                 "trajectory": null, "trajectory_binary": null,
                 "plot_data": null}
    }

Zoo params per model: ``switching_ou`` takes dim/beta/a/s/rates,
``degenerate_regime`` takes dim, ``birth_death_switch`` takes
dim/sigma_scale, ``nonlipschitz_log`` takes nothing. A ``table`` model is a
regime-wise linear coefficient table (same semantics as switching_ou with an
explicit rate matrix).

Unknown keys anywhere are rejected. The seed defaults to the fixed constant
``DEFAULT_SEED`` -- never the wall clock -- and the canonical sha256 hash of
the parsed config is stamped into every output record.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from .engine import DEFAULT_SEED, SCHEMES, SimConfig
from .errors import ConfigError
from .models import ModelSpec, linear_switching_model, zoo

_TOP_KEYS = {"model", "sim", "task", "output"}
_MODEL_KEYS = {"zoo", "params", "table"}
_TABLE_KEYS = {"dim", "beta", "a", "s", "rates"}
_SIM_KEYS = {"T", "dt", "K", "seed", "scheme", "replicas", "threads"}
_OUTPUT_KEYS = {"dir", "reports", "trajectory", "trajectory_binary", "plot_data"}

TASK_KEYS = {
    "simulate": {"x0", "i0"},
    "jump-lipschitz": {"cases", "i_max", "p_values", "dim"},
    "moments": {"x0", "i0", "T_values", "c1"},
    "holding": {"x0", "k_values", "K_values", "t_grid"},
    "harnack": {"cases", "T_values", "x_radius", "min_pass_rate"},
    "feller": {"x0", "i0", "t", "radii", "f", "mode", "floor"},
    "chain-marginal": {"times", "starts", "min_fraction"},
    "truncation-check": {"x0", "i0", "K_values", "t", "compare_cases"},
}

_ZOO_PARAM_KEYS = {
    "switching_ou": {"dim", "beta", "a", "s", "rates"},
    "degenerate_regime": {"dim"},
    "birth_death_switch": {"dim", "sigma_scale"},
    "nonlipschitz_log": set(),
}


def _reject_unknown(section: dict, allowed: set, where: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown keys {sorted(unknown)} in {where}; "
                          f"allowed: {sorted(allowed)}")


@dataclass(frozen=True)
class ScenarioConfig:
    model: dict = field(default_factory=dict)
    sim: dict = field(default_factory=dict)
    task: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"model": self.model, "sim": self.sim,
                "task": self.task, "output": self.output}


def parse_config(text: str) -> ScenarioConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    _reject_unknown(raw, _TOP_KEYS, "top level")
    model = raw.get("model", {})
    sim = raw.get("sim", {})
    output = raw.get("output", {})
    _reject_unknown(model, _MODEL_KEYS, "model")
    _reject_unknown(sim, _SIM_KEYS, "sim")
    _reject_unknown(output, _OUTPUT_KEYS, "output")
    if "zoo" in model and "table" in model:
        raise ConfigError("model: give either 'zoo' or 'table', not both")
    if "zoo" in model:
        name = model["zoo"]
        if name not in _ZOO_PARAM_KEYS:
            raise ConfigError(f"unknown zoo model {name!r}")
        _reject_unknown(model.get("params", {}), _ZOO_PARAM_KEYS[name],
                        f"model.params for {name}")
    if "table" in model:
        _reject_unknown(model["table"], _TABLE_KEYS, "model.table")
    if "scheme" in sim and sim["scheme"] not in SCHEMES:
        raise ConfigError(f"sim.scheme must be one of {SCHEMES}")
    return ScenarioConfig(model=model, sim=sim,
                          task=raw.get("task", {}), output=output)


def load_config(path) -> ScenarioConfig:
    with open(path) as fh:
        return parse_config(fh.read())


def render_config(cfg: ScenarioConfig) -> str:
    return json.dumps(cfg.as_dict(), sort_keys=True, indent=2) + "\n"


def config_hash(cfg: ScenarioConfig) -> str:
    canon = json.dumps(cfg.as_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def validate_task(cfg: ScenarioConfig, subcommand: str) -> dict:
    if subcommand not in TASK_KEYS:
        raise ConfigError(f"unknown subcommand {subcommand!r}")
    _reject_unknown(cfg.task, TASK_KEYS[subcommand], f"task ({subcommand})")
    return cfg.task


def build_model(cfg: ScenarioConfig) -> ModelSpec:
    model = cfg.model
    if "table" in model:
        t = dict(model["table"])
        try:
            return linear_switching_model(
                dim=t.get("dim", 1), beta=t.get("beta", (1.0,)),
                a=t.get("a", (0.0,) * len(t.get("beta", (1.0,)))),
                s=t.get("s", (1.0,) * len(t.get("beta", (1.0,)))),
                rates=t.get("rates"), model_id="table")
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"bad coefficient table: {exc}") from None
    name = model.get("zoo")
    if not name:
        raise ConfigError("model section needs 'zoo' or 'table'")
    try:
        return zoo(name, **model.get("params", {}))
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad model: {exc}") from None


def build_sim(cfg: ScenarioConfig, *, seed=None, replicas=None, dt=None,
              threads=None) -> SimConfig:
    sim = cfg.sim
    try:
        return SimConfig(
            horizon=float(sim.get("T", 1.0)),
            dt=float(dt if dt is not None else sim.get("dt", 1e-3)),
            truncation=sim.get("K"),
            seed=int(seed if seed is not None else sim.get("seed", DEFAULT_SEED)),
            scheme=sim.get("scheme", "frozen_rate"),
            replicas=int(replicas if replicas is not None
                         else sim.get("replicas", 10_000)),
            threads=int(threads if threads is not None
                        else sim.get("threads", 1)),
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad sim section: {exc}") from None
