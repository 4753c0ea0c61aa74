"""Model files and experiment specs as YAML.

A model file looks like::

    nodes: [X1, X2, X3, Y]          # topological order, constant node first
    edges:
      - [X1, X2, 0.4]               # parent, child, weight
      - [X2, Y, 0.5]
    links:                          # optional, identity by default
      Y: {kind: logistic, scale: 2.0, offset: -1.0}
    noise:                          # optional, zero by default
      X2: {kind: uniform, width: 0.05}
    continuous: false

Tabulated nodes use ``{kind: table, rows: {"00": 0.1, "01": 0.4, ...}}`` with
one row per parent pattern (first listed parent is the leftmost bit); their
edge weights are ignored.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any

import yaml

from ..links import link_from_config, link_to_config
from ..model import CausalModel, NoiseSpec
from ..regret import ALGORITHMS


class ConfigError(ValueError):
    """Malformed or inconsistent configuration."""


def model_from_dict(data: dict[str, Any]) -> CausalModel:
    if not isinstance(data, dict):
        raise ConfigError("model config must be a mapping")
    unknown = set(data) - {"nodes", "edges", "links", "noise", "continuous"}
    if unknown:
        raise ConfigError(f"unknown model keys: {sorted(unknown)}")
    try:
        nodes = [str(n) for n in data["nodes"]]
        edges = []
        for e in data.get("edges") or []:
            if len(e) not in (2, 3):
                raise ConfigError(f"edge {e!r} must be [parent, child, weight]")
            edges.append((str(e[0]), str(e[1]), float(e[2]) if len(e) == 3 else 1.0))
        links = {str(k): link_from_config(v) for k, v in (data.get("links") or {}).items()}
        noise = {}
        for k, v in (data.get("noise") or {}).items():
            if isinstance(v, (int, float)):
                noise[str(k)] = NoiseSpec.uniform(float(v))
            else:
                noise[str(k)] = NoiseSpec(v.get("kind", "uniform"), float(v.get("width", 0.0)))
        return CausalModel.from_edges(nodes, edges, links=links, noise=noise, continuous=bool(data.get("continuous", False)))
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid model: {exc}") from exc


def model_to_dict(model: CausalModel) -> dict[str, Any]:
    edges = []
    for j in range(model.N):
        tab = model.links[j].kind == "tabulated"
        for k, p in enumerate(model.parents[j]):
            w = 1.0 if tab else model.weights[j][k]
            edges.append([model.nodes[p], model.nodes[j], float(w)])
    out: dict[str, Any] = {"nodes": list(model.nodes), "edges": edges}
    links = {model.nodes[j]: link_to_config(model.links[j]) for j in range(1, model.N) if model.links[j].kind != "identity"}
    if links:
        out["links"] = links
    noise = {model.nodes[j]: {"kind": ns.kind, "width": ns.width} for j, ns in enumerate(model.noise) if ns.width > 0}
    if noise:
        out["noise"] = noise
    if model.continuous:
        out["continuous"] = True
    return out


def load_model(path: str | Path) -> CausalModel:
    try:
        data = yaml.safe_load(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read model file: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed model file: {exc}") from exc
    return model_from_dict(data)


def dump_model(model: CausalModel, path: str | Path) -> None:
    Path(path).write_text(yaml.safe_dump(model_to_dict(model), sort_keys=False, default_flow_style=None))


@dataclass
class ExperimentSpec:
    """One regret experiment: every algorithm at every horizon, ``runs`` times."""

    preset: str | None = "appendix-e"
    model_file: str | None = None
    algorithms: list[str] = field(default_factory=lambda: ["bglm-ofu-unknown", "blm-lr-unknown", "ucb", "eps-greedy"])
    horizons: list[int] = field(default_factory=lambda: [10_000])
    runs: int = 50
    seed: int = 0
    rho_scale: float = 1.0
    c0: float = 0.1
    c1: float = 0.1
    scope: str = "all"
    skip_second_init: bool = False
    action_budget: int = 2
    epsilon: float = 0.02
    trace_stride: int = 100
    out: str = "results"

    def validate(self) -> None:
        if (self.preset is None) == (self.model_file is None):
            raise ConfigError("give exactly one of preset and model_file")
        if self.runs < 1:
            raise ConfigError("runs must be at least 1")
        if not self.horizons or any(int(T) < 1 for T in self.horizons):
            raise ConfigError("horizons must be positive")
        if not self.algorithms:
            raise ConfigError("at least one algorithm is required")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise ConfigError(f"unknown algorithm {a!r}")
        if len(set(self.algorithms)) != len(self.algorithms) or len(set(self.horizons)) != len(self.horizons):
            raise ConfigError("duplicate algorithm or horizon")
        if self.scope not in ("all", "y-only"):
            raise ConfigError("scope must be 'all' or 'y-only'")
        if self.trace_stride < 1:
            raise ConfigError("trace_stride must be at least 1")
        for name in ("rho_scale", "c0", "c1", "epsilon"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ConfigError(f"{name} must be a finite non-negative number")

    def as_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ExperimentSpec":
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ConfigError(f"unknown spec keys: {sorted(unknown)}")
        spec = cls(**data)
        spec.horizons = [int(T) for T in spec.horizons]
        spec.validate()
        return spec


def load_spec(path: str | Path) -> ExperimentSpec:
    try:
        data = yaml.safe_load(Path(path).read_text()) or {}
    except OSError as exc:
        raise ConfigError(f"cannot read spec file: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed spec file: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("spec file must be a mapping")
    return ExperimentSpec.from_dict(data)
