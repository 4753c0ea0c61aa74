"""Named instances and experiment presets."""

from __future__ import annotations

from typing import Callable

from ..instances import appendix_e, easy_observation, parallel_lower_bound, pe_lower_bound
from ..model import CausalModel
from .config import ConfigError, ExperimentSpec

INSTANCES: dict[str, Callable[[], CausalModel]] = {
    "appendix-e": appendix_e,
    "appendix-e-small": appendix_e,
    "pe-lower-bound": lambda: pe_lower_bound(4, 0.05, 2),
    "easy-observation": easy_observation,
    "parallel-lower-bound": lambda: parallel_lower_bound(3, 0.1, 1),
}

_APPENDIX_E = dict(
    preset="appendix-e",
    algorithms=["bglm-ofu-unknown", "blm-lr-unknown", "ucb", "eps-greedy"],
    horizons=[10_000, 20_000, 40_000, 80_000],
    runs=50,
    rho_scale=0.1,
    c0=0.1,
    c1=0.1,
    scope="y-only",
    skip_second_init=True,
)

EXPERIMENTS: dict[str, dict] = {
    "appendix-e": _APPENDIX_E,
    "appendix-e-small": {**_APPENDIX_E, "preset": "appendix-e-small", "horizons": [10_000, 20_000], "runs": 20},
}


def instance(name: str) -> CausalModel:
    try:
        return INSTANCES[name]()
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(INSTANCES)}") from None


def experiment(name: str, **overrides) -> ExperimentSpec:
    try:
        base = dict(EXPERIMENTS[name])
    except KeyError:
        raise ConfigError(f"unknown experiment preset {name!r}; choose from {sorted(EXPERIMENTS)}") from None
    base.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentSpec.from_dict(base)
